//! Classification of finitely generated matrix groups over the complex
//! numbers into wild cases (a non-diagonalizable element, exponential
//! growth, independent moduli) and tame virtually diagonal ones with a
//! cyclic modulus group `lambda^Z`, each verdict carrying a certificate that
//! can be replayed independently.
//!
//! Everything below [`classify`] is generic over [`Scalar`], implemented for
//! exact Gaussian rationals and for floating complex numbers.

pub mod cayley;
pub mod classify;
pub mod contfrac;
pub mod error;
pub mod group;
pub mod intlattice;
pub mod matrix;
pub mod numeric;
pub mod poly;
pub mod scalar;
pub mod spectral;
pub mod structure;

pub use classify::{classify, classify_any, verify, Certificate, Classification, ClassifyConfig, Verdict};
pub use error::{Error, Result};
pub use group::{AnyGroup, GroupSpec};
pub use matrix::Matrix;
pub use poly::Polynomial;
pub use scalar::{Complex32, Complex64, GaussianRational, Mode, Scalar};

pub type ExactMatrix = Matrix<GaussianRational>;
pub type FloatMatrix = Matrix<Complex64>;
pub type FloatMatrix32 = Matrix<Complex32>;
pub type ExactPolynomial = Polynomial<GaussianRational>;
pub type ExactGroup = GroupSpec<GaussianRational>;
pub type FloatGroup = GroupSpec<Complex64>;
