//! Cayley balls, growth classification, separation statistics, Assouad
//! slope estimates and the discreteness probe.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::matrix::Matrix;
use crate::numeric;
use crate::scalar::{Complex64, Mode, Scalar};

pub const DEFAULT_DEPTH: usize = 8;
pub const DEFAULT_CAP: usize = 200_000;
pub const DEFAULT_WINDOW: usize = 5;

/// Letters index the symmetric generating set of a [`GroupSpec`].
pub type Word = Vec<usize>;

#[derive(Clone, Debug, PartialEq)]
pub struct BallElement<T: Scalar> {
    pub matrix: Matrix<T>,
    pub word: Word,
}

/// Elements of word length at most `depth`, in breadth-first order. Each
/// element carries its lexicographically least shortest word.
#[derive(Clone, Debug)]
pub struct Ball<T: Scalar> {
    pub depth: usize,
    pub elements: Vec<BallElement<T>>,
    /// `sizes[m]` is the number of elements of length at most `m`, for every
    /// completed level.
    pub sizes: Vec<usize>,
    pub truncated: bool,
    /// The last level added nothing: the whole group has been enumerated.
    pub closed: bool,
    /// Largest entrywise distance between two products merged as equal.
    pub max_merged_distance: f64,
}

impl<T: Scalar> Ball<T> {
    /// Deepest fully enumerated level.
    pub fn completed_depth(&self) -> usize {
        self.sizes.len() - 1
    }

    /// Elements of length at most `m`.
    pub fn up_to(&self, m: usize) -> &[BallElement<T>] {
        &self.elements[..self.sizes[m.min(self.completed_depth())]]
    }

    pub fn matrices_up_to(&self, m: usize) -> Vec<Matrix<T>> {
        self.up_to(m).iter().map(|e| e.matrix.clone()).collect()
    }
}

struct KeyIndex<T: Scalar> {
    map: HashMap<Vec<T::Key>, usize>,
    pitch: f64,
}

impl<T: Scalar> KeyIndex<T> {
    fn find(&self, m: &Matrix<T>, primary: &[T::Key]) -> Option<usize> {
        if let Some(&i) = self.map.get(primary) {
            return Some(i);
        }
        if T::MODE == Mode::Exact {
            return None;
        }
        let variants: Vec<Vec<T::Key>> = m.data().iter().map(|x| x.key_variants(self.pitch)).collect();
        let combos: usize = variants.iter().map(Vec::len).product();
        if combos == 1 {
            return None;
        }
        let mut idx = vec![0usize; variants.len()];
        for _ in 0..combos.min(256) {
            let key: Vec<T::Key> = idx.iter().zip(&variants).map(|(&i, v)| v[i].clone()).collect();
            if let Some(&hit) = self.map.get(&key) {
                return Some(hit);
            }
            for (slot, v) in idx.iter_mut().zip(&variants) {
                *slot += 1;
                if *slot < v.len() {
                    break;
                }
                *slot = 0;
            }
        }
        None
    }
}

/// Breadth-first enumeration of the ball of radius `depth`, stopping once
/// `cap` elements are stored. Float entries are deduplicated on a grid of
/// pitch equal to the group tolerance.
pub fn enumerate_ball<T: Scalar>(spec: &GroupSpec<T>, depth: usize, cap: usize) -> Ball<T> {
    let pitch = spec.tolerance();
    let gens = spec.symmetric();
    let identity = spec.identity();
    let mut index = KeyIndex::<T> { map: HashMap::new(), pitch };
    index.map.insert(identity.key(pitch), 0);
    let mut elements = vec![BallElement { matrix: identity, word: Vec::new() }];
    let mut sizes = vec![1];
    let mut frontier = 0..1;
    let mut truncated = false;
    let mut closed = false;
    let mut max_merged = 0.0f64;
    for _level in 1..=depth {
        let candidates: Vec<(Matrix<T>, Vec<T::Key>, usize, usize)> = elements[frontier.clone()]
            .par_iter()
            .enumerate()
            .flat_map_iter(|(off, e)| {
                gens.iter().enumerate().map(move |(l, g)| {
                    let m = e.matrix.mul(g);
                    let k = m.key(pitch);
                    (m, k, off, l)
                })
            })
            .collect();
        let start = elements.len();
        for (m, key, off, l) in candidates {
            if let Some(existing) = index.find(&m, &key) {
                if T::MODE == Mode::Float {
                    max_merged = max_merged.max(m.sub(&elements[existing].matrix).max_abs());
                }
                continue;
            }
            if elements.len() >= cap {
                truncated = true;
                break;
            }
            let mut word = elements[frontier.start + off].word.clone();
            word.push(l);
            index.map.insert(key, elements.len());
            elements.push(BallElement { matrix: m, word });
        }
        if truncated {
            elements.truncate(start);
            break;
        }
        if elements.len() == start {
            closed = true;
            while sizes.len() <= depth {
                sizes.push(start);
            }
            break;
        }
        sizes.push(elements.len());
        frontier = start..elements.len();
    }
    Ball { depth, elements, sizes, truncated, closed, max_merged_distance: max_merged }
}

/// Least-squares line `y = slope * x + intercept` and its residual sum of squares.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    (slope, intercept, rss)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum GrowthTag {
    Finite,
    Polynomial { degree: f64 },
    Exponential { base: f64 },
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthClass {
    pub tag: GrowthTag,
    pub first_depth: usize,
    pub last_depth: usize,
    /// Slope of `ln |S_m|` against `m`.
    pub exponential_slope: f64,
    pub exponential_rss: f64,
    /// Slope of `ln |S_m|` against `ln m`.
    pub polynomial_slope: f64,
    pub polynomial_rss: f64,
}

/// Relative residual margin one model must win by.
const GROWTH_MARGIN: f64 = 0.8;
/// Smallest base accepted as exponential.
const MIN_EXPONENTIAL_BASE: f64 = 1.05;

/// Classifies growth from ball sizes over the last `window` depths.
pub fn growth_profile(sizes: &[usize], window: usize) -> Result<GrowthClass> {
    if window < 4 {
        return Err(Error::Precondition("growth window must be at least 4".into()));
    }
    let last = sizes.len().checked_sub(1).ok_or_else(|| Error::Precondition("no ball sizes".into()))?;
    if last >= 1 && sizes[last] == sizes[last - 1] {
        return Ok(GrowthClass {
            tag: GrowthTag::Finite,
            first_depth: last - 1,
            last_depth: last,
            exponential_slope: 0.0,
            exponential_rss: 0.0,
            polynomial_slope: 0.0,
            polynomial_rss: 0.0,
        });
    }
    if last < window {
        return Err(Error::Precondition(format!("need sizes up to depth {window}, have {last}")));
    }
    let first = last + 1 - window;
    let ms: Vec<f64> = (first..=last).map(|m| m as f64).collect();
    let logs: Vec<f64> = (first..=last).map(|m| (sizes[m] as f64).ln()).collect();
    let log_ms: Vec<f64> = ms.iter().map(|m| m.ln()).collect();
    let (es, _, erss) = fit_line(&ms, &logs);
    let (ps, _, prss) = fit_line(&log_ms, &logs);
    let base = es.exp();
    let tag = if erss < GROWTH_MARGIN * prss && base > MIN_EXPONENTIAL_BASE {
        GrowthTag::Exponential { base }
    } else if prss < GROWTH_MARGIN * erss {
        GrowthTag::Polynomial { degree: ps }
    } else {
        GrowthTag::Indeterminate
    };
    Ok(GrowthClass {
        tag,
        first_depth: first,
        last_depth: last,
        exponential_slope: es,
        exponential_rss: erss,
        polynomial_slope: ps,
        polynomial_rss: prss,
    })
}

/// [`growth_profile`] on a ball, refusing truncated enumerations.
pub fn ball_growth<T: Scalar>(ball: &Ball<T>, window: usize) -> Result<GrowthClass> {
    if ball.truncated {
        return Err(Error::Truncated(format!(
            "ball truncated after depth {} with {} elements",
            ball.completed_depth(),
            ball.elements.len()
        )));
    }
    growth_profile(&ball.sizes, window)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationStats {
    pub count: usize,
    /// Largest pairwise operator-norm distance.
    pub diameter: f64,
    /// Smallest pairwise operator-norm distance.
    pub separation: f64,
    /// Largest operator norm of a symmetric generator.
    pub norm_bound: f64,
    /// Smallest `||g - I||` over non-identity elements of the set.
    pub separation_floor: Option<f64>,
}

impl SeparationStats {
    pub fn ratio(&self) -> f64 {
        self.diameter / self.separation
    }

    /// `(2 / D) * B^(2m)`, the bound on the diameter-to-separation ratio of
    /// the ball of radius `m` in a group with `||g - I|| >= D`.
    pub fn ratio_bound(&self, m: usize) -> Option<f64> {
        self.separation_floor.map(|d| 2.0 / d * self.norm_bound.powi(2 * m as i32))
    }
}

/// Pairwise distance statistics of a finite set of group elements.
pub fn separation_stats<T: Scalar>(elements: &[Matrix<T>], spec: &GroupSpec<T>) -> Result<SeparationStats> {
    if elements.len() < 2 {
        return Err(Error::Domain("separation statistics need at least two elements".into()));
    }
    let n = spec.n();
    let flat: Vec<Vec<Complex64>> = elements.iter().map(|m| m.data().iter().map(Scalar::to_c64).collect()).collect();
    let (separation, diameter) = (0..flat.len())
        .into_par_iter()
        .map(|i| {
            let mut buf = vec![Complex64::new(0.0, 0.0); n * n];
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            for j in i + 1..flat.len() {
                for (k, slot) in buf.iter_mut().enumerate() {
                    *slot = flat[i][k] - flat[j][k];
                }
                let d = numeric::operator_norm_flat(n, &buf);
                lo = lo.min(d);
                hi = hi.max(d);
            }
            (lo, hi)
        })
        .reduce(|| (f64::INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1)));
    let norm_bound = spec.symmetric().iter().map(numeric::operator_norm).fold(0.0, f64::max);
    Ok(SeparationStats {
        count: elements.len(),
        diameter,
        separation,
        norm_bound,
        separation_floor: identity_distance_floor(elements, spec),
    })
}

fn identity_distance_floor<T: Scalar>(elements: &[Matrix<T>], spec: &GroupSpec<T>) -> Option<f64> {
    let id = spec.identity();
    elements
        .iter()
        .filter(|m| !m.approx_eq(&id, spec.tol_for(m)))
        .map(|m| numeric::operator_norm(&m.sub(&id)))
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d))))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssouadEstimate {
    pub beta_hat: f64,
    pub slope: f64,
    pub degenerate: bool,
    /// `(ln(diameter / separation), ln count)` per input.
    pub points: Vec<(f64, f64)>,
}

/// Slope of `ln count` regressed on `ln(diameter / separation)`, clamped at 0.
pub fn assouad_lower_bound(stats: &[SeparationStats]) -> AssouadEstimate {
    let points: Vec<(f64, f64)> = stats
        .iter()
        .filter(|s| s.count >= 2 && s.separation > 0.0)
        .map(|s| (s.ratio().ln(), (s.count as f64).ln()))
        .collect();
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let spread = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - xs.iter().cloned().fold(f64::INFINITY, f64::min);
    if points.len() < 2 || !(spread > 1e-12) {
        return AssouadEstimate { beta_hat: 0.0, slope: 0.0, degenerate: true, points };
    }
    let (slope, _, _) = fit_line(&xs, &ys);
    AssouadEstimate { beta_hat: slope.max(0.0), slope, degenerate: false, points }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DiscretenessVerdict {
    SeparatedSoFar { lower_bound: f64 },
    ApproachingIdentity { word: Word, value: f64 },
    TrivialGroup,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretenessReport {
    /// `minima[m-1]` is the smallest `||g - I||` over non-identity elements
    /// of length at most `m`.
    pub minima: Vec<Option<f64>>,
    pub strict_decreases: usize,
    pub verdict: DiscretenessVerdict,
}

/// Number of strict decreases of the per-depth minima that counts as
/// evidence of accumulation at the identity.
const DECREASE_RUN: usize = 3;

/// Tracks how close non-identity ball elements come to the identity.
pub fn discreteness_probe<T: Scalar>(spec: &GroupSpec<T>, depth: usize, cap: usize) -> Result<DiscretenessReport> {
    if depth == 0 {
        return Err(Error::Precondition("discreteness probe needs depth >= 1".into()));
    }
    let ball = enumerate_ball(spec, depth, cap);
    Ok(discreteness_from_ball(spec, &ball))
}

pub fn discreteness_from_ball<T: Scalar>(spec: &GroupSpec<T>, ball: &Ball<T>) -> DiscretenessReport {
    let id = spec.identity();
    let mut minima = Vec::new();
    let mut best: Option<(f64, usize)> = None;
    let mut scanned = 1;
    for m in 1..=ball.completed_depth() {
        for (idx, e) in ball.elements.iter().enumerate().take(ball.sizes[m]).skip(scanned) {
            if e.matrix.approx_eq(&id, spec.tol_for(&e.matrix)) {
                continue;
            }
            let d = numeric::operator_norm(&e.matrix.sub(&id));
            if best.is_none_or(|(b, _)| d < b) {
                best = Some((d, idx));
            }
        }
        scanned = ball.sizes[m];
        minima.push(best.map(|b| b.0));
    }
    let strict_decreases = minima
        .windows(2)
        .filter(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if b < a))
        .count();
    let verdict = if ball.truncated {
        DiscretenessVerdict::Indeterminate
    } else {
        match best {
            None => DiscretenessVerdict::TrivialGroup,
            Some((value, idx)) => {
                let tiny = value < 10.0 * spec.tolerance() && strict_decreases >= 1;
                if strict_decreases >= DECREASE_RUN || tiny {
                    DiscretenessVerdict::ApproachingIdentity { word: ball.elements[idx].word.clone(), value }
                } else {
                    DiscretenessVerdict::SeparatedSoFar { lower_bound: value }
                }
            }
        }
    };
    DiscretenessReport { minima, strict_decreases, verdict }
}

/// One row of the per-depth table: `(m, |S_m|, diameter, separation, ratio)`.
pub fn ball_table<T: Scalar>(ball: &Ball<T>, spec: &GroupSpec<T>) -> Vec<(usize, usize, Option<SeparationStats>)> {
    (0..=ball.completed_depth())
        .map(|m| {
            let mats = ball.matrices_up_to(m);
            let stats = separation_stats(&mats, spec).ok();
            (m, mats.len(), stats)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational;

    type Q = GaussianRational;

    fn sanov() -> GroupSpec<Q> {
        GroupSpec::new(
            vec![Matrix::from_i64(&[&[1, 2], &[0, 1]]), Matrix::from_i64(&[&[1, 0], &[2, 1]])],
            1e-9,
        )
        .unwrap()
    }

    #[test]
    fn sanov_ball_depth_two() {
        let b = enumerate_ball(&sanov(), 2, DEFAULT_CAP);
        assert_eq!(b.sizes, vec![1, 5, 17]);
        assert!(!b.truncated && !b.closed);
    }

    #[test]
    fn cyclic_diagonal() {
        let g = GroupSpec::new(vec![Matrix::<Q>::diag(&[Q::from_i64(2)])], 1e-9).unwrap();
        let b = enumerate_ball(&g, 6, DEFAULT_CAP);
        assert_eq!(b.sizes, (0..=6).map(|m| 2 * m + 1).collect::<Vec<_>>());
    }

    #[test]
    fn identity_generator() {
        let g = GroupSpec::new(vec![Matrix::<Q>::identity(2)], 1e-9).unwrap();
        let b = enumerate_ball(&g, 5, DEFAULT_CAP);
        assert_eq!(b.sizes, vec![1; 6]);
        assert!(b.closed);
    }

    #[test]
    fn truncation_is_flagged() {
        let b = enumerate_ball(&sanov(), 5, 30);
        assert!(b.truncated);
        assert_eq!(b.sizes, vec![1, 5, 17]);
        assert!(matches!(ball_growth(&b, 4), Err(Error::Truncated(_))));
    }

    #[test]
    fn words_are_least_and_evaluate() {
        let g = sanov();
        let b = enumerate_ball(&g, 3, DEFAULT_CAP);
        for e in &b.elements {
            assert_eq!(g.eval_word(&e.word).unwrap(), e.matrix);
        }
        assert_eq!(b.elements[1].word, vec![0]);
    }

    #[test]
    fn growth_examples() {
        let lin: Vec<usize> = (0..=10).map(|m| 2 * m + 1).collect();
        match growth_profile(&lin, 5).unwrap().tag {
            GrowthTag::Polynomial { degree } => assert!((degree - 1.0).abs() <= 0.2),
            t => panic!("unexpected {t:?}"),
        }
        let free: Vec<usize> = (0..=8).map(|m| 2 * 3usize.pow(m) - 1).collect();
        match growth_profile(&free, 5).unwrap().tag {
            GrowthTag::Exponential { base } => assert!((base - 3.0).abs() <= 0.2),
            t => panic!("unexpected {t:?}"),
        }
        assert_eq!(growth_profile(&[8; 9], 5).unwrap().tag, GrowthTag::Finite);
        assert!(growth_profile(&free, 3).is_err());
    }

    #[test]
    fn separation_examples() {
        let g = GroupSpec::new(vec![Matrix::<Q>::identity(2)], 1e-9).unwrap();
        let two = vec![Matrix::<Q>::identity(2), Matrix::diag(&[Q::from_i64(2), Q::from_i64(2)])];
        let s = separation_stats(&two, &g).unwrap();
        assert!((s.diameter - 1.0).abs() < 1e-12 && (s.separation - 1.0).abs() < 1e-12);
        let g1 = GroupSpec::new(vec![Matrix::<Q>::diag(&[Q::from_i64(2)])], 1e-9).unwrap();
        let pts: Vec<Matrix<Q>> = [1, 2, 4].iter().map(|&v| Matrix::diag(&[Q::from_i64(v)])).collect();
        let s = separation_stats(&pts, &g1).unwrap();
        assert!((s.diameter - 3.0).abs() < 1e-12 && (s.separation - 1.0).abs() < 1e-12);
        assert!(separation_stats(&pts[..1], &g1).is_err());
    }

    #[test]
    fn constant_stats_are_degenerate() {
        let s = SeparationStats { count: 5, diameter: 2.0, separation: 1.0, norm_bound: 1.0, separation_floor: None };
        let est = assouad_lower_bound(&[s.clone(), s.clone(), s]);
        assert!(est.degenerate);
        assert_eq!(est.beta_hat, 0.0);
    }

    #[test]
    fn discreteness_examples() {
        let r = discreteness_probe(&sanov(), 4, DEFAULT_CAP).unwrap();
        match r.verdict {
            DiscretenessVerdict::SeparatedSoFar { lower_bound } => assert!(lower_bound >= 1.0),
            v => panic!("unexpected {v:?}"),
        }
        let g = GroupSpec::new(vec![Matrix::<Q>::identity(3)], 1e-9).unwrap();
        assert_eq!(discreteness_probe(&g, 3, DEFAULT_CAP).unwrap().verdict, DiscretenessVerdict::TrivialGroup);
    }
}
