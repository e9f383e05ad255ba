//! Simple continued fractions of doubles.

/// Convergents `p/q` of the continued-fraction expansion of `x`, in order of
/// increasing denominator, stopping before the first denominator above
/// `max_den`.
pub fn convergents(x: f64, max_den: u64) -> Vec<(i128, i128)> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut h_prev, mut h) = (0i128, 1i128);
    let (mut k_prev, mut k) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..96 {
        let a = r.floor();
        if a.abs() > 1e30 {
            break;
        }
        let ai = a as i128;
        let (Some(hn), Some(kn)) = (
            ai.checked_mul(h).and_then(|v| v.checked_add(h_prev)),
            ai.checked_mul(k).and_then(|v| v.checked_add(k_prev)),
        ) else {
            break;
        };
        if kn > max_den as i128 {
            break;
        }
        out.push((hn, kn));
        h_prev = h;
        h = hn;
        k_prev = k;
        k = kn;
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    out
}

/// The convergent closest to `x` among those with denominator at most `max_den`.
pub fn best_convergent(x: f64, max_den: u64) -> Option<(i128, i128)> {
    convergents(x, max_den).into_iter().min_by(|a, b| {
        let ea = (x - a.0 as f64 / a.1 as f64).abs();
        let eb = (x - b.0 as f64 / b.1 as f64).abs();
        ea.total_cmp(&eb).then(a.1.cmp(&b.1))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminates_on_dyadic() {
        assert_eq!(convergents(0.25, 100), vec![(0, 1), (1, 4)]);
        assert_eq!(convergents(3.0, 100), vec![(3, 1)]);
    }

    #[test]
    fn golden_ratio_gives_fibonacci() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let c = convergents(phi, 100);
        let dens: Vec<i128> = c.iter().map(|p| p.1).collect();
        assert_eq!(dens, vec![1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
    }

    #[test]
    fn negative_values() {
        assert_eq!(best_convergent(-0.5, 10), Some((-1, 2)));
    }
}
