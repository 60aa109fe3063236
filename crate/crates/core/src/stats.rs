//! Log-log slope fits.

use alloc::vec::Vec;

use crate::math::ln;

/// Least-squares line `y = a + b·x`; returns `(b, a)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for i in 0..n {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let b = sxy / sxx;
    Some((b, my - b * mx))
}

/// Slope of `ln y` against `ln x`. Non-positive pairs are skipped; with
/// `drop_coarsest` the pair with the largest `x` is discarded first.
pub fn loglog_slope(xs: &[f64], ys: &[f64], drop_coarsest: bool) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(&x, &y)| (x, y)).collect();
    if drop_coarsest && pts.len() > 2 {
        let k = (0..pts.len()).fold(0, |b, i| if pts[i].0 > pts[b].0 { i } else { b });
        pts.remove(k);
    }
    let pts: Vec<(f64, f64)> = pts.into_iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).collect();
    let lx: Vec<f64> = pts.iter().map(|p| ln(p.0)).collect();
    let ly: Vec<f64> = pts.iter().map(|p| ln(p.1)).collect();
    least_squares(&lx, &ly).map(|(b, _)| b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let xs = [0.1, 0.05, 0.025, 0.0125];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x).collect();
        assert!((loglog_slope(&xs, &ys, false).unwrap() - 2.0).abs() < 1e-12);
        assert!((loglog_slope(&xs, &ys, true).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coarsest_point_is_dropped() {
        let xs = [1.0, 0.5, 0.25];
        let ys = [100.0, 0.5, 0.25];
        assert!((loglog_slope(&xs, &ys, true).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        assert!(loglog_slope(&[1.0], &[1.0], false).is_none());
    }
}
