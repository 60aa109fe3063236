use super::Eigen;
use crate::error::{Error, Result};
use crate::math::bisect;
use crate::state::{Mat, State, MAX_DIM};

/// Characteristic polynomial coefficients (lowest degree first) by Faddeev-LeVerrier.
fn char_poly(a: &Mat) -> [f64; MAX_DIM + 2] {
    let n = a.dim();
    let mut c = [0.0; MAX_DIM + 2];
    c[n] = 1.0;
    let mut m = Mat::zeros(n);
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        let mut next = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += a.get(i, l) * m.get(l, j);
                }
                if i == j {
                    acc += c[n - k + 1];
                }
                next.set(i, j, acc);
            }
        }
        m = next;
        let mut tr = 0.0;
        for i in 0..n {
            for l in 0..n {
                tr += a.get(i, l) * m.get(l, i);
            }
        }
        c[n - k] = -tr / k as f64;
    }
    c
}

fn transpose(a: &Mat) -> Mat {
    let n = a.dim();
    let mut t = Mat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            t.set(i, j, a.get(j, i));
        }
    }
    t
}

fn inverse_iteration(a: &Mat, lambda: f64, scale: f64) -> Option<State> {
    let n = a.dim();
    let shift = lambda + 1e-9 * scale;
    let mut m = *a;
    for i in 0..n {
        m.set(i, i, a.get(i, i) - shift);
    }
    let mut x = State::zeros(n);
    for i in 0..n {
        x[i] = 1.0 / (1.0 + i as f64);
    }
    for _ in 0..3 {
        let y = m.solve(&x)?;
        x = y * (1.0 / y.norm());
    }
    Some(x)
}

/// Real, distinct, sorted eigenvalues of a small matrix with eigenvectors,
/// via the characteristic polynomial and inverse iteration.
pub fn eigen_from_jacobian(a: &Mat) -> Result<Eigen> {
    let n = a.dim();
    let c = char_poly(a);
    let p = |x: f64| (0..=n).rev().fold(0.0, |acc, i| acc * x + c[i]);
    let bound = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j).abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1e-9;
    let scale = bound.max(1e-300);
    let mut roots = [0.0; MAX_DIM];
    let mut found = 0;
    if n == 1 {
        roots[0] = a.get(0, 0);
        found = 1;
    } else {
        let samples = 20_000;
        let h = 2.0 * bound / samples as f64;
        let mut x0 = -bound;
        let mut p0 = p(x0);
        for k in 1..=samples {
            let x1 = -bound + h * k as f64;
            let p1 = p(x1);
            if p0 == 0.0 || p0 * p1 < 0.0 {
                if found == n {
                    return Err(Error::NotHyperbolic);
                }
                roots[found] = if p0 == 0.0 { x0 } else { bisect(p, x0, x1) };
                found += 1;
            }
            x0 = x1;
            p0 = p1;
        }
    }
    if found != n {
        return Err(Error::NotHyperbolic);
    }
    let at = transpose(a);
    let mut e = Eigen {
        lambda: State::from_slice(&roots[..n]),
        r: [State::zeros(n); MAX_DIM],
        l: [State::zeros(n); MAX_DIM],
    };
    for j in 0..n {
        e.r[j] = inverse_iteration(a, roots[j], scale).ok_or(Error::NotHyperbolic)?;
        e.l[j] = inverse_iteration(&at, roots[j], scale).ok_or(Error::NotHyperbolic)?;
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_three_by_three() {
        // eigenvalues of [[2,1,0],[1,2,1],[0,1,2]] are 2−√2, 2, 2+√2
        let a = Mat::from_rows(&[&[2.0, 1.0, 0.0], &[1.0, 2.0, 1.0], &[0.0, 1.0, 2.0]]);
        let e = eigen_from_jacobian(&a).unwrap();
        let s = 2f64.sqrt();
        let expect = [2.0 - s, 2.0, 2.0 + s];
        for j in 0..3 {
            assert!((e.lambda[j] - expect[j]).abs() < 1e-12);
            let res = a.mul_vec(&e.r[j]) - e.r[j] * e.lambda[j];
            assert!(res.norm() < 1e-10);
        }
    }

    #[test]
    fn complex_eigenvalues_rejected() {
        let a = Mat::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        assert_eq!(eigen_from_jacobian(&a).unwrap_err(), Error::NotHyperbolic);
    }
}
