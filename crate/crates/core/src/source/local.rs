use alloc::string::String;
use alloc::vec::Vec;

use super::{check_dim, PointMap, SourceConstants, SourceKind, SourceOp};
use crate::error::{Error, Result};
use crate::pcfn::{Field, PcFn};
use crate::state::State;
use crate::system::box_samples;

/// Local source `G(u)(x) = g(x, u(x))` with `g` piecewise in `x`: `maps[k]`
/// acts between `boundaries[k−1]` and `boundaries[k]`. The finite measure
/// bounding the variation in `x` is a sum of atoms at the boundaries.
#[derive(Clone)]
pub struct LocalSource {
    name: String,
    dim: usize,
    boundaries: Vec<f64>,
    maps: Vec<PointMap>,
    l1: f64,
    atoms: Vec<f64>,
}

impl core::fmt::Debug for LocalSource {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("LocalSource")
            .field("name", &self.name)
            .field("boundaries", &self.boundaries)
            .field("l1", &self.l1)
            .field("atoms", &self.atoms)
            .finish()
    }
}

impl LocalSource {
    /// Build and check the declared bounds on samples of the box `omega`.
    pub fn new(
        name: &str,
        boundaries: Vec<f64>,
        maps: Vec<PointMap>,
        l1: f64,
        atoms: Vec<f64>,
        omega: &State,
    ) -> Result<Self> {
        let dim = omega.len();
        if maps.len() != boundaries.len() + 1 || atoms.len() != boundaries.len() {
            return Err(Error::InvalidParameter(String::from(
                "need one map per region and one atom per boundary",
            )));
        }
        if boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(String::from(
                "region boundaries must increase",
            )));
        }
        let zero = State::zeros(dim);
        if !maps[0](&zero).is_zero() || !maps[maps.len() - 1](&zero).is_zero() {
            return Err(Error::InvalidParameter(String::from(
                "outer regions need g(x, 0) = 0",
            )));
        }
        let samples = box_samples(omega, 64);
        for map in &maps {
            for p in samples.windows(2) {
                let d = (p[1] - p[0]).norm();
                let q = (map(&p[1]) - map(&p[0])).norm() / d;
                if q > l1 * (1.0 + 1e-9) + 1e-12 {
                    return Err(Error::ConstantViolated {
                        name: "L1",
                        measured: q,
                        declared: l1,
                    });
                }
            }
        }
        for (k, atom) in atoms.iter().enumerate() {
            for u in &samples {
                let jump = (maps[k + 1](u) - maps[k](u)).norm();
                if jump > atom * (1.0 + 1e-9) + 1e-12 {
                    return Err(Error::ConstantViolated {
                        name: "mu",
                        measured: jump,
                        declared: *atom,
                    });
                }
            }
        }
        Ok(LocalSource {
            name: String::from(name),
            dim,
            boundaries,
            maps,
            l1,
            atoms,
        })
    }

    /// Total mass of the measure, `μ(R)`.
    pub fn mu_total(&self) -> f64 {
        self.atoms.iter().sum()
    }
}

impl SourceOp for LocalSource {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn kind(&self) -> SourceKind {
        SourceKind::Local
    }
    fn constants(&self) -> SourceConstants {
        SourceConstants {
            l1: self.l1,
            l2: self.l1,
            l3: self.mu_total(),
        }
    }
    fn apply(&self, u: &PcFn) -> Result<Field> {
        check_dim(self.dim, u)?;
        let region = |x: f64| self.boundaries.partition_point(|&b| b <= x);
        let mut pts: Vec<f64> = u
            .breaks()
            .iter()
            .chain(self.boundaries.iter())
            .copied()
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut values = Vec::with_capacity(pts.len() + 1);
        values.push(self.maps[0](&u.values()[0]));
        for (k, &a) in pts.iter().enumerate() {
            let mid = match pts.get(k + 1) {
                Some(&b) => 0.5 * (a + b),
                None => a + 1.0,
            };
            values.push(self.maps[region(mid)](&u.eval(mid)));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::OutsideDomain);
        }
        Ok(Field::from_local(PcFn::new(self.dim, pts, values)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::sync::Arc;

    fn switch_on() -> LocalSource {
        let off: PointMap = Arc::new(|u: &State| *u * 0.0);
        let on: PointMap = Arc::new(|u: &State| *u);
        LocalSource::new(
            "switch",
            alloc::vec![0.0],
            alloc::vec![off, on],
            1.0,
            alloc::vec![1.0],
            &State::scalar(1.0),
        )
        .unwrap()
    }

    #[test]
    fn unit_atom_at_origin() {
        let s = switch_on();
        assert_eq!(
            s.constants(),
            SourceConstants {
                l1: 1.0,
                l2: 1.0,
                l3: 1.0
            }
        );
        let u = PcFn::indicator(-1.0, 1.0, State::scalar(0.5)).unwrap();
        let g = s.apply(&u).unwrap();
        assert_eq!(g.local.breaks(), &[0.0, 1.0]);
        assert!(g.tv() <= s.constants().l2 * u.tv() + s.constants().l3);
    }

    #[test]
    fn understated_atom_rejected() {
        let off: PointMap = Arc::new(|u: &State| *u * 0.0);
        let on: PointMap = Arc::new(|u: &State| *u);
        let r = LocalSource::new(
            "bad",
            alloc::vec![0.0],
            alloc::vec![off, on],
            1.0,
            alloc::vec![0.5],
            &State::scalar(1.0),
        );
        assert!(matches!(r, Err(Error::ConstantViolated { name: "mu", .. })));
    }

    #[test]
    fn x_independent_map_has_no_measure() {
        let g: PointMap = Arc::new(|u: &State| *u * -2.0);
        let s = LocalSource::new(
            "plain",
            Vec::new(),
            alloc::vec![g],
            2.0,
            Vec::new(),
            &State::scalar(1.0),
        )
        .unwrap();
        assert_eq!(s.constants().l3, 0.0);
    }
}
