//! Euclidean projections onto boxes and polytopes.

use crate::error::{mismatch, Error, Result};
use crate::matkit::{dot, norm2, sym_extremes, Mat};
use crate::scalar::Scalar;

const DIVERGENCE_GUARD: f64 = 1e12;
const DUAL_TOL: f64 = 1e-10;
const MAX_DUAL_ITERS: usize = 200_000;

/// Componentwise clamp of `y` to `[lo, hi]`.
pub fn project_box<T: Scalar>(y: &[T], lo: &[T], hi: &[T]) -> Vec<T> {
    y.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&v, (&l, &h))| v.max(l).min(h))
        .collect()
}

/// One-off projection of `y` onto `{v : Gv ≤ b}` by dual FGM, stopping at
/// dual gradient-map norm `tol·(1 + ‖y‖)`.
pub fn project_polytope<T: Scalar>(y: &[T], g: &Mat<T>, b: &[T], tol: T) -> Result<Vec<T>> {
    PolytopeProjector::new(g)?.with_tolerance(tol).project(y, b)
}

/// Row structure of a constraint matrix whose rows each touch one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxStructure<T: Scalar> {
    /// For each row, `Some((column, coefficient))` or `None` for a zero row.
    rows: Vec<Option<(usize, T)>>,
    dim: usize,
}

impl<T: Scalar> BoxStructure<T> {
    /// Fails with `NotABox` if some row has two or more nonzeros.
    pub fn new(g: &Mat<T>) -> Result<Self> {
        let mut rows = Vec::with_capacity(g.rows());
        for i in 0..g.rows() {
            let mut hit = None;
            for (j, &a) in g.row(i).iter().enumerate() {
                if a != T::zero() {
                    if hit.is_some() {
                        return Err(Error::NotABox(format!("row {i} has more than one nonzero")));
                    }
                    hit = Some((j, a));
                }
            }
            rows.push(hit);
        }
        Ok(BoxStructure { rows, dim: g.cols() })
    }

    /// Bounds implied by `Gv ≤ b`; infinite entries of `b` are ignored.
    pub fn bounds(&self, b: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        if b.len() != self.rows.len() {
            return Err(mismatch("box rhs", self.rows.len().to_string(), b.len().to_string()));
        }
        let mut lo = vec![T::neg_infinity(); self.dim];
        let mut hi = vec![T::infinity(); self.dim];
        for (row, &bi) in self.rows.iter().zip(b) {
            if bi == T::infinity() {
                continue;
            }
            match *row {
                None if bi < T::zero() => return Err(Error::InfeasibleProjection),
                None => {}
                Some((j, a)) if a > T::zero() => hi[j] = hi[j].min(bi / a),
                Some((j, a)) => lo[j] = lo[j].max(bi / a),
            }
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::InfeasibleProjection);
        }
        Ok((lo, hi))
    }
}

/// Dual FGM projector onto `{v : Gv ≤ b}` with warm-started multipliers.
///
/// Minimises `½‖Gᵀλ‖² − λᵀ(Gy − b)` over `λ ≥ 0` with accelerated projected
/// gradient steps, resetting momentum when the gradient opposes the last
/// step. The primal answer is `y − Gᵀλ`.
#[derive(Debug, Clone)]
pub struct PolytopeProjector<T: Scalar> {
    g: Mat<T>,
    ggt: Mat<T>,
    lipschitz: T,
    tol: T,
    lambda: Vec<T>,
    /// Dual iterations spent by the last call.
    pub last_iterations: usize,
}

impl<T: Scalar> PolytopeProjector<T> {
    pub fn new(g: &Mat<T>) -> Result<Self> {
        let ggt = g * &g.transpose();
        let lipschitz = if g.rows() == 0 {
            T::one()
        } else {
            sym_extremes(&ggt)?.1.max(T::epsilon())
        };
        Ok(PolytopeProjector {
            g: g.clone(),
            ggt,
            lipschitz,
            tol: T::lit(DUAL_TOL),
            lambda: vec![T::zero(); g.rows()],
            last_iterations: 0,
        })
    }

    pub fn with_tolerance(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    /// Forgets the warm-start multipliers.
    pub fn reset(&mut self) {
        self.lambda.iter_mut().for_each(|l| *l = T::zero());
    }

    pub fn project(&mut self, y: &[T], b: &[T]) -> Result<Vec<T>> {
        let rows = self.g.rows();
        if b.len() != rows || y.len() != self.g.cols() {
            return Err(mismatch(
                "polytope projection",
                format!("y {}, b {rows}", self.g.cols()),
                format!("y {}, b {}", y.len(), b.len()),
            ));
        }
        // rows with b = +inf never bind
        let active: Vec<bool> = b.iter().map(|&bi| bi != T::infinity()).collect();
        let gy = self.g.mul_vec(y);
        // gradient of the dual objective is GGᵀλ − (Gy − b)
        let c: Vec<T> = gy
            .iter()
            .zip(b)
            .zip(&active)
            .map(|((&a, &bi), &on)| if on { a - bi } else { T::zero() })
            .collect();
        let grad = |lam: &[T]| -> Vec<T> {
            self.ggt
                .mul_vec(lam)
                .into_iter()
                .zip(&c)
                .map(|(a, &ci)| a - ci)
                .collect()
        };
        let step = T::one() / self.lipschitz;
        let stop = self.tol * (T::one() + norm2(y));
        let guard = T::lit(DIVERGENCE_GUARD);

        let mut lam: Vec<T> = self
            .lambda
            .iter()
            .zip(&active)
            .map(|(&l, &on)| if on { l } else { T::zero() })
            .collect();
        let mut mom = lam.clone();
        let mut t = T::one();
        for it in 0..MAX_DUAL_ITERS {
            let gm = grad(&mom);
            let next: Vec<T> = mom
                .iter()
                .zip(&gm)
                .zip(&active)
                .map(|((&m, &gi), &on)| if on { (m - step * gi).max(T::zero()) } else { T::zero() })
                .collect();
            let diff: Vec<T> = mom.iter().zip(&next).map(|(&a, &b)| a - b).collect();
            if self.lipschitz * norm2(&diff) <= stop {
                self.last_iterations = it;
                self.lambda = next;
                return Ok(self.primal(y));
            }
            let lam_norm = norm2(&next);
            if !lam_norm.is_finite() || self.dual_value(&next, &c) > guard || self.farkas(&next, &c, guard) {
                self.reset();
                return Err(Error::InfeasibleProjection);
            }
            let moved: Vec<T> = next.iter().zip(&lam).map(|(&a, &b)| a - b).collect();
            let t_next = (T::one() + (T::one() + T::lit(4.0) * t * t).sqrt()) / T::lit(2.0);
            if dot(&gm, &moved) > T::zero() {
                // gradient restart
                t = T::one();
                mom = next.clone();
            } else {
                let beta = (t - T::one()) / t_next;
                mom = next.iter().zip(&moved).map(|(&a, &d)| a + beta * d).collect();
                t = t_next;
            }
            lam = next;
        }
        self.last_iterations = MAX_DUAL_ITERS;
        Err(Error::NoConvergence {
            solver: "dual FGM projection",
            iterations: MAX_DUAL_ITERS,
        })
    }

    /// `−½‖Gᵀλ‖² + λᵀ(Gy − b)`, the dual objective in maximisation form.
    fn dual_value(&self, lam: &[T], c: &[T]) -> T {
        let q = dot(lam, &self.ggt.mul_vec(lam));
        dot(lam, c) - T::lit(0.5) * q
    }

    /// Large multipliers along a direction `d ≥ 0` with `Gᵀd ≈ 0` and
    /// `bᵀd < 0` certify an empty polytope.
    fn farkas(&self, lam: &[T], c: &[T], guard: T) -> bool {
        let size = norm2(lam);
        if size < guard.sqrt() {
            return false;
        }
        let d: Vec<T> = lam.iter().map(|&l| l / size).collect();
        let gtd = norm2(&self.g.tr_mul_vec(&d));
        // bᵀd < 0 while Gᵀd ≈ 0 is equivalent to (Gy − b)ᵀd > 0
        gtd <= T::lit(1e-6) * self.lipschitz.sqrt() && dot(&d, c) > T::zero()
    }

    fn primal(&self, y: &[T]) -> Vec<T> {
        let gtl = self.g.tr_mul_vec(&self.lambda);
        y.iter().zip(&gtl).map(|(&a, &b)| a - b).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::testutil::random_mat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn box_clamps() {
        assert_eq!(project_box(&[2.0, -2.0], &[-0.5, -0.5], &[0.5, 0.5]), vec![0.5, -0.5]);
        assert_eq!(project_box(&[0.1, -0.2], &[-0.5, -0.5], &[0.5, 0.5]), vec![0.1, -0.2]);
    }

    #[test]
    fn box_matches_grid_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let y: f64 = rng.gen_range(-3.0..3.0);
            let (l, h) = (rng.gen_range(-1.0..0.0), rng.gen_range(0.0..1.0));
            let p = project_box(&[y], &[l], &[h])[0];
            let mut best = (f64::INFINITY, 0.0);
            for i in 0..=10_000 {
                let v = l + (h - l) * i as f64 / 10_000.0;
                if (v - y).powi(2) < best.0 {
                    best = ((v - y).powi(2), v);
                }
            }
            assert!((p - best.1).abs() <= (h - l) / 10_000.0);
        }
    }

    #[test]
    fn box_structure_bounds() {
        let g = Mat::from_rows(&[[2.0, 0.0], [-1.0, 0.0], [0.0, 0.0], [0.0, 4.0]]);
        let bs = BoxStructure::new(&g).unwrap();
        let (lo, hi) = bs.bounds(&[1.0, 3.0, 0.5, f64::INFINITY]).unwrap();
        assert_eq!(lo, vec![-3.0, f64::NEG_INFINITY]);
        assert_eq!(hi, vec![0.5, f64::INFINITY]);
        assert!(matches!(bs.bounds(&[1.0, 3.0, -0.5, 1.0]), Err(Error::InfeasibleProjection)));
        assert!(matches!(bs.bounds(&[-7.0, 3.0, 0.5, 1.0]), Err(Error::InfeasibleProjection)));
        assert!(matches!(BoxStructure::new(&Mat::from_rows(&[[1.0, 1.0]])), Err(Error::NotABox(_))));
    }

    #[test]
    fn feasible_point_is_fixed() {
        let g = Mat::from_rows(&[[1.0, 1.0], [-1.0, 2.0], [0.0, -1.0]]);
        let y = [0.1, 0.2];
        let v = project_polytope(&y, &g, &[1.0, 1.0, 1.0], 1e-10).unwrap();
        assert_eq!(v, y.to_vec());
    }

    #[test]
    fn polytope_box_agrees_with_clamp() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Mat::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]);
        let b = [0.5, 0.2, 1.0, 0.5, 0.7, 0.1];
        for _ in 0..50 {
            let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let v = project_polytope(&y, &g, &b, 1e-10).unwrap();
            let c = project_box(&y, &[-0.5, -0.7, -0.1], &[0.5, 0.2, 1.0]);
            for (a, b) in v.iter().zip(&c) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = random_mat(&mut rng, 5, 3);
        let b: Vec<f64> = (0..5).map(|_| rng.gen_range(0.1..1.0)).collect();
        let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let once = project_polytope(&y, &g, &b, 1e-12).unwrap();
        let twice = project_polytope(&once, &g, &b, 1e-12).unwrap();
        for (a, c) in once.iter().zip(&twice) {
            assert!((a - c).abs() < 1e-12);
        }
    }

    #[test]
    fn infeasible_detected() {
        let g = Mat::from_rows(&[[1.0, 0.0], [-1.0, 0.0]]);
        let err = project_polytope(&[0.0, 0.0], &g, &[-1.0, -1.0], 1e-10).unwrap_err();
        assert!(matches!(err, Error::InfeasibleProjection));
    }

    #[test]
    fn warm_start_cuts_iterations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = random_mat(&mut rng, 6, 3);
        let b = vec![0.2; 6];
        let y = [3.0, -2.0, 1.0];
        let mut proj = PolytopeProjector::new(&g).unwrap();
        proj.project(&y, &b).unwrap();
        let cold = proj.last_iterations;
        proj.project(&y, &b).unwrap();
        assert!(proj.last_iterations <= cold);
    }
}
