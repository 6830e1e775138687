use crate::matkit::{Lu, Mat};
use crate::scalar::Scalar;

// (2q−k)! q! / ((2q)! k! (q−k)!) for q = 6
const PADE6: [f64; 7] = [
    1.0,
    0.5,
    5.0 / 44.0,
    1.0 / 66.0,
    1.0 / 792.0,
    1.0 / 15840.0,
    1.0 / 665280.0,
];

/// Matrix exponential by scaling and squaring with a degree-6 Padé approximant.
///
/// Panics if `a` is not square or has non-finite entries.
pub fn mat_exp<T: Scalar>(a: &Mat<T>) -> Mat<T> {
    assert!(a.is_square(), "mat_exp needs a square matrix");
    assert!(a.is_finite(), "mat_exp needs finite entries");
    let n = a.rows();
    let norm = a.norm_inf();
    let mut squarings = 0i32;
    let half = T::lit(0.5);
    if norm > half {
        squarings = (norm / half).log2().ceil().to_i32().unwrap_or(0).max(0);
    }
    let x = a.scale(T::lit(0.5).powi(squarings));

    let mut num = Mat::identity(n);
    let mut den = Mat::identity(n);
    let mut power = Mat::identity(n);
    for (k, &c) in PADE6.iter().enumerate().skip(1) {
        power = &power * &x;
        let term = power.scale(T::lit(c));
        num = &num + &term;
        den = if k % 2 == 0 { &den + &term } else { &den - &term };
    }
    let mut e = Lu::factor(&den)
        .and_then(|lu| lu.solve(&num))
        .expect("Padé denominator is well conditioned for ‖X‖ ≤ 1/2");
    for _ in 0..squarings {
        e = &e * &e;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::testutil::random_mat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_gives_identity() {
        assert_eq!(mat_exp(&Mat::<f64>::zeros(3, 3)), Mat::identity(3));
    }

    #[test]
    fn diagonal_log_two() {
        let e = mat_exp(&Mat::diag(&[std::f64::consts::LN_2, 0.0]));
        assert!((&e - &Mat::diag(&[2.0, 1.0])).frobenius() < 1e-14);
    }

    #[test]
    fn nilpotent_series_terminates() {
        let e = mat_exp(&Mat::from_rows(&[[0.0, 1.0], [0.0, 0.0]]));
        assert!((&e - &Mat::from_rows(&[[1.0, 1.0], [0.0, 1.0]])).frobenius() < 1e-15);
    }

    fn taylor(a: &Mat<f64>, terms: usize) -> Mat<f64> {
        // scale down so the series converges quickly, then square back up
        let s = 6;
        let x = a.scale(0.5f64.powi(s));
        let mut acc = Mat::identity(a.rows());
        let mut term = Mat::identity(a.rows());
        for k in 1..terms {
            term = (&term * &x).scale(1.0 / k as f64);
            acc = &acc + &term;
        }
        for _ in 0..s {
            acc = &acc * &acc;
        }
        acc
    }

    #[test]
    fn matches_taylor_for_moderate_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for scale in [0.1, 1.0, 4.0, 10.0] {
            let mut a = random_mat(&mut rng, 4, 4);
            let norm = a.norm_inf();
            a = a.scale(scale / norm);
            let e = mat_exp(&a);
            let t = taylor(&a, 40);
            assert!((&e - &t).frobenius() <= 1e-10 * t.frobenius(), "scale {scale}");
        }
    }

    #[test]
    fn inverse_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let mut a = random_mat(&mut rng, 5, 5);
            let norm = a.norm_inf();
            a = a.scale(2.0 / norm);
            let prod = &mat_exp(&a) * &mat_exp(&(-&a));
            assert!((&prod - &Mat::identity(5)).max_abs() < 1e-9);
        }
    }
}
