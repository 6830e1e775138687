#![allow(dead_code)]

use mpc_precond::experiment::random_stable_pair;
use mpc_precond::matkit::{lu_solve, Mat};
use mpc_precond::model::{ClqrSpec, LtiModel, System};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Mat<f64> {
    let a = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    &(&a * &a.transpose()) + &Mat::identity(n).scale(0.5)
}

/// Random Schur-stable system with 2–4 states and 1–2 inputs.
pub fn random_stable_system(seed: u64) -> System<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=4);
    let m = rng.gen_range(1..=2);
    let radius = rng.gen_range(0.3..0.95);
    let (a, b) = random_stable_pair(n, m, radius, seed.wrapping_mul(7919)).unwrap();
    let q = random_spd(&mut rng, n);
    let r = random_spd(&mut rng, m);
    let bounds = vec![1.0; m];
    System {
        name: format!("random-{seed}"),
        model: LtiModel::discrete(a, b).unwrap(),
        spec: ClqrSpec::input_box(n, q, r, &bounds, 10).unwrap(),
        sample_time: None,
        state_radius: 1.0,
    }
}

/// Projection onto `{v : Gv ≤ b}` by enumerating active sets.
pub fn active_set_projection(y: &[f64], g: &Mat<f64>, b: &[f64]) -> Vec<f64> {
    let rows = g.rows();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << rows) {
        let idx: Vec<usize> = (0..rows).filter(|i| mask & (1 << i) != 0).collect();
        let v = if idx.is_empty() {
            y.to_vec()
        } else {
            let gs = Mat::from_fn(idx.len(), g.cols(), |i, j| g[(idx[i], j)]);
            let gy = gs.mul_vec(y);
            let rhs: Vec<f64> = idx.iter().zip(&gy).map(|(&i, &v)| v - b[i]).collect();
            let Ok(lam) = lu_solve(&(&gs * &gs.transpose()), &Mat::column(&rhs)) else {
                continue;
            };
            let lam = lam.into_vec();
            if lam.iter().any(|&l| l < -1e-12) {
                continue;
            }
            let shift = gs.tr_mul_vec(&lam);
            y.iter().zip(&shift).map(|(a, s)| a - s).collect()
        };
        let gv = g.mul_vec(&v);
        if gv.iter().zip(b).any(|(a, bi)| *a > bi + 1e-10) {
            continue;
        }
        let d: f64 = v.iter().zip(y).map(|(a, c)| (a - c) * (a - c)).sum();
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, v));
        }
    }
    best.expect("feasible polytope").1
}

/// `½Σ(x_kᵀQx_k + v_kᵀRv_k) + ½x_NᵀPx_N` along `x_{k+1} = A x_k + B v_k`.
pub fn simulated_cost(a: &Mat<f64>, b: &Mat<f64>, q: &Mat<f64>, r: &Mat<f64>, p: &Mat<f64>, x0: &[f64], v: &[f64]) -> f64 {
    let m = b.cols();
    let horizon = v.len() / m;
    let quad = |w: &Mat<f64>, x: &[f64]| -> f64 { x.iter().zip(&w.mul_vec(x)).map(|(a, b)| a * b).sum() };
    let mut x = x0.to_vec();
    let mut cost = 0.0;
    for k in 0..horizon {
        let vk = &v[k * m..(k + 1) * m];
        cost += 0.5 * (quad(q, &x) + quad(r, vk));
        let ax = a.mul_vec(&x);
        let bv = b.mul_vec(vk);
        x = ax.iter().zip(&bv).map(|(p, q)| p + q).collect();
    }
    cost + 0.5 * quad(p, &x)
}

/// Second-difference Hessian of `f` at `v`.
pub fn fd_hessian(f: impl Fn(&[f64]) -> f64, v: &[f64], h: f64) -> Mat<f64> {
    let d = v.len();
    let shifted = |i: Option<usize>, j: Option<usize>| {
        let mut w = v.to_vec();
        if let Some(i) = i {
            w[i] += h;
        }
        if let Some(j) = j {
            w[j] += h;
        }
        f(&w)
    };
    let f0 = f(v);
    let fi: Vec<f64> = (0..d).map(|i| shifted(Some(i), None)).collect();
    Mat::from_fn(d, d, |i, j| (shifted(Some(i), Some(j)) - fi[i] - fi[j] + f0) / (h * h))
}
