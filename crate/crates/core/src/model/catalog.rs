use crate::error::{Error, Result};
use crate::matkit::Mat;
use crate::model::{ClqrSpec, LtiModel, System};
use crate::scalar::Scalar;

pub const BUILTIN_NAMES: [&str; 2] = ["schur-stable", "pendulum"];

const GRAVITY: f64 = 9.8067;
const DAMPING: f64 = 1.0;
const ROD_LENGTH: f64 = 0.21;

fn mat<T: Scalar, const C: usize>(rows: &[[f64; C]]) -> Mat<T> {
    Mat::from_fn(rows.len(), C, |i, j| T::lit(rows[i][j]))
}

fn diag<T: Scalar>(values: &[f64]) -> Mat<T> {
    Mat::diag(&values.iter().map(|&v| T::lit(v)).collect::<Vec<_>>())
}

/// Four-state, two-input Schur-stable plant with `|u_k| ≤ 0.5`.
fn schur_stable<T: Scalar>() -> Result<System<T>> {
    let a = mat(&[
        [0.7, -0.1, 0.0, 0.0],
        [0.2, -0.5, 0.1, 0.0],
        [0.0, 0.1, 0.1, 0.0],
        [0.5, 0.0, 0.5, 0.5],
    ]);
    let b = mat(&[[0.0, 0.1], [0.1, 1.0], [0.1, 0.0], [0.0, 0.0]]);
    let model = LtiModel::discrete(a, b)?;
    let spec = ClqrSpec::input_box(
        4,
        diag(&[10.0, 20.0, 30.0, 40.0]),
        diag(&[10.0, 20.0]),
        &[T::lit(0.5), T::lit(0.5)],
        10,
    )?;
    Ok(System {
        name: "schur-stable".into(),
        model,
        spec,
        sample_time: None,
        state_radius: T::lit(4.0),
    })
}

/// Linearised inverted pendulum on a cart (continuous time), `|u| ≤ 10`,
/// discretised at 20 ms.
fn pendulum<T: Scalar>() -> Result<System<T>> {
    let g = T::lit(GRAVITY);
    let b = T::lit(DAMPING);
    let l = T::lit(ROD_LENGTH);
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let mut a = Mat::zeros(4, 4);
    a[(0, 1)] = T::one();
    a[(1, 0)] = three * g / (two * l);
    a[(1, 1)] = -b;
    a[(2, 3)] = T::one();
    let mut bm = Mat::zeros(4, 1);
    bm[(1, 0)] = three / (two * l);
    bm[(3, 0)] = T::one();
    let model = LtiModel::continuous(a, bm)?;
    let spec = ClqrSpec::input_box(
        4,
        diag(&[1000.0, 1.0, 100.0, 1.0]),
        diag(&[10.0]),
        &[T::lit(10.0)],
        10,
    )?;
    Ok(System {
        name: "pendulum".into(),
        model,
        spec,
        sample_time: Some(T::lit(0.02)),
        state_radius: T::lit(1.0),
    })
}

/// All built-in systems.
pub fn builtin_systems<T: Scalar>() -> Vec<System<T>> {
    BUILTIN_NAMES
        .iter()
        .map(|name| builtin_system(name).expect("catalog entries are valid"))
        .collect()
}

/// Looks up a built-in system by name.
pub fn builtin_system<T: Scalar>(name: &str) -> Result<System<T>> {
    match name {
        "schur-stable" => schur_stable(),
        "pendulum" => pendulum(),
        other => Err(Error::UnknownName(other.to_string())),
    }
}
