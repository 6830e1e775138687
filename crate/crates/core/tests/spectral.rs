//! Horizon sweeps on the built-in systems.

mod common;

use mpc_precond::condense::{condense, prediction_dynamics};
use mpc_precond::experiment::{precondition_rows, spectrum_rows, CaseConfig};
use mpc_precond::matkit::sym_condition;
use mpc_precond::model::{builtin_system, System, TerminalCost};
use mpc_precond::precond::{apply_to_qp, build_preconditioner, preconditioned_symbol};
use mpc_precond::symbol::{verify_containment, MatrixSymbol};

fn schur() -> System<f64> {
    builtin_system("schur-stable").unwrap()
}

#[test]
fn schur_stable_curve_rises_to_bound() {
    let rows = spectrum_rows(&schur(), &(1..=60).collect::<Vec<_>>(), false, None).unwrap();
    let bound = rows[0].cond_bound.unwrap();
    for w in rows.windows(2) {
        assert!(w[1].cond_p >= w[0].cond_p - 1e-9, "N={}", w[1].horizon);
        assert!(w[1].cond_p <= bound);
        assert!(w[1].cond_q <= bound);
    }
}

#[test]
fn pendulum_curve_rises_to_bound() {
    let sys = builtin_system::<f64>("pendulum").unwrap();
    let rows = spectrum_rows(&sys, &[1, 5, 10, 25, 50, 100, 175], true, None).unwrap();
    let bound = rows[0].cond_bound.unwrap();
    assert!((bound - 5.0465).abs() < 1e-3);
    for w in rows.windows(2) {
        assert!(w[1].cond_p >= w[0].cond_p - 1e-9 && w[1].cond_p <= bound);
    }
}

/// The gap to the bound closes to about 1% at the horizons quoted for it.
#[test]
fn convergence_gap_near_one_percent() {
    let s = schur();
    let spec = s.spec.with_terminal(TerminalCost::DlyapSolution);
    let bound = MatrixSymbol::from_dynamics(&prediction_dynamics(&s.model, &spec, false).unwrap())
        .unwrap()
        .default_bounds()
        .unwrap()
        .kappa;
    let k40 = sym_condition(&condense(&s.model, &spec.with_horizon(40), false).unwrap().h).unwrap();
    let gap = (bound - k40) / bound;
    assert!(gap > 0.0 && gap < 0.01, "gap {gap}");
}

#[test]
fn exact_toeplitz_variants_contained_on_random_systems() {
    for seed in 0..20 {
        let sys = common::random_stable_system(seed);
        for (prestab, terminal) in [(false, TerminalCost::DlyapSolution), (true, TerminalCost::DareSolution)] {
            let spec = sys.spec.with_terminal(terminal);
            let d = prediction_dynamics(&sys.model, &spec, prestab).unwrap();
            let bounds = MatrixSymbol::from_dynamics(&d).unwrap().default_bounds().unwrap();
            for n in [1, 2, 5, 12, 25] {
                let qp = condense(&sys.model, &spec.with_horizon(n), prestab).unwrap();
                verify_containment(&qp, &bounds).unwrap();
            }
        }
    }
}

#[test]
fn preconditioned_spectrum_contained_and_improved() {
    let s = schur();
    let spec = s.spec.with_terminal(TerminalCost::DlyapSolution);
    let pc = build_preconditioner(&s.model, &spec).unwrap();
    let d = prediction_dynamics(&s.model, &spec, false).unwrap();
    let sym = preconditioned_symbol(&MatrixSymbol::from_dynamics(&d).unwrap(), &pc).unwrap();
    let bounds = sym.default_bounds().unwrap();
    for n in [1, 10, 30, 60] {
        let qp = apply_to_qp(&condense(&s.model, &spec.with_horizon(n), false).unwrap(), &pc).unwrap();
        verify_containment(&qp, &bounds).unwrap();
        assert!(sym_condition(&qp.h).unwrap() <= bounds.kappa);
    }
}

#[test]
fn catalog_preconditioning_never_hurts_at_ten() {
    let rows = precondition_rows(&schur(), &[10], &CaseConfig::default()).unwrap();
    assert!(rows[0].cond_strang <= rows[0].cond_orig);
    let pend = builtin_system::<f64>("pendulum").unwrap();
    let cfg = CaseConfig {
        prestabilize: true,
        ..CaseConfig::default()
    };
    let rows = precondition_rows(&pend, &[10], &cfg).unwrap();
    assert!(rows[0].cond_strang <= rows[0].cond_orig * (1.0 + 1e-12));
}
