//! Statistical checks on the conditional dynamics.

use proptest::prelude::*;
use transmon_kerr::acceptance::baseline;
use transmon_kerr::cascade::{self, SmeScheme};
use transmon_kerr::fock;
use transmon_kerr::lindblad::hermiticity_defect;
use transmon_kerr::model;
use transmon_kerr::pulse::{PulseShape, TimeGrid};
use transmon_kerr::qutrit::{self, SystemParams};
use transmon_kerr::variants::SqueezeParams;

fn params() -> SystemParams {
    SystemParams { beta: 0.45, ..baseline() }
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

#[test]
fn conditional_states_average_to_unconditional() {
    let p = params();
    let dt = 5e-3;
    let grid = TimeGrid::new(4.0, dt).unwrap();
    let ops = cascade::cascade_operators(&p, None, dt, SmeScheme::Kraus).unwrap();
    let steps = [200, 400, 800];
    let unc = cascade::unconditional_evolve(&p, &grid, 1).unwrap();
    let n = 400;
    let mut per_step = vec![vec![]; steps.len()];
    for seed in 0..n {
        let states = cascade::conditional_states(&ops, &grid, 1000 + seed, 1, &steps).unwrap();
        for (acc, rho) in per_step.iter_mut().zip(&states) {
            acc.push(qutrit::polarisation(&model::reduce(rho), &p).unwrap());
        }
    }
    for (acc, &k) in per_step.iter().zip(&steps) {
        let (m, se) = mean_se(acc);
        let want = unc.polarisation[k];
        assert!((m - want).abs() < 4.0 * se + 1e-3, "step {k}: {m} +- {se} vs {want}");
    }
}

#[test]
fn half_step_ensembles_agree_with_deterministic_mean() {
    let p = params();
    let pulse = PulseShape::exponential(p.gamma_con).unwrap();
    let base = TimeGrid::for_pulse(&pulse, 1e-2, p.gamma_b).unwrap();
    let want = fock::expected_signal(&p, &pulse, &base.with_dt(1e-3).unwrap()).unwrap();
    let n = 1500;
    let mut means = vec![];
    for dt in [2e-2, 1e-2] {
        let grid = base.with_dt(dt).unwrap();
        let ops = cascade::cascade_operators(&p, None, grid.dt, SmeScheme::Kraus).unwrap();
        let s = cascade::simulate_cascade_ensemble(&ops, &grid, n, 77, 1).unwrap();
        let (m, se) = mean_se(&s.values);
        assert!((m - want).abs() < 4.0 * se, "dt {dt}: {m} +- {se} vs {want}");
        means.push((m, se));
    }
    let (a, b) = (means[0], means[1]);
    assert!((a.0 - b.0).abs() < 4.0 * (a.1.hypot(b.1)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kraus_step_keeps_a_density_matrix(
        noise in prop::collection::vec(-4.0f64..4.0, 50..200),
        beta in 0.05f64..1.2,
        r in 0.0f64..1.5,
        squeezed in any::<bool>(),
    ) {
        let p = SystemParams { beta, ..baseline() };
        let dt = 1e-2;
        let sq = if squeezed { Some(SqueezeParams::noise_reducing(r).unwrap()) } else { None };
        let ops = cascade::cascade_operators(&p, sq.as_ref(), dt, SmeScheme::Kraus).unwrap();
        let mut rho = model::joint_initial(1);
        for z in noise {
            let (next, j) = cascade::sme_step(&rho, z * dt.sqrt(), &ops).unwrap();
            prop_assert!(j.is_finite());
            rho = next;
            prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(hermiticity_defect(&rho) < 1e-12);
            prop_assert!(qutrit::min_eigenvalue(&rho) > -1e-9);
            prop_assert!(ops.record_mean(&rho).abs() <= ops.record_bound() * (1.0 + 1e-9));
        }
    }
}
