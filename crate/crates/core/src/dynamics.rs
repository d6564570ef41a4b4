//! Time-dependent Hamiltonian systems as cosymplectic manifolds.
//!
//! A symplectic base (M, ω) and a Hamiltonian H on M×R become the
//! cosymplectic manifold (M×R, η = dt, ω_H = ω + dH∧dt). Its Reeb field
//! is the evolution field ∂/∂t + X_H: in Darboux coordinates its integral
//! curves satisfy q̇ = ∂H/∂p, ṗ = −∂H/∂q, ṫ = 1. Flows are integrated
//! with the classic fixed-step fourth-order Runge–Kutta scheme
//! (deterministic reports; no adaptive stepping).

use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::field::{KForm, MetricField, ScalarField, VectorField};
use crate::form::comb_rank;
use crate::jet::seed_point;
use crate::ops::covariant_self_derivative;
use crate::report::{ResidualTracker, Tolerances, VerificationReport};
use crate::sample::SamplePlan;
use crate::structures::{reeb_field, verify_cosymplectic, AlmostCosymplectic};

#[derive(Clone)]
pub struct TimeDependentSystem {
    /// Extended chart: base coordinates then t (last).
    pub chart: Chart,
    pub base_dim: usize,
    pub hamiltonian: ScalarField,
    /// (η = dt, ω_H = ω + dH∧dt).
    pub structure: AlmostCosymplectic,
}

/// ω_H = ω + dH∧dt on a chart whose last coordinate is t. The dH∧dt
/// components are assembled from exact jets of H; the output answers its
/// own derivative queries by finite differences.
pub fn twist_by_hamiltonian(chart: &Chart, omega: &KForm, h: &ScalarField) -> KForm {
    let dim = chart.dim();
    let t = dim - 1;
    let oe = omega.eval.clone();
    let he = h.eval.clone();
    KForm::from_values(chart, 2, move |p| {
        let mut comps = oe.values(p);
        let dh = he.jets(&seed_point(p))[0].d.clone();
        for i in 0..t {
            // (dH∧dt)(e_i, e_t) = ∂_i H
            comps[comb_rank(&[i, t], dim)] += dh[i];
        }
        comps
    })
}

/// Lift a k-form on the base chart to base×R (zero on directions
/// involving the new coordinates).
pub fn lift_form(base: &KForm, extended: &Chart) -> KForm {
    let base_dim = base.chart.dim();
    let dim = extended.dim();
    let k = base.degree;
    let be = base.eval.clone();
    let combos_ext = crate::form::combinations(dim, k);
    let combos_base = crate::form::combinations(base_dim, k);
    KForm::from_values(extended, k, move |p| {
        let bv = be.values(&p[0..base_dim]);
        let mut out = vec![0.0; combos_ext.len()];
        for (rank_b, combo) in combos_base.iter().enumerate() {
            let rank_e = comb_rank(combo, dim);
            out[rank_e] = bv[rank_b];
        }
        out
    })
}

/// Package (base, ω, H) as the cosymplectic manifold (M×R, dt, ω + dH∧dt).
/// The base form must be nondegenerate on the base (checked at the box
/// center); closedness of ω_H is certified by `verify_cosymplectic`.
pub fn cosymplectize(
    base: &Chart,
    omega_base: &KForm,
    hamiltonian_extended: &ScalarField,
    t_lo: f64,
    t_hi: f64,
) -> Result<TimeDependentSystem> {
    base.check_same(&omega_base.chart)?;
    let extended = base.extend(&format!("{}-x-r", base.name), &[("t", t_lo, t_hi)]);
    hamiltonian_extended.chart.check_same(&extended)?;
    let base_dim = base.dim();
    // nondegeneracy probe of the base form at the box center
    let center: Vec<f64> = base
        .lower
        .iter()
        .zip(&base.upper)
        .map(|(l, u)| 0.5 * (l + u))
        .collect();
    let ov = omega_base.value(&center);
    let m = nalgebra::DMatrix::from_fn(base_dim, base_dim, |i, j| {
        crate::form::component(base_dim, &ov, &[i, j])
    });
    if m.determinant().abs() < 1e-12 {
        return Err(GeomError::Singular {
            context: "cosymplectize: base symplectic form degenerate".into(),
            point: center,
            det: m.determinant(),
        });
    }
    let lifted = lift_form(omega_base, &extended);
    let omega_h = twist_by_hamiltonian(&extended, &lifted, hamiltonian_extended);
    let eta = crate::fixtures::dt_form(&extended);
    Ok(TimeDependentSystem {
        chart: extended.clone(),
        base_dim,
        hamiltonian: hamiltonian_extended.clone(),
        structure: AlmostCosymplectic::new(extended, eta, omega_h),
    })
}

/// Certify the cosymplectization (dη = 0, dω_H = 0, nondegeneracy).
pub fn verify_system(
    system: &TimeDependentSystem,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> VerificationReport {
    verify_cosymplectic(&system.structure, plan, tol)
}

#[derive(Clone, Debug)]
pub struct FlowResult {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// H along the trajectory.
    pub hamiltonian: Vec<f64>,
    /// max |t(τ) − t(0) − τ| over the run.
    pub t_defect: f64,
    /// Named conserved-quantity logs.
    pub logs: Vec<(String, Vec<f64>)>,
    /// True when the trajectory left the chart box and was truncated.
    pub truncated: bool,
}

impl FlowResult {
    /// Deterministic CSV: time, coordinates, H, then the logs.
    pub fn to_csv(&self, coord_names: &[String]) -> String {
        let mut s = String::from("time");
        for c in coord_names {
            s.push(',');
            s.push_str(c);
        }
        s.push_str(",H");
        for (name, _) in &self.logs {
            s.push(',');
            s.push_str(name);
        }
        s.push('\n');
        for i in 0..self.times.len() {
            s.push_str(&format!("{:.16e}", self.times[i]));
            for x in &self.states[i] {
                s.push_str(&format!(",{:.16e}", x));
            }
            s.push_str(&format!(",{:.16e}", self.hamiltonian[i]));
            for (_, vals) in &self.logs {
                s.push_str(&format!(",{:.16e}", vals[i]));
            }
            s.push('\n');
        }
        s
    }
}

/// Classic RK4 with a fixed step on an arbitrary pointwise vector field.
/// The step is snapped to t_end/round(t_end/step) so the flow lands
/// exactly on t_end (still a fixed step within the run).
pub fn rk4_flow(
    chart: &Chart,
    field: impl Fn(&[f64]) -> Vec<f64>,
    start: &[f64],
    t_end: f64,
    step: f64,
    mut on_state: impl FnMut(f64, &[f64]),
) -> (Vec<(f64, Vec<f64>)>, bool) {
    let dim = start.len();
    let mut state = start.to_vec();
    let mut t = 0.0;
    let mut out = vec![(t, state.clone())];
    on_state(t, &state);
    let n_steps = (t_end / step).round().max(1.0) as usize;
    let step = t_end / n_steps as f64;
    let mut truncated = false;
    for _ in 0..n_steps {
        let k1 = field(&state);
        let mid1: Vec<f64> = (0..dim).map(|i| state[i] + 0.5 * step * k1[i]).collect();
        let k2 = field(&mid1);
        let mid2: Vec<f64> = (0..dim).map(|i| state[i] + 0.5 * step * k2[i]).collect();
        let k3 = field(&mid2);
        let end: Vec<f64> = (0..dim).map(|i| state[i] + step * k3[i]).collect();
        let k4 = field(&end);
        for i in 0..dim {
            state[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += step;
        if !chart.contains(&state) {
            truncated = true;
            break;
        }
        on_state(t, &state);
        out.push((t, state.clone()));
    }
    (out, truncated)
}

/// Integrate the evolution (Reeb) field of the system. Logs H drift and
/// any supplied conserved quantities; reports the ṫ = 1 defect.
pub fn evolution_flow(
    system: &TimeDependentSystem,
    start: &[f64],
    t_end: f64,
    step: f64,
    extra_logs: &[(String, Box<dyn Fn(&[f64]) -> f64>)],
) -> Result<FlowResult> {
    system.chart.check_point(start)?;
    let xi = reeb_field(&system.structure);
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut h_vals = Vec::new();
    let mut logs: Vec<(String, Vec<f64>)> = extra_logs
        .iter()
        .map(|(n, _)| (n.clone(), Vec::new()))
        .collect();
    let t_index = system.chart.dim() - 1;
    let t0 = start[t_index];
    let mut t_defect: f64 = 0.0;
    let (_, truncated) = rk4_flow(
        &system.chart,
        |p| xi.value(p),
        start,
        t_end,
        step,
        |tau, p| {
            times.push(tau);
            states.push(p.to_vec());
            h_vals.push(system.hamiltonian.value(p));
            for (i, (_, f)) in extra_logs.iter().enumerate() {
                logs[i].1.push(f(p));
            }
            t_defect = t_defect.max((p[t_index] - t0 - tau).abs());
        },
    );
    Ok(FlowResult {
        times,
        states,
        hamiltonian: h_vals,
        t_defect,
        logs,
        truncated,
    })
}

/// Max geodesic defect |∇_X X|_g over the samples.
pub fn geodesic_defect(
    g: &MetricField,
    x: &VectorField,
    points: &[Vec<f64>],
) -> Result<(f64, Vec<f64>)> {
    let mut worst = 0.0;
    let mut worst_point = Vec::new();
    for p in points {
        let nabla = covariant_self_derivative(g, x, p)?;
        let gm = g.value(p);
        let v = nalgebra::DVector::from_vec(nabla);
        let norm2 = (v.transpose() * gm * &v)[(0, 0)];
        let norm = norm2.max(0.0).sqrt();
        if norm > worst || worst_point.is_empty() {
            worst = norm;
            worst_point = p.clone();
        }
    }
    Ok((worst, worst_point))
}

/// Componentwise residual of the Reeb field against the Darboux-chart
/// expression (∂H/∂p_i, −∂H/∂q_i, 1) with coordinates ordered
/// (p_1, q_1, ..., p_n, q_n, t).
pub fn darboux_reeb_residual(
    system: &TimeDependentSystem,
    plan: &SamplePlan,
) -> ResidualTracker {
    let xi = reeb_field(&system.structure);
    let n_pairs = system.base_dim / 2;
    let mut track = ResidualTracker::new("evolution_field_darboux_residual", 1e-9);
    for p in plan.points(&system.chart) {
        let dh = system.hamiltonian.jet(&seed_point(&p)).d;
        let v = xi.value(&p);
        let mut worst: f64 = 0.0;
        for i in 0..n_pairs {
            let p_idx = 2 * i;
            let q_idx = 2 * i + 1;
            worst = worst.max((v[q_idx] - dh[p_idx]).abs());
            worst = worst.max((v[p_idx] + dh[q_idx]).abs());
        }
        worst = worst.max((v[system.base_dim] - 1.0).abs());
        track.record(&p, worst);
    }
    track
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::constant_two_form;
    use crate::report::Tolerances;

    /// Harmonic oscillator: base (p, q) with ω = dq∧dp, H = ½(p² + q²).
    fn harmonic() -> TimeDependentSystem {
        let base = Chart::symmetric("darboux-r2", &["p", "q"], 2.0);
        let omega = constant_two_form(&base, &[(0, 1, -1.0)]);
        let extended = base.extend("darboux-r2-x-r", &[("t", -10.0, 10.0)]);
        let h = ScalarField::from_jets(&extended, |p| {
            &(&(&p[0] * &p[0]) + &(&p[1] * &p[1])) * 0.5
        });
        cosymplectize(&base, &omega, &h, -10.0, 10.0).unwrap()
    }

    #[test]
    fn zero_hamiltonian_keeps_omega() {
        let base = Chart::symmetric("darboux-r2", &["p", "q"], 2.0);
        let omega = constant_two_form(&base, &[(0, 1, -1.0)]);
        let extended = base.extend("darboux-r2-x-r", &[("t", -10.0, 10.0)]);
        let h = ScalarField::constant(&extended, 0.0);
        let sys = cosymplectize(&base, &omega, &h, -10.0, 10.0).unwrap();
        // ω_H = ω and ξ_H = ∂t
        let xi = reeb_field(&sys.structure);
        let v = xi.value(&[0.3, -0.2, 0.1]);
        assert!(v[0].abs() < 1e-13 && v[1].abs() < 1e-13);
        assert!((v[2] - 1.0).abs() < 1e-13);
        let ov = sys.structure.omega.value(&[0.3, -0.2, 0.1]);
        assert!((ov[0] + 1.0).abs() < 1e-13);
        assert!(ov[1].abs() < 1e-13 && ov[2].abs() < 1e-13);
    }

    #[test]
    fn harmonic_oscillator_evolution_field() {
        // ξ_H = p∂_q − q∂_p + ∂_t
        let sys = harmonic();
        let xi = reeb_field(&sys.structure);
        for p in SamplePlan::new(30, 51).points(&sys.chart) {
            let v = xi.value(&p);
            assert!((v[0] + p[1]).abs() < 1e-10, "ṗ = −q");
            assert!((v[1] - p[0]).abs() < 1e-10, "q̇ = p");
            assert!((v[2] - 1.0).abs() < 1e-12);
        }
        // and the Darboux residual tracker agrees
        let track = darboux_reeb_residual(&sys, &SamplePlan::new(200, 52));
        let check = track.finish();
        assert!(check.pass, "max {:e}", check.max_residual);
    }

    #[test]
    fn scaled_omega_halves_hamiltonian_part() {
        let base = Chart::symmetric("darboux-r2", &["p", "q"], 2.0);
        let omega2 = constant_two_form(&base, &[(0, 1, -2.0)]);
        let extended = base.extend("darboux-r2-x-r", &[("t", -10.0, 10.0)]);
        let h = ScalarField::from_jets(&extended, |p| {
            &(&(&p[0] * &p[0]) + &(&p[1] * &p[1])) * 0.5
        });
        let sys = cosymplectize(&base, &omega2, &h, -10.0, 10.0).unwrap();
        let xi = reeb_field(&sys.structure);
        for p in SamplePlan::new(20, 53).points(&sys.chart) {
            let v = xi.value(&p);
            assert!((v[0] + 0.5 * p[1]).abs() < 1e-10);
            assert!((v[1] - 0.5 * p[0]).abs() < 1e-10);
            assert!((v[2] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cosymplectization_passes_verifier() {
        let sys = harmonic();
        let r = verify_system(&sys, &SamplePlan::new(100, 54), &Tolerances::default());
        assert!(
            r.pass,
            "failed: {:?}",
            r.checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| &c.check_name)
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn free_system_flows_in_straight_line() {
        let base = Chart::symmetric("darboux-r2", &["p", "q"], 2.0);
        let omega = constant_two_form(&base, &[(0, 1, -1.0)]);
        let extended = base.extend("darboux-r2-x-r", &[("t", -10.0, 10.0)]);
        let h = ScalarField::constant(&extended, 0.0);
        let sys = cosymplectize(&base, &omega, &h, -10.0, 10.0).unwrap();
        let flow = evolution_flow(&sys, &[0.4, -0.3, 0.0], 1.0, 1e-2, &[]).unwrap();
        assert!(!flow.truncated);
        let last = flow.states.last().unwrap();
        assert!((last[0] - 0.4).abs() < 1e-14);
        assert!((last[1] + 0.3).abs() < 1e-14);
        assert!((last[2] - 1.0).abs() < 1e-12);
        assert!(flow.t_defect < 1e-12);
    }

    #[test]
    fn harmonic_period_return_and_conservation() {
        let sys = harmonic();
        let two_pi = std::f64::consts::TAU;
        let flow = evolution_flow(&sys, &[0.0, 1.0, 0.0], two_pi, 1e-3, &[]).unwrap();
        assert!(!flow.truncated);
        let last = flow.states.last().unwrap();
        // closed-form oracle: the unit circle orbit returns to start
        assert!((last[0] - 0.0).abs() < 1e-8, "p return error {:e}", last[0]);
        assert!((last[1] - 1.0).abs() < 1e-8);
        // H drift
        let h0 = flow.hamiltonian.first().unwrap();
        let drift = flow
            .hamiltonian
            .iter()
            .fold(0.0f64, |a, h| a.max((h - h0).abs()));
        assert!(drift < 1e-10, "H drift {drift:e}");
        assert!(flow.t_defect < 1e-12);
    }

    #[test]
    fn rk4_is_fourth_order() {
        // halving h divides the period-return error by ≈ 16
        let sys = harmonic();
        let two_pi = std::f64::consts::TAU;
        let err = |h: f64| -> f64 {
            let flow = evolution_flow(&sys, &[0.0, 1.0, 0.0], two_pi, h, &[]).unwrap();
            let last = flow.states.last().unwrap();
            ((last[0]).powi(2) + (last[1] - 1.0).powi(2)).sqrt()
        };
        let e1 = err(0.02);
        let e2 = err(0.01);
        let e3 = err(0.005);
        let r1 = e1 / e2;
        let r2 = e2 / e3;
        assert!((12.0..=20.0).contains(&r1), "ratio {r1}");
        assert!((12.0..=20.0).contains(&r2), "ratio {r2}");
    }

    #[test]
    fn trajectory_exiting_domain_is_truncated() {
        let base = Chart::symmetric("darboux-r2", &["p", "q"], 2.0);
        let omega = constant_two_form(&base, &[(0, 1, -1.0)]);
        let extended = base.extend("darboux-r2-x-r", &[("t", -0.5, 0.5)]);
        let h = ScalarField::constant(&extended, 0.0);
        let sys = cosymplectize(&base, &omega, &h, -0.5, 0.5).unwrap();
        // t exits the box [−0.5, 0.5] after 0.5 time units
        let flow = evolution_flow(&sys, &[0.0, 0.0, 0.0], 2.0, 1e-2, &[]).unwrap();
        assert!(flow.truncated);
        assert!(flow.times.last().unwrap() < &0.6);
    }

    #[test]
    fn geodesic_defect_flat_examples() {
        let s = crate::fixtures::flat_cokahler_r3();
        let pts = SamplePlan::new(50, 55).points(&s.chart);
        // X = ξ = ∂t: defect 0
        let (d, _) = geodesic_defect(&s.g, &s.xi, &pts).unwrap();
        assert!(d < 1e-14);
        // X = x∂_x: |∇_X X| = |x| — negative control
        let x_field = VectorField::from_jets(&s.chart, |p| {
            vec![
                p[0].clone(),
                crate::jet::Jet::constant(0.0, p[0].n_partials()),
                crate::jet::Jet::constant(0.0, p[0].n_partials()),
            ]
        });
        let (d2, worst) = geodesic_defect(&s.g, &x_field, &pts).unwrap();
        let max_x = pts.iter().fold(0.0f64, |a, p| a.max(p[0].abs()));
        assert!((d2 - max_x).abs() < 1e-12, "{d2} vs {max_x} at {worst:?}");
    }
}
