//! Mapping tori of Kähler manifolds.
//!
//! The mapping torus S_f = (S×[0,1])/{(p,0) ~ (f(p),1)} of a Hermitian
//! isometry f is modeled by a two-chart atlas on S×(0,1) and S×(−½,½)
//! with the transition (p, θ) ↦ (f(p), θ+1) across the seam. Each chart
//! carries the product structure φ = J̃, η = dθ, ξ = ∂θ,
//! g = h̃ + η⊗η; the gluing consistency on overlaps is exactly the
//! Hermitian-isometry property of f, which the atlas constructor
//! verifies by sampling.

use crate::chart::Chart;
use crate::cone::ComparisonReport;
use crate::error::{GeomError, Result};
use crate::field::{FieldEval, SmoothMap};
use crate::jet::Jet;
use crate::ops::{pullback, pullback_endo, pullback_metric, pullback_vector};
use crate::reduction::{cokahler_reduce, kahler_reduce, CoKahlerDatum, KahlerDatum, ReductionDatum};
use crate::report::{ResidualTracker, Tolerances, VerificationReport};
use crate::sample::SamplePlan;
use crate::structures::{AlmostContactMetric, KahlerStructure};

#[derive(Clone)]
pub struct MappingTorusAtlas {
    pub kahler: KahlerStructure,
    pub isometry: SmoothMap,
    pub inverse: SmoothMap,
    pub chart_a: Chart,
    pub chart_b: Chart,
}

/// The two torus charts over a base chart.
pub fn torus_charts(base: &Chart) -> (Chart, Chart) {
    let a = base.extend(&format!("{}-torus-a", base.name), &[("theta", 0.0, 1.0)]);
    let b = base.extend(&format!("{}-torus-b", base.name), &[("theta", -0.5, 0.5)]);
    (a, b)
}

impl MappingTorusAtlas {
    /// Build the atlas, verifying that f is a Hermitian isometry of the
    /// base Kähler structure (f*h = h, f ∘ J = J ∘ f) and that
    /// `inverse` inverts it; violations raise an atlas error.
    pub fn new(
        kahler: &KahlerStructure,
        isometry: SmoothMap,
        inverse: SmoothMap,
        plan: &SamplePlan,
        tol: &Tolerances,
    ) -> Result<MappingTorusAtlas> {
        kahler.chart.check_same(&isometry.source)?;
        kahler.chart.check_same(&isometry.target)?;
        let report = verify_hermitian_isometry(kahler, &isometry, &inverse, plan, tol);
        if !report.pass {
            let worst = report
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| format!("{} = {:.3e}", c.check_name, c.max_residual))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(GeomError::Atlas(format!(
                "f is not a Hermitian isometry of the base: {worst}"
            )));
        }
        let (chart_a, chart_b) = torus_charts(&kahler.chart);
        Ok(MappingTorusAtlas {
            kahler: kahler.clone(),
            isometry,
            inverse,
            chart_a,
            chart_b,
        })
    }

    /// The transition from chart B's seam half (θ ∈ (−½, 0)) into chart A:
    /// (p, θ) ↦ (f(p), θ + 1).
    pub fn transition_b_to_a(&self) -> SmoothMap {
        let base_dim = self.kahler.chart.dim();
        let f = self.isometry.eval.clone();
        SmoothMap::from_jets(&self.chart_b, &self.chart_a, move |p| {
            let mut out = f.jets(&p[0..base_dim]);
            out.push(&p[base_dim] + 1.0);
            out
        })
    }
}

/// f*h = h, f∘J = J∘f and f⁻¹∘f = id, sampled.
pub fn verify_hermitian_isometry(
    kahler: &KahlerStructure,
    isometry: &SmoothMap,
    inverse: &SmoothMap,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> VerificationReport {
    let mut report = VerificationReport::new("hermitian_isometry");
    let mut metric = ResidualTracker::new("isometry_pullback_metric", tol.jet);
    let mut complex = ResidualTracker::new("isometry_commutes_with_j", tol.jet);
    let mut inv = ResidualTracker::new("inverse_of_isometry", tol.jet);
    let pb_h = pullback_metric(isometry, &kahler.h).expect("chart match");
    let pb_j = pullback_endo(isometry, &kahler.j).expect("chart match");
    for p in plan.points(&kahler.chart) {
        metric.record(&p, (pb_h.value(&p) - kahler.h.value(&p)).amax());
        complex.record(&p, (pb_j.value(&p) - kahler.j.value(&p)).amax());
        let back = inverse.value(&isometry.value(&p));
        let r = back
            .iter()
            .zip(&p)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        inv.record(&p, r);
    }
    report.push(metric.finish());
    report.push(complex.finish());
    report.push(inv.finish());
    report
}

/// The product coKähler structure on one torus chart:
/// g = h̃ + dθ², φ = J̃ ⊕ 0, ξ = ∂θ, η = dθ.
pub fn chart_structure(kahler: &KahlerStructure, chart: &Chart) -> AlmostContactMetric {
    let base_dim = kahler.chart.dim();
    let dim = chart.dim();
    let he = kahler.h.eval.clone();
    let je = kahler.j.eval.clone();
    let exact_h = he.exact_jets();
    let exact_j = je.exact_jets();
    let metric_make = move |p: &[Jet]| -> Vec<Jet> {
        let n = p[0].n_partials();
        let hv = he.jets(&p[0..base_dim]);
        let mut out = vec![Jet::constant(0.0, n); dim * dim];
        for i in 0..base_dim {
            for j in 0..base_dim {
                out[i * dim + j] = hv[i * base_dim + j].clone();
            }
        }
        out[(dim - 1) * dim + (dim - 1)] = Jet::constant(1.0, n);
        out
    };
    let endo_make = move |p: &[Jet]| -> Vec<Jet> {
        let n = p[0].n_partials();
        let jv = je.jets(&p[0..base_dim]);
        let mut out = vec![Jet::constant(0.0, n); dim * dim];
        for i in 0..base_dim {
            for c in 0..base_dim {
                out[i * dim + c] = jv[i * base_dim + c].clone();
            }
        }
        out
    };
    AlmostContactMetric {
        g: crate::field::MetricField {
            chart: chart.clone(),
            eval: if exact_h {
                FieldEval::from_jets(metric_make)
            } else {
                FieldEval::from_values(move |p| {
                    crate::jet::values(&metric_make(&crate::jet::constant_point(p, 0)))
                })
            },
        },
        phi: crate::field::EndoField {
            chart: chart.clone(),
            eval: if exact_j {
                FieldEval::from_jets(endo_make)
            } else {
                FieldEval::from_values(move |p| {
                    crate::jet::values(&endo_make(&crate::jet::constant_point(p, 0)))
                })
            },
        },
        xi: crate::fixtures::dt_vector(chart),
        eta: crate::fixtures::dt_form(chart),
        chart: chart.clone(),
    }
}

/// Both chart structures of the mapping torus (they pass verify_cokahler
/// whenever the base is Kähler) plus the overlap consistency checks:
/// the transition pullback carries chart A's tensors to chart B's on the
/// seam region, and the two charts agree identically on the shared region.
pub fn mapping_torus_cokahler(
    atlas: &MappingTorusAtlas,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> (AlmostContactMetric, AlmostContactMetric, VerificationReport) {
    let s_a = chart_structure(&atlas.kahler, &atlas.chart_a);
    let s_b = chart_structure(&atlas.kahler, &atlas.chart_b);
    let mut report = VerificationReport::new("mapping_torus_overlap");

    // seam region: θ_B ∈ (−½, 0) maps into chart A via (f(p), θ+1)
    let seam = atlas.kahler.chart.extend(
        &format!("{}-seam", atlas.kahler.chart.name),
        &[("theta", -0.45, -0.05)],
    );
    let transition = atlas.transition_b_to_a();
    let pb_g = pullback_metric(&transition, &s_a.g).expect("chart");
    let pb_phi = pullback_endo(&transition, &s_a.phi).expect("chart");
    let pb_eta = pullback(&transition, &s_a.eta).expect("chart");
    let pb_xi = pullback_vector(&transition, &s_a.xi).expect("chart");
    let mut g_track = ResidualTracker::new("overlap_g", 1e-8);
    let mut phi_track = ResidualTracker::new("overlap_phi", 1e-8);
    let mut eta_track = ResidualTracker::new("overlap_eta", 1e-8);
    let mut xi_track = ResidualTracker::new("overlap_xi", 1e-8);
    for p in plan.points(&seam) {
        g_track.record(&p, (pb_g.value(&p) - s_b.g.value(&p)).amax());
        phi_track.record(&p, (pb_phi.value(&p) - s_b.phi.value(&p)).amax());
        let (ea, eb) = (pb_eta.value(&p), s_b.eta.value(&p));
        eta_track.record(
            &p,
            ea.iter()
                .zip(&eb)
                .fold(0.0f64, |a, (x, y)| a.max((x - y).abs())),
        );
        let (xa, xb) = (pb_xi.value(&p), s_b.xi.value(&p));
        xi_track.record(
            &p,
            xa.iter()
                .zip(&xb)
                .fold(0.0f64, |a, (x, y)| a.max((x - y).abs())),
        );
    }
    report.push(g_track.finish());
    report.push(phi_track.finish());
    report.push(eta_track.finish());
    report.push(xi_track.finish());

    // shared region θ ∈ (0, ½): identity transition, identical formulas
    let shared = atlas.kahler.chart.extend(
        &format!("{}-shared", atlas.kahler.chart.name),
        &[("theta", 0.05, 0.45)],
    );
    let mut same = ResidualTracker::new("shared_region_identity", tol.algebraic);
    for p in plan.points(&shared) {
        let r = (s_a.g.value(&p) - s_b.g.value(&p)).amax();
        same.record(&p, r);
    }
    report.push(same.finish());

    (s_a, s_b, report)
}

/// The lifted-action criterion: the difference μ∘f − μ must be constant
/// over S (else the equivariance/moment-map data is inconsistent);
/// the lift exists iff that constant vanishes, in which case
/// μ̃[(p, θ)] = μ(p) is the lifted moment map.
pub struct MomentLift {
    pub lifts: bool,
    pub constant: Vec<f64>,
    pub lifted_a: Option<crate::action::MomentMap>,
    pub lifted_b: Option<crate::action::MomentMap>,
    pub report: VerificationReport,
}

pub fn moment_lift_check(
    atlas: &MappingTorusAtlas,
    action: &crate::action::GroupAction,
    mu: &crate::action::MomentMap,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> Result<MomentLift> {
    let mut report = VerificationReport::new("moment_lift");
    // equivariance of f: f(g·p) = g·f(p), sampled
    let mut equiv = ResidualTracker::new("isometry_equivariance", tol.jet);
    for g in action.group.sample_elements(4, plan.seed ^ 0xf0) {
        for p in plan.points(&atlas.kahler.chart) {
            let a = atlas.isometry.value(&action.apply(&g, &p));
            let b = action.apply(&g, &atlas.isometry.value(&p));
            let r = a
                .iter()
                .zip(&b)
                .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()));
            equiv.record(&p, r);
        }
    }
    let equiv_check = equiv.finish();
    let equivariant = equiv_check.pass;
    report.push(equiv_check);
    if !equivariant {
        return Err(GeomError::Equivariance(
            "f is not equivariant for the action".into(),
        ));
    }

    // μ(f(p)) − μ(p) must be constant
    let pts = plan.points(&atlas.kahler.chart);
    let first = {
        let p = &pts[0];
        let mf = mu.value(&atlas.isometry.value(p));
        let m = mu.value(p);
        mf.iter().zip(&m).map(|(a, b)| a - b).collect::<Vec<f64>>()
    };
    let mut spread = ResidualTracker::new("difference_constancy_spread", 1e-9);
    for p in &pts {
        let mf = mu.value(&atlas.isometry.value(p));
        let m = mu.value(p);
        let r = mf
            .iter()
            .zip(&m)
            .zip(&first)
            .fold(0.0f64, |acc, ((a, b), c)| acc.max((a - b - c).abs()));
        spread.record(p, r);
    }
    let spread_check = spread.finish();
    let constant_ok = spread_check.pass;
    report.push(spread_check);
    if !constant_ok {
        return Err(GeomError::Equivariance(format!(
            "μ∘f − μ is not constant (moment-map data inconsistent with the proposition)"
        )));
    }

    let lifts = first.iter().all(|c| c.abs() < 1e-9);
    let mut lift_track = ResidualTracker::new("lift_exists_constant_is_zero", 1e-9);
    lift_track.record(&pts[0], first.iter().fold(0.0f64, |a, c| a.max(c.abs())));
    let lift_check = lift_track.finish();
    report.checks.push(lift_check);

    let (lifted_a, lifted_b) = if lifts {
        let base_dim = atlas.kahler.chart.dim();
        let me = mu.eval.clone();
        let lift = move |chart: &Chart| crate::action::MomentMap {
            chart: chart.clone(),
            eval: {
                let me = me.clone();
                FieldEval::from_jets(move |p: &[Jet]| me.jets(&p[0..base_dim]))
            },
        };
        (Some(lift(&atlas.chart_a)), Some(lift(&atlas.chart_b)))
    } else {
        (None, None)
    };
    Ok(MomentLift {
        lifts,
        constant: first,
        lifted_a,
        lifted_b,
        report,
    })
}

/// Lift a Kähler reduction datum to one torus chart of the atlas.
fn lift_datum_to_chart(
    datum: &KahlerDatum,
    chart: &Chart,
    quotient_chart: &Chart,
    lifted_mu: &crate::action::MomentMap,
) -> CoKahlerDatum {
    let base_dim = datum.structure.chart.dim();
    let inner_action = datum.action.clone();
    let dim = chart.dim();
    let action = crate::action::GroupAction::new(
        datum.action.group.clone(),
        chart.clone(),
        move |g, p| {
            let mut out = inner_action.apply_jets(g, &p[0..base_dim]);
            for i in base_dim..dim {
                out.push(p[i].clone());
            }
            out
        },
    );
    let slice_inner = datum.slice.eval.clone();
    let base_q = datum.quotient.dim();
    let slice = SmoothMap::from_jets(quotient_chart, chart, move |q| {
        let mut out = slice_inner.jets(&q[0..base_q]);
        out.push(q[base_q].clone());
        out
    });
    let projection = datum.projection.as_ref().map(|p| {
        let inner = p.eval.clone();
        SmoothMap::from_jets(chart, quotient_chart, move |x| {
            let mut out = inner.jets(&x[0..base_dim]);
            out.push(x[base_dim].clone());
            out
        })
    });
    ReductionDatum {
        structure: chart_structure(&datum.structure, chart),
        action,
        moments: vec![lifted_mu.clone()],
        zetas: datum.zetas.clone(),
        quotient: quotient_chart.clone(),
        slice,
        projection,
        tol: datum.tol,
    }
}

/// Reduce-then-torus vs torus-then-reduce, per chart, plus the
/// Hermitian-isometry certification of the descended map f^ζ = π∘f∘σ.
pub struct TorusCommutation {
    pub report_a: ComparisonReport,
    pub report_b: ComparisonReport,
    pub f_zeta_isometry: VerificationReport,
    pub pass: bool,
}

pub fn commutation_torus_reduce(
    atlas: &MappingTorusAtlas,
    datum: &KahlerDatum,
    grid_points: usize,
    tol: f64,
) -> Result<TorusCommutation> {
    let plan = SamplePlan::new(60, 7);
    let tolerances = datum.tol;

    // the lift must exist
    let lift = moment_lift_check(atlas, &datum.action, &datum.moments[0], &plan, &tolerances)?;
    if !lift.lifts {
        return Err(GeomError::Equivariance(
            "moment map does not lift to the torus (μ∘f ≠ μ)".into(),
        ));
    }

    // path 2 first: reduce the base, then build the torus of the quotient
    let (reduced_k, _) = match kahler_reduce(datum)? {
        crate::reduction::Reduced::Structure { structure, report } => (structure, report),
        crate::reduction::Reduced::Degenerate { .. } => {
            return Err(GeomError::Config("degenerate quotient".into()))
        }
    };
    let projection = datum
        .projection
        .as_ref()
        .ok_or_else(|| GeomError::Config("torus commutation needs an explicit projection".into()))?;
    let f_zeta = datum.slice.then(&atlas.isometry).then(projection);
    let f_zeta_inv = datum.slice.then(&atlas.inverse).then(projection);
    // Hermitian-isometry certification of the descended map f^ζ
    let f_zeta_isometry =
        verify_hermitian_isometry(&reduced_k, &f_zeta, &f_zeta_inv, &plan, &tolerances);
    let quotient_atlas = MappingTorusAtlas {
        kahler: reduced_k.clone(),
        isometry: f_zeta,
        inverse: f_zeta_inv,
        chart_a: torus_charts(&reduced_k.chart).0,
        chart_b: torus_charts(&reduced_k.chart).1,
    };
    let path2_a = chart_structure(&quotient_atlas.kahler, &quotient_atlas.chart_a);
    let path2_b = chart_structure(&quotient_atlas.kahler, &quotient_atlas.chart_b);

    // path 1: the torus of the base, reduced chart by chart
    let mut reports = Vec::new();
    for (torus_chart, quotient_chart, path2) in [
        (
            &atlas.chart_a,
            &quotient_atlas.chart_a,
            &path2_a,
        ),
        (
            &atlas.chart_b,
            &quotient_atlas.chart_b,
            &path2_b,
        ),
    ] {
        let lifted_mu = if torus_chart == &atlas.chart_a {
            lift.lifted_a.as_ref().unwrap()
        } else {
            lift.lifted_b.as_ref().unwrap()
        };
        let chart_datum = lift_datum_to_chart(datum, torus_chart, quotient_chart, lifted_mu);
        let (path1, _) = match cokahler_reduce(&chart_datum)? {
            crate::reduction::Reduced::Structure { structure, report } => (structure, report),
            crate::reduction::Reduced::Degenerate { .. } => {
                return Err(GeomError::Config("degenerate quotient".into()))
            }
        };
        let grid = SamplePlan::grid(quotient_chart, grid_points);
        let mut report = ComparisonReport {
            schema: 1,
            path_a: "reduce(torus(S))".into(),
            path_b: "torus(reduce(S))".into(),
            pass: true,
            entries: Vec::new(),
        };
        let dev_metric = grid
            .iter()
            .map(|p| (path1.g.value(p) - path2.g.value(p)).amax())
            .fold(0.0f64, f64::max);
        let dev_phi = grid
            .iter()
            .map(|p| (path1.phi.value(p) - path2.phi.value(p)).amax())
            .fold(0.0f64, f64::max);
        let dev_eta = grid
            .iter()
            .map(|p| {
                path1
                    .eta
                    .value(p)
                    .iter()
                    .zip(&path2.eta.value(p))
                    .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
            })
            .fold(0.0f64, f64::max);
        let dev_xi = grid
            .iter()
            .map(|p| {
                path1
                    .xi
                    .value(p)
                    .iter()
                    .zip(&path2.xi.value(p))
                    .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
            })
            .fold(0.0f64, f64::max);
        let mut push = |name: &str, dev: f64| {
            let pass = dev <= tol;
            report.pass &= pass;
            report.entries.push(crate::cone::ComparisonEntry {
                tensor: name.into(),
                grid_size: grid.len(),
                max_abs_deviation: dev,
                tolerance: tol,
                pass,
            });
        };
        push("g", dev_metric);
        push("phi", dev_phi);
        push("eta", dev_eta);
        push("xi", dev_xi);
        reports.push(report);
    }
    let report_b = reports.pop().expect("chart B");
    let report_a = reports.pop().expect("chart A");
    let pass = report_a.pass && report_b.pass && f_zeta_isometry.pass;
    Ok(TorusCommutation {
        report_a,
        report_b,
        f_zeta_isometry,
        pass,
    })
}

// ---------------------------------------------------------------------
// Isometry fixtures
// ---------------------------------------------------------------------

/// Rotation of one complex plane: z ↦ e^{iα} z on R² charts.
pub fn rotation_isometry(chart: &Chart, alpha: f64) -> SmoothMap {
    let (c, s) = (alpha.cos(), alpha.sin());
    SmoothMap::from_jets(chart, chart, move |p| {
        vec![&(&p[0] * c) - &(&p[1] * s), &(&p[0] * s) + &(&p[1] * c)]
    })
}

/// Blockwise rotation (e^{iα}z1, e^{iβ}z2) on C² charts; commutes with the
/// diagonal S¹ action and preserves μ = ½|z|².
pub fn block_rotation_isometry(chart: &Chart, alpha: f64, beta: f64) -> SmoothMap {
    let (ca, sa) = (alpha.cos(), alpha.sin());
    let (cb, sb) = (beta.cos(), beta.sin());
    SmoothMap::from_jets(chart, chart, move |p| {
        vec![
            &(&p[0] * ca) - &(&p[1] * sa),
            &(&p[0] * sa) + &(&p[1] * ca),
            &(&p[2] * cb) - &(&p[3] * sb),
            &(&p[2] * sb) + &(&p[3] * cb),
        ]
    })
}

/// A shear of the plane: not an isometry (atlas construction must refuse).
pub fn shear_map(chart: &Chart, k: f64) -> SmoothMap {
    SmoothMap::from_jets(chart, chart, move |p| {
        vec![&p[0] + &(&p[1] * k), p[1].clone()]
    })
}

/// Translation of the y coordinate on C (equivariant for x-shifts,
/// shifts the moment map by a nonzero constant).
pub fn y_translation(chart: &Chart, c: f64) -> SmoothMap {
    SmoothMap::from_jets(chart, chart, move |p| vec![p[0].clone(), &p[1] + c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{translation_group, GroupAction, MomentMap};
    use crate::fixtures::*;
    use crate::structures::verify_cokahler;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn identity_isometry_builds_product_atlas() {
        let k = flat_kahler_r2();
        let f = SmoothMap::identity(&k.chart);
        let atlas =
            MappingTorusAtlas::new(&k, f.clone(), f, &SamplePlan::new(40, 7), &tol()).unwrap();
        let (s_a, s_b, overlap) = mapping_torus_cokahler(&atlas, &SamplePlan::new(60, 7), &tol());
        assert!(overlap.pass);
        assert!(overlap.max_residual() < 1e-12);
        let r_a = verify_cokahler(&s_a, &SamplePlan::new(80, 7), &tol());
        let r_b = verify_cokahler(&s_b, &SamplePlan::new(80, 7), &tol());
        assert!(r_a.pass && r_b.pass);
    }

    #[test]
    fn irrational_rotation_charts_agree_on_overlap() {
        let k = flat_kahler_r2();
        let alpha = std::f64::consts::SQRT_2; // irrational multiple of 2π
        let f = rotation_isometry(&k.chart, alpha);
        let f_inv = rotation_isometry(&k.chart, -alpha);
        let atlas = MappingTorusAtlas::new(&k, f, f_inv, &SamplePlan::new(40, 7), &tol()).unwrap();
        let (_, _, overlap) = mapping_torus_cokahler(&atlas, &SamplePlan::new(60, 7), &tol());
        assert!(overlap.pass);
        assert!(overlap.check("overlap_g").unwrap().max_residual < 1e-10);
        assert!(overlap.check("overlap_phi").unwrap().max_residual < 1e-10);
    }

    #[test]
    fn shear_is_rejected() {
        let k = flat_kahler_r2();
        let f = shear_map(&k.chart, 0.3);
        let f_inv = shear_map(&k.chart, -0.3);
        match MappingTorusAtlas::new(&k, f, f_inv, &SamplePlan::new(30, 7), &tol()) {
            Err(GeomError::Atlas(_)) => {}
            other => panic!("expected atlas error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn moment_lift_identity_and_rotation() {
        // identity → lift exists
        let datum = s1_c2_kahler_datum();
        let k = &datum.structure;
        let id = SmoothMap::identity(&k.chart);
        let atlas =
            MappingTorusAtlas::new(k, id.clone(), id, &SamplePlan::new(30, 7), &tol()).unwrap();
        let lift = moment_lift_check(
            &atlas,
            &datum.action,
            &datum.moments[0],
            &SamplePlan::new(40, 7),
            &tol(),
        )
        .unwrap();
        assert!(lift.lifts);
        assert!(lift.lifted_a.is_some());

        // S¹-equivariant block rotation preserves |z|: lift exists, direct
        // evaluation residual < 1e-12
        let f = block_rotation_isometry(&k.chart, 0.7, -0.4);
        let f_inv = block_rotation_isometry(&k.chart, -0.7, 0.4);
        let atlas2 = MappingTorusAtlas::new(k, f, f_inv, &SamplePlan::new(30, 7), &tol()).unwrap();
        let lift2 = moment_lift_check(
            &atlas2,
            &datum.action,
            &datum.moments[0],
            &SamplePlan::new(40, 7),
            &tol(),
        )
        .unwrap();
        assert!(lift2.lifts);
        assert!(lift2.constant[0].abs() < 1e-12);
    }

    #[test]
    fn shifted_moment_is_constant_nonzero_so_no_lift() {
        // y-translation on C with the x-shift action and μ = −y:
        // μ(f(p)) − μ(p) = −0.3, constant and nonzero → no lift
        let k = flat_kahler_r2();
        let action = GroupAction::new(translation_group(), k.chart.clone(), |g, p| {
            vec![&p[0] + &g[1], p[1].clone()]
        });
        let mu = MomentMap::from_jets(&k.chart, |p| vec![-&p[1]]);
        let f = y_translation(&k.chart, 0.3);
        let f_inv = y_translation(&k.chart, -0.3);
        let atlas = MappingTorusAtlas::new(&k, f, f_inv, &SamplePlan::new(30, 7), &tol()).unwrap();
        let lift =
            moment_lift_check(&atlas, &action, &mu, &SamplePlan::new(40, 7), &tol()).unwrap();
        assert!(!lift.lifts);
        assert!((lift.constant[0] + 0.3).abs() < 1e-12);
        assert!(lift.lifted_a.is_none());
    }

    #[test]
    fn torus_commutation_identity() {
        let datum = s1_c2_kahler_datum();
        let id = SmoothMap::identity(&datum.structure.chart);
        let atlas = MappingTorusAtlas::new(
            &datum.structure,
            id.clone(),
            id,
            &SamplePlan::new(30, 7),
            &tol(),
        )
        .unwrap();
        let out = commutation_torus_reduce(&atlas, &datum, 100, 1e-6).unwrap();
        assert!(
            out.pass,
            "A: {:?}\nB: {:?}",
            out.report_a.entries, out.report_b.entries
        );
    }

    #[test]
    fn torus_commutation_with_commuting_rotation() {
        let datum = s1_c2_kahler_datum();
        let f = block_rotation_isometry(&datum.structure.chart, 0.7, -0.4);
        let f_inv = block_rotation_isometry(&datum.structure.chart, -0.7, 0.4);
        let atlas =
            MappingTorusAtlas::new(&datum.structure, f, f_inv, &SamplePlan::new(30, 7), &tol())
                .unwrap();
        let out = commutation_torus_reduce(&atlas, &datum, 100, 1e-6).unwrap();
        assert!(
            out.pass,
            "A: {:?}\nB: {:?}\nf^ζ: {:?}",
            out.report_a.entries,
            out.report_b.entries,
            out.f_zeta_isometry
                .checks
                .iter()
                .map(|c| (&c.check_name, c.max_residual))
                .collect::<Vec<_>>()
        );
        // f^ζ Hermitian-isometry residual < 1e-8
        assert!(out.f_zeta_isometry.max_residual() < 1e-8);
    }
}
