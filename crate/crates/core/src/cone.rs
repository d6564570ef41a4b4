//! Cone constructions: transporting structures between Kähler ↔ coKähler
//! and hyperKähler ↔ 3-cosymplectic by appending flat R (or R³) fibers,
//! and the commutation checks reduce-then-cone vs cone-then-reduce.
//!
//! On M×R over a Kähler base: g = h + dt², φ(X, f∂t) = (JX, 0), ξ = ∂t,
//! η = dt. Over a coKähler base: h = g + dt², J(X, f∂t) = (φX − fξ,
//! η(X)∂t). The quaternionic versions append three fibers with the fixed
//! fiber blocks (see `fixtures::CONE3_F1..3`) or a single fiber per
//! complex structure.

use serde::Serialize;

use crate::chart::Chart;
use crate::error::Result;
use crate::field::{EndoField, FieldEval, KForm, MetricField, SmoothMap, VectorField};
use crate::fixtures::{CONE3_F1, CONE3_F2, CONE3_F3};
use crate::jet::{values, Jet};
use crate::reduction::{
    cokahler_reduce, cosymplectic_reduce, hyperkahler_reduce, kahler_reduce,
    three_cosymplectic_reduce, CoKahlerDatum, CosymplecticDatum, HyperKahlerDatum, KahlerDatum,
    ReductionDatum, ThreeCosymplecticDatum,
};
use crate::sample::SamplePlan;
use crate::structures::{
    AlmostContactMetric, AlmostCosymplectic, ContactTriple, HyperKahlerStructure, KahlerStructure,
    ThreeCosymplectic,
};

pub const CONE_T_LO: f64 = -0.8;
pub const CONE_T_HI: f64 = 0.8;

/// Append one flat fiber t.
pub fn cone_chart(base: &Chart) -> Chart {
    base.extend(&format!("{}-cone", base.name), &[("t", CONE_T_LO, CONE_T_HI)])
}

/// Append three flat fibers (t1, t2, t3).
pub fn cone3_chart(base: &Chart) -> Chart {
    base.extend(
        &format!("{}-cone3", base.name),
        &[
            ("t1", CONE_T_LO, CONE_T_HI),
            ("t2", CONE_T_LO, CONE_T_HI),
            ("t3", CONE_T_LO, CONE_T_HI),
        ],
    )
}

/// Wrap a jet-level closure as the same evaluator kind as its inputs:
/// exact jets stay exact, value-backed inputs stay value-backed.
fn keep_kind(
    exact: bool,
    make: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + Clone + 'static,
) -> FieldEval {
    if exact {
        FieldEval::from_jets(make)
    } else {
        FieldEval::from_values(move |p| values(&make(&crate::jet::constant_point(p, 0))))
    }
}

/// Block-extend a metric: base block h, identity on the fibers.
fn extend_metric(h: &MetricField, cone: &Chart) -> MetricField {
    let base_dim = h.chart.dim();
    let dim = cone.dim();
    let he = h.eval.clone();
    let exact = he.exact_jets();
    MetricField {
        chart: cone.clone(),
        eval: keep_kind(exact, move |p| {
            let n = p[0].n_partials();
            let hv = he.jets(&p[0..base_dim]);
            let mut out = vec![Jet::constant(0.0, n); dim * dim];
            for i in 0..base_dim {
                for j in 0..base_dim {
                    out[i * dim + j] = hv[i * base_dim + j].clone();
                }
            }
            for i in base_dim..dim {
                out[i * dim + i] = Jet::constant(1.0, n);
            }
            out
        }),
    }
}

/// Block-extend an endomorphism: base block plus a constant fiber block.
fn extend_endo(j: &EndoField, cone: &Chart, fiber_block: Vec<f64>) -> EndoField {
    let base_dim = j.chart.dim();
    let dim = cone.dim();
    let fib = dim - base_dim;
    assert_eq!(fiber_block.len(), fib * fib);
    let je = j.eval.clone();
    let exact = je.exact_jets();
    EndoField {
        chart: cone.clone(),
        eval: keep_kind(exact, move |p| {
            let n = p[0].n_partials();
            let jv = je.jets(&p[0..base_dim]);
            let mut out = vec![Jet::constant(0.0, n); dim * dim];
            for i in 0..base_dim {
                for c in 0..base_dim {
                    out[i * dim + c] = jv[i * base_dim + c].clone();
                }
            }
            for r in 0..fib {
                for c in 0..fib {
                    out[(base_dim + r) * dim + (base_dim + c)] =
                        Jet::constant(fiber_block[r * fib + c], n);
                }
            }
            out
        }),
    }
}

/// Kähler base → coKähler cone: g = h + dt², φ = J ⊕ 0, ξ = ∂t, η = dt.
pub fn cone_cokahler(k: &KahlerStructure) -> AlmostContactMetric {
    let cone = cone_chart(&k.chart);
    AlmostContactMetric {
        g: extend_metric(&k.h, &cone),
        phi: extend_endo(&k.j, &cone, vec![0.0]),
        xi: crate::fixtures::dt_vector(&cone),
        eta: crate::fixtures::dt_form(&cone),
        chart: cone,
    }
}

/// coKähler base → Kähler cone: h = g + dt²,
/// J(X, f∂t) = (φX − fξ, η(X)∂t).
pub fn cone_kahler(c: &AlmostContactMetric) -> KahlerStructure {
    let cone = cone_chart(&c.chart);
    let base_dim = c.chart.dim();
    let dim = cone.dim();
    let pe = c.phi.eval.clone();
    let xe = c.xi.eval.clone();
    let ee = c.eta.eval.clone();
    let exact = pe.exact_jets() && xe.exact_jets() && ee.exact_jets();
    let j = EndoField {
        chart: cone.clone(),
        eval: keep_kind(exact, move |p| {
            let n = p[0].n_partials();
            let phi = pe.jets(&p[0..base_dim]);
            let xi = xe.jets(&p[0..base_dim]);
            let eta = ee.jets(&p[0..base_dim]);
            let mut out = vec![Jet::constant(0.0, n); dim * dim];
            for i in 0..base_dim {
                for c in 0..base_dim {
                    out[i * dim + c] = phi[i * base_dim + c].clone();
                }
                // column ∂t: (−ξ, 0)
                out[i * dim + base_dim] = -&xi[i];
                // t-row: η on base columns
                out[base_dim * dim + i] = eta[i].clone();
            }
            out
        }),
    };
    KahlerStructure {
        h: extend_metric(&c.g, &cone),
        j,
        chart: cone,
    }
}

/// HyperKähler base → 3-cosymplectic on M×R³: the three φ_i are J_i on
/// the base plus the fixed quaternionic fiber blocks; ξ_i = ∂t_i,
/// η_i = dt_i, g = h + Σ dt_i².
pub fn cone3_3cosymplectic(hk: &HyperKahlerStructure) -> ThreeCosymplectic {
    let cone = cone3_chart(&hk.chart);
    let base_dim = hk.chart.dim();
    let fiber = [CONE3_F1, CONE3_F2, CONE3_F3];
    let triples: Vec<ContactTriple> = (0..3)
        .map(|i| {
            let mut eta = vec![0.0; cone.dim()];
            eta[base_dim + i] = 1.0;
            ContactTriple {
                phi: extend_endo(&hk.j[i], &cone, fiber[i].to_vec()),
                xi: VectorField::coordinate(&cone, base_dim + i),
                eta: KForm::constant(&cone, 1, eta),
            }
        })
        .collect();
    let triples: [ContactTriple; 3] = triples.try_into().ok().expect("three triples");
    ThreeCosymplectic {
        g: extend_metric(&hk.h, &cone),
        triples,
        chart: cone,
    }
}

/// 3-cosymplectic base → hyperKähler cone: h = g + dt²,
/// J_i(X, f∂t) = (φ_iX − fξ_i, η_i(X)∂t).
pub fn cone_hyperkahler(tc: &ThreeCosymplectic) -> HyperKahlerStructure {
    let cone = cone_chart(&tc.chart);
    let base_dim = tc.chart.dim();
    let dim = cone.dim();
    let j: Vec<EndoField> = (0..3)
        .map(|i| {
            let pe = tc.triples[i].phi.eval.clone();
            let xe = tc.triples[i].xi.eval.clone();
            let ee = tc.triples[i].eta.eval.clone();
            let exact = pe.exact_jets() && xe.exact_jets() && ee.exact_jets();
            EndoField {
                chart: cone.clone(),
                eval: keep_kind(exact, move |p| {
                    let n = p[0].n_partials();
                    let phi = pe.jets(&p[0..base_dim]);
                    let xi = xe.jets(&p[0..base_dim]);
                    let eta = ee.jets(&p[0..base_dim]);
                    let mut out = vec![Jet::constant(0.0, n); dim * dim];
                    for r in 0..base_dim {
                        for c in 0..base_dim {
                            out[r * dim + c] = phi[r * base_dim + c].clone();
                        }
                        out[r * dim + base_dim] = -&xi[r];
                        out[base_dim * dim + r] = eta[r].clone();
                    }
                    out
                }),
            }
        })
        .collect();
    let j: [EndoField; 3] = j.try_into().ok().expect("three structures");
    HyperKahlerStructure {
        h: extend_metric(&tc.g, &cone),
        j,
        chart: cone,
    }
}

// ---------------------------------------------------------------------
// Lifting reduction data to cones
// ---------------------------------------------------------------------

/// Lift a group action to the cone: g·(p, t) = (g·p, t).
pub fn lift_action(action: &crate::action::GroupAction, cone: &Chart) -> crate::action::GroupAction {
    let base_dim = action.chart.dim();
    let dim = cone.dim();
    let inner = action.clone();
    crate::action::GroupAction::new(action.group.clone(), cone.clone(), move |g, p| {
        let mut out = inner.apply_jets(g, &p[0..base_dim]);
        for i in base_dim..dim {
            out.push(p[i].clone());
        }
        out
    })
}

/// Lift a moment map: μ̃ = μ ∘ pr_M.
pub fn lift_moment(mu: &crate::action::MomentMap, cone: &Chart) -> crate::action::MomentMap {
    let base_dim = mu.chart.dim();
    let inner = mu.eval.clone();
    crate::action::MomentMap {
        chart: cone.clone(),
        eval: FieldEval::from_jets(move |p| inner.jets(&p[0..base_dim])),
    }
}

/// Lift a slice: σ̃(x, t) = (σ(x), t) (several fibers allowed).
pub fn lift_slice(slice: &SmoothMap, quotient_cone: &Chart, ambient_cone: &Chart) -> SmoothMap {
    let base_q = slice.source.dim();
    let inner = slice.eval.clone();
    let fibers = quotient_cone.dim() - base_q;
    assert_eq!(ambient_cone.dim() - slice.target.dim(), fibers);
    SmoothMap::from_jets(quotient_cone, ambient_cone, move |q| {
        let mut out = inner.jets(&q[0..base_q]);
        for i in 0..fibers {
            out.push(q[base_q + i].clone());
        }
        out
    })
}

fn lift_projection(
    projection: &Option<SmoothMap>,
    ambient_cone: &Chart,
    quotient_cone: &Chart,
) -> Option<SmoothMap> {
    projection.as_ref().map(|p| {
        let base_m = p.source.dim();
        let fibers = ambient_cone.dim() - base_m;
        let inner = p.eval.clone();
        SmoothMap::from_jets(ambient_cone, quotient_cone, move |x| {
            let mut out = inner.jets(&x[0..base_m]);
            for i in 0..fibers {
                out.push(x[base_m + i].clone());
            }
            out
        })
    })
}

fn lift_datum_core<S, T>(
    datum: &ReductionDatum<S>,
    structure: T,
    ambient_cone: &Chart,
    quotient_cone: &Chart,
) -> ReductionDatum<T> {
    ReductionDatum {
        structure,
        action: lift_action(&datum.action, ambient_cone),
        moments: datum
            .moments
            .iter()
            .map(|m| lift_moment(m, ambient_cone))
            .collect(),
        zetas: datum.zetas.clone(),
        quotient: quotient_cone.clone(),
        slice: lift_slice(&datum.slice, quotient_cone, ambient_cone),
        projection: lift_projection(&datum.projection, ambient_cone, quotient_cone),
        tol: datum.tol,
    }
}

// ---------------------------------------------------------------------
// Commutation comparisons
// ---------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonEntry {
    pub tensor: String,
    pub grid_size: usize,
    pub max_abs_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub schema: u32,
    pub path_a: String,
    pub path_b: String,
    pub pass: bool,
    pub entries: Vec<ComparisonEntry>,
}

impl ComparisonReport {
    fn new(path_a: &str, path_b: &str) -> ComparisonReport {
        ComparisonReport {
            schema: 1,
            path_a: path_a.to_string(),
            path_b: path_b.to_string(),
            pass: true,
            entries: Vec::new(),
        }
    }

    fn push(&mut self, tensor: &str, grid: usize, dev: f64, tol: f64) {
        let pass = dev <= tol;
        self.pass &= pass;
        self.entries.push(ComparisonEntry {
            tensor: tensor.to_string(),
            grid_size: grid,
            max_abs_deviation: dev,
            tolerance: tol,
            pass,
        });
    }

    pub fn entry(&self, tensor: &str) -> Option<&ComparisonEntry> {
        self.entries.iter().find(|e| e.tensor == tensor)
    }

    pub fn max_deviation(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.max_abs_deviation)
            .fold(0.0, f64::max)
    }
}

fn dev_metric(a: &MetricField, b: &MetricField, grid: &[Vec<f64>]) -> f64 {
    grid.iter()
        .map(|p| (a.value(p) - b.value(p)).amax())
        .fold(0.0, f64::max)
}

fn dev_endo(a: &EndoField, b: &EndoField, grid: &[Vec<f64>]) -> f64 {
    grid.iter()
        .map(|p| (a.value(p) - b.value(p)).amax())
        .fold(0.0, f64::max)
}

fn dev_form(a: &KForm, b: &KForm, grid: &[Vec<f64>]) -> f64 {
    grid.iter()
        .map(|p| {
            a.value(p)
                .iter()
                .zip(&b.value(p))
                .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
        })
        .fold(0.0, f64::max)
}

fn dev_vector(a: &VectorField, b: &VectorField, grid: &[Vec<f64>]) -> f64 {
    grid.iter()
        .map(|p| {
            a.value(p)
                .iter()
                .zip(&b.value(p))
                .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
        })
        .fold(0.0, f64::max)
}

/// Kähler base: reduce-then-cone vs cone-then-reduce as coKähler
/// structures on Q×R.
pub fn commute_kahler_to_cokahler(
    datum: &KahlerDatum,
    grid_points: usize,
    tol: f64,
) -> Result<ComparisonReport> {
    let (reduced, _) = match kahler_reduce(datum)? {
        crate::reduction::Reduced::Structure { structure, report } => (structure, report),
        crate::reduction::Reduced::Degenerate { .. } => {
            return Err(crate::error::GeomError::Config(
                "degenerate quotient: nothing to compare".into(),
            ))
        }
    };
    let path_a = cone_cokahler(&reduced);

    let cone_structure = cone_cokahler(&datum.structure);
    let lifted = lift_datum_core(datum, cone_structure, &cone_chart(&datum.structure.chart), &path_a.chart);
    let (path_b, _) = match cokahler_reduce(&lifted)? {
        crate::reduction::Reduced::Structure { structure, report } => (structure, report),
        crate::reduction::Reduced::Degenerate { .. } => unreachable!("cone adds a fiber"),
    };

    let grid = SamplePlan::grid(&path_a.chart, grid_points);
    let mut report = ComparisonReport::new("cone(reduce(M))", "reduce(cone(M))");
    report.push("g", grid.len(), dev_metric(&path_a.g, &path_b.g, &grid), tol);
    report.push("phi", grid.len(), dev_endo(&path_a.phi, &path_b.phi, &grid), tol);
    report.push("eta", grid.len(), dev_form(&path_a.eta, &path_b.eta, &grid), tol);
    report.push("xi", grid.len(), dev_vector(&path_a.xi, &path_b.xi, &grid), tol);
    Ok(report)
}

/// coKähler base: reduce-then-cone vs cone-then-reduce as Kähler
/// structures on Q×R.
pub fn commute_cokahler_to_kahler(
    datum: &CoKahlerDatum,
    grid_points: usize,
    tol: f64,
) -> Result<ComparisonReport> {
    let (reduced, _) = match cokahler_reduce(datum)? {
        crate::reduction::Reduced::Structure { structure, report } => (structure, report),
        crate::reduction::Reduced::Degenerate { .. } => {
            return Err(crate::error::GeomError::Config(
                "degenerate quotient: nothing to compare".into(),
            ))
        }
    };
    let path_a = cone_kahler(&reduced);

    let cone_structure = cone_kahler(&datum.structure);
    let lifted = lift_datum_core(datum, cone_structure, &cone_chart(&datum.structure.chart), &path_a.chart);
    let (path_b, _) = match kahler_reduce(&lifted)? {
        crate::reduction::Reduced::Structure { structure, report } => (structure, report),
        crate::reduction::Reduced::Degenerate { .. } => unreachable!("cone adds a fiber"),
    };

    let grid = SamplePlan::grid(&path_a.chart, grid_points);
    let mut report = ComparisonReport::new("cone(reduce(M))", "reduce(cone(M))");
    report.push("h", grid.len(), dev_metric(&path_a.h, &path_b.h, &grid), tol);
    report.push("j", grid.len(), dev_endo(&path_a.j, &path_b.j, &grid), tol);
    Ok(report)
}

/// HyperKähler base: reduce-then-cone3 vs cone3-then-reduce as
/// 3-cosymplectic structures on Q×R³.
pub fn commute_hyperkahler_to_3cosymplectic(
    datum: &HyperKahlerDatum,
    grid_points: usize,
    tol: f64,
) -> Result<ComparisonReport> {
    let (reduced, _) = match hyperkahler_reduce(datum)? {
        crate::reduction::Reduced::Structure { structure, report } => (structure, report),
        crate::reduction::Reduced::Degenerate { .. } => {
            return Err(crate::error::GeomError::Config(
                "degenerate quotient: nothing to compare".into(),
            ))
        }
    };
    let path_a = cone3_3cosymplectic(&reduced);

    let cone_structure = cone3_3cosymplectic(&datum.structure);
    let lifted = lift_datum_core(
        datum,
        cone_structure,
        &cone3_chart(&datum.structure.chart),
        &path_a.chart,
    );
    let (path_b, _) = match three_cosymplectic_reduce(&lifted)? {
        crate::reduction::Reduced::Structure { structure, report } => (structure, report),
        crate::reduction::Reduced::Degenerate { .. } => unreachable!("cone adds fibers"),
    };

    let grid = SamplePlan::grid(&path_a.chart, grid_points);
    let mut report = ComparisonReport::new("cone3(reduce(M))", "reduce(cone3(M))");
    report.push("g", grid.len(), dev_metric(&path_a.g, &path_b.g, &grid), tol);
    for i in 0..3 {
        report.push(
            &format!("phi{}", i + 1),
            grid.len(),
            dev_endo(&path_a.triples[i].phi, &path_b.triples[i].phi, &grid),
            tol,
        );
        report.push(
            &format!("eta{}", i + 1),
            grid.len(),
            dev_form(&path_a.triples[i].eta, &path_b.triples[i].eta, &grid),
            tol,
        );
        report.push(
            &format!("xi{}", i + 1),
            grid.len(),
            dev_vector(&path_a.triples[i].xi, &path_b.triples[i].xi, &grid),
            tol,
        );
    }
    Ok(report)
}

/// 3-cosymplectic base: reduce-then-cone vs cone-then-reduce as
/// hyperKähler structures on Q×R.
pub fn commute_3cosymplectic_to_hyperkahler(
    datum: &ThreeCosymplecticDatum,
    grid_points: usize,
    tol: f64,
) -> Result<ComparisonReport> {
    let (reduced, _) = match three_cosymplectic_reduce(datum)? {
        crate::reduction::Reduced::Structure { structure, report } => (structure, report),
        crate::reduction::Reduced::Degenerate { .. } => {
            return Err(crate::error::GeomError::Config(
                "degenerate quotient: nothing to compare".into(),
            ))
        }
    };
    let path_a = cone_hyperkahler(&reduced);

    let cone_structure = cone_hyperkahler(&datum.structure);
    let lifted = lift_datum_core(
        datum,
        cone_structure,
        &cone_chart(&datum.structure.chart),
        &path_a.chart,
    );
    let (path_b, _) = match hyperkahler_reduce(&lifted)? {
        crate::reduction::Reduced::Structure { structure, report } => (structure, report),
        crate::reduction::Reduced::Degenerate { .. } => unreachable!("cone adds a fiber"),
    };

    let grid = SamplePlan::grid(&path_a.chart, grid_points);
    let mut report = ComparisonReport::new("cone(reduce(M))", "reduce(cone(M))");
    report.push("h", grid.len(), dev_metric(&path_a.h, &path_b.h, &grid), tol);
    for i in 0..3 {
        report.push(
            &format!("j{}", i + 1),
            grid.len(),
            dev_endo(&path_a.j[i], &path_b.j[i], &grid),
            tol,
        );
    }
    Ok(report)
}

/// The trivial-group sanity version: both sides must agree to machine
/// precision because both equal the plain cone of the base structure.
pub fn commute_trivial_cosymplectic(base: &AlmostCosymplectic) -> Result<ComparisonReport> {
    let datum: CosymplecticDatum =
        crate::fixtures::trivial_datum(base.clone(), &base.chart.clone());
    let (reduced, _) = match cosymplectic_reduce(&datum)? {
        crate::reduction::Reduced::Structure { structure, report } => (structure, report),
        crate::reduction::Reduced::Degenerate { .. } => unreachable!("trivial group"),
    };
    let grid = SamplePlan::grid(&base.chart, 50);
    let mut report = ComparisonReport::new("reduce(M)", "M");
    report.push("eta", grid.len(), dev_form(&reduced.eta, &base.eta, &grid), 1e-12);
    report.push(
        "omega",
        grid.len(),
        dev_form(&reduced.omega, &base.omega, &grid),
        1e-12,
    );
    Ok(report)
}
