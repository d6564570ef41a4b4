//! Scenario files and the built-in fixture catalog.
//!
//! A scenario is a JSON object selecting a kind of run (verify, reduce,
//! flow, commute, rigid-body), either a built-in fixture by name or an
//! inline structure whose tensor components are arithmetic expressions in
//! the chart coordinates, plus sampling (count, seed), tolerances and
//! output paths. Reports serialize with 17 significant digits; rerunning
//! a scenario with the same seed is byte-identical.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::expr::parse;
use crate::field::{EndoField, KForm, MetricField, ScalarField, VectorField};
use crate::fixtures;
use crate::form::comb_rank;
use crate::jet::Jet;
use crate::report::{to_json_17, Tolerances, VerificationReport};
use crate::sample::SamplePlan;
use crate::structures::{
    verify_3cosymplectic, verify_cokahler, verify_cosymplectic, verify_hyperkahler,
    verify_kahler, AlmostContactMetric, AlmostCosymplectic, KahlerStructure,
};

// ---------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct BuiltinInfo {
    pub name: &'static str,
    pub kind: &'static str,
    pub expect_pass: bool,
    pub description: &'static str,
}

pub fn catalog() -> Vec<BuiltinInfo> {
    vec![
        BuiltinInfo { name: "canonical-r3", kind: "verify", expect_pass: true, description: "canonical cosymplectic R^3: eta = dt, omega = dq∧dp" },
        BuiltinInfo { name: "canonical-r5", kind: "verify", expect_pass: true, description: "canonical cosymplectic R^5 with two Darboux blocks" },
        BuiltinInfo { name: "flat-cokahler-r3", kind: "verify", expect_pass: true, description: "flat coKähler C×R (euclidean metric, standard rotation)" },
        BuiltinInfo { name: "flat-cokahler-r5", kind: "verify", expect_pass: true, description: "flat coKähler C²×R" },
        BuiltinInfo { name: "flat-kahler-r2", kind: "verify", expect_pass: true, description: "flat Kähler plane" },
        BuiltinInfo { name: "flat-kahler-c2", kind: "verify", expect_pass: true, description: "flat Kähler C²" },
        BuiltinInfo { name: "flat-hyperkahler-h", kind: "verify", expect_pass: true, description: "flat hyperKähler quaternions with J1J2 = J3" },
        BuiltinInfo { name: "flat-3cosym-r7", kind: "verify", expect_pass: true, description: "flat 3-cosymplectic H×R³" },
        BuiltinInfo { name: "contact-r3", kind: "verify", expect_pass: false, description: "contact R³ (omega = d eta): fails the d-eta stage" },
        BuiltinInfo { name: "sasakian-r3", kind: "verify", expect_pass: false, description: "Sasakian Heisenberg model: contact metric, fails closedness" },
        BuiltinInfo { name: "tilted-cokahler-r3", kind: "verify", expect_pass: false, description: "tilted contact plane: pointwise axioms hold, nabla-phi fails" },
        BuiltinInfo { name: "twisted-kahler-r4", kind: "verify", expect_pass: false, description: "non-integrable almost-complex perturbation: nabla-J fails" },
        BuiltinInfo { name: "nonclosed-omega-r3", kind: "verify", expect_pass: false, description: "almost cosymplectic with d omega != 0" },
        BuiltinInfo { name: "degenerate-omega-r3", kind: "verify", expect_pass: false, description: "omega vanishing on a thin slab: nondegeneracy fails" },
        BuiltinInfo { name: "s1-c2xr", kind: "reduce", expect_pass: true, description: "S¹ on flat coKähler C²×R at zeta = 1/2 (Fubini–Study quotient)" },
        BuiltinInfo { name: "s1-c2xr-cosym", kind: "reduce", expect_pass: true, description: "the same scenario reduced as a plain cosymplectic structure" },
        BuiltinInfo { name: "s1-c2", kind: "reduce", expect_pass: true, description: "S¹ on flat Kähler C² at zeta = 1/2" },
        BuiltinInfo { name: "q2-shift-r5", kind: "reduce", expect_pass: true, description: "q2-translation on canonical R^5 with mu = p2 at zeta = 0" },
        BuiltinInfo { name: "s1-hxr3", kind: "reduce", expect_pass: true, description: "S¹ on H×R³ with the quaternionic moment triple" },
        BuiltinInfo { name: "rtrans-h2", kind: "reduce", expect_pass: true, description: "R-translation on flat hyperKähler H²" },
        BuiltinInfo { name: "point-quotient", kind: "reduce", expect_pass: true, description: "R-translation on C: 0-dimensional quotient, degenerate pass" },
        BuiltinInfo { name: "harmonic-oscillator", kind: "flow", expect_pass: true, description: "cosymplectization of the harmonic oscillator" },
        BuiltinInfo { name: "free-particle", kind: "flow", expect_pass: true, description: "zero Hamiltonian: straight-line flow in t" },
    ]
}

// ---------------------------------------------------------------------
// Scenario schema
// ---------------------------------------------------------------------

#[derive(Clone, Debug, Deserialize)]
pub struct ScenarioFile {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub kind: String,
    #[serde(default)]
    pub builtin: Option<String>,
    #[serde(default)]
    pub structure: Option<InlineStructure>,
    #[serde(default)]
    pub sampling: Option<SamplingSpec>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
    #[serde(default)]
    pub output: Option<String>,
    // flow parameters
    #[serde(default)]
    pub start: Option<Vec<f64>>,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub step: Option<f64>,
    // commutation parameters
    #[serde(default)]
    pub direction: Option<String>,
    #[serde(default)]
    pub grid: Option<usize>,
    // rigid-body parameters
    #[serde(default)]
    pub inertia: Option<[f64; 3]>,
    #[serde(default)]
    pub zeta: Option<Vec<f64>>,
    // inline reduction data
    #[serde(default)]
    pub action: Option<ActionSpec>,
    #[serde(default)]
    pub moment: Option<Vec<String>>,
    #[serde(default)]
    pub slice: Option<SliceSpec>,
}

/// Parametrized action families for inline reduction scenarios.
#[derive(Clone, Debug, Deserialize)]
pub struct ActionSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub axis: Option<usize>,
}

impl ActionSpec {
    pub fn build(&self, chart: &Chart) -> Result<crate::action::GroupAction> {
        match self.kind.as_str() {
            "s1-diagonal" => {
                if chart.dim() < 4 {
                    return Err(GeomError::Config(
                        "s1-diagonal needs at least four coordinates".into(),
                    ));
                }
                Ok(fixtures::s1_diagonal_action(chart))
            }
            "s1-right-mult" => {
                if chart.dim() < 4 {
                    return Err(GeomError::Config(
                        "s1-right-mult needs at least four coordinates".into(),
                    ));
                }
                Ok(fixtures::s1_right_mult_action(chart))
            }
            "translation" => {
                let axis = self.axis.ok_or_else(|| {
                    GeomError::Config("translation action needs 'axis'".into())
                })?;
                if axis >= chart.dim() {
                    return Err(GeomError::Config(format!(
                        "translation axis {axis} out of range for dim {}",
                        chart.dim()
                    )));
                }
                let dim = chart.dim();
                Ok(crate::action::GroupAction::new(
                    crate::action::translation_group(),
                    chart.clone(),
                    move |g, p| {
                        let mut out = Vec::with_capacity(dim);
                        for (i, x) in p.iter().enumerate() {
                            if i == axis {
                                out.push(x + &g[1]);
                            } else {
                                out.push(x.clone());
                            }
                        }
                        out
                    },
                ))
            }
            other => Err(GeomError::Config(format!(
                "unknown action type '{other}' (s1-diagonal, s1-right-mult, translation)"
            ))),
        }
    }
}

/// Slice specification: a quotient chart and component expressions of the
/// slice map (over the quotient coordinates), with an optional explicit
/// projection (over the ambient coordinates).
#[derive(Clone, Debug, Deserialize)]
pub struct SliceSpec {
    pub quotient: ChartSpec,
    pub components: Vec<String>,
    #[serde(default)]
    pub projection: Option<Vec<String>>,
}

impl SliceSpec {
    pub fn build(&self, ambient: &Chart) -> Result<(Chart, crate::field::SmoothMap, Option<crate::field::SmoothMap>)> {
        let quotient = self.quotient.build()?;
        if self.components.len() != ambient.dim() {
            return Err(GeomError::Config(format!(
                "slice needs {} components (ambient dim)",
                ambient.dim()
            )));
        }
        let exprs: Vec<crate::expr::Expr> = self
            .components
            .iter()
            .map(|e| parse(e, &quotient))
            .collect::<Result<_>>()?;
        let slice = crate::field::SmoothMap::from_jets(&quotient, ambient, move |q| {
            exprs.iter().map(|e| e.eval(q)).collect()
        });
        let projection = match &self.projection {
            None => None,
            Some(comps) => {
                if comps.len() != quotient.dim() {
                    return Err(GeomError::Config(format!(
                        "projection needs {} components (quotient dim)",
                        quotient.dim()
                    )));
                }
                let exprs: Vec<crate::expr::Expr> = comps
                    .iter()
                    .map(|e| parse(e, ambient))
                    .collect::<Result<_>>()?;
                Some(crate::field::SmoothMap::from_jets(
                    ambient,
                    &quotient,
                    move |x| exprs.iter().map(|e| e.eval(x)).collect(),
                ))
            }
        };
        Ok((quotient, slice, projection))
    }
}

fn default_schema() -> u32 {
    1
}

#[derive(Clone, Debug, Deserialize)]
pub struct SamplingSpec {
    pub count: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ChartSpec {
    pub name: String,
    pub coords: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ChartSpec {
    fn build(&self) -> Result<Chart> {
        let coords: Vec<&str> = self.coords.iter().map(|s| s.as_str()).collect();
        Chart::new(&self.name, &coords, self.lower.clone(), self.upper.clone())
    }
}

/// Inline structures: tensor components as expressions in the chart
/// coordinates.
#[derive(Clone, Debug, Deserialize)]
pub struct InlineStructure {
    #[serde(rename = "type")]
    pub kind: String,
    pub chart: ChartSpec,
    /// 1-form components (cosymplectic, contact-metric).
    #[serde(default)]
    pub eta: Option<Vec<String>>,
    /// 2-form entries (i, j, expr) with i < j (cosymplectic).
    #[serde(default)]
    pub omega: Option<Vec<(usize, usize, String)>>,
    /// Metric rows (contact-metric: g, kahler: h).
    #[serde(default)]
    pub g: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub h: Option<Vec<Vec<String>>>,
    /// Endomorphism rows.
    #[serde(default)]
    pub phi: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub j: Option<Vec<Vec<String>>>,
    /// Vector components.
    #[serde(default)]
    pub xi: Option<Vec<String>>,
}

fn compile_components(chart: &Chart, exprs: &[String]) -> Result<Vec<crate::expr::Expr>> {
    exprs.iter().map(|e| parse(e, chart)).collect()
}

fn compile_matrix(chart: &Chart, rows: &[Vec<String>]) -> Result<Vec<crate::expr::Expr>> {
    let dim = chart.dim();
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(GeomError::Config(format!(
            "matrix must be {dim}x{dim} for chart '{}'",
            chart.name
        )));
    }
    let mut out = Vec::with_capacity(dim * dim);
    for row in rows {
        for e in row {
            out.push(parse(e, chart)?);
        }
    }
    Ok(out)
}

fn one_form_from_exprs(chart: &Chart, exprs: Vec<crate::expr::Expr>) -> KForm {
    let chart2 = chart.clone();
    KForm::from_jets(chart, 1, move |p: &[Jet]| {
        let _ = &chart2;
        exprs.iter().map(|e| e.eval(p)).collect()
    })
}

fn two_form_from_entries(
    chart: &Chart,
    entries: Vec<(usize, usize, crate::expr::Expr)>,
) -> KForm {
    let dim = chart.dim();
    let n_comp = crate::form::binomial(dim, 2);
    KForm::from_jets(chart, 2, move |p: &[Jet]| {
        let n = p[0].n_partials();
        let mut comps = vec![Jet::constant(0.0, n); n_comp];
        for (i, j, e) in &entries {
            comps[comb_rank(&[*i, *j], dim)] = e.eval(p);
        }
        comps
    })
}

fn metric_from_exprs(chart: &Chart, exprs: Vec<crate::expr::Expr>) -> MetricField {
    MetricField::from_jets(chart, move |p: &[Jet]| {
        exprs.iter().map(|e| e.eval(p)).collect()
    })
}

fn endo_from_exprs(chart: &Chart, exprs: Vec<crate::expr::Expr>) -> EndoField {
    EndoField::from_jets(chart, move |p: &[Jet]| {
        exprs.iter().map(|e| e.eval(p)).collect()
    })
}

fn vector_from_exprs(chart: &Chart, exprs: Vec<crate::expr::Expr>) -> VectorField {
    VectorField::from_jets(chart, move |p: &[Jet]| {
        exprs.iter().map(|e| e.eval(p)).collect()
    })
}

pub enum InlineBuilt {
    Cosymplectic(AlmostCosymplectic),
    ContactMetric(AlmostContactMetric),
    Kahler(KahlerStructure),
}

impl InlineStructure {
    pub fn build(&self) -> Result<InlineBuilt> {
        let chart = self.chart.build()?;
        match self.kind.as_str() {
            "cosymplectic" => {
                let eta_exprs = self
                    .eta
                    .as_ref()
                    .ok_or_else(|| GeomError::Config("cosymplectic needs 'eta'".into()))?;
                if eta_exprs.len() != chart.dim() {
                    return Err(GeomError::Config("eta must have dim components".into()));
                }
                let omega_entries = self
                    .omega
                    .as_ref()
                    .ok_or_else(|| GeomError::Config("cosymplectic needs 'omega'".into()))?;
                let eta = one_form_from_exprs(&chart, compile_components(&chart, eta_exprs)?);
                let mut compiled = Vec::new();
                for (i, j, src) in omega_entries {
                    if i >= j || *j >= chart.dim() {
                        return Err(GeomError::Config(format!(
                            "omega entry ({i}, {j}) must satisfy i < j < dim"
                        )));
                    }
                    compiled.push((*i, *j, parse(src, &chart)?));
                }
                let omega = two_form_from_entries(&chart, compiled);
                Ok(InlineBuilt::Cosymplectic(AlmostCosymplectic::new(
                    chart, eta, omega,
                )))
            }
            "contact-metric" => {
                let g = metric_from_exprs(
                    &chart,
                    compile_matrix(
                        &chart,
                        self.g
                            .as_ref()
                            .ok_or_else(|| GeomError::Config("contact-metric needs 'g'".into()))?,
                    )?,
                );
                let phi = endo_from_exprs(
                    &chart,
                    compile_matrix(
                        &chart,
                        self.phi.as_ref().ok_or_else(|| {
                            GeomError::Config("contact-metric needs 'phi'".into())
                        })?,
                    )?,
                );
                let xi_exprs = self
                    .xi
                    .as_ref()
                    .ok_or_else(|| GeomError::Config("contact-metric needs 'xi'".into()))?;
                let eta_exprs = self
                    .eta
                    .as_ref()
                    .ok_or_else(|| GeomError::Config("contact-metric needs 'eta'".into()))?;
                let xi = vector_from_exprs(&chart, compile_components(&chart, xi_exprs)?);
                let eta = one_form_from_exprs(&chart, compile_components(&chart, eta_exprs)?);
                Ok(InlineBuilt::ContactMetric(AlmostContactMetric {
                    chart,
                    g,
                    phi,
                    xi,
                    eta,
                }))
            }
            "kahler" => {
                let h = metric_from_exprs(
                    &chart,
                    compile_matrix(
                        &chart,
                        self.h
                            .as_ref()
                            .ok_or_else(|| GeomError::Config("kahler needs 'h'".into()))?,
                    )?,
                );
                let j = endo_from_exprs(
                    &chart,
                    compile_matrix(
                        &chart,
                        self.j
                            .as_ref()
                            .ok_or_else(|| GeomError::Config("kahler needs 'j'".into()))?,
                    )?,
                );
                Ok(InlineBuilt::Kahler(KahlerStructure { chart, h, j }))
            }
            other => Err(GeomError::Config(format!(
                "unknown inline structure type '{other}'"
            ))),
        }
    }
}

// ---------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------

pub struct RunOutput {
    /// Deterministic JSON report (17-significant-digit floats).
    pub json: String,
    /// CSV trajectory for flow-like runs.
    pub csv: Option<String>,
    pub pass: bool,
}

fn envelope(kind: &str, name: &str, pass: bool, body: Value) -> String {
    let out = serde_json::json!({
        "schema": 1,
        "kind": kind,
        "name": name,
        "pass": pass,
        "report": body,
    });
    to_json_17(&out)
}

fn report_value(r: &VerificationReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

/// Verify a built-in structure by name.
pub fn run_verify_builtin(name: &str, plan: &SamplePlan, tol: &Tolerances) -> Result<RunOutput> {
    let report = match name {
        "canonical-r3" => verify_cosymplectic(&fixtures::canonical_r3(), plan, tol),
        "canonical-r5" => verify_cosymplectic(&fixtures::canonical_r5(), plan, tol),
        "contact-r3" => verify_cosymplectic(&fixtures::contact_r3(), plan, tol),
        "nonclosed-omega-r3" => verify_cosymplectic(&fixtures::nonclosed_omega_r3(), plan, tol),
        "degenerate-omega-r3" => {
            verify_cosymplectic(&fixtures::degenerate_omega_r3(), plan, tol)
        }
        "flat-cokahler-r3" => verify_cokahler(&fixtures::flat_cokahler_r3(), plan, tol),
        "flat-cokahler-r5" => verify_cokahler(&fixtures::flat_cokahler_r5(), plan, tol),
        "sasakian-r3" => verify_cokahler(&fixtures::sasakian_r3(), plan, tol),
        "tilted-cokahler-r3" => verify_cokahler(&fixtures::tilted_cokahler_r3(), plan, tol),
        "flat-kahler-r2" => verify_kahler(&fixtures::flat_kahler_r2(), plan, tol),
        "flat-kahler-c2" => verify_kahler(&fixtures::flat_kahler_c2(), plan, tol),
        "twisted-kahler-r4" => verify_kahler(&fixtures::twisted_kahler_r4(), plan, tol),
        "flat-hyperkahler-h" => verify_hyperkahler(&fixtures::flat_hyperkahler_h(), plan, tol),
        "flat-3cosym-r7" => verify_3cosymplectic(&fixtures::flat_3cosymplectic_r7(), plan, tol),
        other => {
            return Err(GeomError::Config(format!(
                "unknown verify builtin '{other}' (see list-builtins)"
            )))
        }
    };
    let pass = report.pass;
    Ok(RunOutput {
        json: envelope("verify", name, pass, report_value(&report)),
        csv: None,
        pass,
    })
}

/// Verify an inline structure from a scenario file.
pub fn run_verify_inline(
    inline: &InlineStructure,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> Result<RunOutput> {
    let report = match inline.build()? {
        InlineBuilt::Cosymplectic(s) => verify_cosymplectic(&s, plan, tol),
        InlineBuilt::ContactMetric(s) => verify_cokahler(&s, plan, tol),
        InlineBuilt::Kahler(s) => verify_kahler(&s, plan, tol),
    };
    let pass = report.pass;
    Ok(RunOutput {
        json: envelope("verify", "inline", pass, report_value(&report)),
        csv: None,
        pass,
    })
}

/// Sample a reduced structure's tensors on a grid for external plotting.
fn grid_export<F: Fn(&[f64]) -> Value>(chart: &Chart, points: usize, tensors: F) -> Value {
    let grid = SamplePlan::grid(chart, points);
    let rows: Vec<Value> = grid
        .iter()
        .map(|p| {
            serde_json::json!({
                "point": p,
                "tensors": tensors(p),
            })
        })
        .collect();
    Value::Array(rows)
}

/// Run a built-in reduction scenario: validate, reduce, verify the output,
/// and export a sampled grid of the reduced tensors.
pub fn run_reduce_builtin(name: &str, plan: &SamplePlan, tol: &Tolerances) -> Result<RunOutput> {
    use crate::reduction::{
        cokahler_reduce, cosymplectic_reduce, hyperkahler_reduce, kahler_reduce,
        three_cosymplectic_reduce, Reduced,
    };
    let (reduce_report, verify_report, export, degenerate): (
        VerificationReport,
        Option<VerificationReport>,
        Option<Value>,
        bool,
    ) = match name {
        "s1-c2xr" => {
            let datum = fixtures::s1_c2xr_cokahler_datum();
            match cokahler_reduce(&datum)? {
                Reduced::Structure { structure, report } => {
                    let v = verify_cokahler(&structure, plan, tol);
                    let export = grid_export(&structure.chart, 27, |p| {
                        serde_json::json!({
                            "g": structure.g.value(p).as_slice().to_vec(),
                            "phi": structure.phi.value(p).as_slice().to_vec(),
                            "eta": structure.eta.value(p),
                            "xi": structure.xi.value(p),
                        })
                    });
                    (report, Some(v), Some(export), false)
                }
                Reduced::Degenerate { report } => (report, None, None, true),
            }
        }
        "s1-c2xr-cosym" => {
            let datum = fixtures::s1_c2xr_cosymplectic_datum();
            match cosymplectic_reduce(&datum)? {
                Reduced::Structure { structure, report } => {
                    let v = verify_cosymplectic(&structure, plan, tol);
                    let export = grid_export(&structure.chart, 27, |p| {
                        serde_json::json!({
                            "eta": structure.eta.value(p),
                            "omega": structure.omega.value(p),
                        })
                    });
                    (report, Some(v), Some(export), false)
                }
                Reduced::Degenerate { report } => (report, None, None, true),
            }
        }
        "s1-c2" => {
            let datum = fixtures::s1_c2_kahler_datum();
            match kahler_reduce(&datum)? {
                Reduced::Structure { structure, report } => {
                    let v = verify_kahler(&structure, plan, tol);
                    let export = grid_export(&structure.chart, 25, |p| {
                        serde_json::json!({
                            "h": structure.h.value(p).as_slice().to_vec(),
                            "j": structure.j.value(p).as_slice().to_vec(),
                        })
                    });
                    (report, Some(v), Some(export), false)
                }
                Reduced::Degenerate { report } => (report, None, None, true),
            }
        }
        "q2-shift-r5" => {
            let datum = fixtures::q2_shift_r5_datum();
            match cosymplectic_reduce(&datum)? {
                Reduced::Structure { structure, report } => {
                    let v = verify_cosymplectic(&structure, plan, tol);
                    (report, Some(v), None, false)
                }
                Reduced::Degenerate { report } => (report, None, None, true),
            }
        }
        "s1-hxr3" => {
            let datum = fixtures::s1_hxr3_datum();
            match three_cosymplectic_reduce(&datum)? {
                Reduced::Structure { structure, report } => {
                    let v = verify_3cosymplectic(&structure, plan, tol);
                    (report, Some(v), None, false)
                }
                Reduced::Degenerate { report } => (report, None, None, true),
            }
        }
        "rtrans-h2" => {
            let datum = fixtures::rtrans_h2_datum();
            match hyperkahler_reduce(&datum)? {
                Reduced::Structure { structure, report } => {
                    let v = verify_hyperkahler(&structure, plan, tol);
                    (report, Some(v), None, false)
                }
                Reduced::Degenerate { report } => (report, None, None, true),
            }
        }
        "point-quotient" => {
            let datum = fixtures::degenerate_point_quotient_datum();
            match kahler_reduce(&datum)? {
                Reduced::Structure { report, .. } => (report, None, None, false),
                Reduced::Degenerate { report } => (report, None, None, true),
            }
        }
        other => {
            return Err(GeomError::Config(format!(
                "unknown reduce builtin '{other}' (see list-builtins)"
            )))
        }
    };
    let pass = reduce_report.pass && verify_report.as_ref().map_or(true, |r| r.pass);
    let body = serde_json::json!({
        "reduction": report_value(&reduce_report),
        "reduced_structure": verify_report.as_ref().map(report_value),
        "degenerate": degenerate,
        "grid_export": export,
    });
    Ok(RunOutput {
        json: envelope("reduce", name, pass, body),
        csv: None,
        pass,
    })
}

/// Run an inline reduction scenario (single moment map); 3-cosymplectic
/// and hyperKähler reductions are available through the built-ins.
pub fn run_reduce_inline(
    scenario: &ScenarioFile,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> Result<RunOutput> {
    use crate::reduction::{cokahler_reduce, cosymplectic_reduce, kahler_reduce, Reduced, ReductionDatum};
    let inline = scenario
        .structure
        .as_ref()
        .ok_or_else(|| GeomError::Config("inline reduce needs 'structure'".into()))?;
    let built = inline.build()?;
    let chart = match &built {
        InlineBuilt::Cosymplectic(s) => s.chart.clone(),
        InlineBuilt::ContactMetric(s) => s.chart.clone(),
        InlineBuilt::Kahler(s) => s.chart.clone(),
    };
    let action = scenario
        .action
        .as_ref()
        .ok_or_else(|| GeomError::Config("inline reduce needs 'action'".into()))?
        .build(&chart)?;
    let mu_exprs = scenario
        .moment
        .as_ref()
        .ok_or_else(|| GeomError::Config("inline reduce needs 'moment'".into()))?;
    if mu_exprs.len() != action.group.dim() {
        return Err(GeomError::Config(format!(
            "moment needs {} components (group dim)",
            action.group.dim()
        )));
    }
    let compiled: Vec<crate::expr::Expr> = mu_exprs
        .iter()
        .map(|e| parse(e, &chart))
        .collect::<Result<_>>()?;
    let mu = crate::action::MomentMap::from_jets(&chart, move |p| {
        compiled.iter().map(|e| e.eval(p)).collect()
    });
    let zeta = scenario
        .zeta
        .clone()
        .ok_or_else(|| GeomError::Config("inline reduce needs 'zeta'".into()))?;
    if zeta.len() != action.group.dim() {
        return Err(GeomError::Config("zeta length must equal group dim".into()));
    }
    let (quotient, slice, projection) = scenario
        .slice
        .as_ref()
        .ok_or_else(|| GeomError::Config("inline reduce needs 'slice'".into()))?
        .build(&chart)?;

    macro_rules! datum {
        ($structure:expr) => {
            ReductionDatum {
                structure: $structure,
                action,
                moments: vec![mu],
                zetas: vec![nalgebra::DVector::from_vec(zeta)],
                quotient,
                slice,
                projection,
                tol: *tol,
            }
        };
    }
    let (reduce_report, verify_report, degenerate) = match built {
        InlineBuilt::Cosymplectic(structure) => match cosymplectic_reduce(&datum!(structure))? {
            Reduced::Structure { structure, report } => {
                let v = verify_cosymplectic(&structure, plan, tol);
                (report, Some(v), false)
            }
            Reduced::Degenerate { report } => (report, None, true),
        },
        InlineBuilt::ContactMetric(structure) => match cokahler_reduce(&datum!(structure))? {
            Reduced::Structure { structure, report } => {
                let v = verify_cokahler(&structure, plan, tol);
                (report, Some(v), false)
            }
            Reduced::Degenerate { report } => (report, None, true),
        },
        InlineBuilt::Kahler(structure) => match kahler_reduce(&datum!(structure))? {
            Reduced::Structure { structure, report } => {
                let v = verify_kahler(&structure, plan, tol);
                (report, Some(v), false)
            }
            Reduced::Degenerate { report } => (report, None, true),
        },
    };
    let pass = reduce_report.pass && verify_report.as_ref().map_or(true, |r| r.pass);
    let body = serde_json::json!({
        "reduction": report_value(&reduce_report),
        "reduced_structure": verify_report.as_ref().map(report_value),
        "degenerate": degenerate,
    });
    Ok(RunOutput {
        json: envelope("reduce", "inline", pass, body),
        csv: None,
        pass,
    })
}

/// Run a flow scenario.
pub fn run_flow(
    name: &str,
    start: Option<Vec<f64>>,
    t_end: f64,
    step: f64,
) -> Result<RunOutput> {
    let system = match name {
        "harmonic-oscillator" => fixtures::harmonic_oscillator_system(),
        "free-particle" => {
            let base = Chart::symmetric("darboux-r2", &["p", "q"], 2.0);
            let omega = fixtures::constant_two_form(&base, &[(0, 1, -1.0)]);
            let extended = base.extend("darboux-r2-x-r", &[("t", -10.0, 10.0)]);
            let h = ScalarField::constant(&extended, 0.0);
            crate::dynamics::cosymplectize(&base, &omega, &h, -10.0, 10.0)?
        }
        other => {
            return Err(GeomError::Config(format!(
                "unknown flow builtin '{other}' (see list-builtins)"
            )))
        }
    };
    let start = start.unwrap_or_else(|| vec![0.0, 1.0, 0.0]);
    let flow = crate::dynamics::evolution_flow(&system, &start, t_end, step, &[])?;
    let h0 = flow.hamiltonian.first().copied().unwrap_or(0.0);
    let drift = flow
        .hamiltonian
        .iter()
        .fold(0.0f64, |a, h| a.max((h - h0).abs()));
    let pass = !flow.truncated;
    let body = serde_json::json!({
        "steps": flow.times.len(),
        "t_defect": flow.t_defect,
        "hamiltonian_drift": drift,
        "truncated": flow.truncated,
        "final_state": flow.states.last(),
    });
    let csv = flow.to_csv(&system.chart.coord_names);
    Ok(RunOutput {
        json: envelope("flow", name, pass, body),
        csv: Some(csv),
        pass,
    })
}

/// Run a commutation comparison by direction name.
pub fn run_commute(direction: &str, grid: usize, tol: f64) -> Result<RunOutput> {
    use crate::cone::*;
    let (report, name): (crate::cone::ComparisonReport, &str) = match direction {
        "kahler-to-cokahler" => (
            commute_kahler_to_cokahler(&fixtures::s1_c2_kahler_datum(), grid, tol)?,
            "kahler-to-cokahler",
        ),
        "cokahler-to-kahler" => (
            commute_cokahler_to_kahler(&fixtures::s1_c2xr_cokahler_datum(), grid, tol)?,
            "cokahler-to-kahler",
        ),
        "hyperkahler-to-3cosymplectic" => (
            commute_hyperkahler_to_3cosymplectic(&fixtures::rtrans_h2_datum(), grid, tol)?,
            "hyperkahler-to-3cosymplectic",
        ),
        "3cosymplectic-to-hyperkahler" => (
            commute_3cosymplectic_to_hyperkahler(&fixtures::s1_hxr3_datum(), grid, tol)?,
            "3cosymplectic-to-hyperkahler",
        ),
        "torus" => {
            let datum = fixtures::s1_c2_kahler_datum();
            let f = crate::torus::block_rotation_isometry(&datum.structure.chart, 0.7, -0.4);
            let f_inv =
                crate::torus::block_rotation_isometry(&datum.structure.chart, -0.7, 0.4);
            let atlas = crate::torus::MappingTorusAtlas::new(
                &datum.structure,
                f,
                f_inv,
                &SamplePlan::new(30, 7),
                &Tolerances::default(),
            )?;
            let out = crate::torus::commutation_torus_reduce(&atlas, &datum, grid, tol)?;
            let pass = out.pass;
            let body = serde_json::json!({
                "chart_a": serde_json::to_value(&out.report_a).expect("report"),
                "chart_b": serde_json::to_value(&out.report_b).expect("report"),
                "f_zeta_isometry": report_value(&out.f_zeta_isometry),
            });
            return Ok(RunOutput {
                json: envelope("commute", "torus", pass, body),
                csv: None,
                pass,
            });
        }
        other => {
            return Err(GeomError::Config(format!(
                "unknown direction '{other}'; expected kahler-to-cokahler, cokahler-to-kahler, \
                 hyperkahler-to-3cosymplectic, 3cosymplectic-to-hyperkahler or torus"
            )))
        }
    };
    let pass = report.pass;
    Ok(RunOutput {
        json: envelope(
            "commute",
            name,
            pass,
            serde_json::to_value(&report).expect("report"),
        ),
        csv: None,
        pass,
    })
}

/// Run the rigid-body scenario.
pub fn run_rigid_body(
    inertia: [f64; 3],
    zeta: [f64; 3],
    t_end: f64,
    step: f64,
) -> Result<RunOutput> {
    let out = crate::rigid::rigid_body_scenario(inertia, zeta, t_end, step, [0.2, 0.1])?;
    let body = serde_json::json!({
        "moment_map": report_value(&out.moment_report),
        "reduction": report_value(&out.reduction_report),
        "reduced_structure": report_value(&out.reduced_structure_report),
        "area_ratio": {
            "mean": out.area_ratio.0,
            "constancy_deviation": out.area_ratio.1,
            "dh_wedge_dt_deviation": out.area_ratio.2,
        },
        "reduced_h_drift": out.reduced_h_drift,
        "alpha_norm_drift": out.alpha_norm_drift,
        "euler_oracle_match": out.euler_match,
        "ambient_h_drift": out.ambient_h_drift,
        "ambient_alpha_drift": out.ambient_alpha_drift,
        "geodesic_defect": out.geodesic_defect,
        "decomposition_dims": [out.decomposition_dims.0, out.decomposition_dims.1, out.decomposition_dims.2],
    });
    let coord_names = vec!["u".to_string(), "v".to_string(), "s".to_string()];
    let csv = out.reduced_flow.to_csv(&coord_names);
    Ok(RunOutput {
        json: envelope("rigid-body", "rigid-body", out.pass, body),
        csv: Some(csv),
        pass: out.pass,
    })
}

/// Parse and dispatch a scenario file. `seed_override` (the COSYM_SEED
/// environment variable in the CLI) replaces the scenario seed.
pub fn run_scenario(text: &str, seed_override: Option<u64>) -> Result<RunOutput> {
    let scenario: ScenarioFile = serde_json::from_str(text)
        .map_err(|e| GeomError::Config(format!("malformed scenario: {e}")))?;
    if scenario.schema != 1 {
        return Err(GeomError::Config(format!(
            "unsupported schema version {}",
            scenario.schema
        )));
    }
    let mut plan = scenario
        .sampling
        .as_ref()
        .map(|s| SamplePlan::new(s.count, s.seed))
        .unwrap_or_default();
    if let Some(seed) = seed_override {
        plan.seed = seed;
    }
    let tol = scenario.tolerances.unwrap_or_default();
    if tol.algebraic <= 0.0 || tol.jet <= 0.0 || tol.fd <= 0.0 || tol.nondegenerate <= 0.0 {
        return Err(GeomError::Config("tolerances must be positive".into()));
    }
    match scenario.kind.as_str() {
        "verify" => match (&scenario.builtin, &scenario.structure) {
            (Some(name), None) => run_verify_builtin(name, &plan, &tol),
            (None, Some(inline)) => run_verify_inline(inline, &plan, &tol),
            _ => Err(GeomError::Config(
                "verify needs exactly one of 'builtin' or 'structure'".into(),
            )),
        },
        "reduce" => match &scenario.builtin {
            Some(name) => run_reduce_builtin(name, &plan, &tol),
            None if scenario.structure.is_some() => run_reduce_inline(&scenario, &plan, &tol),
            None => Err(GeomError::Config(
                "reduce needs 'builtin' or an inline structure with action/moment/zeta/slice".into(),
            )),
        },
        "flow" => {
            let name = scenario
                .builtin
                .as_ref()
                .ok_or_else(|| GeomError::Config("flow needs 'builtin'".into()))?;
            run_flow(
                name,
                scenario.start.clone(),
                scenario.t_end.unwrap_or(std::f64::consts::TAU),
                scenario.step.unwrap_or(1e-3),
            )
        }
        "commute" => {
            let direction = scenario
                .direction
                .as_ref()
                .ok_or_else(|| GeomError::Config("commute needs 'direction'".into()))?;
            run_commute(direction, scenario.grid.unwrap_or(100), 1e-6)
        }
        "rigid-body" => {
            let inertia = scenario.inertia.unwrap_or([1.0, 2.0, 3.0]);
            let zeta_vec = scenario.zeta.clone().unwrap_or_else(|| vec![0.0, 0.0, 1.0]);
            if zeta_vec.len() != 3 {
                return Err(GeomError::Config("zeta must have three components".into()));
            }
            run_rigid_body(
                inertia,
                [zeta_vec[0], zeta_vec[1], zeta_vec[2]],
                scenario.t_end.unwrap_or(1.0),
                scenario.step.unwrap_or(1e-3),
            )
        }
        other => Err(GeomError::Config(format!(
            "unknown scenario kind '{other}'"
        ))),
    }
}
