//! Tensor-field evaluators.
//!
//! Every field is a pure evaluator from chart points to flat component
//! vectors. Two evaluator kinds exist:
//!
//! * `Jets` closures propagate first derivatives analytically (exact jets);
//! * `Values` closures only produce component values, and derivative
//!   requests fall back to central finite differences (default step 1e-5).
//!   Derived fields whose values already consume first derivatives
//!   (exterior derivatives, Hamiltonian fields, reduced tensors) are of
//!   this kind, since their own derivatives would need second jets.

use std::sync::Arc;

use crate::chart::Chart;
use crate::form::binomial;
use crate::jet::{constant_point, values, Jet};

pub const FD_STEP: f64 = 1e-5;

type JetFn = Arc<dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync>;
type ValueFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub enum FieldEval {
    Jets(JetFn),
    Values { f: ValueFn, step: f64 },
}

impl FieldEval {
    pub fn from_jets(f: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static) -> FieldEval {
        FieldEval::Jets(Arc::new(f))
    }

    pub fn from_values(f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> FieldEval {
        FieldEval::Values {
            f: Arc::new(f),
            step: FD_STEP,
        }
    }

    /// True when derivative queries are answered by exact jets.
    pub fn exact_jets(&self) -> bool {
        matches!(self, FieldEval::Jets(_))
    }

    pub fn values(&self, p: &[f64]) -> Vec<f64> {
        match self {
            FieldEval::Jets(f) => values(&f(&constant_point(p, 0))),
            FieldEval::Values { f, .. } => f(p),
        }
    }

    /// Evaluate on jet-valued points. For `Values` evaluators the Jacobian
    /// with respect to the chart coordinates is formed by central
    /// differences and chained with the incoming partials.
    pub fn jets(&self, p: &[Jet]) -> Vec<Jet> {
        match self {
            FieldEval::Jets(f) => f(p),
            FieldEval::Values { f, step } => {
                let x = values(p);
                let base = f(&x);
                let n_seed = p.iter().map(|j| j.n_partials()).max().unwrap_or(0);
                if n_seed == 0 {
                    return base.into_iter().map(Jet::scalar).collect();
                }
                // Jacobian d(out)/d(x_i) by central differences.
                let n_in = x.len();
                let n_out = base.len();
                let mut jac = vec![vec![0.0; n_in]; n_out];
                for i in 0..n_in {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += step;
                    xm[i] -= step;
                    let fp = f(&xp);
                    let fm = f(&xm);
                    for o in 0..n_out {
                        jac[o][i] = (fp[o] - fm[o]) / (2.0 * step);
                    }
                }
                (0..n_out)
                    .map(|o| {
                        let mut d = vec![0.0; n_seed];
                        for i in 0..n_in {
                            if p[i].d.is_empty() {
                                continue;
                            }
                            for s in 0..n_seed {
                                d[s] += jac[o][i] * p[i].d[s];
                            }
                        }
                        Jet { v: base[o], d }
                    })
                    .collect()
            }
        }
    }
}

macro_rules! field_type {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Clone)]
        pub struct $name {
            pub chart: Chart,
            pub eval: FieldEval,
        }
    };
}

field_type!(ScalarField, "A scalar field: point -> one component.");
field_type!(VectorField, "A vector field: point -> dim components.");
field_type!(MetricField, "A metric: point -> dim x dim symmetric matrix (row-major).");
field_type!(EndoField, "An endomorphism of the tangent bundle: point -> dim x dim matrix (row-major), acting as (phi X)^i = phi[i][j] X^j.");

/// A degree-k differential form: point -> C(dim, k) components over sorted
/// multi-indices. `degree` may be `dim + 1` (the conventional zero form
/// produced by the top-degree exterior derivative).
#[derive(Clone)]
pub struct KForm {
    pub chart: Chart,
    pub degree: usize,
    pub eval: FieldEval,
}

/// A smooth map between charts, jet-capable (its jets carry the Jacobian).
#[derive(Clone)]
pub struct SmoothMap {
    pub source: Chart,
    pub target: Chart,
    pub eval: FieldEval,
}

impl ScalarField {
    pub fn from_jets(
        chart: &Chart,
        f: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static,
    ) -> ScalarField {
        ScalarField {
            chart: chart.clone(),
            eval: FieldEval::from_jets(move |p| vec![f(p)]),
        }
    }

    pub fn constant(chart: &Chart, c: f64) -> ScalarField {
        ScalarField::from_jets(chart, move |p| Jet::constant(c, p[0].n_partials()))
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        self.eval.values(p)[0]
    }

    pub fn jet(&self, p: &[Jet]) -> Jet {
        self.eval.jets(p).remove(0)
    }
}

impl VectorField {
    pub fn from_jets(
        chart: &Chart,
        f: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> VectorField {
        VectorField {
            chart: chart.clone(),
            eval: FieldEval::from_jets(f),
        }
    }

    pub fn from_values(
        chart: &Chart,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> VectorField {
        VectorField {
            chart: chart.clone(),
            eval: FieldEval::from_values(f),
        }
    }

    /// The coordinate field ∂/∂x_i.
    pub fn coordinate(chart: &Chart, i: usize) -> VectorField {
        let dim = chart.dim();
        VectorField::from_jets(chart, move |p| {
            let n = p[0].n_partials();
            (0..dim)
                .map(|k| Jet::constant(if k == i { 1.0 } else { 0.0 }, n))
                .collect()
        })
    }

    pub fn value(&self, p: &[f64]) -> Vec<f64> {
        self.eval.values(p)
    }

    pub fn jet(&self, p: &[Jet]) -> Vec<Jet> {
        self.eval.jets(p)
    }
}

impl KForm {
    pub fn from_jets(
        chart: &Chart,
        degree: usize,
        f: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> KForm {
        KForm {
            chart: chart.clone(),
            degree,
            eval: FieldEval::from_jets(f),
        }
    }

    pub fn from_values(
        chart: &Chart,
        degree: usize,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> KForm {
        KForm {
            chart: chart.clone(),
            degree,
            eval: FieldEval::from_values(f),
        }
    }

    /// Constant-coefficient form.
    pub fn constant(chart: &Chart, degree: usize, comps: Vec<f64>) -> KForm {
        assert_eq!(comps.len(), binomial(chart.dim(), degree));
        KForm::from_jets(chart, degree, move |p| {
            let n = p[0].n_partials();
            comps.iter().map(|&c| Jet::constant(c, n)).collect()
        })
    }

    pub fn n_components(&self) -> usize {
        binomial(self.chart.dim(), self.degree)
    }

    /// True for the conventional zero (dim+1)-form.
    pub fn is_trivially_zero(&self) -> bool {
        self.degree > self.chart.dim()
    }

    pub fn value(&self, p: &[f64]) -> Vec<f64> {
        self.eval.values(p)
    }

    pub fn jet(&self, p: &[Jet]) -> Vec<Jet> {
        self.eval.jets(p)
    }
}

impl MetricField {
    pub fn from_jets(
        chart: &Chart,
        f: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> MetricField {
        MetricField {
            chart: chart.clone(),
            eval: FieldEval::from_jets(f),
        }
    }

    pub fn from_values(
        chart: &Chart,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> MetricField {
        MetricField {
            chart: chart.clone(),
            eval: FieldEval::from_values(f),
        }
    }

    pub fn euclidean(chart: &Chart) -> MetricField {
        let dim = chart.dim();
        MetricField::from_jets(chart, move |p| {
            let n = p[0].n_partials();
            (0..dim * dim)
                .map(|k| Jet::constant(if k / dim == k % dim { 1.0 } else { 0.0 }, n))
                .collect()
        })
    }

    pub fn value(&self, p: &[f64]) -> nalgebra::DMatrix<f64> {
        let dim = self.chart.dim();
        nalgebra::DMatrix::from_row_slice(dim, dim, &self.eval.values(p))
    }

    pub fn jet(&self, p: &[Jet]) -> Vec<Jet> {
        self.eval.jets(p)
    }
}

impl EndoField {
    pub fn from_jets(
        chart: &Chart,
        f: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> EndoField {
        EndoField {
            chart: chart.clone(),
            eval: FieldEval::from_jets(f),
        }
    }

    pub fn from_values(
        chart: &Chart,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> EndoField {
        EndoField {
            chart: chart.clone(),
            eval: FieldEval::from_values(f),
        }
    }

    /// Constant-coefficient endomorphism (row-major matrix entries).
    pub fn constant(chart: &Chart, entries: Vec<f64>) -> EndoField {
        let dim = chart.dim();
        assert_eq!(entries.len(), dim * dim);
        EndoField::from_jets(chart, move |p| {
            let n = p[0].n_partials();
            entries.iter().map(|&c| Jet::constant(c, n)).collect()
        })
    }

    pub fn zero(chart: &Chart) -> EndoField {
        EndoField::constant(chart, vec![0.0; chart.dim() * chart.dim()])
    }

    pub fn value(&self, p: &[f64]) -> nalgebra::DMatrix<f64> {
        let dim = self.chart.dim();
        nalgebra::DMatrix::from_row_slice(dim, dim, &self.eval.values(p))
    }

    pub fn jet(&self, p: &[Jet]) -> Vec<Jet> {
        self.eval.jets(p)
    }
}

impl SmoothMap {
    pub fn from_jets(
        source: &Chart,
        target: &Chart,
        f: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> SmoothMap {
        SmoothMap {
            source: source.clone(),
            target: target.clone(),
            eval: FieldEval::from_jets(f),
        }
    }

    pub fn from_values(
        source: &Chart,
        target: &Chart,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> SmoothMap {
        SmoothMap {
            source: source.clone(),
            target: target.clone(),
            eval: FieldEval::from_values(f),
        }
    }

    pub fn identity(chart: &Chart) -> SmoothMap {
        SmoothMap::from_jets(chart, chart, |p| p.to_vec())
    }

    pub fn value(&self, p: &[f64]) -> Vec<f64> {
        self.eval.values(p)
    }

    pub fn jet(&self, p: &[Jet]) -> Vec<Jet> {
        self.eval.jets(p)
    }

    /// Value and Jacobian (target.dim x source.dim) at `p`.
    pub fn jacobian(&self, p: &[f64]) -> (Vec<f64>, nalgebra::DMatrix<f64>) {
        let out = self.eval.jets(&crate::jet::seed_point(p));
        let rows = out.len();
        let cols = p.len();
        let val = values(&out);
        let jac = nalgebra::DMatrix::from_fn(rows, cols, |r, c| out[r].d[c]);
        (val, jac)
    }

    /// Composition g∘self (self first, then g). The composite is exact
    /// only when both factors are; otherwise it stays value-backed so
    /// derivative budgets select the finite-difference tolerance.
    pub fn then(&self, g: &SmoothMap) -> SmoothMap {
        let f_eval = self.eval.clone();
        let g_eval = g.eval.clone();
        let exact = f_eval.exact_jets() && g_eval.exact_jets();
        let make = move |p: &[Jet]| g_eval.jets(&f_eval.jets(p));
        SmoothMap {
            source: self.source.clone(),
            target: g.target.clone(),
            eval: if exact {
                FieldEval::Jets(Arc::new(make))
            } else {
                FieldEval::from_values(move |p| values(&make(&constant_point(p, 0))))
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::seed_point;

    #[test]
    fn values_evaluator_chains_fd_jacobian() {
        let chart = Chart::symmetric("c", &["x", "y"], 2.0);
        // f(x,y) = (x*y, x+y) as a value-only map
        let f = FieldEval::from_values(|p| vec![p[0] * p[1], p[0] + p[1]]);
        let out = f.jets(&seed_point(&[1.2, -0.7]));
        assert!((out[0].d[0] - (-0.7)).abs() < 1e-9);
        assert!((out[0].d[1] - 1.2).abs() < 1e-9);
        assert!((out[1].d[0] - 1.0).abs() < 1e-9);
        assert!((out[1].d[1] - 1.0).abs() < 1e-9);
        let _ = chart;
    }

    #[test]
    fn smooth_map_jacobian_matches_fd() {
        let a = Chart::symmetric("a", &["x"], 2.0);
        let b = Chart::symmetric("b", &["u", "v"], 9.0);
        // x -> (x, x^2): pullback of dy along this is 2x dx
        let m = SmoothMap::from_jets(&a, &b, |p| vec![p[0].clone(), p[0].powi(2)]);
        let (val, jac) = m.jacobian(&[1.5]);
        assert_eq!(val, vec![1.5, 2.25]);
        assert!((jac[(1, 0)] - 3.0).abs() < 1e-12);
        // oracle: central differences
        let h = 1e-6;
        let fd = ((1.5f64 + h).powi(2) - (1.5f64 - h).powi(2)) / (2.0 * h);
        assert!((jac[(1, 0)] - fd).abs() < 1e-6);
    }

    #[test]
    fn deterministic_evaluators() {
        let chart = Chart::symmetric("c", &["x", "y"], 1.0);
        let f = ScalarField::from_jets(&chart, |p| p[0].sin() * &p[1]);
        let a = f.value(&[0.3, 0.4]);
        let b = f.value(&[0.3, 0.4]);
        assert_eq!(a, b);
    }
}
