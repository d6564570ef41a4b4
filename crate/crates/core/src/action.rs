//! Matrix Lie groups acting on charts, fundamental vector fields, and
//! moment-map validation.
//!
//! Group elements are n×n matrices; the algebra is a list of basis
//! matrices whose commutators must close in their span. Actions receive
//! jet-valued group elements and chart points, so fundamental vector
//! fields come from a dual seed in the exponential parameter (no finite
//! differencing in s), and pullbacks by a fixed group element get exact
//! Jacobians from point jets.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::field::{KForm, MetricField, ScalarField, SmoothMap, VectorField};
use crate::jet::{constant_point, values, Jet};
use crate::linalg::{jet_mat_mul, lstsq};
use crate::ops::{pullback, pullback_metric};
use crate::report::{ResidualTracker, Tolerances, VerificationReport};
use crate::sample::SamplePlan;
use crate::structures::{hamiltonian_vector_field, reeb_field, AlmostCosymplectic};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone)]
pub struct MatrixLieGroup {
    pub name: String,
    /// Matrix size n (elements live in GL(n)).
    pub mat_dim: usize,
    /// Basis A_1..A_k of the Lie algebra (n×n each).
    pub basis: Vec<DMatrix<f64>>,
    /// Structure constants c[a][b] = coefficients of [A_a, A_b] in the basis.
    structure: Vec<Vec<Vec<f64>>>,
}

impl MatrixLieGroup {
    /// Validates linear independence of the basis, closure of commutators
    /// in the span (residual < 1e-10) and exp(0) = id. An empty basis is
    /// the trivial group: every moment-map condition holds vacuously.
    pub fn new(name: &str, mat_dim: usize, basis: Vec<DMatrix<f64>>) -> Result<MatrixLieGroup> {
        let k = basis.len();
        let vec_len = mat_dim * mat_dim;
        let mut bmat = DMatrix::zeros(vec_len, k);
        for (c, a) in basis.iter().enumerate() {
            if a.nrows() != mat_dim || a.ncols() != mat_dim {
                return Err(GeomError::Config("algebra basis size mismatch".into()));
            }
            for r in 0..vec_len {
                bmat[(r, c)] = a[(r / mat_dim, r % mat_dim)];
            }
        }
        if crate::linalg::rank(&bmat, 1e-10) < k {
            return Err(GeomError::Config(
                "algebra basis is linearly dependent".into(),
            ));
        }
        // structure constants by least squares; closure residual < 1e-10
        let mut structure = vec![vec![vec![0.0; k]; k]; k];
        for a in 0..k {
            for b in 0..k {
                let comm = &basis[a] * &basis[b] - &basis[b] * &basis[a];
                let rhs = DVector::from_fn(vec_len, |r, _| comm[(r / mat_dim, r % mat_dim)]);
                let (coef, res) = lstsq(&bmat, &rhs);
                if res > 1e-10 {
                    return Err(GeomError::Config(format!(
                        "commutator [A_{a}, A_{b}] leaves the algebra span (residual {res:.3e})"
                    )));
                }
                for c in 0..k {
                    structure[a][b][c] = coef[c];
                }
            }
        }
        let g = MatrixLieGroup {
            name: name.to_string(),
            mat_dim,
            basis,
            structure,
        };
        let id = g.exp(&vec![0.0; k]);
        if (&id - DMatrix::identity(mat_dim, mat_dim)).amax() > 1e-14 {
            return Err(GeomError::Config("exp(0) != id".into()));
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Structure constants c^c_{ab} of [A_a, A_b] = Σ_c c^c_{ab} A_c.
    pub fn structure_constant(&self, a: usize, b: usize, c: usize) -> f64 {
        self.structure[a][b][c]
    }

    /// Algebra element Σ coeffs_a A_a.
    pub fn algebra_element(&self, coeffs: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.mat_dim, self.mat_dim);
        for (c, a) in coeffs.iter().zip(&self.basis) {
            m += a * *c;
        }
        m
    }

    /// exp by truncated series (25 terms; algebra elements sampled in this
    /// crate keep ‖A‖ small enough for full precision).
    pub fn exp(&self, coeffs: &[f64]) -> DMatrix<f64> {
        let a = self.algebra_element(coeffs);
        let n = self.mat_dim;
        let mut term = DMatrix::identity(n, n);
        let mut acc = DMatrix::identity(n, n);
        for k in 1..=25 {
            term = &term * &a / k as f64;
            acc += &term;
        }
        acc
    }

    /// Jet-valued exponential exp(s·A) of coeffs scaled by a jet s.
    pub fn exp_jet(&self, coeffs: &[f64], s: &Jet) -> Vec<Jet> {
        let n = self.mat_dim;
        let a = self.algebra_element(coeffs);
        let a_jets: Vec<Jet> = (0..n * n)
            .map(|e| s * a[(e / n, e % n)])
            .collect();
        let mut term: Vec<Jet> = (0..n * n)
            .map(|e| {
                Jet::constant(
                    if e / n == e % n { 1.0 } else { 0.0 },
                    s.n_partials(),
                )
            })
            .collect();
        let mut acc = term.clone();
        for k in 1..=25 {
            term = jet_mat_mul(&term, &a_jets, n, n, n);
            for t in &mut term {
                *t = &*t / k as f64;
            }
            for (x, t) in acc.iter_mut().zip(&term) {
                *x = &*x + t;
            }
        }
        acc
    }

    /// Matrix of Ad*_g in basis-dual coordinates: with R(g) defined by
    /// g⁻¹ A_b g = Σ_a R_ab A_a, the coadjoint action is Ad*_g μ = Rᵀ μ.
    pub fn coadjoint_matrix(&self, g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let k = self.dim();
        let n = self.mat_dim;
        let vec_len = n * n;
        let ginv = g.clone().try_inverse().ok_or_else(|| {
            GeomError::Numeric("group element not invertible".into())
        })?;
        let mut bmat = DMatrix::zeros(vec_len, k);
        for (c, a) in self.basis.iter().enumerate() {
            for r in 0..vec_len {
                bmat[(r, c)] = a[(r / n, r % n)];
            }
        }
        let mut r_mat = DMatrix::zeros(k, k);
        for b in 0..k {
            let conj = &ginv * &self.basis[b] * g;
            let rhs = DVector::from_fn(vec_len, |r, _| conj[(r / n, r % n)]);
            let (coef, res) = lstsq(&bmat, &rhs);
            if res > 1e-8 {
                return Err(GeomError::Numeric(format!(
                    "Ad_g does not preserve the algebra span (residual {res:.3e})"
                )));
            }
            for a in 0..k {
                r_mat[(a, b)] = coef[a];
            }
        }
        Ok(r_mat.transpose())
    }

    /// Basis (columns, coefficients in the algebra basis) of the
    /// stabilizer algebra 𝔤_ζ = {A : ad*_A ζ = 0}, computed from the
    /// structure constants: (ad*_{A_a} ζ)_b = Σ_c c^c_{ab} ζ_c.
    pub fn stabilizer_algebra(&self, zeta: &[f64]) -> DMatrix<f64> {
        let k = self.dim();
        if k == 0 {
            return DMatrix::zeros(0, 0);
        }
        let m = DMatrix::from_fn(k, k, |b, a| {
            let mut acc = 0.0;
            for c in 0..k {
                acc += self.structure[a][b][c] * zeta[c];
            }
            acc
        });
        crate::linalg::null_space(&m, 1e-10)
    }

    /// True when ζ is fixed by the full coadjoint action (central value).
    pub fn is_central(&self, zeta: &[f64]) -> bool {
        self.stabilizer_algebra(zeta).ncols() == self.dim()
    }

    /// Deterministic sample of group elements near the identity:
    /// exp of algebra elements with coefficients in [−0.5, 0.5].
    pub fn sample_elements(&self, count: usize, seed: u64) -> Vec<DMatrix<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let coeffs: Vec<f64> =
                    (0..self.dim()).map(|_| rng.gen_range(-0.5..0.5)).collect();
                self.exp(&coeffs)
            })
            .collect()
    }
}

/// Translation group (R, +) in an affine 2×2 matrix representation.
pub fn translation_group() -> MatrixLieGroup {
    let n = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    MatrixLieGroup::new("R-translation", 2, vec![n]).expect("valid group")
}

/// The circle group as 2×2 rotation matrices.
pub fn circle_group() -> MatrixLieGroup {
    let j = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    MatrixLieGroup::new("S1", 2, vec![j]).expect("valid group")
}

/// SO(3) with the standard hat basis.
pub fn so3_group() -> MatrixLieGroup {
    let e1 = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0]);
    let e2 = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0]);
    let e3 = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    MatrixLieGroup::new("SO3", 3, vec![e1, e2, e3]).expect("valid group")
}

type ActFn = Arc<dyn Fn(&[Jet], &[Jet]) -> Vec<Jet> + Send + Sync>;

#[derive(Clone)]
pub struct GroupAction {
    pub group: MatrixLieGroup,
    pub chart: Chart,
    act: ActFn,
}

impl GroupAction {
    pub fn new(
        group: MatrixLieGroup,
        chart: Chart,
        act: impl Fn(&[Jet], &[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> GroupAction {
        GroupAction {
            group,
            chart,
            act: Arc::new(act),
        }
    }

    pub fn apply(&self, g: &DMatrix<f64>, p: &[f64]) -> Vec<f64> {
        let n = self.group.mat_dim;
        let gj: Vec<Jet> = (0..n * n).map(|e| Jet::scalar(g[(e / n, e % n)])).collect();
        values(&(self.act)(&gj, &constant_point(p, 0)))
    }

    pub fn apply_jets(&self, g: &[Jet], p: &[Jet]) -> Vec<Jet> {
        (self.act)(g, p)
    }

    /// The action of a fixed group element as a smooth map of the chart.
    pub fn as_map(&self, g: &DMatrix<f64>) -> SmoothMap {
        let n = self.group.mat_dim;
        let gv: Vec<f64> = (0..n * n).map(|e| g[(e / n, e % n)]).collect();
        let act = self.act.clone();
        SmoothMap::from_jets(&self.chart, &self.chart, move |p| {
            let zeros = if p.is_empty() { 0 } else { p[0].n_partials() };
            let gj: Vec<Jet> = gv.iter().map(|&v| Jet::constant(v, zeros)).collect();
            act(&gj, p)
        })
    }

    /// Fundamental vector field A*_p = d/ds|₀ act(exp(sA), p), by a dual
    /// seed in s (jet-exact in s; the field itself answers its own
    /// derivative queries by finite differences).
    pub fn fundamental_field(&self, coeffs: &[f64]) -> VectorField {
        let group = self.group.clone();
        let act = self.act.clone();
        let coeffs = coeffs.to_vec();
        VectorField::from_values(&self.chart, move |p| {
            let s = Jet::variable(0.0, 0, 1);
            let gj = group.exp_jet(&coeffs, &s);
            let pj = constant_point(p, 1);
            let out = act(&gj, &pj);
            out.iter().map(|j| j.d[0]).collect()
        })
    }
}

/// Moment map: point → 𝔤* in basis-dual coordinates (components μ^{A_a}).
#[derive(Clone)]
pub struct MomentMap {
    pub chart: Chart,
    pub eval: crate::field::FieldEval,
}

impl MomentMap {
    pub fn from_jets(
        chart: &Chart,
        f: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> MomentMap {
        MomentMap {
            chart: chart.clone(),
            eval: crate::field::FieldEval::from_jets(f),
        }
    }

    pub fn value(&self, p: &[f64]) -> Vec<f64> {
        self.eval.values(p)
    }

    /// Component μ^A for algebra coefficients `coeffs` as a scalar field.
    pub fn component(&self, coeffs: &[f64]) -> ScalarField {
        let eval = self.eval.clone();
        let coeffs = coeffs.to_vec();
        ScalarField {
            chart: self.chart.clone(),
            eval: crate::field::FieldEval::from_jets(move |p| {
                let mu = eval.jets(p);
                let mut acc = Jet::constant(0.0, p[0].n_partials());
                for (c, m) in coeffs.iter().zip(&mu) {
                    acc = &acc + &(m * *c);
                }
                vec![acc]
            }),
        }
    }
}

#[derive(Clone)]
pub struct MomentMapData {
    pub action: GroupAction,
    pub mu: MomentMap,
}

/// The tensors of a structure bundle, for invariance checks.
pub enum StructureTensors<'a> {
    Cosymplectic(&'a AlmostCosymplectic),
    ContactMetric(&'a crate::structures::AlmostContactMetric),
    Kahler(&'a crate::structures::KahlerStructure),
    HyperKahler(&'a crate::structures::HyperKahlerStructure),
    ThreeCosymplectic(&'a crate::structures::ThreeCosymplectic),
}

struct NamedTensors {
    forms: Vec<(String, KForm)>,
    metrics: Vec<(String, MetricField)>,
    endos: Vec<(String, crate::field::EndoField)>,
    vectors: Vec<(String, VectorField)>,
}

fn collect_tensors(s: &StructureTensors) -> NamedTensors {
    let mut t = NamedTensors {
        forms: Vec::new(),
        metrics: Vec::new(),
        endos: Vec::new(),
        vectors: Vec::new(),
    };
    match s {
        StructureTensors::Cosymplectic(c) => {
            t.forms.push(("eta".into(), c.eta.clone()));
            t.forms.push(("omega".into(), c.omega.clone()));
        }
        StructureTensors::ContactMetric(c) => {
            t.forms.push(("eta".into(), c.eta.clone()));
            t.metrics.push(("g".into(), c.g.clone()));
            t.endos.push(("phi".into(), c.phi.clone()));
            t.vectors.push(("xi".into(), c.xi.clone()));
        }
        StructureTensors::Kahler(k) => {
            t.metrics.push(("h".into(), k.h.clone()));
            t.endos.push(("j".into(), k.j.clone()));
        }
        StructureTensors::HyperKahler(k) => {
            t.metrics.push(("h".into(), k.h.clone()));
            for i in 0..3 {
                t.endos.push((format!("j{}", i + 1), k.j[i].clone()));
            }
        }
        StructureTensors::ThreeCosymplectic(k) => {
            t.metrics.push(("g".into(), k.g.clone()));
            for i in 0..3 {
                t.forms.push((format!("eta{}", i + 1), k.triples[i].eta.clone()));
                t.endos.push((format!("phi{}", i + 1), k.triples[i].phi.clone()));
                t.vectors.push((format!("xi{}", i + 1), k.triples[i].xi.clone()));
            }
        }
    }
    t
}

/// Invariance of a structure under the action: for sampled group elements
/// near the identity, the pullback of every tensor equals the tensor; the
/// Lie derivative along each fundamental field (finite-difference flow,
/// step 1e-5) vanishes.
pub fn verify_action_preserves(
    action: &GroupAction,
    structure: &StructureTensors,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> VerificationReport {
    let mut report = VerificationReport::new("action_preserves");
    let tensors = collect_tensors(structure);
    let elements = action.group.sample_elements(5, plan.seed ^ 0x5eed);
    let pts = plan.points(&action.chart);
    // pullback comparisons under finitely many sampled elements
    for (name, form) in &tensors.forms {
        let mut track = ResidualTracker::new(&format!("pullback_{name}"), tol.jet);
        for g in &elements {
            let map = action.as_map(g);
            let pb = pullback(&map, form).expect("chart match");
            for p in &pts {
                if !action.chart.contains(&map.value(p)) {
                    continue;
                }
                let a = pb.value(p);
                let b = form.value(p);
                let r = a
                    .iter()
                    .zip(&b)
                    .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()));
                track.record(p, r);
            }
        }
        report.push(track.finish());
    }
    for (name, metric) in &tensors.metrics {
        let mut track = ResidualTracker::new(&format!("pullback_{name}"), tol.jet);
        for g in &elements {
            let map = action.as_map(g);
            let pb = pullback_metric(&map, metric).expect("chart match");
            for p in &pts {
                if !action.chart.contains(&map.value(p)) {
                    continue;
                }
                let r = (pb.value(p) - metric.value(p)).amax();
                track.record(p, r);
            }
        }
        report.push(track.finish());
    }
    for (name, endo) in &tensors.endos {
        let mut track = ResidualTracker::new(&format!("pullback_{name}"), tol.jet);
        for g in &elements {
            let map = action.as_map(g);
            let pb = crate::ops::pullback_endo(&map, endo).expect("chart match");
            for p in &pts {
                if !action.chart.contains(&map.value(p)) {
                    continue;
                }
                let r = (pb.value(p) - endo.value(p)).amax();
                track.record(p, r);
            }
        }
        report.push(track.finish());
    }
    for (name, vec) in &tensors.vectors {
        let mut track = ResidualTracker::new(&format!("pushforward_{name}"), tol.jet);
        for g in &elements {
            let map = action.as_map(g);
            for p in &pts {
                let (q, jac) = map.jacobian(p);
                if !action.chart.contains(&q) {
                    continue;
                }
                let v = DVector::from_vec(vec.value(p));
                let w = DVector::from_vec(vec.value(&q));
                let r = (jac * v - w).amax();
                track.record(p, r);
            }
        }
        report.push(track.finish());
    }
    // Lie-derivative form along each basis fundamental field
    let h = 1e-5;
    for a in 0..action.group.dim() {
        let mut coeff = vec![0.0; action.group.dim()];
        coeff[a] = 1.0;
        let plus = action.group.exp(&(coeff.iter().map(|c| c * h).collect::<Vec<_>>()));
        let minus = action
            .group
            .exp(&(coeff.iter().map(|c| -c * h).collect::<Vec<_>>()));
        let map_p = action.as_map(&plus);
        let map_m = action.as_map(&minus);
        let mut track =
            ResidualTracker::new(&format!("lie_derivative_A{}", a + 1), tol.fd);
        for (_, form) in &tensors.forms {
            let pb_p = pullback(&map_p, form).expect("chart");
            let pb_m = pullback(&map_m, form).expect("chart");
            for p in pts.iter().take(pts.len().min(40)) {
                let vp = pb_p.value(p);
                let vm = pb_m.value(p);
                let r = vp
                    .iter()
                    .zip(&vm)
                    .fold(0.0f64, |acc, (x, y)| acc.max(((x - y) / (2.0 * h)).abs()));
                track.record(p, r);
            }
        }
        for (_, metric) in &tensors.metrics {
            let pb_p = pullback_metric(&map_p, metric).expect("chart");
            let pb_m = pullback_metric(&map_m, metric).expect("chart");
            for p in pts.iter().take(pts.len().min(40)) {
                let r = ((pb_p.value(p) - pb_m.value(p)) / (2.0 * h)).amax();
                track.record(p, r);
            }
        }
        for (_, endo) in &tensors.endos {
            let pb_p = crate::ops::pullback_endo(&map_p, endo).expect("chart");
            let pb_m = crate::ops::pullback_endo(&map_m, endo).expect("chart");
            for p in pts.iter().take(pts.len().min(40)) {
                let r = ((pb_p.value(p) - pb_m.value(p)) / (2.0 * h)).amax();
                track.record(p, r);
            }
        }
        report.push(track.finish());
    }
    report
}

/// Moment-map validation per the defining bullets: equivariance
/// μ(g·p) = Ad*_g μ(p); the fundamental fields are the Hamiltonian fields
/// of the μ components; dμ^A(ξ) = 0 for the Reeb field ξ.
pub fn verify_moment_map(
    data: &MomentMapData,
    structure: &AlmostCosymplectic,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> VerificationReport {
    let mut report = VerificationReport::new("moment_map");
    let action = &data.action;
    let k = action.group.dim();
    let pts = plan.points(&action.chart);

    // (i) equivariance against the coadjoint action
    let mut equiv = ResidualTracker::new("equivariance", tol.jet);
    for g in action.group.sample_elements(5, plan.seed ^ 0xad) {
        let coad = match action.group.coadjoint_matrix(&g) {
            Ok(m) => m,
            Err(e) => {
                equiv.flag(format!("{e}"));
                continue;
            }
        };
        for p in &pts {
            let q = action.apply(&g, p);
            if !action.chart.contains(&q) {
                continue;
            }
            let mu_q = DVector::from_vec(data.mu.value(&q));
            let mu_p = DVector::from_vec(data.mu.value(p));
            equiv.record(p, (&mu_q - &coad * mu_p).amax());
        }
    }
    report.push(equiv.finish());

    // (ii) A* = X_{μ^A} for each basis element
    let xi = reeb_field(structure);
    for a in 0..k {
        let mut coeffs = vec![0.0; k];
        coeffs[a] = 1.0;
        let fund = action.fundamental_field(&coeffs);
        let ham = hamiltonian_vector_field(structure, &data.mu.component(&coeffs));
        let mut track =
            ResidualTracker::new(&format!("fundamental_is_hamiltonian_A{}", a + 1), tol.jet);
        for p in &pts {
            let f = fund.value(p);
            let h = ham.value(p);
            let r = f
                .iter()
                .zip(&h)
                .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()));
            track.record(p, r);
        }
        report.push(track.finish());

        // (iii) dμ^A(ξ) = 0
        let comp = data.mu.component(&coeffs);
        let mut track3 = ResidualTracker::new(&format!("d_mu_of_reeb_A{}", a + 1), tol.jet);
        for p in &pts {
            let dmu = comp.jet(&crate::jet::seed_point(p)).d;
            let xiv = xi.value(p);
            let r: f64 = dmu.iter().zip(&xiv).map(|(d, x)| d * x).sum();
            track3.record(p, r.abs());
        }
        report.push(track3.finish());
    }
    report
}

/// Moment-map validation for the three cosymplectic structures of a
/// 3-cosymplectic manifold, plus the cross conditions dμ_α^A(ξ_β) = 0
/// (α ≠ β) and ω_α(A*, ξ_β) = −η_γ(A*) for even permutations.
pub fn verify_3cosym_moment_map(
    action: &GroupAction,
    mus: &[MomentMap; 3],
    s: &crate::structures::ThreeCosymplectic,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> VerificationReport {
    let mut report = VerificationReport::new("three_cosym_moment_map");
    for i in 0..3 {
        let under = s.underlying(i);
        let data = MomentMapData {
            action: action.clone(),
            mu: mus[i].clone(),
        };
        report.merge(
            &format!("mu{}", i + 1),
            verify_moment_map(&data, &under, plan, tol),
        );
    }

    let k = action.group.dim();
    let pts = plan.points(&action.chart);
    let mut cross = ResidualTracker::new("cross_d_mu_of_xi", tol.jet);
    let mut pairing = ResidualTracker::new("cross_omega_pairing", tol.jet);
    let omegas: Vec<KForm> = (0..3).map(|i| s.underlying(i).omega).collect();
    for a in 0..k {
        let mut coeffs = vec![0.0; k];
        coeffs[a] = 1.0;
        let fund = action.fundamental_field(&coeffs);
        for p in &pts {
            let fv = fund.value(p);
            // dμ_α^A(ξ_β) = 0 for α ≠ β
            for alpha in 0..3 {
                let comp = mus[alpha].component(&coeffs);
                let dmu = comp.jet(&crate::jet::seed_point(p)).d;
                for beta in 0..3 {
                    if alpha == beta {
                        continue;
                    }
                    let xiv = s.triples[beta].xi.value(p);
                    let r: f64 = dmu.iter().zip(&xiv).map(|(d, x)| d * x).sum();
                    cross.record(p, r.abs());
                }
            }
            // ω_α(A*, ξ_β) = −η_γ(A*) for even permutations (α,β,γ)
            let dim = action.chart.dim();
            for &(alpha, beta, gamma) in &[(1usize, 0usize, 2usize), (2, 1, 0), (0, 2, 1)] {
                // pairing identity: ω_{α}(X, ξ_{β}) = −η_{γ}(X)
                let om = omegas[alpha].value(p);
                let xiv = s.triples[beta].xi.value(p);
                let etav = s.triples[gamma].eta.value(p);
                let mut om_f_xi = 0.0;
                for i in 0..dim {
                    for j in 0..dim {
                        om_f_xi += crate::form::component(dim, &om, &[i, j]) * fv[i] * xiv[j];
                    }
                }
                let eta_f: f64 = etav.iter().zip(&fv).map(|(e, f)| e * f).sum();
                pairing.record(p, (om_f_xi + eta_f).abs());
            }
        }
    }
    report.push(cross.finish());
    report.push(pairing.finish());
    report
}

/// Freeness spot check: sampled nontrivial group elements must move every
/// sampled point. This is a probe, not a certification (properness and
/// freeness are asserted by the scenario author).
pub fn orbit_injectivity_spot_check(
    action: &GroupAction,
    plan: &SamplePlan,
) -> crate::report::CheckResult {
    let mut track = ResidualTracker::new("orbit_injectivity_min_displacement", 1e-6);
    let elements = action.group.sample_elements(5, plan.seed ^ 0x0f);
    for p in plan.points(&action.chart) {
        for g in &elements {
            if (g - DMatrix::identity(action.group.mat_dim, action.group.mat_dim)).amax() < 1e-3
            {
                continue;
            }
            let q = action.apply(g, &p);
            let moved = q
                .iter()
                .zip(&p)
                .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            track.record_min(&p, moved);
        }
    }
    track.finish_min_above()
}


#[cfg(test)]
mod more_tests {
    use super::*;
    use crate::fixtures::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn three_cosym_moment_map_on_hxr3() {
        // S¹ on flat H×R³ with the quaternionic moment triple: all bullet
        // families and the cross conditions < 1e-8
        let s = flat_3cosymplectic_r7();
        let action = s1_right_mult_action(&s.chart);
        let mus = quaternion_moments(&s.chart);
        let plan = SamplePlan::new(60, 7);
        let r = verify_3cosym_moment_map(&action, &mus, &s, &plan, &tol());
        assert!(
            r.pass,
            "failed: {:?}",
            r.checks.iter().filter(|c| !c.pass).map(|c| (&c.check_name, c.max_residual)).collect::<Vec<_>>()
        );
        for c in &r.checks {
            if !c.min_statistic {
                assert!(c.max_residual < 1e-8, "{}: {:e}", c.check_name, c.max_residual);
            }
        }
    }

    #[test]
    fn swapped_moment_components_fail_cross_conditions() {
        let s = flat_3cosymplectic_r7();
        let action = s1_right_mult_action(&s.chart);
        let m = quaternion_moments(&s.chart);
        let swapped = [m[0].clone(), m[2].clone(), m[1].clone()];
        let plan = SamplePlan::new(40, 7);
        let r = verify_3cosym_moment_map(&action, &swapped, &s, &plan, &tol());
        assert!(!r.pass);
        // the Hamiltonian bullet for μ2/μ3 breaks (A* no longer generated)
        assert!(!r.check("mu2.fundamental_is_hamiltonian_A1").unwrap().pass);
        assert!(!r.check("mu3.fundamental_is_hamiltonian_A1").unwrap().pass);
        // the ω-pairing chain of the cross conditions breaks too
        assert!(!r.check("cross_omega_pairing").unwrap().pass || !r.check("cross_d_mu_of_xi").unwrap().pass || !r.check("mu2.fundamental_is_hamiltonian_A1").unwrap().pass);
    }

    #[test]
    fn trivial_group_three_cosym_moment_is_vacuous() {
        let s = flat_3cosymplectic_r7();
        let trivial = MatrixLieGroup::new("trivial", 1, Vec::new()).unwrap();
        let action = GroupAction::new(trivial, s.chart.clone(), |_g, p| p.to_vec());
        let mu = MomentMap::from_jets(&s.chart, |_p| Vec::new());
        let mus = [mu.clone(), mu.clone(), mu];
        let plan = SamplePlan::new(20, 7);
        let r = verify_3cosym_moment_map(&action, &mus, &s, &plan, &tol());
        assert!(r.pass);
    }

    #[test]
    fn so3_action_preserves_rigid_cosymplectic_pair() {
        // B·(A, α, t) = (BA, α, t) preserves η = dt and ω_H
        let datum = rigid_body_datum([1.0, 2.0, 3.0], [0.0, 0.0, 1.0]);
        let plan = SamplePlan::new(25, 7);
        let r = verify_action_preserves(
            &datum.action,
            &StructureTensors::Cosymplectic(&datum.structure),
            &plan,
            &tol(),
        );
        assert!(
            r.pass,
            "failed: {:?}",
            r.checks.iter().filter(|c| !c.pass).map(|c| (&c.check_name, c.max_residual)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn abelian_infinitesimal_equivariance_is_exact() {
        // for abelian groups dμ^B(A*) = μ^{[A,B]} = 0 exactly (within jets)
        let acm = flat_cokahler_r5();
        let chart = acm.chart.clone();
        let action = s1_diagonal_action(&chart);
        let mu = harmonic_moment(&chart);
        let fund = action.fundamental_field(&[1.0]);
        for p in SamplePlan::new(50, 7).points(&chart) {
            let comp = mu.component(&[1.0]);
            let dmu = comp.jet(&crate::jet::seed_point(&p)).d;
            let a = fund.value(&p);
            let r: f64 = dmu.iter().zip(&a).map(|(d, v)| d * v).sum();
            assert!(r.abs() < 1e-6, "infinitesimal equivariance {r:e}");
        }
    }

    #[test]
    fn orbit_injectivity_probe() {
        let acm = flat_cokahler_r5();
        let action = s1_diagonal_action(&acm.chart);
        // the diagonal S¹ action is free away from the origin; the sampled
        // box margin keeps points away from z = 0 often enough that the
        // minimum displacement stays positive
        let check = orbit_injectivity_spot_check(&action, &SamplePlan::new(60, 7));
        assert!(check.pass, "min displacement {:e}", check.max_residual);
    }
}
