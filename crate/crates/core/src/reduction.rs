//! Slice-based moment-map reduction.
//!
//! Quotients are represented by explicit local slices σ: Q → μ⁻¹(ζ)
//! supplied with the datum; the engine never constructs global quotient
//! atlases. Reduced forms are pullbacks along σ (legitimate because any
//! local section inverts the projection on basic forms); reduced metric
//! data uses the horizontal space H_p — the g-orthogonal complement of
//! the orbit directions inside the level-set tangent space — and the
//! pushforward dπ, realized as a least-squares solve against
//! [dσ | fundamental fields] whose residual doubles as a tangency
//! certificate.
//!
//! Central ζ (G_ζ = G) is required for every metric reduction. The plain
//! cosymplectic reduction also accepts non-central regular values: the
//! stabilizer algebra 𝔤_ζ is computed from the structure constants and
//! the quotient dimension bookkeeping becomes
//! dim Q = dim M − dim G − dim G_ζ.

use nalgebra::{DMatrix, DVector};

use crate::action::{GroupAction, MomentMap};
use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::field::{EndoField, MetricField, SmoothMap, VectorField};
use crate::jet::seed_point;
use crate::linalg::{g_complement_in, g_project, lstsq, null_space, rank};
use crate::ops::pullback;
use crate::report::{ResidualTracker, Tolerances, VerificationReport};
use crate::sample::SamplePlan;
use crate::structures::{
    reeb_field, AlmostContactMetric, AlmostCosymplectic, ContactTriple, HyperKahlerStructure,
    KahlerStructure, ThreeCosymplectic,
};

#[derive(Clone)]
pub struct ReductionDatum<S> {
    pub structure: S,
    pub action: GroupAction,
    /// One moment map (cosymplectic/coKähler/Kähler) or three
    /// (3-cosymplectic/hyperKähler).
    pub moments: Vec<MomentMap>,
    pub zetas: Vec<DVector<f64>>,
    pub quotient: Chart,
    pub slice: SmoothMap,
    /// Optional explicit projection ambient → quotient (fixture-supplied;
    /// used to descend maps and for section-independence checks).
    pub projection: Option<SmoothMap>,
    pub tol: Tolerances,
}

pub type CosymplecticDatum = ReductionDatum<AlmostCosymplectic>;
pub type CoKahlerDatum = ReductionDatum<AlmostContactMetric>;
pub type KahlerDatum = ReductionDatum<KahlerStructure>;
pub type ThreeCosymplecticDatum = ReductionDatum<ThreeCosymplectic>;
pub type HyperKahlerDatum = ReductionDatum<HyperKahlerStructure>;

/// The output of a reduction: a structure on the quotient chart, or the
/// explicit degenerate flag when the quotient is 0-dimensional.
pub enum Reduced<T> {
    Structure {
        structure: T,
        report: VerificationReport,
    },
    Degenerate {
        report: VerificationReport,
    },
}

impl<T> Reduced<T> {
    pub fn report(&self) -> &VerificationReport {
        match self {
            Reduced::Structure { report, .. } => report,
            Reduced::Degenerate { report } => report,
        }
    }

    pub fn structure(&self) -> Option<&T> {
        match self {
            Reduced::Structure { structure, .. } => Some(structure),
            Reduced::Degenerate { .. } => None,
        }
    }

    pub fn expect_structure(self, what: &str) -> (T, VerificationReport) {
        match self {
            Reduced::Structure { structure, report } => (structure, report),
            Reduced::Degenerate { .. } => panic!("{what}: reduction degenerated"),
        }
    }
}

// ---------------------------------------------------------------------
// Pointwise frames
// ---------------------------------------------------------------------

/// Everything needed at one slice point: σ(x), dσ, fundamental fields,
/// stacked dμ and its kernel.
pub struct LevelFrame {
    pub p: Vec<f64>,
    pub dsigma: DMatrix<f64>,
    pub fund: DMatrix<f64>,
    pub dmu: DMatrix<f64>,
    pub kernel: DMatrix<f64>,
    pub mu_residual: f64,
}

#[derive(Clone)]
pub(crate) struct Slicer {
    pub action: GroupAction,
    pub moments: Vec<MomentMap>,
    pub zetas: Vec<DVector<f64>>,
    pub slice: SmoothMap,
}

impl Slicer {
    pub fn from_datum<S>(datum: &ReductionDatum<S>) -> Slicer {
        Slicer {
            action: datum.action.clone(),
            moments: datum.moments.clone(),
            zetas: datum.zetas.clone(),
            slice: datum.slice.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.action.chart.dim()
    }

    pub fn dim_g(&self) -> usize {
        self.action.group.dim()
    }

    pub fn frame(&self, x: &[f64]) -> LevelFrame {
        let dim = self.dim();
        let dim_g = self.dim_g();
        let (p, dsigma) = self.slice.jacobian(x);
        let mut fund = DMatrix::zeros(dim, dim_g);
        for a in 0..dim_g {
            let mut coeffs = vec![0.0; dim_g];
            coeffs[a] = 1.0;
            let v = self.action.fundamental_field(&coeffs).value(&p);
            for r in 0..dim {
                fund[(r, a)] = v[r];
            }
        }
        let n_rows: usize = self.moments.len() * dim_g.max(1);
        let mut dmu = DMatrix::zeros(if self.moments.is_empty() { 0 } else { n_rows }, dim);
        let mut mu_residual: f64 = 0.0;
        let seeds = seed_point(&p);
        for (mi, mu) in self.moments.iter().enumerate() {
            let jets = mu.eval.jets(&seeds);
            for (a, jet) in jets.iter().enumerate() {
                for c in 0..dim {
                    dmu[(mi * dim_g + a, c)] = jet.d[c];
                }
                mu_residual = mu_residual.max((jet.v - self.zetas[mi][a]).abs());
            }
        }
        let kernel = if self.moments.is_empty() {
            DMatrix::identity(dim, dim)
        } else {
            null_space(&dmu, 1e-10)
        };
        LevelFrame {
            p,
            dsigma,
            fund,
            dmu,
            kernel,
            mu_residual,
        }
    }

    /// Columns: fundamental fields of a basis of 𝔤_ζ (coefficients given
    /// in the algebra basis).
    pub fn stabilizer_fund(&self, frame: &LevelFrame, stab: &DMatrix<f64>) -> DMatrix<f64> {
        &frame.fund * stab
    }
}

/// Solve v = dσ(w) + Σ_a c_a A*_a in the least-squares sense; the residual
/// certifies tangency of v to the level set at σ(x).
pub fn pushforward_dpi_frame(frame: &LevelFrame, v: &DVector<f64>) -> (DVector<f64>, f64) {
    let dim = frame.p.len();
    let dim_q = frame.dsigma.ncols();
    let dim_g = frame.fund.ncols();
    let mut m = DMatrix::zeros(dim, dim_q + dim_g);
    m.view_mut((0, 0), (dim, dim_q)).copy_from(&frame.dsigma);
    if dim_g > 0 {
        m.view_mut((0, dim_q), (dim, dim_g)).copy_from(&frame.fund);
    }
    let (sol, res) = lstsq(&m, v);
    (sol.rows(0, dim_q).into_owned(), res)
}

/// The public pushforward: errors when the least-squares residual exceeds
/// the tangency tolerance.
pub fn pushforward_dpi<S>(
    datum: &ReductionDatum<S>,
    x: &[f64],
    v: &[f64],
) -> Result<Vec<f64>> {
    let slicer = Slicer::from_datum(datum);
    let frame = slicer.frame(x);
    let vv = DVector::from_column_slice(v);
    // tangency precondition: dμ(v) ≈ 0
    if frame.dmu.nrows() > 0 {
        let dmu_v = (&frame.dmu * &vv).amax();
        if dmu_v > 1e-8 * (1.0 + vv.amax()) {
            return Err(GeomError::NotTangent { residual: dmu_v });
        }
    }
    let (w, res) = pushforward_dpi_frame(&frame, &vv);
    if res > 1e-8 * (1.0 + vv.amax()) {
        return Err(GeomError::NotTangent { residual: res });
    }
    Ok(w.iter().cloned().collect())
}

// ---------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------

pub(crate) struct ValidationOutcome {
    pub stab_coeffs: DMatrix<f64>,
}

/// Datum invariants: the slice lands on the level set (< 1e-8), the
/// combined [dσ | 𝔤_ζ] matrix has full rank dim Q + dim 𝔤_ζ at every
/// sampled point, and the dimension bookkeeping
/// dim Q = dim M − (#moments)·dim 𝔤_ζ-constraints − dim 𝔤_ζ holds.
pub(crate) fn validate_datum<S>(
    datum: &ReductionDatum<S>,
    plan: &SamplePlan,
    require_central: bool,
    report: &mut VerificationReport,
) -> Result<ValidationOutcome> {
    let slicer = Slicer::from_datum(datum);
    let dim = slicer.dim();
    let dim_g = slicer.dim_g();
    let group = &datum.action.group;

    // stabilizer of ζ (intersection over the moment components)
    let mut stab_coeffs = DMatrix::identity(dim_g, dim_g);
    for z in &datum.zetas {
        let zs: Vec<f64> = z.iter().cloned().collect();
        let s = group.stabilizer_algebra(&zs);
        // intersect span(stab_coeffs) with span(s)
        stab_coeffs = intersect_spans(&stab_coeffs, &s);
    }
    let dim_stab = stab_coeffs.ncols();
    let central = dim_stab == dim_g;
    if require_central && !central {
        return Err(GeomError::NotCentral {
            detail: format!(
                "stabilizer dimension {dim_stab} < dim g = {dim_g}; metric reduction needs G_ζ = G"
            ),
        });
    }

    // sampled coadjoint fixing of ζ by G_ζ elements
    let mut central_track = ResidualTracker::new("zeta_fixed_by_stabilizer", datum.tol.jet);
    let mut rng_elements = Vec::new();
    {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(plan.seed ^ 0xce);
        for _ in 0..5 {
            let c: Vec<f64> = (0..dim_stab).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let coeffs = &stab_coeffs * DVector::from_vec(c);
            rng_elements.push(group.exp(coeffs.as_slice()));
        }
    }
    for g in &rng_elements {
        if dim_g == 0 {
            break;
        }
        let coad = group.coadjoint_matrix(g)?;
        for (z, _mu) in datum.zetas.iter().zip(&datum.moments) {
            let r = (&coad * z - z).amax();
            central_track.record(&[], r);
        }
    }
    report.push(central_track.finish());

    // expected quotient dimension: level set dim − dim G_ζ
    let n_constraints = datum.moments.len() * dim_g;
    let expected_dim_q = dim as isize - n_constraints as isize - dim_stab as isize;
    if expected_dim_q < 0 {
        return Err(GeomError::Rank {
            context: "dimension bookkeeping".into(),
            point: Vec::new(),
            expected: 0,
            found: 0,
        });
    }
    if expected_dim_q == 0 {
        // degenerate quotient: handled by the caller
        return Ok(ValidationOutcome { stab_coeffs });
    }
    if datum.quotient.dim() != expected_dim_q as usize {
        return Err(GeomError::Rank {
            context: format!(
                "dimension bookkeeping: quotient chart dim {} but dim M − constraints − dim G_ζ = {}",
                datum.quotient.dim(),
                expected_dim_q
            ),
            point: Vec::new(),
            expected: expected_dim_q as usize,
            found: datum.quotient.dim(),
        });
    }

    // slice and transversality over samples
    let mut level_track = ResidualTracker::new("slice_in_level_set", 1e-8);
    let mut trans_ok = true;
    let mut worst_point = Vec::new();
    for x in plan.points(&datum.quotient) {
        let frame = slicer.frame(&x);
        level_track.record(&x, frame.mu_residual);
        let stab_fund = slicer.stabilizer_fund(&frame, &stab_coeffs);
        let mut m = DMatrix::zeros(dim, datum.quotient.dim() + dim_stab);
        m.view_mut((0, 0), (dim, datum.quotient.dim()))
            .copy_from(&frame.dsigma);
        if dim_stab > 0 {
            m.view_mut((0, datum.quotient.dim()), (dim, dim_stab))
                .copy_from(&stab_fund);
        }
        if rank(&m, 1e-9) != datum.quotient.dim() + dim_stab {
            trans_ok = false;
            worst_point = x.clone();
        }
    }
    let level_check = level_track.finish();
    let level_failed = !level_check.pass;
    let level_worst = level_check.worst_point.clone();
    let level_res = level_check.max_residual;
    report.push(level_check);
    if level_failed {
        return Err(GeomError::Slice {
            point: level_worst,
            residual: level_res,
        });
    }
    if !trans_ok {
        return Err(GeomError::Rank {
            context: "transversality of the slice".into(),
            point: worst_point,
            expected: datum.quotient.dim() + dim_stab,
            found: 0,
        });
    }
    Ok(ValidationOutcome { stab_coeffs })
}

/// Basis of the intersection of two column spans (both in R^k).
fn intersect_spans(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    if a.ncols() == 0 || b.ncols() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    // span(a) ∩ span(b) = a · null-left-part of [a | -b]
    let k = a.nrows();
    let mut m = DMatrix::zeros(k, a.ncols() + b.ncols());
    m.view_mut((0, 0), (k, a.ncols())).copy_from(a);
    m.view_mut((0, a.ncols()), (k, b.ncols())).copy_from(&(-b));
    let ns = null_space(&m, 1e-10);
    let mut out = DMatrix::zeros(k, ns.ncols());
    for c in 0..ns.ncols() {
        let coeff = ns.view((0, c), (a.ncols(), 1));
        let v = a * coeff;
        for r in 0..k {
            out[(r, c)] = v[r];
        }
    }
    // re-orthonormalize and drop near-zero columns
    let r = rank(&out, 1e-10);
    if r == out.ncols() {
        out
    } else {
        // compress via SVD
        let svd = out.clone().svd(true, false);
        let u = svd.u.unwrap();
        let mut basis = DMatrix::zeros(k, r);
        for c in 0..r {
            for row in 0..k {
                basis[(row, c)] = u[(row, c)];
            }
        }
        basis
    }
}

// ---------------------------------------------------------------------
// Cosymplectic reduction (pullback of basic forms)
// ---------------------------------------------------------------------

/// Reduce an almost cosymplectic structure at ζ: η^ζ = σ*η, ω^ζ = σ*ω.
/// Basic-form certification (η(B*) and ι_{B*}ω on level tangents for
/// B ∈ 𝔤_ζ) runs before the pullback; the reduced Reeb field is checked
/// against dπ(ξ). Datum validation samples a fixed 60-point seeded plan;
/// structure verification on the output is the caller's choice of plan.
pub fn cosymplectic_reduce(datum: &CosymplecticDatum) -> Result<Reduced<AlmostCosymplectic>> {
    let mut report = VerificationReport::new("cosymplectic_reduce");
    let plan = SamplePlan::new(60, 7);
    let outcome = validate_datum(datum, &plan, false, &mut report)?;
    let slicer = Slicer::from_datum(datum);
    let dim = slicer.dim();
    let dim_g = slicer.dim_g();
    let n_constraints = datum.moments.len() * dim_g;
    if dim == n_constraints + outcome.stab_coeffs.ncols() {
        report.degenerate = true;
        return Ok(Reduced::Degenerate { report });
    }

    // basic-form certification at sampled slice points
    let mut eta_basic = ResidualTracker::new("eta_vanishes_on_stabilizer", datum.tol.algebraic);
    let mut omega_basic = ResidualTracker::new("omega_basic_on_level_tangents", 1e-9);
    for x in plan.points(&datum.quotient) {
        let frame = slicer.frame(&x);
        let stab_fund = slicer.stabilizer_fund(&frame, &outcome.stab_coeffs);
        let eta = datum.structure.eta.value(&frame.p);
        let omega = datum.structure.omega.value(&frame.p);
        let mut worst_eta: f64 = 0.0;
        let mut worst_omega: f64 = 0.0;
        for b in 0..stab_fund.ncols() {
            let bv = stab_fund.column(b);
            let eta_b: f64 = eta.iter().zip(bv.iter()).map(|(e, v)| e * v).sum();
            worst_eta = worst_eta.max(eta_b.abs());
            for kcol in 0..frame.kernel.ncols() {
                let kv = frame.kernel.column(kcol);
                let mut om = 0.0;
                for i in 0..dim {
                    for j in 0..dim {
                        om += crate::form::component(dim, &omega, &[i, j]) * bv[i] * kv[j];
                    }
                }
                worst_omega = worst_omega.max(om.abs());
            }
        }
        eta_basic.record(&x, worst_eta);
        omega_basic.record(&x, worst_omega);
    }
    report.push(eta_basic.finish());
    report.push(omega_basic.finish());

    let eta_r = pullback(&datum.slice, &datum.structure.eta)?;
    let omega_r = pullback(&datum.slice, &datum.structure.omega)?;
    let reduced = AlmostCosymplectic::new(datum.quotient.clone(), eta_r, omega_r);

    // Reeb pushforward relation: ξ_{σ(x)} − dσ(ξ^ζ_x) ∈ span 𝔤_ζ
    let xi_amb = reeb_field(&datum.structure);
    let xi_red = reeb_field(&reduced);
    let mut reeb_track = ResidualTracker::new("reduced_reeb_pushforward", 1e-8);
    for x in plan.points(&datum.quotient) {
        let frame = slicer.frame(&x);
        let stab_fund = slicer.stabilizer_fund(&frame, &outcome.stab_coeffs);
        let xa = DVector::from_vec(xi_amb.value(&frame.p));
        let xr = DVector::from_vec(xi_red.value(&x));
        let r = &xa - &frame.dsigma * xr;
        let res = if stab_fund.ncols() == 0 {
            r.amax()
        } else {
            let (_, res) = lstsq(&stab_fund, &r);
            res
        };
        reeb_track.record(&x, res);
    }
    report.push(reeb_track.finish());

    Ok(Reduced::Structure {
        structure: reduced,
        report,
    })
}

// ---------------------------------------------------------------------
// Horizontal-space machinery (metric reductions)
// ---------------------------------------------------------------------

/// The tangent decomposition at σ(x): fundamental directions 𝔤_p, their
/// φ-image, and the horizontal space H_p (g-orthogonal complement of 𝔤_p
/// inside the level-set tangents), with the orthogonality, ξ-membership
/// and φ-invariance residuals.
pub struct TangentDecomposition {
    pub point: Vec<f64>,
    pub g_basis: DMatrix<f64>,
    pub phi_g_basis: DMatrix<f64>,
    pub h_basis: DMatrix<f64>,
    pub orthogonality_residual: f64,
    pub xi_membership_residual: f64,
    pub phi_invariance_residual: f64,
}

pub(crate) fn decompose_at(
    slicer: &Slicer,
    g_field: &MetricField,
    phi_field: Option<&EndoField>,
    xi_field: Option<&VectorField>,
    x: &[f64],
) -> Result<TangentDecomposition> {
    let frame = slicer.frame(x);
    let dim = slicer.dim();
    let gm = g_field.value(&frame.p);
    let h_basis = g_complement_in(&frame.kernel, &frame.fund, &gm);
    let expected = frame.kernel.ncols() - frame.fund.ncols().min(frame.kernel.ncols());
    if h_basis.ncols() != expected {
        return Err(GeomError::Rank {
            context: "horizontal space (regular-value violation)".into(),
            point: frame.p.clone(),
            expected,
            found: h_basis.ncols(),
        });
    }
    let phim = phi_field.map(|f| f.value(&frame.p));
    let phi_g = match &phim {
        Some(m) => m * &frame.fund,
        None => DMatrix::zeros(dim, 0),
    };
    // orthogonality residuals (normalized by column norms)
    let mut ortho: f64 = 0.0;
    let pairs: [(&DMatrix<f64>, &DMatrix<f64>); 3] =
        [(&h_basis, &frame.fund), (&h_basis, &phi_g), (&frame.fund, &phi_g)];
    for (a, b) in pairs {
        for i in 0..a.ncols() {
            for j in 0..b.ncols() {
                let ai = a.column(i);
                let bj = b.column(j);
                let na = (ai.transpose() * &gm * ai)[(0, 0)].sqrt();
                let nb = (bj.transpose() * &gm * bj)[(0, 0)].sqrt();
                if na < 1e-13 || nb < 1e-13 {
                    continue;
                }
                let ip = (ai.transpose() * &gm * bj)[(0, 0)];
                ortho = ortho.max((ip / (na * nb)).abs());
            }
        }
    }
    // ξ ∈ H
    let xi_res = match xi_field {
        Some(xi) => {
            let xv = DVector::from_vec(xi.value(&frame.p));
            let proj = g_project(&h_basis, &gm, &xv);
            (&xv - proj).amax()
        }
        None => 0.0,
    };
    // φ(H) = H
    let phi_res = match &phim {
        Some(m) => {
            let mut worst: f64 = 0.0;
            for i in 0..h_basis.ncols() {
                let hv = h_basis.column(i).into_owned();
                let ph = m * hv;
                let proj = g_project(&h_basis, &gm, &ph);
                worst = worst.max((&ph - proj).amax());
            }
            worst
        }
        None => 0.0,
    };
    Ok(TangentDecomposition {
        point: frame.p,
        g_basis: frame.fund,
        phi_g_basis: phi_g,
        h_basis,
        orthogonality_residual: ortho,
        xi_membership_residual: xi_res,
        phi_invariance_residual: phi_res,
    })
}

/// Public tangent decomposition for a coKähler datum.
pub fn tangent_decomposition(datum: &CoKahlerDatum, x: &[f64]) -> Result<TangentDecomposition> {
    let slicer = Slicer::from_datum(datum);
    decompose_at(
        &slicer,
        &datum.structure.g,
        Some(&datum.structure.phi),
        Some(&datum.structure.xi),
        x,
    )
}

/// The reduced metric g^ζ(u, v) = g(pr_H dσ u, pr_H dσ v) as a field on Q.
fn reduced_metric(slicer: &Slicer, g_field: &MetricField, quotient: &Chart) -> MetricField {
    let slicer = slicer.clone();
    let g_field = g_field.clone();
    let dim_q = quotient.dim();
    MetricField::from_values(quotient, move |x| {
        let frame = slicer.frame(x);
        let gm = g_field.value(&frame.p);
        let h_basis = g_complement_in(&frame.kernel, &frame.fund, &gm);
        let mut lifts = Vec::with_capacity(dim_q);
        for i in 0..dim_q {
            let col = frame.dsigma.column(i).into_owned();
            lifts.push(g_project(&h_basis, &gm, &col));
        }
        let mut out = vec![0.0; dim_q * dim_q];
        for i in 0..dim_q {
            for j in 0..=i {
                let v = (lifts[i].transpose() * &gm * &lifts[j])[(0, 0)];
                out[i * dim_q + j] = v;
                out[j * dim_q + i] = v;
            }
        }
        out
    })
}

/// The reduced endomorphism φ^ζ(u) = dπ(φ(pr_H dσ u)) as a field on Q.
fn reduced_endo(slicer: &Slicer, g_field: &MetricField, phi_field: &EndoField, quotient: &Chart) -> EndoField {
    let slicer = slicer.clone();
    let g_field = g_field.clone();
    let phi_field = phi_field.clone();
    let dim_q = quotient.dim();
    EndoField::from_values(quotient, move |x| {
        let frame = slicer.frame(x);
        let gm = g_field.value(&frame.p);
        let phim = phi_field.value(&frame.p);
        let h_basis = g_complement_in(&frame.kernel, &frame.fund, &gm);
        let mut out = vec![0.0; dim_q * dim_q];
        for j in 0..dim_q {
            let col = frame.dsigma.column(j).into_owned();
            let lift = g_project(&h_basis, &gm, &col);
            let ph = &phim * lift;
            let (w, _res) = pushforward_dpi_frame(&frame, &ph);
            for i in 0..dim_q {
                out[i * dim_q + j] = w[i];
            }
        }
        out
    })
}

/// The reduced vector dπ(v∘σ) as a field on Q.
fn reduced_pushforward_vector(
    slicer: &Slicer,
    field: &VectorField,
    quotient: &Chart,
) -> VectorField {
    let slicer = slicer.clone();
    let field = field.clone();
    VectorField::from_values(quotient, move |x| {
        let frame = slicer.frame(x);
        let v = DVector::from_vec(field.value(&frame.p));
        let (w, _res) = pushforward_dpi_frame(&frame, &v);
        w.iter().cloned().collect()
    })
}

/// Decomposition residual checks over the sample plan, pushed into the
/// report: orthogonality, ξ ∈ H and φ(H) = H residuals, plus the
/// G-invariance transport of H under sampled near-identity elements.
fn decomposition_checks(
    slicer: &Slicer,
    g_field: &MetricField,
    phi_field: Option<&EndoField>,
    xi_field: Option<&VectorField>,
    quotient: &Chart,
    plan: &SamplePlan,
    tol: &Tolerances,
    report: &mut VerificationReport,
) -> Result<()> {
    let mut ortho = ResidualTracker::new("decomposition_orthogonality", 1e-8f64.max(tol.jet));
    let mut xi_mem = ResidualTracker::new("xi_in_horizontal_space", 1e-8f64.max(tol.jet));
    let mut phi_inv = ResidualTracker::new("phi_invariance_of_h", 1e-8f64.max(tol.jet));
    let mut transport = ResidualTracker::new("h_transport_g_invariance", 1e-7);
    let elements = slicer.action.group.sample_elements(3, plan.seed ^ 0x11);
    for x in plan.points(quotient) {
        let dec = decompose_at(slicer, g_field, phi_field, xi_field, &x)?;
        ortho.record(&x, dec.orthogonality_residual);
        xi_mem.record(&x, dec.xi_membership_residual);
        phi_inv.record(&x, dec.phi_invariance_residual);
        // (L_h)_*(H_p) = H_{hp}: transported H stays g-orthogonal to 𝔤_{hp}
        for g in &elements {
            if slicer.action.group.dim() == 0 {
                break;
            }
            let map = slicer.action.as_map(g);
            let (q, jac) = map.jacobian(&dec.point);
            if !slicer.action.chart.contains(&q) {
                continue;
            }
            let gm_q = g_field.value(&q);
            let dim_g = slicer.action.group.dim();
            let mut fund_q = DMatrix::zeros(q.len(), dim_g);
            for a in 0..dim_g {
                let mut coeffs = vec![0.0; dim_g];
                coeffs[a] = 1.0;
                let v = slicer.action.fundamental_field(&coeffs).value(&q);
                for r in 0..q.len() {
                    fund_q[(r, a)] = v[r];
                }
            }
            let mut worst: f64 = 0.0;
            for i in 0..dec.h_basis.ncols() {
                let moved = &jac * dec.h_basis.column(i);
                let nm = (moved.transpose() * &gm_q * &moved)[(0, 0)].sqrt();
                for a in 0..dim_g {
                    let fa = fund_q.column(a);
                    let na = (fa.transpose() * &gm_q * fa)[(0, 0)].sqrt();
                    if na < 1e-13 || nm < 1e-13 {
                        continue;
                    }
                    let ip = (moved.transpose() * &gm_q * fa)[(0, 0)];
                    worst = worst.max((ip / (na * nm)).abs());
                }
            }
            transport.record(&x, worst);
        }
    }
    report.push(ortho.finish());
    report.push(xi_mem.finish());
    report.push(phi_inv.finish());
    report.push(transport.finish());
    Ok(())
}

// ---------------------------------------------------------------------
// Metric reductions
// ---------------------------------------------------------------------

/// CoKähler reduction: g^ζ and φ^ζ by horizontal lift and pushforward,
/// η^ζ = σ*η, ξ^ζ = dπ(ξ). Central ζ required.
pub fn cokahler_reduce(datum: &CoKahlerDatum) -> Result<Reduced<AlmostContactMetric>> {
    let mut report = VerificationReport::new("cokahler_reduce");
    let plan = SamplePlan::new(60, 7);
    let outcome = validate_datum(datum, &plan, true, &mut report)?;
    let slicer = Slicer::from_datum(datum);
    let dim = slicer.dim();
    let n_constraints = datum.moments.len() * slicer.dim_g();
    if dim == n_constraints + outcome.stab_coeffs.ncols() {
        report.degenerate = true;
        return Ok(Reduced::Degenerate { report });
    }

    decomposition_checks(
        &slicer,
        &datum.structure.g,
        Some(&datum.structure.phi),
        Some(&datum.structure.xi),
        &datum.quotient,
        &plan,
        &datum.tol,
        &mut report,
    )?;
    let phi_check = report
        .checks
        .iter()
        .find(|c| c.check_name == "phi_invariance_of_h")
        .expect("check present");
    if !phi_check.pass {
        return Err(GeomError::Structure(format!(
            "phi does not preserve the horizontal space (residual {:.3e}); the action does not preserve phi",
            phi_check.max_residual
        )));
    }

    let g_r = reduced_metric(&slicer, &datum.structure.g, &datum.quotient);
    let phi_r = reduced_endo(&slicer, &datum.structure.g, &datum.structure.phi, &datum.quotient);
    let eta_r = pullback(&datum.slice, &datum.structure.eta)?;
    let xi_r = reduced_pushforward_vector(&slicer, &datum.structure.xi, &datum.quotient);

    Ok(Reduced::Structure {
        structure: AlmostContactMetric {
            chart: datum.quotient.clone(),
            g: g_r,
            phi: phi_r,
            xi: xi_r,
            eta: eta_r,
        },
        report,
    })
}

/// Kähler reduction: h^ζ and J^ζ by the same horizontal-lift recipe
/// (H_p = h-orthogonal complement of 𝔤_p inside ker dμ).
pub fn kahler_reduce(datum: &KahlerDatum) -> Result<Reduced<KahlerStructure>> {
    let mut report = VerificationReport::new("kahler_reduce");
    let plan = SamplePlan::new(60, 7);
    let outcome = validate_datum(datum, &plan, true, &mut report)?;
    let slicer = Slicer::from_datum(datum);
    let dim = slicer.dim();
    let n_constraints = datum.moments.len() * slicer.dim_g();
    if dim == n_constraints + outcome.stab_coeffs.ncols() {
        report.degenerate = true;
        return Ok(Reduced::Degenerate { report });
    }

    decomposition_checks(
        &slicer,
        &datum.structure.h,
        Some(&datum.structure.j),
        None,
        &datum.quotient,
        &plan,
        &datum.tol,
        &mut report,
    )?;

    let h_r = reduced_metric(&slicer, &datum.structure.h, &datum.quotient);
    let j_r = reduced_endo(&slicer, &datum.structure.h, &datum.structure.j, &datum.quotient);
    Ok(Reduced::Structure {
        structure: KahlerStructure {
            chart: datum.quotient.clone(),
            h: h_r,
            j: j_r,
        },
        report,
    })
}

/// 3-cosymplectic reduction: coKähler reduction per triple over the common
/// slice into the joint level set; the three reduced metrics must agree
/// pairwise (their disagreement signals an input modeling bug), the
/// reduced bundle inherits all three triples.
pub fn three_cosymplectic_reduce(
    datum: &ThreeCosymplecticDatum,
) -> Result<Reduced<ThreeCosymplectic>> {
    let mut report = VerificationReport::new("three_cosymplectic_reduce");
    let plan = SamplePlan::new(60, 7);
    let outcome = validate_datum(datum, &plan, true, &mut report)?;
    let slicer = Slicer::from_datum(datum);
    let dim = slicer.dim();
    let n_constraints = datum.moments.len() * slicer.dim_g();
    if dim == n_constraints + outcome.stab_coeffs.ncols() {
        report.degenerate = true;
        return Ok(Reduced::Degenerate { report });
    }

    // per-triple slicers: the i-th coKähler reduction runs on the common
    // slice but uses only μ_i for its horizontal space (trivial groups
    // carry no moments at all)
    let per_triple_slicer = |i: usize| -> Slicer {
        Slicer {
            action: datum.action.clone(),
            moments: datum.moments.get(i).cloned().into_iter().collect(),
            zetas: datum.zetas.get(i).cloned().into_iter().collect(),
            slice: datum.slice.clone(),
        }
    };

    // tangency of the other Reeb fields: dμ_α(ξ_β) = 0 (α ≠ β) at slice points
    let mut tangency = ResidualTracker::new("xi_tangent_to_joint_level", 1e-9);
    for x in plan.points(&datum.quotient) {
        let frame = slicer.frame(&x);
        let seeds = seed_point(&frame.p);
        let mut worst: f64 = 0.0;
        for (alpha, mu) in datum.moments.iter().enumerate() {
            let jets = mu.eval.jets(&seeds);
            for beta in 0..3 {
                if alpha == beta {
                    continue;
                }
                let xi = datum.structure.triples[beta].xi.value(&frame.p);
                for jet in &jets {
                    let r: f64 = jet.d.iter().zip(&xi).map(|(d, v)| d * v).sum();
                    worst = worst.max(r.abs());
                }
            }
        }
        tangency.record(&x, worst);
    }
    report.push(tangency.finish());

    let mut metrics = Vec::new();
    let mut triples = Vec::new();
    for i in 0..3 {
        let s_i = per_triple_slicer(i);
        decomposition_checks(
            &s_i,
            &datum.structure.g,
            Some(&datum.structure.triples[i].phi),
            Some(&datum.structure.triples[i].xi),
            &datum.quotient,
            &plan,
            &datum.tol,
            &mut report,
        )?;
        // rename the four checks just pushed with a triple prefix
        let n = report.checks.len();
        for c in report.checks[n - 4..].iter_mut() {
            c.check_name = format!("triple{}.{}", i + 1, c.check_name);
        }
        let g_i = reduced_metric(&s_i, &datum.structure.g, &datum.quotient);
        // pushforwards must certify tangency against the *joint* level
        // set, so φ^ζ and ξ^ζ use the joint-level slicer
        let phi_i = reduced_endo(&slicer, &datum.structure.g, &datum.structure.triples[i].phi, &datum.quotient);
        let xi_i =
            reduced_pushforward_vector(&slicer, &datum.structure.triples[i].xi, &datum.quotient);
        let eta_i = pullback(&datum.slice, &datum.structure.triples[i].eta)?;
        metrics.push(g_i);
        triples.push(ContactTriple {
            phi: phi_i,
            xi: xi_i,
            eta: eta_i,
        });
    }

    // the three reduced metrics agree pairwise
    let mut agree = ResidualTracker::new("reduced_metrics_pairwise_agreement", 1e-8);
    for x in plan.points(&datum.quotient) {
        let g1 = metrics[0].value(&x);
        let g2 = metrics[1].value(&x);
        let g3 = metrics[2].value(&x);
        let r = (&g1 - &g2).amax().max((&g2 - &g3).amax()).max((&g1 - &g3).amax());
        agree.record(&x, r);
    }
    let agree_check = agree.finish();
    if !agree_check.pass {
        return Err(GeomError::Structure(format!(
            "three reduced metrics disagree (residual {:.3e}): input modeling bug",
            agree_check.max_residual
        )));
    }
    report.push(agree_check);

    let triples: [ContactTriple; 3] = match triples.try_into() {
        Ok(t) => t,
        Err(_) => unreachable!("three triples"),
    };
    Ok(Reduced::Structure {
        structure: ThreeCosymplectic {
            chart: datum.quotient.clone(),
            g: metrics.swap_remove(0),
            triples,
        },
        report,
    })
}

/// HyperKähler reduction: Kähler recipe at the joint level set of the
/// three symplectic moment maps.
pub fn hyperkahler_reduce(datum: &HyperKahlerDatum) -> Result<Reduced<HyperKahlerStructure>> {
    let mut report = VerificationReport::new("hyperkahler_reduce");
    let plan = SamplePlan::new(60, 7);
    let outcome = validate_datum(datum, &plan, true, &mut report)?;
    let slicer = Slicer::from_datum(datum);
    let dim = slicer.dim();
    let n_constraints = datum.moments.len() * slicer.dim_g();
    if dim == n_constraints + outcome.stab_coeffs.ncols() {
        report.degenerate = true;
        return Ok(Reduced::Degenerate { report });
    }

    decomposition_checks(
        &slicer,
        &datum.structure.h,
        Some(&datum.structure.j[0]),
        None,
        &datum.quotient,
        &plan,
        &datum.tol,
        &mut report,
    )?;

    let h_r = reduced_metric(&slicer, &datum.structure.h, &datum.quotient);
    let j_r: Vec<EndoField> = (0..3)
        .map(|i| reduced_endo(&slicer, &datum.structure.h, &datum.structure.j[i], &datum.quotient))
        .collect();
    let j_r: [EndoField; 3] = match j_r.try_into() {
        Ok(j) => j,
        Err(_) => unreachable!("three complex structures"),
    };
    Ok(Reduced::Structure {
        structure: HyperKahlerStructure {
            chart: datum.quotient.clone(),
            h: h_r,
            j: j_r,
        },
        report,
    })
}
