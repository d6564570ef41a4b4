//! Structure bundles and their verifiers.
//!
//! An almost cosymplectic pair (η, ω) on a (2n+1)-chart is nondegenerate
//! when η∧ωⁿ ≠ 0, equivalently when the ♭ matrix of
//! X ↦ ι_Xω + η(X)η is invertible. The Reeb field is the unique solution
//! of ♭ξ = η (that is ι_ξω = 0, η(ξ) = 1), and Hamiltonian fields solve
//! ♭X_f = df − ξ(f)η.
//!
//! Metric structures derive their 2-form from (g, φ): ω(X,Y) = g(X, φY);
//! the form is never stored independently, so the bundles cannot drift out
//! of consistency.

use nalgebra::DMatrix;

use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::field::{EndoField, KForm, MetricField, ScalarField, VectorField};
use crate::form::{binomial, component, wedge};
use crate::jet::{seed_point, values, Jet};
use crate::linalg::{cond, jet_mat_mul, jet_solve};
use crate::ops::{covariant_derivative_endo, exterior_derivative, nijenhuis_tensor};
use crate::report::{ResidualTracker, Tolerances, VerificationReport};
use crate::sample::SamplePlan;

#[derive(Clone)]
pub struct AlmostCosymplectic {
    pub chart: Chart,
    pub eta: KForm,
    pub omega: KForm,
}

#[derive(Clone)]
pub struct ContactTriple {
    pub phi: EndoField,
    pub xi: VectorField,
    pub eta: KForm,
}

#[derive(Clone)]
pub struct AlmostContactMetric {
    pub chart: Chart,
    pub g: MetricField,
    pub phi: EndoField,
    pub xi: VectorField,
    pub eta: KForm,
}

#[derive(Clone)]
pub struct ThreeCosymplectic {
    pub chart: Chart,
    pub g: MetricField,
    pub triples: [ContactTriple; 3],
}

#[derive(Clone)]
pub struct KahlerStructure {
    pub chart: Chart,
    pub h: MetricField,
    pub j: EndoField,
}

#[derive(Clone)]
pub struct HyperKahlerStructure {
    pub chart: Chart,
    pub h: MetricField,
    pub j: [EndoField; 3],
}

impl AlmostCosymplectic {
    pub fn new(chart: Chart, eta: KForm, omega: KForm) -> AlmostCosymplectic {
        assert_eq!(eta.degree, 1);
        assert_eq!(omega.degree, 2);
        AlmostCosymplectic { chart, eta, omega }
    }
}

impl AlmostContactMetric {
    /// The induced 2-form ω(X,Y) = g(X,φY).
    pub fn induced_omega(&self) -> KForm {
        induced_two_form(&self.chart, &self.g, &self.phi)
    }

    pub fn underlying(&self) -> AlmostCosymplectic {
        AlmostCosymplectic {
            chart: self.chart.clone(),
            eta: self.eta.clone(),
            omega: self.induced_omega(),
        }
    }
}

impl ThreeCosymplectic {
    pub fn contact_metric(&self, i: usize) -> AlmostContactMetric {
        AlmostContactMetric {
            chart: self.chart.clone(),
            g: self.g.clone(),
            phi: self.triples[i].phi.clone(),
            xi: self.triples[i].xi.clone(),
            eta: self.triples[i].eta.clone(),
        }
    }

    /// The i-th underlying cosymplectic pair (η_i, ω_i).
    pub fn underlying(&self, i: usize) -> AlmostCosymplectic {
        self.contact_metric(i).underlying()
    }
}

impl KahlerStructure {
    /// The fundamental 2-form Ω(X,Y) = h(X, JY).
    pub fn induced_form(&self) -> KForm {
        induced_two_form(&self.chart, &self.h, &self.j)
    }
}

impl HyperKahlerStructure {
    pub fn kahler(&self, i: usize) -> KahlerStructure {
        KahlerStructure {
            chart: self.chart.clone(),
            h: self.h.clone(),
            j: self.j[i].clone(),
        }
    }

    /// The i-th symplectic form Ω_i(X,Y) = h(X, J_iY).
    pub fn induced_form(&self, i: usize) -> KForm {
        self.kahler(i).induced_form()
    }
}

/// ω(X,Y) = g(X,φY): components ω_{ij} = (Gφ)_{ij}, i < j. Analytic jets
/// whenever both inputs have them.
fn induced_two_form(chart: &Chart, g: &MetricField, phi: &EndoField) -> KForm {
    let dim = chart.dim();
    let ge = g.eval.clone();
    let pe = phi.eval.clone();
    let combos = crate::form::combinations(dim, 2);
    let jets_kind = ge.exact_jets() && pe.exact_jets();
    let make = move |p: &[Jet]| -> Vec<Jet> {
        let g = ge.jets(p);
        let phi = pe.jets(p);
        let gphi = jet_mat_mul(&g, &phi, dim, dim, dim);
        combos
            .iter()
            .map(|c| gphi[c[0] * dim + c[1]].clone())
            .collect()
    };
    if jets_kind {
        KForm::from_jets(chart, 2, make)
    } else {
        KForm::from_values(chart, 2, move |p| {
            values(&make(&crate::jet::constant_point(p, 0)))
        })
    }
}

/// Jet-valued ♭ matrix: M[j][k] = ω_{kj} + η_k η_j, so that (♭X)_j = M[j][k] X^k.
fn flat_matrix_jets(dim: usize, eta: &[Jet], omega: &[Jet]) -> Vec<Vec<Jet>> {
    let omega_at = |k: usize, j: usize| -> Jet {
        if k == j {
            return Jet::scalar(0.0);
        }
        let (sign, sorted) = crate::form::sort_with_sign(&[k, j]).unwrap();
        let rank = crate::form::comb_rank(&sorted, dim);
        if sign > 0.0 {
            omega[rank].clone()
        } else {
            -&omega[rank]
        }
    };
    (0..dim)
        .map(|j| {
            (0..dim)
                .map(|k| &omega_at(k, j) + &(&eta[k] * &eta[j]))
                .collect()
        })
        .collect()
}

/// The ♭ matrix at a point (values), with a singularity error when the
/// structure degenerates there.
pub fn flat(s: &AlmostCosymplectic, p: &[f64]) -> Result<DMatrix<f64>> {
    s.chart.check_point(p)?;
    let dim = s.chart.dim();
    let seeds = crate::jet::constant_point(p, 0);
    let eta = s.eta.jet(&seeds);
    let omega = s.omega.jet(&seeds);
    let m = flat_matrix_jets(dim, &eta, &omega);
    let mat = DMatrix::from_fn(dim, dim, |r, c| m[r][c].v);
    let det = mat.determinant();
    if det.abs() < 1e-12 {
        return Err(GeomError::Singular {
            context: "flat map (not almost cosymplectic at point)".into(),
            point: p.to_vec(),
            det,
        });
    }
    Ok(mat)
}

/// ♯ = ♭⁻¹ applied to a covector.
pub fn sharp(s: &AlmostCosymplectic, p: &[f64], covector: &[f64]) -> Result<Vec<f64>> {
    let m = flat(s, p)?;
    let b = nalgebra::DVector::from_column_slice(covector);
    let x = m.lu().solve(&b).ok_or_else(|| GeomError::Singular {
        context: "sharp".into(),
        point: p.to_vec(),
        det: 0.0,
    })?;
    Ok(x.iter().cloned().collect())
}

/// The Reeb field: the unique ξ with ι_ξω = 0 and η(ξ) = 1, solved
/// pointwise through ♭ξ = η. Jet-capable: when η and ω propagate exact
/// jets, so does ξ. Panics if the structure degenerates at an evaluated
/// point; `reeb_at` is the fallible variant for error paths.
pub fn reeb_field(s: &AlmostCosymplectic) -> VectorField {
    let dim = s.chart.dim();
    let ee = s.eta.eval.clone();
    let oe = s.omega.eval.clone();
    VectorField::from_jets(&s.chart, move |p| {
        let eta = ee.jets(p);
        let omega = oe.jets(p);
        let m = flat_matrix_jets(dim, &eta, &omega);
        jet_solve(&m, &eta, "reeb field").expect("nondegenerate almost cosymplectic structure")
    })
}

/// Fallible Reeb evaluation at a point (error path for degenerate input).
pub fn reeb_at(s: &AlmostCosymplectic, p: &[f64]) -> Result<Vec<f64>> {
    let m = flat(s, p)?;
    let seeds = crate::jet::constant_point(p, 0);
    let eta = values(&s.eta.jet(&seeds));
    let b = nalgebra::DVector::from_vec(eta);
    let x = m.lu().solve(&b).ok_or_else(|| GeomError::Singular {
        context: "reeb".into(),
        point: p.to_vec(),
        det: 0.0,
    })?;
    Ok(x.iter().cloned().collect())
}

/// The Hamiltonian field X_f = ♭⁻¹(df − ξ(f)η); satisfies η(X_f) = 0 and
/// ι_{X_f}ω = df − ξ(f)η.
pub fn hamiltonian_vector_field(s: &AlmostCosymplectic, f: &ScalarField) -> VectorField {
    let dim = s.chart.dim();
    let ee = s.eta.eval.clone();
    let oe = s.omega.eval.clone();
    let fe = f.eval.clone();
    VectorField::from_values(&s.chart, move |p| {
        let eta: Vec<Jet> = ee.values(p).into_iter().map(Jet::scalar).collect();
        let omega: Vec<Jet> = oe.values(p).into_iter().map(Jet::scalar).collect();
        let df = fe.jets(&seed_point(p))[0].d.clone();
        let m = flat_matrix_jets(dim, &eta, &omega);
        let xi =
            jet_solve(&m, &eta, "reeb in hamiltonian field").expect("nondegenerate structure");
        let xi_f: f64 = xi.iter().zip(&df).map(|(x, d)| x.v * d).sum();
        let rhs: Vec<Jet> = (0..dim)
            .map(|i| Jet::scalar(df[i] - xi_f * eta[i].v))
            .collect();
        let x = jet_solve(&m, &rhs, "hamiltonian field").expect("nondegenerate structure");
        x.iter().map(|j| j.v).collect()
    })
}

// ---------------------------------------------------------------------
// Verifiers
// ---------------------------------------------------------------------

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Nondegeneracy: min |det ♭| and min |η∧ωⁿ| over samples, pass iff both
/// exceed the nondegeneracy tolerance. Points where ♭ is conditioned worse
/// than 1e12 are flagged and skipped rather than failing the run.
pub fn verify_almost_cosymplectic(
    s: &AlmostCosymplectic,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> VerificationReport {
    let dim = s.chart.dim();
    let mut report = VerificationReport::new("almost_cosymplectic");
    let mut det_track = ResidualTracker::new("flat_min_abs_det", tol.nondegenerate);
    let mut vol_track = ResidualTracker::new("volume_pairing_min_abs", tol.nondegenerate);
    for p in plan.points(&s.chart) {
        let seeds = crate::jet::constant_point(&p, 0);
        let eta = values(&s.eta.jet(&seeds));
        let omega = values(&s.omega.jet(&seeds));
        let eta_j: Vec<Jet> = eta.iter().map(|&v| Jet::scalar(v)).collect();
        let omega_j: Vec<Jet> = omega.iter().map(|&v| Jet::scalar(v)).collect();
        let m = flat_matrix_jets(dim, &eta_j, &omega_j);
        let mat = DMatrix::from_fn(dim, dim, |r, c| m[r][c].v);
        let c = cond(&mat);
        if c.is_finite() && c > 1e12 {
            det_track.flag(format!("cond {c:.3e} at {p:?}, point skipped"));
        } else {
            det_track.record_min(&p, mat.determinant().abs());
        }
        vol_track.record_min(&p, volume_pairing_values(dim, &eta, &omega).abs());
    }
    report.push(det_track.finish_min_above());
    report.push(vol_track.finish_min_above());
    report
}

fn volume_pairing_values(dim: usize, eta: &[f64], omega: &[f64]) -> f64 {
    let n = (dim - 1) / 2;
    let mut acc = omega.to_vec();
    let mut deg = 2;
    for _ in 1..n {
        acc = wedge(dim, deg, &acc, 2, omega);
        deg += 2;
    }
    let top = if n == 0 {
        eta.to_vec()
    } else {
        wedge(dim, 1, eta, 2 * n, &acc)
    };
    debug_assert_eq!(top.len(), binomial(dim, dim));
    top[0]
}

/// The volume pairing η∧ωⁿ at a point (top-degree component).
pub fn volume_pairing(s: &AlmostCosymplectic, p: &[f64]) -> f64 {
    let seeds = crate::jet::constant_point(p, 0);
    let eta = values(&s.eta.jet(&seeds));
    let omega = values(&s.omega.jet(&seeds));
    volume_pairing_values(s.chart.dim(), &eta, &omega)
}

/// Cosymplectic: nondegeneracy plus closedness dη = 0, dω = 0.
pub fn verify_cosymplectic(
    s: &AlmostCosymplectic,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> VerificationReport {
    let mut report = verify_almost_cosymplectic(s, plan, tol);
    report.name = "cosymplectic".into();
    let d_eta = exterior_derivative(&s.eta);
    let d_omega = exterior_derivative(&s.omega);
    let mut eta_track = ResidualTracker::new("d_eta_max_component", tol.jet);
    let mut omega_track = ResidualTracker::new("d_omega_max_component", tol.jet);
    for p in plan.points(&s.chart) {
        eta_track.record(&p, max_abs(&d_eta.value(&p)));
        omega_track.record(&p, max_abs(&d_omega.value(&p)));
    }
    report.push(eta_track.finish());
    report.push(omega_track.finish());
    report
}

/// Almost-contact-metric axioms: φ² = −id + η⊗ξ, η(ξ) = 1, φξ = 0,
/// g(ξ,·) = η, g(φX,φY) = g(X,Y) − η(X)η(Y), and positive definiteness.
fn almost_contact_metric_checks(
    s: &AlmostContactMetric,
    plan: &SamplePlan,
    tol: &Tolerances,
    report: &mut VerificationReport,
) {
    let dim = s.chart.dim();
    let mut phi2 = ResidualTracker::new("phi_squared_identity", tol.algebraic);
    let mut eta_xi = ResidualTracker::new("eta_of_xi_minus_one", tol.algebraic);
    let mut phi_xi = ResidualTracker::new("phi_of_xi", tol.algebraic);
    let mut g_xi = ResidualTracker::new("g_xi_equals_eta", tol.algebraic);
    let mut compat = ResidualTracker::new("metric_phi_compatibility", tol.algebraic);
    let mut posdef = ResidualTracker::new("metric_min_eigenvalue", 0.0);
    for p in plan.points(&s.chart) {
        let g = s.g.value(&p);
        let phi = s.phi.value(&p);
        let xi = nalgebra::DVector::from_vec(s.xi.value(&p));
        let eta = nalgebra::DVector::from_vec(s.eta.value(&p));
        let m = &phi * &phi + DMatrix::identity(dim, dim) - &xi * eta.transpose();
        phi2.record(&p, m.amax());
        eta_xi.record(&p, (eta.dot(&xi) - 1.0).abs());
        phi_xi.record(&p, (&phi * &xi).amax());
        g_xi.record(&p, (&g * &xi - &eta).amax());
        let cm = phi.transpose() * &g * &phi - &g + &eta * eta.transpose();
        compat.record(&p, cm.amax());
        let eig = nalgebra::SymmetricEigen::new(g.clone());
        posdef.record_min(&p, eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min));
    }
    report.push(phi2.finish());
    report.push(eta_xi.finish());
    report.push(phi_xi.finish());
    report.push(g_xi.finish());
    report.push(compat.finish());
    report.push(posdef.finish_min_above());
}

/// CoKähler: almost-contact-metric axioms, the induced (η, ω) passes the
/// cosymplectic checks, ∇φ = 0, and the normality cross-check
/// N_φ + 2dη⊗ξ = 0 (redundant when dη = 0, kept as a cross-check).
pub fn verify_cokahler(
    s: &AlmostContactMetric,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> VerificationReport {
    let mut report = VerificationReport::new("cokahler");
    almost_contact_metric_checks(s, plan, tol, &mut report);
    let under = verify_cosymplectic(&s.underlying(), plan, tol);
    report.merge("induced", under);

    let derivative_tol = if s.g.eval.exact_jets() && s.phi.eval.exact_jets() {
        tol.jet
    } else {
        tol.fd
    };
    let dim = s.chart.dim();
    let mut nabla = ResidualTracker::new("nabla_phi_max", derivative_tol);
    let mut nijen = ResidualTracker::new("nijenhuis_normality", derivative_tol.max(1e-6));
    let d_eta = exterior_derivative(&s.eta);
    for p in plan.points(&s.chart) {
        match covariant_derivative_endo(&s.g, &s.phi, &p) {
            Ok(n) => {
                let mut worst: f64 = 0.0;
                for i in 0..dim {
                    for j in 0..dim {
                        for k in 0..dim {
                            worst = worst.max(n[i][j][k].abs());
                        }
                    }
                }
                nabla.record(&p, worst);
            }
            Err(e) => nabla.flag(format!("{e}")),
        }
        let t = nijenhuis_tensor(&s.phi, &p);
        let de = d_eta.value(&p);
        let xi = s.xi.value(&p);
        let mut worst: f64 = 0.0;
        for j in 0..dim {
            for k in 0..dim {
                let de_jk = component(dim, &de, &[j, k]);
                for i in 0..dim {
                    worst = worst.max((t[i][j][k] + 2.0 * de_jk * xi[i]).abs());
                }
            }
        }
        nijen.record(&p, worst);
    }
    report.push(nabla.finish());
    report.push(nijen.finish());
    report
}

/// 3-cosymplectic: each triple is coKähler for the shared metric, the
/// quaternionic relations of the definition hold for every even
/// permutation, and the pairing identity ω₂(X, ξ₁) = −η₃(X) holds.
pub fn verify_3cosymplectic(
    s: &ThreeCosymplectic,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> VerificationReport {
    let mut report = VerificationReport::new("three_cosymplectic");
    for i in 0..3 {
        report.merge(
            &format!("triple{}", i + 1),
            verify_cokahler(&s.contact_metric(i), plan, tol),
        );
    }

    let dim = s.chart.dim();
    let mut phi_rel = ResidualTracker::new("quaternion_phi_relations", tol.algebraic);
    let mut xi_rel = ResidualTracker::new("quaternion_xi_relations", tol.algebraic);
    let mut eta_rel = ResidualTracker::new("quaternion_eta_relations", tol.algebraic);
    let mut pairing = ResidualTracker::new("omega2_xi1_eta3_pairing", tol.algebraic);

    let omega2 = s.contact_metric(1).induced_omega();

    for p in plan.points(&s.chart) {
        let phi: Vec<DMatrix<f64>> = s.triples.iter().map(|t| t.phi.value(&p)).collect();
        let xi: Vec<nalgebra::DVector<f64>> = s
            .triples
            .iter()
            .map(|t| nalgebra::DVector::from_vec(t.xi.value(&p)))
            .collect();
        let eta: Vec<nalgebra::DVector<f64>> = s
            .triples
            .iter()
            .map(|t| nalgebra::DVector::from_vec(t.eta.value(&p)))
            .collect();
        let mut worst_phi: f64 = 0.0;
        let mut worst_xi: f64 = 0.0;
        let mut worst_eta: f64 = 0.0;
        for &(a, b, c) in &[(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
            // φ_γ = φ_αφ_β − η_β⊗ξ_α = −φ_βφ_α + η_α⊗ξ_β
            let m1 = &phi[a] * &phi[b] - &xi[a] * eta[b].transpose() - &phi[c];
            let m2 = -(&phi[b] * &phi[a]) + &xi[b] * eta[a].transpose() - &phi[c];
            worst_phi = worst_phi.max(m1.amax()).max(m2.amax());
            // ξ_γ = φ_αξ_β = −φ_βξ_α
            let v1 = &phi[a] * &xi[b] - &xi[c];
            let v2 = -(&phi[b] * &xi[a]) - &xi[c];
            worst_xi = worst_xi.max(v1.amax()).max(v2.amax());
            // η_γ = φ_β*η_α = −φ_α*η_β, with (φ*η)(X) = η(φX), components φᵀη
            let w1 = phi[b].transpose() * &eta[a] - &eta[c];
            let w2 = -(phi[a].transpose() * &eta[b]) - &eta[c];
            worst_eta = worst_eta.max(w1.amax()).max(w2.amax());
        }
        phi_rel.record(&p, worst_phi);
        xi_rel.record(&p, worst_xi);
        eta_rel.record(&p, worst_eta);

        // ω₂(e_j, ξ₁) = −η₃(e_j)
        let o2 = omega2.value(&p);
        let mut worst: f64 = 0.0;
        for j in 0..dim {
            let mut o2_e_xi = 0.0;
            for k in 0..dim {
                o2_e_xi += component(dim, &o2, &[j, k]) * xi[0][k];
            }
            worst = worst.max((o2_e_xi + eta[2][j]).abs());
        }
        pairing.record(&p, worst);
    }
    report.push(phi_rel.finish());
    report.push(xi_rel.finish());
    report.push(eta_rel.finish());
    report.push(pairing.finish());
    report
}

/// Kähler: J² = −id, h(JX,JY) = h(X,Y), dΩ = 0, ∇J = 0.
pub fn verify_kahler(
    s: &KahlerStructure,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> VerificationReport {
    let mut report = VerificationReport::new("kahler");
    let dim = s.chart.dim();
    let mut j2 = ResidualTracker::new("j_squared_identity", tol.algebraic);
    let mut compat = ResidualTracker::new("hermitian_compatibility", tol.algebraic);
    let mut posdef = ResidualTracker::new("metric_min_eigenvalue", 0.0);
    for p in plan.points(&s.chart) {
        let h = s.h.value(&p);
        let j = s.j.value(&p);
        j2.record(&p, (&j * &j + DMatrix::identity(dim, dim)).amax());
        compat.record(&p, (j.transpose() * &h * &j - &h).amax());
        let eig = nalgebra::SymmetricEigen::new(h.clone());
        posdef.record_min(&p, eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min));
    }
    report.push(j2.finish());
    report.push(compat.finish());
    report.push(posdef.finish_min_above());

    let omega = s.induced_form();
    let d_omega = exterior_derivative(&omega);
    let mut closed = ResidualTracker::new("d_omega_max_component", tol.jet);
    for p in plan.points(&s.chart) {
        closed.record(&p, max_abs(&d_omega.value(&p)));
    }
    report.push(closed.finish());

    let derivative_tol = if s.h.eval.exact_jets() && s.j.eval.exact_jets() {
        tol.jet
    } else {
        tol.fd
    };
    let mut nabla = ResidualTracker::new("nabla_j_max", derivative_tol);
    for p in plan.points(&s.chart) {
        match covariant_derivative_endo(&s.h, &s.j, &p) {
            Ok(n) => {
                let mut worst: f64 = 0.0;
                for i in 0..dim {
                    for a in 0..dim {
                        for b in 0..dim {
                            worst = worst.max(n[i][a][b].abs());
                        }
                    }
                }
                nabla.record(&p, worst);
            }
            Err(e) => nabla.flag(format!("{e}")),
        }
    }
    report.push(nabla.finish());
    report
}

/// HyperKähler: each (h, J_i) is Kähler and J₁J₂ = J₃ cyclically.
pub fn verify_hyperkahler(
    s: &HyperKahlerStructure,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> VerificationReport {
    let mut report = VerificationReport::new("hyperkahler");
    for i in 0..3 {
        report.merge(&format!("j{}", i + 1), verify_kahler(&s.kahler(i), plan, tol));
    }
    let mut quat = ResidualTracker::new("quaternion_products", tol.algebraic);
    for p in plan.points(&s.chart) {
        let j: Vec<DMatrix<f64>> = s.j.iter().map(|e| e.value(&p)).collect();
        let mut worst: f64 = 0.0;
        for &(a, b, c) in &[(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
            worst = worst.max((&j[a] * &j[b] - &j[c]).amax());
        }
        quat.record(&p, worst);
    }
    report.push(quat.finish());
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::sample::SamplePlan;
    use rand::{Rng, SeedableRng};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn canonical_r5_flat_matrix_blocks() {
        // direct sum of two standard 2x2 symplectic blocks and a 1x1
        // identity in (p,q,t) order; determinant 1
        let s = canonical_r5();
        let m = flat(&s, &[0.1, 0.2, -0.3, 0.4, 0.0]).unwrap();
        let expected = DMatrix::from_row_slice(
            5,
            5,
            &[
                0.0, 1.0, 0.0, 0.0, 0.0, //
                -1.0, 0.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, -1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.0, 1.0,
            ],
        );
        assert!((m.clone() - expected).amax() < 1e-14);
        assert!((m.determinant() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_omega_is_singular() {
        let s = zero_omega_r3();
        match flat(&s, &[0.0, 0.0, 0.0]) {
            Err(GeomError::Singular { .. }) => {}
            other => panic!("expected singularity error, got {other:?}"),
        }
    }

    #[test]
    fn flat_roundtrip_on_perturbed_canonical() {
        // ♭⁻¹∘♭ = id < 1e-10 on a random perturbation of canonical R^5
        let chart = Chart::symmetric("pert-r5", &["p1", "q1", "p2", "q2", "t"], 1.0);
        let eta = KForm::from_jets(&chart, 1, |p| {
            let n = p[0].n_partials();
            vec![
                &p[1] * 0.1,
                Jet::constant(0.0, n),
                Jet::constant(0.0, n),
                &p[0] * 0.05,
                Jet::constant(1.0, n),
            ]
        });
        let omega = KForm::from_jets(&chart, 2, |p| {
            let n = p[0].n_partials();
            let mut c = vec![Jet::constant(0.0, n); 10];
            c[crate::form::comb_rank(&[0, 1], 5)] = &p[4].sin() * 0.1 - 1.0;
            c[crate::form::comb_rank(&[2, 3], 5)] = &(&p[0] * &p[1]) * 0.1 - 1.0;
            c[crate::form::comb_rank(&[0, 2], 5)] = &p[3] * 0.08;
            c[crate::form::comb_rank(&[1, 3], 5)] = &p[2] * 0.06;
            c
        });
        let s = AlmostCosymplectic::new(chart.clone(), eta, omega);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for p in SamplePlan::new(50, 21).points(&chart) {
            let m = flat(&s, &p).unwrap();
            let v: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let cov = &m * nalgebra::DVector::from_column_slice(&v);
            let back = sharp(&s, &p, cov.as_slice()).unwrap();
            for i in 0..5 {
                assert!((back[i] - v[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn reeb_of_canonical_is_dt() {
        let s = canonical_r5();
        let xi = reeb_field(&s);
        for p in SamplePlan::new(20, 22).points(&s.chart) {
            let v = xi.value(&p);
            for i in 0..4 {
                assert!(v[i].abs() < 1e-14);
            }
            assert!((v[4] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn reeb_of_linear_cosymplectization() {
        // ω_H = ω + dH∧dt with H = p on R³(p,q,t): ξ_H = ∂q + ∂t.
        // Here ω = dq∧dp, dH = dp, so ω_H = dq∧dp + dp∧dt.
        let chart = Chart::symmetric("cosymization", &["p", "q", "t"], 1.0);
        let eta = dt_form(&chart);
        let omega = constant_two_form(&chart, &[(0, 1, -1.0), (0, 2, 1.0)]);
        let s = AlmostCosymplectic::new(chart.clone(), eta, omega);
        let xi = reeb_field(&s);
        for p in SamplePlan::new(20, 23).points(&chart) {
            let v = xi.value(&p);
            assert!(v[0].abs() < 1e-13);
            assert!((v[1] - 1.0).abs() < 1e-13);
            assert!((v[2] - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn reeb_defining_equations_on_random_structure() {
        // ω(ξ,e_i) < 1e-10 and η(ξ) = 1 ± 1e-10 at 100 points
        let chart = Chart::symmetric("pert-r5b", &["p1", "q1", "p2", "q2", "t"], 1.0);
        let eta = KForm::from_jets(&chart, 1, |p| {
            let n = p[0].n_partials();
            vec![
                Jet::constant(0.0, n),
                &p[2] * 0.1,
                Jet::constant(0.0, n),
                Jet::constant(0.0, n),
                Jet::constant(1.0, n),
            ]
        });
        let omega = KForm::from_jets(&chart, 2, |p| {
            let n = p[0].n_partials();
            let mut c = vec![Jet::constant(0.0, n); 10];
            c[crate::form::comb_rank(&[0, 1], 5)] = &p[4].cos() * 0.2 - 1.0;
            c[crate::form::comb_rank(&[2, 3], 5)] = &p[1] * 0.1 - 1.0;
            c[crate::form::comb_rank(&[1, 2], 5)] = &p[0] * 0.07;
            c
        });
        let s = AlmostCosymplectic::new(chart.clone(), eta.clone(), omega.clone());
        let xi = reeb_field(&s);
        for p in SamplePlan::new(100, 24).points(&chart) {
            let v = xi.value(&p);
            let om = s.omega.value(&p);
            let et = s.eta.value(&p);
            for i in 0..5 {
                let mut pairing = 0.0;
                for k in 0..5 {
                    pairing += component(5, &om, &[k, i]) * v[k];
                }
                assert!(pairing.abs() < 1e-10, "iota_xi omega residual {pairing:e}");
            }
            let eta_xi: f64 = et.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!((eta_xi - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn hamiltonian_field_of_t_vanishes() {
        let s = canonical_r5();
        let f = ScalarField::from_jets(&s.chart, |p| p[4].clone());
        let xf = hamiltonian_vector_field(&s, &f);
        for p in SamplePlan::new(10, 25).points(&s.chart) {
            assert!(xf.value(&p).iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn hamiltonian_field_of_q1_is_minus_dp1() {
        let s = canonical_r5();
        let f = ScalarField::from_jets(&s.chart, |p| p[1].clone());
        let xf = hamiltonian_vector_field(&s, &f);
        for p in SamplePlan::new(10, 26).points(&s.chart) {
            let v = xf.value(&p);
            assert!((v[0] + 1.0).abs() < 1e-12);
            for i in 1..5 {
                assert!(v[i].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hamiltonian_field_defining_residuals() {
        // ω(X_f,−) = df − ξ(f)η and η(X_f) = 0 < 1e-9 at 100 points
        let s = canonical_r5();
        let f = ScalarField::from_jets(&s.chart, |p| {
            p[0].sin() * &p[3] + p[1].powi(2) * 0.5 + &p[4] * &p[2]
        });
        let xf = hamiltonian_vector_field(&s, &f);
        let xi = reeb_field(&s);
        for p in SamplePlan::new(100, 27).points(&s.chart) {
            let x = xf.value(&p);
            let om = s.omega.value(&p);
            let et = s.eta.value(&p);
            let df = crate::ops::partials(&f, &p).unwrap();
            let xiv = xi.value(&p);
            let xi_f: f64 = df.iter().zip(&xiv).map(|(a, b)| a * b).sum();
            for i in 0..5 {
                let mut lhs = 0.0;
                for k in 0..5 {
                    lhs += component(5, &om, &[k, i]) * x[k];
                }
                let rhs = df[i] - xi_f * et[i];
                assert!((lhs - rhs).abs() < 1e-9);
            }
            let eta_x: f64 = et.iter().zip(&x).map(|(a, b)| a * b).sum();
            assert!(eta_x.abs() < 1e-10, "eta(X_f) = {eta_x:e}");
        }
    }

    #[test]
    fn verify_almost_cosymplectic_flat_and_scaled() {
        let plan = SamplePlan::new(200, 7);
        let r = verify_almost_cosymplectic(&canonical_r5(), &plan, &tol());
        assert!(r.pass);
        let det = r.check("flat_min_abs_det").unwrap();
        assert!((det.max_residual - 1.0).abs() < 1e-12);

        // ω scaled by 2: nondegeneracy preserved
        let base = canonical_r5();
        let omega2 = constant_two_form(&base.chart, &[(0, 1, -2.0), (2, 3, -2.0)]);
        let scaled = AlmostCosymplectic::new(base.chart.clone(), base.eta.clone(), omega2);
        assert!(verify_almost_cosymplectic(&scaled, &plan, &tol()).pass);
    }

    #[test]
    fn verify_almost_cosymplectic_degenerate_fails() {
        let plan = SamplePlan::new(200, 7);
        let r = verify_almost_cosymplectic(&degenerate_omega_r3(), &plan, &tol());
        assert!(!r.pass, "thin-box p1·dp∧dq fixture must fail nondegeneracy");
    }

    #[test]
    fn verify_cosymplectic_flat_passes_with_tiny_residuals() {
        let plan = SamplePlan::new(200, 7);
        let r = verify_cosymplectic(&canonical_r5(), &plan, &tol());
        assert!(r.pass);
        assert!(r.check("d_eta_max_component").unwrap().max_residual < 1e-12);
        assert!(r.check("d_omega_max_component").unwrap().max_residual < 1e-12);
    }

    #[test]
    fn verify_cosymplectic_nonclosed_fails_on_d_omega() {
        let plan = SamplePlan::new(100, 7);
        let r = verify_cosymplectic(&nonclosed_omega_r3(), &plan, &tol());
        assert!(!r.pass);
        assert!(!r.check("d_omega_max_component").unwrap().pass);
        assert!(r.check("d_eta_max_component").unwrap().pass);
    }

    #[test]
    fn contact_fails_exactly_at_d_eta() {
        let plan = SamplePlan::new(100, 7);
        let almost = verify_almost_cosymplectic(&contact_r3(), &plan, &tol());
        assert!(almost.pass, "contact structure is almost cosymplectic");
        let r = verify_cosymplectic(&contact_r3(), &plan, &tol());
        assert!(!r.pass);
        assert!(!r.check("d_eta_max_component").unwrap().pass);
        assert!(r.check("d_omega_max_component").unwrap().pass);
    }

    #[test]
    fn verify_cokahler_flat_model() {
        let plan = SamplePlan::new(200, 7);
        let r = verify_cokahler(&flat_cokahler_r3(), &plan, &tol());
        assert!(r.pass, "flat model failed: {:#?}", r.checks.iter().filter(|c| !c.pass).map(|c| &c.check_name).collect::<Vec<_>>());
        assert!(r.max_residual() < 1e-12);
        let r5 = verify_cokahler(&flat_cokahler_r5(), &plan, &tol());
        assert!(r5.pass);
    }

    #[test]
    fn sasakian_fails_at_d_eta_stage() {
        let plan = SamplePlan::new(100, 7);
        let r = verify_cokahler(&sasakian_r3(), &plan, &tol());
        assert!(!r.pass);
        assert!(!r.check("induced.d_eta_max_component").unwrap().pass);
        // pointwise almost contact metric axioms hold
        assert!(r.check("phi_squared_identity").unwrap().pass);
        assert!(r.check("metric_phi_compatibility").unwrap().pass);
    }

    #[test]
    fn tilted_model_fails_nabla_phi() {
        let plan = SamplePlan::new(100, 7);
        let r = verify_cokahler(&tilted_cokahler_r3(), &plan, &tol());
        assert!(!r.pass);
        let nab = r.check("nabla_phi_max").unwrap();
        assert!(!nab.pass, "finite-difference ∇φ oracle must show nonzero entries");
        assert!(nab.max_residual > 1e-2);
        // pointwise axioms still hold
        assert!(r.check("phi_squared_identity").unwrap().pass);
        assert!(r.check("metric_phi_compatibility").unwrap().pass);
    }

    #[test]
    fn verify_3cosymplectic_flat_r7() {
        let plan = SamplePlan::new(200, 7);
        let r = verify_3cosymplectic(&flat_3cosymplectic_r7(), &plan, &tol());
        assert!(
            r.pass,
            "failed checks: {:?}",
            r.checks.iter().filter(|c| !c.pass).map(|c| &c.check_name).collect::<Vec<_>>()
        );
        assert!(r.max_residual() < 1e-12);
        assert!(r.check("omega2_xi1_eta3_pairing").unwrap().max_residual < 1e-12);
    }

    #[test]
    fn swapped_j2_j3_breaks_permutation_relations() {
        let good = flat_3cosymplectic_r7();
        let bad = ThreeCosymplectic {
            chart: good.chart.clone(),
            g: good.g.clone(),
            triples: [
                good.triples[0].clone(),
                ContactTriple {
                    phi: good.triples[2].phi.clone(),
                    xi: good.triples[1].xi.clone(),
                    eta: good.triples[1].eta.clone(),
                },
                good.triples[2].clone(),
            ],
        };
        let plan = SamplePlan::new(50, 7);
        let r = verify_3cosymplectic(&bad, &plan, &tol());
        assert!(!r.pass);
        assert!(!r.check("quaternion_phi_relations").unwrap().pass);
    }

    #[test]
    fn verify_kahler_and_hyperkahler_flat() {
        let plan = SamplePlan::new(200, 7);
        assert!(verify_kahler(&flat_kahler_r2(), &plan, &tol()).pass);
        assert!(verify_kahler(&flat_kahler_c2(), &plan, &tol()).pass);
        let hk = verify_hyperkahler(&flat_hyperkahler_h(), &plan, &tol());
        assert!(hk.pass);
        assert!(hk.check("quaternion_products").unwrap().max_residual < 1e-14);
    }

    #[test]
    fn twisted_j_fails_nabla_j() {
        let plan = SamplePlan::new(100, 7);
        let r = verify_kahler(&twisted_kahler_r4(), &plan, &tol());
        assert!(!r.pass);
        assert!(!r.check("nabla_j_max").unwrap().pass);
        assert!(r.check("j_squared_identity").unwrap().pass);
        assert!(r.check("hermitian_compatibility").unwrap().pass);
    }

    #[test]
    fn volume_pairing_canonical() {
        // η∧ω² for ω = dq1∧dp1 + dq2∧dp2: component 2·(dq∧dp blocks)
        let s = canonical_r5();
        let v = volume_pairing(&s, &[0.0; 5]);
        assert!((v.abs() - 2.0).abs() < 1e-13);
    }
}
