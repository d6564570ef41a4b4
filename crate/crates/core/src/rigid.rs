//! The heavy-top showcase: T*SO(3) × R in body coordinates.
//!
//! SO(3) is charted by exponential coordinates x (the rotation A = exp x̂),
//! the fiber by the body momentum α, plus the time line. The canonical
//! 1-form in these coordinates is Θ = (J_r(x)ᵀ α)·dx with J_r the right
//! Jacobian of the exponential map, the symplectic form is ω = −dΘ, and
//! the left SO(3) action B·(x, α, t) = (log(B exp x̂), α, t) has the
//! spatial momentum μ(x, α) = exp(x̂)α as its moment map.
//!
//! All SO(3) helpers are jet-capable; the trigonometric coefficient
//! functions switch to series in θ² near the identity so jets stay exact
//! there.

use nalgebra::{DMatrix, DVector};

use crate::action::{so3_group, GroupAction, MomentMap, MomentMapData};
use crate::chart::Chart;
use crate::error::Result;
use crate::field::{EndoField, KForm, MetricField, ScalarField, SmoothMap, VectorField};
use crate::jet::Jet;
use crate::linalg::jet_mat_mul;

// ---------------------------------------------------------------------
// SO(3) with jets
// ---------------------------------------------------------------------

fn zero_like(p: &Jet) -> Jet {
    Jet::constant(0.0, p.n_partials())
}

/// hat: R³ → so(3), x ↦ x̂ with x̂ v = x × v (row-major 3×3).
pub fn so3_hat_jet(x: &[Jet]) -> Vec<Jet> {
    let z = zero_like(&x[0]);
    vec![
        z.clone(),
        -&x[2],
        x[1].clone(),
        x[2].clone(),
        z.clone(),
        -&x[0],
        -&x[1],
        x[0].clone(),
        z,
    ]
}

/// vee: so(3) → R³ (inverse of hat on skew matrices; averages the two
/// off-diagonal copies so it also extracts the skew part).
pub fn so3_vee_jet(m: &[Jet]) -> Vec<Jet> {
    vec![
        &(&m[7] - &m[5]) * 0.5,
        &(&m[2] - &m[6]) * 0.5,
        &(&m[3] - &m[1]) * 0.5,
    ]
}

/// sin(θ)/θ as an analytic function of u = θ².
fn sinc_of_u(u: &Jet) -> Jet {
    if u.v > 1e-8 {
        let theta = u.sqrt();
        theta.sin() / theta
    } else {
        // 1 − u/6 + u²/120 − u³/5040
        &(&(1.0 - u * (1.0 / 6.0)) + &(&(u * u) * (1.0 / 120.0))) - &(&(&(u * u) * u) * (1.0 / 5040.0))
    }
}

/// (1 − cos θ)/θ² as an analytic function of u = θ².
fn cos_coeff_of_u(u: &Jet) -> Jet {
    if u.v > 1e-8 {
        let theta = u.sqrt();
        (1.0 - theta.cos()) / u
    } else {
        &(0.5 - u * (1.0 / 24.0)) + &(u * u * (1.0 / 720.0)) - (u * u * u * (1.0 / 40320.0))
    }
}

/// (θ − sin θ)/θ³ as an analytic function of u = θ².
fn cubic_coeff_of_u(u: &Jet) -> Jet {
    if u.v > 1e-8 {
        let theta = u.sqrt();
        (&theta - &theta.sin()) / (u * &theta)
    } else {
        &(Jet::constant(1.0 / 6.0, u.n_partials()) - u * (1.0 / 120.0))
            + &(u * u * (1.0 / 5040.0))
            - (u * u * u * (1.0 / 362880.0))
    }
}

fn mat3_identity(n: usize) -> Vec<Jet> {
    (0..9)
        .map(|e| Jet::constant(if e / 3 == e % 3 { 1.0 } else { 0.0 }, n))
        .collect()
}

/// Rodrigues: exp(x̂) = I + sinc(θ) x̂ + (1−cosθ)/θ² x̂².
pub fn so3_exp_jet(x: &[Jet]) -> Vec<Jet> {
    let n = x[0].n_partials();
    let u = &(&(&x[0] * &x[0]) + &(&x[1] * &x[1])) + &(&x[2] * &x[2]);
    let c1 = sinc_of_u(&u);
    let c2 = cos_coeff_of_u(&u);
    let hat = so3_hat_jet(x);
    let hat2 = jet_mat_mul(&hat, &hat, 3, 3, 3);
    let mut out = mat3_identity(n);
    for e in 0..9 {
        out[e] = &out[e] + &(&(&c1 * &hat[e]) + &(&c2 * &hat2[e]));
    }
    out
}

/// log: SO(3) → R³ for rotation angle < π, x = θ/(2 sinθ) · vee(A − Aᵀ),
/// with the coefficient computed as an analytic function of cos θ.
pub fn so3_log_jet(a: &[Jet]) -> Vec<Jet> {
    let tr = &(&a[0] + &a[4]) + &a[8];
    let c = &(&tr - 1.0) * 0.5;
    let s = &Jet::constant(1.0, c.n_partials()) - &c;
    // h = θ/(2 sin θ): series in s = 1 − cos θ near the identity
    let h = if s.v > 1e-4 {
        let theta = c.acos();
        let sin_theta = (&(1.0 - &c * &c)).sqrt();
        theta / (&sin_theta * 2.0)
    } else {
        // ½ + s/6 + s²/15 + s³/35
        &(&(&(&s * (1.0 / 6.0)) + 0.5) + &(&(&s * &s) * (1.0 / 15.0)))
            + &(&(&(&s * &s) * &s) * (1.0 / 35.0))
    };
    let w = vec![
        &a[7] - &a[5],
        &a[2] - &a[6],
        &a[3] - &a[1],
    ];
    w.into_iter().map(|wi| &h * &wi).collect()
}

/// Right Jacobian of exp: d/dt exp((x+tv)̂) = exp(x̂) (J_r(x) v)̂,
/// J_r = I − (1−cosθ)/θ² x̂ + (θ−sinθ)/θ³ x̂².
pub fn so3_right_jacobian_jet(x: &[Jet]) -> Vec<Jet> {
    let n = x[0].n_partials();
    let u = &(&(&x[0] * &x[0]) + &(&x[1] * &x[1])) + &(&x[2] * &x[2]);
    let c2 = cos_coeff_of_u(&u);
    let c3 = cubic_coeff_of_u(&u);
    let hat = so3_hat_jet(x);
    let hat2 = jet_mat_mul(&hat, &hat, 3, 3, 3);
    let mut out = mat3_identity(n);
    for e in 0..9 {
        out[e] = &(&out[e] - &(&c2 * &hat[e])) + &(&c3 * &hat2[e]);
    }
    out
}

// ---------------------------------------------------------------------
// T*SO(3) × R chart and canonical structure
// ---------------------------------------------------------------------

/// Chart (x1,x2,x3, α1,α2,α3, t): exponential coordinates on SO(3) (‖x‖
/// below the injectivity radius), body momentum, time.
pub fn tstar_so3_chart() -> Chart {
    Chart::new(
        "tstar-so3-x-r",
        &["x1", "x2", "x3", "a1", "a2", "a3", "t"],
        vec![-0.9, -0.9, -0.9, -2.0, -2.0, -2.0, -1.2],
        vec![0.9, 0.9, 0.9, 2.0, 2.0, 2.0, 1.2],
    )
    .expect("valid chart")
}

/// The tautological 1-form Θ = (J_r(x)ᵀ α) · dx (zero on dα and dt).
pub fn canonical_one_form(chart: &Chart) -> KForm {
    KForm::from_jets(chart, 1, |p| {
        let x = &p[0..3];
        let jr = so3_right_jacobian_jet(x);
        // (J_rᵀ α)_j = Σ_i J_r[i][j] α_i
        let mut comps: Vec<Jet> = (0..3)
            .map(|j| {
                let mut acc = &jr[j] * &p[3];
                for i in 1..3 {
                    acc = &acc + &(&jr[i * 3 + j] * &p[3 + i]);
                }
                acc
            })
            .collect();
        for _ in 0..4 {
            comps.push(zero_like(&p[0]));
        }
        comps
    })
}

/// The canonical symplectic form ω = −dΘ on the (x, α) block, as a form
/// on the full chart (value-level evaluator; exact through Θ jets).
pub fn canonical_symplectic_form(chart: &Chart) -> KForm {
    let theta = canonical_one_form(chart);
    let d_theta = crate::ops::exterior_derivative(&theta);
    let de = d_theta.eval.clone();
    KForm::from_values(chart, 2, move |p| {
        de.values(p).iter().map(|v| -v).collect()
    })
}

/// The rigid-body Hamiltonian H(A, α) = Σ α_i²/M_i.
pub fn rigid_body_hamiltonian(chart: &Chart, inertia: [f64; 3]) -> ScalarField {
    ScalarField::from_jets(chart, move |p| {
        let mut acc = &(&p[3] * &p[3]) / inertia[0];
        acc = &acc + &(&(&p[4] * &p[4]) / inertia[1]);
        &acc + &(&(&p[5] * &p[5]) / inertia[2])
    })
}

/// ω_H = ω + dH∧dt on the full chart.
pub fn rigid_omega_h(chart: &Chart, inertia: [f64; 3]) -> KForm {
    let omega = canonical_symplectic_form(chart);
    let h = rigid_body_hamiltonian(chart, inertia);
    crate::dynamics::twist_by_hamiltonian(chart, &omega, &h)
}

/// Left SO(3) action B·(x, α, t) = (log(B exp x̂), α, t).
pub fn rigid_body_action() -> GroupAction {
    GroupAction::new(so3_group(), tstar_so3_chart(), |g, p| {
        let a = so3_exp_jet(&p[0..3]);
        let ba = jet_mat_mul(g, &a, 3, 3, 3);
        let mut out = so3_log_jet(&ba);
        for i in 3..7 {
            out.push(p[i].clone());
        }
        out
    })
}

/// Spatial momentum μ(x, α, t) = exp(x̂) α.
pub fn rigid_body_moment() -> MomentMapData {
    let action = rigid_body_action();
    let chart = action.chart.clone();
    let mu = MomentMap::from_jets(&chart, |p| {
        let a = so3_exp_jet(&p[0..3]);
        jet_mat_vec3(&a, &p[3..6])
    });
    MomentMapData { action, mu }
}

fn jet_mat_vec3(m: &[Jet], v: &[Jet]) -> Vec<Jet> {
    (0..3)
        .map(|i| {
            let mut acc = &m[i * 3] * &v[0];
            for j in 1..3 {
                acc = &acc + &(&m[i * 3 + j] * &v[j]);
            }
            acc
        })
        .collect()
}

// ---------------------------------------------------------------------
// The invariant almost coKähler structure of the example
// ---------------------------------------------------------------------

/// Left-invariant flat metric on T*SO(3) in body coordinates,
/// h((δx, δα), (δx, δα)) = |J_r δx|² + |δα|², extended by dt² on the time
/// line (only the 6×6 block is used by the compatible-pair construction).
pub fn left_invariant_metric(chart: &Chart) -> MetricField {
    MetricField::from_jets(chart, |p| {
        let n = p[0].n_partials();
        let jr = so3_right_jacobian_jet(&p[0..3]);
        // block J_rᵀ J_r on x-coordinates
        let mut jtj = vec![Jet::constant(0.0, n); 9];
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = &jr[i] * &jr[j];
                for k in 1..3 {
                    acc = &acc + &(&jr[k * 3 + i] * &jr[k * 3 + j]);
                }
                jtj[i * 3 + j] = acc;
            }
        }
        let mut out = vec![Jet::constant(0.0, n); 49];
        for i in 0..3 {
            for j in 0..3 {
                out[i * 7 + j] = jtj[i * 3 + j].clone();
            }
        }
        for i in 3..6 {
            out[i * 7 + i] = Jet::constant(1.0, n);
        }
        out[6 * 7 + 6] = Jet::constant(1.0, n);
        out
    })
}

/// Pointwise polar retraction: from a symplectic matrix Ω and a metric H
/// on the same space, the canonical compatible pair (G_J, J) with
/// Ω = G_J·J, J² = −id, G_J symmetric positive definite.
pub fn compatible_pair(
    omega: &DMatrix<f64>,
    h: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let hinv = h
        .clone()
        .try_inverse()
        .ok_or_else(|| crate::error::GeomError::Numeric("metric not invertible".into()))?;
    let a = &hinv * omega;
    let p = -(&a * &a);
    // p is h-symmetric positive definite; diagonalize in the h-inner
    // product via the symmetric square root of h
    let s = crate::linalg::sym_sqrt(h)?;
    let sinv = s
        .clone()
        .try_inverse()
        .ok_or_else(|| crate::error::GeomError::Numeric("sqrt not invertible".into()))?;
    let p_tilde = &s * &p * &sinv;
    let p_sym = (&p_tilde + &p_tilde.transpose()) * 0.5;
    let inv_sqrt = crate::linalg::sym_inv_sqrt(&p_sym)?;
    let p_inv_sqrt = &sinv * inv_sqrt * &s;
    let j = &a * &p_inv_sqrt;
    let g = omega * &(-(&j));
    Ok((g, j))
}

/// The adapted heavy-top structure: the ω_can-compatible pair (h_J, J) from the
/// left-invariant metric, adapted to the evolution field ξ_H:
/// g(X, Y) = h_J(X, Y) for X, Y ∈ ker dt, g(X, ξ_H) = 0, g(ξ_H, ξ_H) = 1,
/// φ = J on ker dt, φ(ξ_H) = 0.
pub struct RigidAmbientStructure {
    pub chart: Chart,
    pub g: MetricField,
    pub phi: EndoField,
    pub xi: VectorField,
    pub eta: KForm,
}

pub fn rigid_ambient_structure(inertia: [f64; 3]) -> RigidAmbientStructure {
    let chart = tstar_so3_chart();
    let omega_h = rigid_omega_h(&chart, inertia);
    let eta = crate::fixtures::dt_form(&chart);
    let s = crate::structures::AlmostCosymplectic::new(chart.clone(), eta.clone(), omega_h);
    let xi = crate::structures::reeb_field(&s);

    let omega_can = canonical_symplectic_form(&chart);
    let h_left = left_invariant_metric(&chart);

    // pointwise compatible pair on the 6-dim symplectic block
    let pair_at = move |p: &[f64]| -> (DMatrix<f64>, DMatrix<f64>) {
        let om = omega_can.value(p);
        let mut om66 = DMatrix::zeros(6, 6);
        for i in 0..6 {
            for j in 0..6 {
                om66[(i, j)] = crate::form::component(7, &om, &[i, j]);
            }
        }
        let h77 = h_left.value(p);
        let h66 = h77.view((0, 0), (6, 6)).into_owned();
        compatible_pair(&om66, &h66).expect("nondegenerate canonical form")
    };

    let xi_g = xi.clone();
    let pair_g = pair_at.clone();
    let g = MetricField::from_values(&chart, move |p| {
        let (gj, _) = pair_g(p);
        let xiv = DVector::from_vec(xi_g.value(p));
        // vectors decompose as v = v_t·ξ_H + (v − v_t·ξ_H) with the
        // remainder in ker dt; the metric is gj ⊕ (ξ_H unit, orthogonal)
        let mut full = DMatrix::zeros(7, 7);
        // bilinear form: g(v, w) = gj(vk, wk) + v_t w_t where vk = spatial
        // part of v − v_t ξ_H (its t-component vanishes)
        // basis images: e_i for i<6: vk = e_i − 0 = e_i; e_ت = ξ? e_6: v_t = 1,
        // vk = e_6 − ξ_H (spatial components −ξ_spatial)
        let xis = xiv.rows(0, 6).into_owned();
        for i in 0..6 {
            for j in 0..6 {
                full[(i, j)] = gj[(i, j)];
            }
        }
        for i in 0..6 {
            let mut acc = 0.0;
            for j in 0..6 {
                acc += gj[(i, j)] * (-xis[j]);
            }
            full[(i, 6)] = acc;
            full[(6, i)] = acc;
        }
        let mut tt = 1.0;
        for i in 0..6 {
            for j in 0..6 {
                tt += gj[(i, j)] * xis[i] * xis[j];
            }
        }
        full[(6, 6)] = tt;
        full.row_iter()
            .flat_map(|r| r.iter().cloned().collect::<Vec<_>>())
            .collect()
    });

    let xi_p = xi.clone();
    let phi = EndoField::from_values(&chart, move |p| {
        let (_, j) = pair_at(p);
        let xiv = DVector::from_vec(xi_p.value(p));
        // φ(v) = J(v − v_t ξ_H) lifted with zero t-component
        let mut full = DMatrix::zeros(7, 7);
        for i in 0..6 {
            for c in 0..6 {
                full[(i, c)] = j[(i, c)];
            }
        }
        for i in 0..6 {
            let mut acc = 0.0;
            for c in 0..6 {
                acc += j[(i, c)] * (-xiv[c]);
            }
            full[(i, 6)] = acc;
        }
        full.row_iter()
            .flat_map(|r| r.iter().cloned().collect::<Vec<_>>())
            .collect()
    });

    RigidAmbientStructure {
        chart,
        g,
        phi,
        xi,
        eta,
    }
}

// ---------------------------------------------------------------------
// Slice of μ⁻¹(ζ) and chart of the momentum sphere
// ---------------------------------------------------------------------

/// Quotient chart (u, v, s): a cap of the momentum sphere |α| = |ζ|
/// around the direction e1, avoiding the poles ±ζ̂, times the t line.
pub fn momentum_sphere_chart(zeta_norm: f64) -> Chart {
    let _ = zeta_norm;
    Chart::new(
        "momentum-sphere-x-r",
        &["u", "v", "s"],
        vec![-0.45, -0.45, -1.2],
        vec![0.45, 0.45, 1.2],
    )
    .expect("valid chart")
}

/// α̂(u, v) = (1, u, v)/√(1+u²+v²): the sphere cap parametrization.
pub fn sphere_cap_point(u: &Jet, v: &Jet, radius: f64) -> Vec<Jet> {
    let norm2 = &(&(u * u) + &(v * v)) + 1.0;
    let inv = norm2.sqrt().recip();
    vec![&inv * radius, &(u * &inv) * radius, &(v * &inv) * radius]
}

/// The slice σ(u, v, s) = (x(u, v), α(u, v), s) into μ⁻¹(ζ):
/// α = |ζ|·α̂(u,v) and x = the minimal rotation taking α̂ to ζ̂
/// (so exp(x̂)α = ζ exactly). Requires ζ̂ away from ±α̂ over the chart.
pub fn rigid_body_slice(zeta: [f64; 3]) -> SmoothMap {
    let zeta_norm = (zeta[0] * zeta[0] + zeta[1] * zeta[1] + zeta[2] * zeta[2]).sqrt();
    let quotient = momentum_sphere_chart(zeta_norm);
    let ambient = tstar_so3_chart();
    let zhat = [
        zeta[0] / zeta_norm,
        zeta[1] / zeta_norm,
        zeta[2] / zeta_norm,
    ];
    SmoothMap::from_jets(&quotient, &ambient, move |q| {
        let alpha_hat = sphere_cap_point(&q[0], &q[1], 1.0);
        // axis = α̂ × ζ̂, angle θ with cos θ = α̂·ζ̂;
        // x = θ/sinθ · (α̂ × ζ̂)
        let c = &(&(&alpha_hat[0] * zhat[0]) + &(&alpha_hat[1] * zhat[1]))
            + &(&alpha_hat[2] * zhat[2]);
        let cross = vec![
            &(&alpha_hat[1] * zhat[2]) - &(&alpha_hat[2] * zhat[1]),
            &(&alpha_hat[2] * zhat[0]) - &(&alpha_hat[0] * zhat[2]),
            &(&alpha_hat[0] * zhat[1]) - &(&alpha_hat[1] * zhat[0]),
        ];
        // θ/sinθ as an analytic function of s = 1 − cos θ (series branch
        // keeps the jets finite when α̂ approaches ζ̂)
        let s_gap = &Jet::constant(1.0, c.n_partials()) - &c;
        let factor = if s_gap.v > 1e-4 {
            let theta = c.acos();
            let sin_theta = (&(1.0 - &c * &c)).sqrt();
            &theta / &sin_theta
        } else {
            // 1 + s/3 + 2s²/15 + 2s³/35
            &(&(&(&s_gap * (1.0 / 3.0)) + 1.0) + &(&(&s_gap * &s_gap) * (2.0 / 15.0)))
                + &(&(&(&s_gap * &s_gap) * &s_gap) * (2.0 / 35.0))
        };
        let mut out: Vec<Jet> = cross.iter().map(|w| &factor * w).collect();
        for a in &alpha_hat {
            out.push(a * zeta_norm);
        }
        out.push(q[2].clone());
        out
    })
}

/// The euclidean-components Euler field α̇ = α × ∂H/∂α pushed to the
/// sphere-cap chart, plus ∂/∂s: the expected reduced evolution field.
pub fn reduced_evolution_field(chart: &Chart, inertia: [f64; 3], radius: f64) -> VectorField {
    VectorField::from_jets(chart, move |q| {
        let alpha = sphere_cap_point(&q[0], &q[1], radius);
        let dh = [
            &(&alpha[0] / inertia[0]) * 2.0,
            &(&alpha[1] / inertia[1]) * 2.0,
            &(&alpha[2] / inertia[2]) * 2.0,
        ];
        let adot = vec![
            &(&alpha[1] * &dh[2]) - &(&alpha[2] * &dh[1]),
            &(&alpha[2] * &dh[0]) - &(&alpha[0] * &dh[2]),
            &(&alpha[0] * &dh[1]) - &(&alpha[1] * &dh[0]),
        ];
        // chart coords: u = α2/α1, v = α3/α1
        let u_dot = &(&(&adot[1] * &alpha[0]) - &(&alpha[1] * &adot[0])) / &(&alpha[0] * &alpha[0]);
        let v_dot = &(&(&adot[2] * &alpha[0]) - &(&alpha[2] * &adot[0])) / &(&alpha[0] * &alpha[0]);
        vec![u_dot, v_dot, Jet::constant(1.0, q[0].n_partials())]
    })
}

/// Direct Euler-equation integrator α̇ = α × ∂H/∂α (classic RK4, fixed
/// step): the independent oracle for the reduced flow.
pub fn euler_equations_flow(
    alpha0: [f64; 3],
    inertia: [f64; 3],
    t_end: f64,
    step: f64,
) -> Vec<(f64, [f64; 3])> {
    let f = |a: &[f64; 3]| -> [f64; 3] {
        let dh = [
            2.0 * a[0] / inertia[0],
            2.0 * a[1] / inertia[1],
            2.0 * a[2] / inertia[2],
        ];
        [
            a[1] * dh[2] - a[2] * dh[1],
            a[2] * dh[0] - a[0] * dh[2],
            a[0] * dh[1] - a[1] * dh[0],
        ]
    };
    let mut out = Vec::new();
    let mut a = alpha0;
    let mut t = 0.0;
    out.push((t, a));
    let n_steps = (t_end / step).round() as usize;
    for _ in 0..n_steps {
        let k1 = f(&a);
        let a2 = [a[0] + 0.5 * step * k1[0], a[1] + 0.5 * step * k1[1], a[2] + 0.5 * step * k1[2]];
        let k2 = f(&a2);
        let a3 = [a[0] + 0.5 * step * k2[0], a[1] + 0.5 * step * k2[1], a[2] + 0.5 * step * k2[2]];
        let k3 = f(&a3);
        let a4 = [a[0] + step * k3[0], a[1] + step * k3[1], a[2] + step * k3[2]];
        let k4 = f(&a4);
        for i in 0..3 {
            a[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += step;
        out.push((t, a));
    }
    out
}

/// Solve the 3×3 system exp(x̂)α = ζ consistency check helper: the body
/// momentum on the slice is α = exp(−x̂)ζ.
pub fn body_momentum_from(x: &[Jet], zeta: [f64; 3]) -> Vec<Jet> {
    let a = so3_exp_jet(x);
    // αᵀ = ζᵀ A ⇒ α = Aᵀ ζ
    (0..3)
        .map(|i| {
            let mut acc = &a[i] * zeta[0];
            for j in 1..3 {
                acc = &acc + &(&a[j * 3 + i] * zeta[j]);
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{seed_point, values};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat3(v: &[Jet]) -> DMatrix<f64> {
        DMatrix::from_fn(3, 3, |r, c| v[r * 3 + c].v)
    }

    #[test]
    fn exp_log_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.9..0.9)).collect();
            let xj = seed_point(&x);
            let a = so3_exp_jet(&xj);
            // orthogonality and det 1
            let m = mat3(&a);
            assert!(((&m * m.transpose()) - DMatrix::identity(3, 3)).amax() < 1e-12);
            assert!((m.determinant() - 1.0).abs() < 1e-12);
            let back = so3_log_jet(&a);
            for i in 0..3 {
                assert!((back[i].v - x[i]).abs() < 1e-11, "roundtrip {i}");
                // log∘exp = id also at the jet level
                for k in 0..3 {
                    let expect = if i == k { 1.0 } else { 0.0 };
                    assert!(
                        (back[i].d[k] - expect).abs() < 1e-8,
                        "d(log exp) [{i}][{k}] = {}",
                        back[i].d[k]
                    );
                }
            }
        }
    }

    #[test]
    fn exp_near_identity_series_branch() {
        let x = [1e-6, -2e-6, 5e-7];
        let xj = seed_point(&x);
        let a = so3_exp_jet(&xj);
        let m = mat3(&a);
        assert!(((&m * m.transpose()) - DMatrix::identity(3, 3)).amax() < 1e-14);
        let back = so3_log_jet(&a);
        for i in 0..3 {
            assert!((back[i].v - x[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn right_jacobian_matches_finite_differences() {
        // d/dt exp((x+tv)̂)|₀ = exp(x̂)·(J_r v)̂ — oracle by central FD.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let h = 1e-6;
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.8..0.8)).collect();
            let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let exp_at = |y: &[f64]| -> DMatrix<f64> {
                mat3(&so3_exp_jet(&crate::jet::constant_point(y, 0)))
            };
            let xp: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + h * b).collect();
            let xm: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a - h * b).collect();
            let fd = (exp_at(&xp) - exp_at(&xm)) / (2.0 * h);
            let a = exp_at(&x);
            let jr = mat3(&so3_right_jacobian_jet(&crate::jet::constant_point(&x, 0)));
            let jrv = &jr * DVector::from_column_slice(&v);
            let hat = DMatrix::from_row_slice(
                3,
                3,
                &[0.0, -jrv[2], jrv[1], jrv[2], 0.0, -jrv[0], -jrv[1], jrv[0], 0.0],
            );
            let predicted = &a * hat;
            assert!(
                (&fd - &predicted).amax() < 1e-7,
                "J_r identity residual {:e}",
                (&fd - &predicted).amax()
            );
        }
    }

    #[test]
    fn canonical_form_is_closed_and_nondegenerate() {
        let chart = tstar_so3_chart();
        let omega = canonical_symplectic_form(&chart);
        let d_omega = crate::ops::exterior_derivative(&omega);
        let plan = crate::sample::SamplePlan::new(20, 44);
        for p in plan.points(&chart) {
            for c in d_omega.value(&p) {
                assert!(c.abs() < 1e-9, "dω component {c:e}");
            }
            // 6x6 block nondegenerate
            let om = omega.value(&p);
            let m = DMatrix::from_fn(6, 6, |i, j| crate::form::component(7, &om, &[i, j]));
            assert!(m.determinant().abs() > 1e-6);
        }
    }

    #[test]
    fn moment_map_on_slice_equals_zeta() {
        let zeta = [0.0, 0.0, 1.0];
        let slice = rigid_body_slice(zeta);
        let moment = rigid_body_moment();
        let plan = crate::sample::SamplePlan::new(40, 45);
        for q in plan.points(&slice.source) {
            let p = slice.value(&q);
            let mu = moment.mu.value(&p);
            for i in 0..3 {
                assert!(
                    (mu[i] - zeta[i]).abs() < 1e-12,
                    "μ(σ(q)) = {mu:?} != ζ at {q:?}"
                );
            }
        }
    }

    #[test]
    fn compatible_pair_reproduces_flat_structure() {
        // On the Darboux block ω = dq∧dp with euclidean h, the polar
        // retraction returns the euclidean metric and the standard J.
        let omega = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let h = DMatrix::identity(2, 2);
        let (g, j) = compatible_pair(&omega, &h).unwrap();
        assert!((g - DMatrix::identity(2, 2)).amax() < 1e-12);
        // Ω = G·J ⇒ J = Ω here
        assert!((&j - &omega).amax() < 1e-12);
        // J² = −id
        assert!((&j * &j + DMatrix::identity(2, 2)).amax() < 1e-12);
    }

    #[test]
    fn compatible_pair_on_random_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..20 {
            let n = 4;
            // random nondegenerate antisymmetric Ω and SPD h
            let raw = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0f64));
            let omega = &raw - raw.transpose();
            if omega.determinant().abs() < 1e-3 {
                continue;
            }
            let raw2 = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.4..0.4f64));
            let h = DMatrix::identity(n, n) + &raw2 * raw2.transpose();
            let (g, j) = compatible_pair(&omega, &h).unwrap();
            assert!((&j * &j + DMatrix::identity(n, n)).amax() < 1e-10);
            // Ω = G J
            assert!((&g * &j - &omega).amax() < 1e-10);
            // G symmetric positive definite
            assert!((&g - g.transpose()).amax() < 1e-10);
            let eig = nalgebra::SymmetricEigen::new((&g + g.transpose()) * 0.5);
            assert!(eig.eigenvalues.iter().all(|&e| e > 0.0));
            // compatibility g(JX, JY) = g(X, Y)
            assert!((j.transpose() * &g * &j - &g).amax() < 1e-10);
        }
    }

    #[test]
    fn euler_oracle_conserves_invariants() {
        let traj = euler_equations_flow([0.3, 0.8, 0.52], [1.0, 2.0, 3.0], 1.0, 1e-3);
        let h = |a: &[f64; 3]| a[0] * a[0] / 1.0 + a[1] * a[1] / 2.0 + a[2] * a[2] / 3.0;
        let n = |a: &[f64; 3]| a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
        let (_, a0) = traj[0];
        let (_, aend) = *traj.last().unwrap();
        assert!((h(&a0) - h(&aend)).abs() < 1e-10);
        assert!((n(&a0) - n(&aend)).abs() < 1e-10);
    }

    #[test]
    fn body_momentum_consistency() {
        let zeta = [0.0, 0.0, 1.0];
        let slice = rigid_body_slice(zeta);
        for q in crate::sample::SamplePlan::new(10, 48).points(&slice.source) {
            let p = slice.value(&q);
            let xj = crate::jet::constant_point(&p[0..3], 0);
            let alpha = values(&body_momentum_from(&xj, zeta));
            for i in 0..3 {
                assert!((alpha[i] - p[3 + i]).abs() < 1e-12);
            }
        }
    }
}

// ---------------------------------------------------------------------
// Reduced-chart adapted structure and the full scenario
// ---------------------------------------------------------------------

/// The round metric of the momentum sphere |α| = radius in the cap chart:
/// h_ab = ∂_a α · ∂_b α, assembled from the closed-form embedding
/// derivatives so the components stay exact jets in (u, v).
pub fn sphere_round_metric(chart: &Chart, radius: f64) -> MetricField {
    MetricField::from_jets(chart, move |q| {
        let u = &q[0];
        let v = &q[1];
        let n2 = &(&(u * u) + &(v * v)) + 1.0;
        let inv = n2.sqrt().recip();
        let inv3 = &(&inv * &inv) * &inv;
        // α = r(1,u,v)/N: ∂u α = r(−u/N³, 1/N − u²/N³, −uv/N³), similarly v
        let du = [
            &(-&(u * &inv3)) * radius,
            &(&inv - &(&(u * u) * &inv3)) * radius,
            &(-&(&(u * v) * &inv3)) * radius,
        ];
        let dv = [
            &(-&(v * &inv3)) * radius,
            &(-&(&(u * v) * &inv3)) * radius,
            &(&inv - &(&(v * v) * &inv3)) * radius,
        ];
        let dot = |a: &[Jet; 3], b: &[Jet; 3]| -> Jet {
            &(&(&a[0] * &b[0]) + &(&a[1] * &b[1])) + &(&a[2] * &b[2])
        };
        let huu = dot(&du, &du);
        let huv = dot(&du, &dv);
        let hvv = dot(&dv, &dv);
        let zero = Jet::constant(0.0, q[0].n_partials());
        let one = Jet::constant(1.0, q[0].n_partials());
        // sphere block plus a unit s row/column (callers overwrite the
        // s-parts when adapting to the evolution field)
        vec![
            huu,
            huv.clone(),
            zero.clone(),
            huv,
            hvv,
            zero.clone(),
            zero.clone(),
            zero,
            one,
        ]
    })
}

/// The Euler field on the cap chart (no ∂s component).
fn euler_chart_field(inertia: [f64; 3], radius: f64, q: &[Jet]) -> [Jet; 2] {
    let alpha = sphere_cap_point(&q[0], &q[1], radius);
    let dh = [
        &(&alpha[0] / inertia[0]) * 2.0,
        &(&alpha[1] / inertia[1]) * 2.0,
        &(&alpha[2] / inertia[2]) * 2.0,
    ];
    let adot = [
        &(&alpha[1] * &dh[2]) - &(&alpha[2] * &dh[1]),
        &(&alpha[2] * &dh[0]) - &(&alpha[0] * &dh[2]),
        &(&alpha[0] * &dh[1]) - &(&alpha[1] * &dh[0]),
    ];
    let a0sq = &alpha[0] * &alpha[0];
    [
        &(&(&adot[1] * &alpha[0]) - &(&alpha[1] * &adot[0])) / &a0sq,
        &(&(&adot[2] * &alpha[0]) - &(&alpha[2] * &adot[0])) / &a0sq,
    ]
}

/// The adapted almost-coKähler structure of the dynamics example on the
/// reduced chart (u, v, s): the round sphere metric on ker ds, the
/// evolution field ξ_H as the unit normal direction, φ the compatible
/// rotation of the sphere block. For equal inertia moments the evolution
/// field reduces to ∂s and the structure is a flat product (coKähler);
/// for generic inertia it stays almost coKähler and Reeb curves are still
/// geodesics.
pub fn reduced_adapted_structure(
    inertia: [f64; 3],
    radius: f64,
) -> crate::structures::AlmostContactMetric {
    let chart = momentum_sphere_chart(radius);
    let round = sphere_round_metric(&chart, radius);

    let round_g = round.clone();
    let g = MetricField::from_jets(&chart, move |q| {
        let h = round_g.jet(q);
        let e = euler_chart_field(inertia, radius, q);
        // g = [H, −He; −(He)ᵀ, 1 + eᵀHe]
        let he = [
            &(&h[0] * &e[0]) + &(&h[1] * &e[1]),
            &(&h[3] * &e[0]) + &(&h[4] * &e[1]),
        ];
        let ethe = &(&e[0] * &he[0]) + &(&e[1] * &he[1]);
        vec![
            h[0].clone(),
            h[1].clone(),
            -&he[0],
            h[3].clone(),
            h[4].clone(),
            -&he[1],
            -&he[0],
            -&he[1],
            &ethe + 1.0,
        ]
    });

    let round_phi = round.clone();
    let phi = EndoField::from_jets(&chart, move |q| {
        let h = round_phi.jet(q);
        let e = euler_chart_field(inertia, radius, q);
        // I = (s/det)[[h01, h11], [−h00, −h01]] with s = √det
        let det = &(&h[0] * &h[4]) - &(&h[1] * &h[1]);
        let factor = det.sqrt().recip();
        let i00 = &(&h[1] * &factor) * 1.0;
        let i01 = &h[4] * &factor;
        let i10 = -&(&h[0] * &factor);
        let i11 = -&(&h[1] * &factor);
        // columns u, v: I columns; column s: I(−e)
        let cs0 = -&(&(&i00 * &e[0]) + &(&i01 * &e[1]));
        let cs1 = -&(&(&i10 * &e[0]) + &(&i11 * &e[1]));
        let zero = Jet::constant(0.0, q[0].n_partials());
        vec![
            i00, i01, cs0, //
            i10, i11, cs1, //
            zero.clone(), zero.clone(), zero,
        ]
    });

    let xi = reduced_evolution_field(&chart, inertia, radius);
    let eta = crate::fixtures::dt_form(&chart);
    crate::structures::AlmostContactMetric {
        g,
        phi,
        xi,
        eta,
        chart,
    }
}

/// Full pipeline outcome for the heavy-top scenario.
pub struct RigidBodyOutcome {
    pub moment_report: crate::report::VerificationReport,
    pub reduction_report: crate::report::VerificationReport,
    pub reduced_structure_report: crate::report::VerificationReport,
    /// (mean ratio ω^ζ/area, max deviation from the mean, max |ω_{·s} − dH̃|)
    pub area_ratio: (f64, f64, f64),
    pub reduced_flow: crate::dynamics::FlowResult,
    pub reduced_h_drift: f64,
    pub alpha_norm_drift: f64,
    pub euler_match: f64,
    pub ambient_h_drift: f64,
    pub ambient_alpha_drift: f64,
    pub geodesic_defect: f64,
    pub decomposition_dims: (usize, usize, usize),
    pub pass: bool,
}

/// Run the scenario: validate the moment map, reduce at ζ, compare the
/// reduced 2-form with the sphere area form, integrate reduced and
/// ambient flows, compare against the direct Euler oracle, measure the
/// geodesic defect of the evolution field.
pub fn rigid_body_scenario(
    inertia: [f64; 3],
    zeta: [f64; 3],
    t_end: f64,
    step: f64,
    start_uv: [f64; 2],
) -> crate::error::Result<RigidBodyOutcome> {
    use crate::dynamics::rk4_flow;
    use crate::reduction::{cosymplectic_reduce, Reduced};
    use crate::sample::SamplePlan;

    if zeta == [0.0, 0.0, 0.0] {
        return Err(crate::error::GeomError::Config(
            "zeta = 0 is excluded (not a regular value for this scenario)".into(),
        ));
    }
    let radius = (zeta[0] * zeta[0] + zeta[1] * zeta[1] + zeta[2] * zeta[2]).sqrt();
    let datum = crate::fixtures::rigid_body_datum(inertia, zeta);
    let tol = crate::report::Tolerances::default();

    // Moment-map bullets on the ambient cosymplectic manifold
    let moment = rigid_body_moment();
    let plan = SamplePlan::new(40, 7);
    let moment_report =
        crate::action::verify_moment_map(&moment, &datum.structure, &plan, &tol);

    // Reduction
    let (reduced, reduction_report) = match cosymplectic_reduce(&datum)? {
        Reduced::Structure { structure, report } => (structure, report),
        Reduced::Degenerate { .. } => unreachable!("sphere quotient has dim 3"),
    };
    let reduced_structure_report =
        crate::structures::verify_cosymplectic(&reduced, &SamplePlan::new(60, 7), &tol);

    // reduced 2-form vs the sphere area form: ratio pointwise constant
    let mut ratios = Vec::new();
    let mut dh_dev: f64 = 0.0;
    let h_tilde = |q: &[Jet]| -> Jet {
        let alpha = sphere_cap_point(&q[0], &q[1], radius);
        let mut acc = &(&alpha[0] * &alpha[0]) / inertia[0];
        acc = &acc + &(&(&alpha[1] * &alpha[1]) / inertia[1]);
        &acc + &(&(&alpha[2] * &alpha[2]) / inertia[2])
    };
    for q in SamplePlan::new(40, 11).points(&reduced.chart) {
        let om = reduced.omega.value(&q);
        // area density: α·(∂uα × ∂vα) of the radius-r sphere
        let seeds = crate::jet::seed_point(&q[0..2]);
        let alpha = sphere_cap_point(&seeds[0], &seeds[1], radius);
        let a: Vec<f64> = alpha.iter().map(|j| j.v).collect();
        let du: Vec<f64> = alpha.iter().map(|j| j.d[0]).collect();
        let dv: Vec<f64> = alpha.iter().map(|j| j.d[1]).collect();
        let cross = [
            du[1] * dv[2] - du[2] * dv[1],
            du[2] * dv[0] - du[0] * dv[2],
            du[0] * dv[1] - du[1] * dv[0],
        ];
        let density = (a[0] * cross[0] + a[1] * cross[1] + a[2] * cross[2]) / radius;
        ratios.push(crate::form::component(3, &om, &[0, 1]) / density);
        // the (u,s) and (v,s) components must equal dH̃
        let hj = h_tilde(&crate::jet::seed_point(&q)[0..2].to_vec());
        let om_us = crate::form::component(3, &om, &[0, 2]);
        let om_vs = crate::form::component(3, &om, &[1, 2]);
        dh_dev = dh_dev.max((om_us - hj.d[0]).abs()).max((om_vs - hj.d[1]).abs());
    }
    let mean: f64 = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let ratio_dev = ratios.iter().fold(0.0f64, |acc, r| acc.max((r - mean).abs()));

    // reduced flow of the engine's Reeb field, with the Euler oracle;
    // the defect log tracks |∇_ξξ| of the adapted metric along the path
    let adapted = reduced_adapted_structure(inertia, radius);
    let xi_red = crate::structures::reeb_field(&reduced);
    let start = vec![start_uv[0], start_uv[1], 0.0];
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut h_vals = Vec::new();
    let mut alpha_norms = Vec::new();
    let mut defects = Vec::new();
    let mut t_defect: f64 = 0.0;
    let defect_stride = ((t_end / step) as usize / 50).max(1);
    let (_, truncated) = rk4_flow(
        &reduced.chart,
        |p| xi_red.value(p),
        &start,
        t_end,
        step,
        |tau, p| {
            times.push(tau);
            states.push(p.to_vec());
            t_defect = t_defect.max((p[2] - tau).abs());
            let seeds = crate::jet::constant_point(&p[0..2], 0);
            let alpha = sphere_cap_point(&seeds[0], &seeds[1], radius);
            let av: Vec<f64> = alpha.iter().map(|j| j.v).collect();
            h_vals.push(
                av[0] * av[0] / inertia[0] + av[1] * av[1] / inertia[1]
                    + av[2] * av[2] / inertia[2],
            );
            alpha_norms.push((av[0] * av[0] + av[1] * av[1] + av[2] * av[2]).sqrt());
            // geodesic defect is smooth and expensive: sample it on a
            // stride and hold the last value between samples
            let d = if times.len() % defect_stride == 1 || defects.is_empty() {
                crate::ops::covariant_self_derivative(&adapted.g, &adapted.xi, p)
                    .map(|nabla| {
                        let gm = adapted.g.value(p);
                        let v = DVector::from_vec(nabla);
                        (v.transpose() * gm * &v)[(0, 0)].max(0.0).sqrt()
                    })
                    .unwrap_or(f64::NAN)
            } else {
                *defects.last().unwrap()
            };
            defects.push(d);
        },
    );
    if truncated {
        return Err(crate::error::GeomError::Config(
            "reduced trajectory left the chart box; pick a start closer to the stable axis"
                .into(),
        ));
    }
    let h0 = h_vals[0];
    let reduced_h_drift = h_vals.iter().fold(0.0f64, |a, h| a.max((h - h0).abs()));
    let n0 = alpha_norms[0];
    let alpha_norm_drift = alpha_norms
        .iter()
        .fold(0.0f64, |a, n| a.max((n - n0).abs()));

    // Euler oracle comparison in α
    let a0 = {
        let seeds = crate::jet::constant_point(&start[0..2], 0);
        let alpha = sphere_cap_point(&seeds[0], &seeds[1], radius);
        [alpha[0].v, alpha[1].v, alpha[2].v]
    };
    let oracle = euler_equations_flow(a0, inertia, t_end, step);
    let mut euler_match: f64 = 0.0;
    for (k, (_, a_oracle)) in oracle.iter().enumerate() {
        if k >= states.len() {
            break;
        }
        let p = &states[k];
        let seeds = crate::jet::constant_point(&p[0..2], 0);
        let alpha = sphere_cap_point(&seeds[0], &seeds[1], radius);
        for i in 0..3 {
            euler_match = euler_match.max((alpha[i].v - a_oracle[i]).abs());
        }
    }

    // ambient flow (shorter horizon: the attitude coordinate drifts)
    let ambient_t = t_end.min(0.25);
    let xi_amb = crate::structures::reeb_field(&datum.structure);
    let amb_start = {
        let mut s = vec![0.0; 7];
        s[3] = a0[0];
        s[4] = a0[1];
        s[5] = a0[2];
        s
    };
    let mut amb_h = Vec::new();
    let mut amb_n = Vec::new();
    let (_, _amb_trunc) = rk4_flow(
        &datum.structure.chart,
        |p| xi_amb.value(p),
        &amb_start,
        ambient_t,
        step,
        |_tau, p| {
            amb_h.push(
                p[3] * p[3] / inertia[0] + p[4] * p[4] / inertia[1] + p[5] * p[5] / inertia[2],
            );
            amb_n.push((p[3] * p[3] + p[4] * p[4] + p[5] * p[5]).sqrt());
        },
    );
    let ambient_h_drift = amb_h
        .iter()
        .fold(0.0f64, |a, h| a.max((h - amb_h[0]).abs()));
    let ambient_alpha_drift = amb_n
        .iter()
        .fold(0.0f64, |a, n| a.max((n - amb_n[0]).abs()));

    // geodesic defect of the evolution field for the adapted metric
    let pts = SamplePlan::new(60, 13).points(&adapted.chart);
    let (geodesic_defect, _) =
        crate::dynamics::geodesic_defect(&adapted.g, &adapted.xi, &pts)?;

    // tangent decomposition ranks for the ambient adapted structure
    let ambient = rigid_ambient_structure(inertia);
    let slicer = crate::reduction::Slicer {
        action: datum.action.clone(),
        moments: datum.moments.clone(),
        zetas: datum.zetas.clone(),
        slice: datum.slice.clone(),
    };
    let dec = crate::reduction::decompose_at(
        &slicer,
        &ambient.g,
        Some(&ambient.phi),
        Some(&ambient.xi),
        &[0.1, -0.05, 0.0],
    )?;
    let decomposition_dims = (
        dec.h_basis.ncols(),
        dec.g_basis.ncols(),
        dec.phi_g_basis.ncols(),
    );

    let reduced_flow = crate::dynamics::FlowResult {
        times,
        states,
        hamiltonian: h_vals,
        t_defect,
        logs: vec![
            ("alpha_norm".into(), alpha_norms),
            ("geodesic_defect".into(), defects),
        ],
        truncated: false,
    };

    let pass = moment_report.pass
        && reduction_report.pass
        && reduced_structure_report.pass
        && t_defect < 1e-12
        && ratio_dev < 1e-8
        && dh_dev < 1e-8
        && reduced_h_drift < 1e-9
        && alpha_norm_drift < 1e-9
        && euler_match < 1e-6
        && ambient_h_drift < 1e-9
        && ambient_alpha_drift < 1e-9
        && geodesic_defect < 1e-4
        && decomposition_dims == (1, 3, 3);

    Ok(RigidBodyOutcome {
        moment_report,
        reduction_report,
        reduced_structure_report,
        area_ratio: (mean, ratio_dev, dh_dev),
        reduced_flow,
        reduced_h_drift,
        alpha_norm_drift,
        euler_match,
        ambient_h_drift,
        ambient_alpha_drift,
        geodesic_defect,
        decomposition_dims,
        pass,
    })
}

#[cfg(test)]
mod scenario_tests {
    use super::*;
    use crate::report::Tolerances;
    use crate::sample::SamplePlan;
    use crate::structures::{verify_cokahler, verify_cosymplectic};

    #[test]
    fn hamiltonian_value_example() {
        // H(A, α) = Σ α_i²/M_i at α = (1,2,3), M = (1,2,3) is 1 + 2 + 3 = 6
        let chart = tstar_so3_chart();
        let h = rigid_body_hamiltonian(&chart, [1.0, 2.0, 3.0]);
        let v = h.value(&[0.2, -0.1, 0.3, 1.0, 2.0, 3.0, 0.0]);
        assert!((v - 6.0).abs() < 1e-14);
    }

    #[test]
    fn spherical_top_is_stationary_in_the_body_frame() {
        // equal moments: the Euler field vanishes, α stays constant and
        // the reduced flow only advances s
        let out = rigid_body_scenario([1.0, 1.0, 1.0], [0.0, 0.0, 1.0], 1.0, 1e-3, [0.2, 0.1])
            .unwrap();
        assert!(out.pass, "outcome failed");
        let first = &out.reduced_flow.states[0];
        let last = out.reduced_flow.states.last().unwrap();
        assert!((first[0] - last[0]).abs() < 1e-12);
        assert!((first[1] - last[1]).abs() < 1e-12);
        assert!((last[2] - 1.0).abs() < 1e-10);
        assert!(out.reduced_h_drift < 1e-10);
    }

    #[test]
    fn generic_inertia_full_scenario() {
        let out = rigid_body_scenario([1.0, 2.0, 3.0], [0.0, 0.0, 1.0], 1.0, 1e-3, [0.2, 0.1])
            .unwrap();
        assert!(
            out.moment_report.pass,
            "moment bullets failed: {:?}",
            out.moment_report
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| (&c.check_name, c.max_residual))
                .collect::<Vec<_>>()
        );
        assert!(out.reduction_report.pass);
        assert!(out.reduced_structure_report.pass);
        // ω^ζ = c·area + dH∧ds with a pointwise-constant ratio
        assert!(out.area_ratio.1 < 1e-8, "ratio deviation {:e}", out.area_ratio.1);
        assert!(out.area_ratio.2 < 1e-8, "dH∧ds deviation {:e}", out.area_ratio.2);
        // conservation and the independent Euler oracle
        assert!(out.reduced_h_drift < 1e-9, "H drift {:e}", out.reduced_h_drift);
        assert!(out.alpha_norm_drift < 1e-9);
        assert!(out.euler_match < 1e-6, "Euler mismatch {:e}", out.euler_match);
        assert!(out.ambient_h_drift < 1e-9, "ambient H drift {:e}", out.ambient_h_drift);
        assert!(out.ambient_alpha_drift < 1e-9);
        // Reeb curves are geodesics of the adapted metric
        assert!(out.geodesic_defect < 1e-4, "defect {:e}", out.geodesic_defect);
        // decomposition ranks 1 + 3 + 3 = 7
        assert_eq!(out.decomposition_dims, (1, 3, 3));
        assert!(out.pass);
    }

    #[test]
    fn zeta_zero_is_refused() {
        assert!(rigid_body_scenario([1.0, 2.0, 3.0], [0.0, 0.0, 0.0], 0.1, 1e-3, [0.1, 0.1])
            .is_err());
    }

    #[test]
    fn adapted_structure_cokahler_for_equal_moments() {
        // spherical top: the adapted structure is a flat product; coKähler
        // with ∇φ residual < 1e-6 through exact jets
        let s = reduced_adapted_structure([1.0, 1.0, 1.0], 1.0);
        let r = verify_cokahler(&s, &SamplePlan::new(100, 7), &Tolerances::default());
        assert!(
            r.pass,
            "failed: {:?}",
            r.checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| (&c.check_name, c.max_residual))
                .collect::<Vec<_>>()
        );
        assert!(r.check("nabla_phi_max").unwrap().max_residual < 1e-6);
    }

    #[test]
    fn adapted_structure_generic_is_almost_cokahler_only() {
        // generic inertia: the pointwise axioms and the cosymplectic pair
        // hold, but φ is not parallel (the Euler field is not Killing)
        let s = reduced_adapted_structure([1.0, 2.0, 3.0], 1.0);
        let plan = SamplePlan::new(80, 7);
        let tol = Tolerances::default();
        let under = verify_cosymplectic(&s.underlying(), &plan, &tol);
        assert!(
            under.pass,
            "underlying failed: {:?}",
            under
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| (&c.check_name, c.max_residual))
                .collect::<Vec<_>>()
        );
        let full = verify_cokahler(&s, &plan, &tol);
        assert!(full.check("phi_squared_identity").unwrap().pass);
        assert!(full.check("metric_phi_compatibility").unwrap().pass);
        assert!(!full.check("nabla_phi_max").unwrap().pass, "∇φ should be nonzero");
        // ... and Reeb curves are geodesics regardless
        let pts = plan.points(&s.chart);
        let (defect, _) = crate::dynamics::geodesic_defect(&s.g, &s.xi, &pts).unwrap();
        assert!(defect < 1e-8, "jet-based geodesic defect {defect:e}");
    }
}
