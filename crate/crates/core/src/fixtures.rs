//! Built-in fixtures: flat models, counterexamples, group-action scenarios
//! and reduction data used by tests, the acceptance suite and the CLI.

use crate::chart::Chart;
use crate::field::{EndoField, KForm, MetricField, VectorField};
use crate::form::comb_rank;
use crate::jet::Jet;
use crate::structures::{
    AlmostContactMetric, AlmostCosymplectic, ContactTriple, HyperKahlerStructure, KahlerStructure,
    ThreeCosymplectic,
};

/// Standard quaternion left-multiplication matrices on R^4 = H with basis
/// (1, i, j, k): J1 = L_i, J2 = L_j, J3 = L_k; J1 J2 = J3.
pub const QUAT_J1: [f64; 16] = [
    0.0, -1.0, 0.0, 0.0, //
    1.0, 0.0, 0.0, 0.0, //
    0.0, 0.0, 0.0, -1.0, //
    0.0, 0.0, 1.0, 0.0,
];
pub const QUAT_J2: [f64; 16] = [
    0.0, 0.0, -1.0, 0.0, //
    0.0, 0.0, 0.0, 1.0, //
    1.0, 0.0, 0.0, 0.0, //
    0.0, -1.0, 0.0, 0.0,
];
pub const QUAT_J3: [f64; 16] = [
    0.0, 0.0, 0.0, -1.0, //
    0.0, 0.0, -1.0, 0.0, //
    0.0, 1.0, 0.0, 0.0, //
    1.0, 0.0, 0.0, 0.0,
];

/// A constant 2-form given by entries ω(e_i, e_j) for i < j.
pub fn constant_two_form(chart: &Chart, entries: &[(usize, usize, f64)]) -> KForm {
    let dim = chart.dim();
    let mut comps = vec![0.0; crate::form::binomial(dim, 2)];
    for &(i, j, v) in entries {
        assert!(i < j);
        comps[comb_rank(&[i, j], dim)] = v;
    }
    KForm::constant(chart, 2, comps)
}

/// dt on the last coordinate.
pub fn dt_form(chart: &Chart) -> KForm {
    let dim = chart.dim();
    let mut comps = vec![0.0; dim];
    comps[dim - 1] = 1.0;
    KForm::constant(chart, 1, comps)
}

/// ∂/∂(last coordinate).
pub fn dt_vector(chart: &Chart) -> VectorField {
    VectorField::coordinate(chart, chart.dim() - 1)
}

// ---------------------------------------------------------------------
// Flat positive fixtures
// ---------------------------------------------------------------------

/// Canonical cosymplectic R^5 with Darboux coordinates (p1,q1,p2,q2,t):
/// η = dt, ω = dq1∧dp1 + dq2∧dp2.
pub fn canonical_r5() -> AlmostCosymplectic {
    let chart = Chart::symmetric("canonical-r5", &["p1", "q1", "p2", "q2", "t"], 1.0);
    let eta = dt_form(&chart);
    let omega = constant_two_form(&chart, &[(0, 1, -1.0), (2, 3, -1.0)]);
    AlmostCosymplectic::new(chart, eta, omega)
}

/// Canonical cosymplectic R^3 with coordinates (p,q,t): η = dt, ω = dq∧dp.
pub fn canonical_r3() -> AlmostCosymplectic {
    let chart = Chart::symmetric("canonical-r3", &["p", "q", "t"], 1.0);
    let eta = dt_form(&chart);
    let omega = constant_two_form(&chart, &[(0, 1, -1.0)]);
    AlmostCosymplectic::new(chart, eta, omega)
}

/// Flat coKähler R^3 = C × R with coordinates (x, y, t):
/// g euclidean, φ(∂x) = ∂y, φ(∂y) = −∂x, φ(∂t) = 0, ξ = ∂t, η = dt.
pub fn flat_cokahler_r3() -> AlmostContactMetric {
    let chart = Chart::symmetric("flat-cokahler-r3", &["x", "y", "t"], 1.0);
    AlmostContactMetric {
        g: MetricField::euclidean(&chart),
        phi: EndoField::constant(&chart, vec![0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        xi: dt_vector(&chart),
        eta: dt_form(&chart),
        chart,
    }
}

/// Flat coKähler R^5 = C² × R with coordinates (x1,y1,x2,y2,t).
pub fn flat_cokahler_r5() -> AlmostContactMetric {
    let chart = Chart::symmetric("flat-cokahler-r5", &["x1", "y1", "x2", "y2", "t"], 1.0);
    let mut phi = vec![0.0; 25];
    for b in 0..2 {
        let o = 2 * b;
        phi[o * 5 + o + 1] = -1.0;
        phi[(o + 1) * 5 + o] = 1.0;
    }
    AlmostContactMetric {
        g: MetricField::euclidean(&chart),
        phi: EndoField::constant(&chart, phi),
        xi: dt_vector(&chart),
        eta: dt_form(&chart),
        chart,
    }
}

/// Flat Kähler plane C ≅ R² with the standard complex structure.
pub fn flat_kahler_r2() -> KahlerStructure {
    let chart = Chart::symmetric("flat-kahler-r2", &["x", "y"], 1.0);
    KahlerStructure {
        h: MetricField::euclidean(&chart),
        j: EndoField::constant(&chart, vec![0.0, -1.0, 1.0, 0.0]),
        chart,
    }
}

/// Flat Kähler C² ≅ R⁴ with coordinates (x1,y1,x2,y2).
pub fn flat_kahler_c2() -> KahlerStructure {
    let chart = Chart::symmetric("flat-kahler-c2", &["x1", "y1", "x2", "y2"], 1.0);
    let mut j = vec![0.0; 16];
    for b in 0..2 {
        let o = 2 * b;
        j[o * 4 + o + 1] = -1.0;
        j[(o + 1) * 4 + o] = 1.0;
    }
    KahlerStructure {
        h: MetricField::euclidean(&chart),
        j: EndoField::constant(&chart, j),
        chart,
    }
}

/// Flat hyperKähler H ≅ R⁴ with quaternionic J1, J2, J3.
pub fn flat_hyperkahler_h() -> HyperKahlerStructure {
    let chart = Chart::symmetric("flat-hyperkahler-h", &["a", "b", "c", "d"], 1.0);
    HyperKahlerStructure {
        h: MetricField::euclidean(&chart),
        j: [
            EndoField::constant(&chart, QUAT_J1.to_vec()),
            EndoField::constant(&chart, QUAT_J2.to_vec()),
            EndoField::constant(&chart, QUAT_J3.to_vec()),
        ],
        chart,
    }
}

/// Flat hyperKähler H² ≅ R⁸ (two quaternionic blocks).
pub fn flat_hyperkahler_h2() -> HyperKahlerStructure {
    let chart = Chart::symmetric(
        "flat-hyperkahler-h2",
        &["a1", "b1", "c1", "d1", "a2", "b2", "c2", "d2"],
        1.0,
    );
    let block = |m: &[f64; 16]| -> Vec<f64> {
        let mut j = vec![0.0; 64];
        for blk in 0..2 {
            let o = 4 * blk;
            for r in 0..4 {
                for c in 0..4 {
                    j[(o + r) * 8 + (o + c)] = m[r * 4 + c];
                }
            }
        }
        j
    };
    HyperKahlerStructure {
        h: MetricField::euclidean(&chart),
        j: [
            EndoField::constant(&chart, block(&QUAT_J1)),
            EndoField::constant(&chart, block(&QUAT_J2)),
            EndoField::constant(&chart, block(&QUAT_J3)),
        ],
        chart,
    }
}

/// Fiber blocks of the three φ_i on M × R³ over a hyperKähler base:
/// φ1: (f1,f2,f3) ↦ (0, −f3, f2), φ2: ↦ (f3, 0, −f1), φ3: ↦ (−f2, f1, 0).
pub const CONE3_F1: [f64; 9] = [0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0];
pub const CONE3_F2: [f64; 9] = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0];
pub const CONE3_F3: [f64; 9] = [0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0];

/// Flat 3-cosymplectic R⁷ = H × R³ with coordinates (a,b,c,d,t1,t2,t3).
pub fn flat_3cosymplectic_r7() -> ThreeCosymplectic {
    let chart = Chart::symmetric(
        "flat-3cosym-r7",
        &["a", "b", "c", "d", "t1", "t2", "t3"],
        1.0,
    );
    let embed = |j: &[f64; 16], f: &[f64; 9]| -> Vec<f64> {
        let mut m = vec![0.0; 49];
        for r in 0..4 {
            for c in 0..4 {
                m[r * 7 + c] = j[r * 4 + c];
            }
        }
        for r in 0..3 {
            for c in 0..3 {
                m[(4 + r) * 7 + (4 + c)] = f[r * 3 + c];
            }
        }
        m
    };
    let triple = |j: &[f64; 16], f: &[f64; 9], i: usize| -> ContactTriple {
        let mut eta = vec![0.0; 7];
        eta[4 + i] = 1.0;
        ContactTriple {
            phi: EndoField::constant(&chart, embed(j, f)),
            xi: VectorField::coordinate(&chart, 4 + i),
            eta: KForm::constant(&chart, 1, eta),
        }
    };
    ThreeCosymplectic {
        g: MetricField::euclidean(&chart),
        triples: [
            triple(&QUAT_J1, &CONE3_F1, 0),
            triple(&QUAT_J2, &CONE3_F2, 1),
            triple(&QUAT_J3, &CONE3_F3, 2),
        ],
        chart,
    }
}

// ---------------------------------------------------------------------
// Negative controls
// ---------------------------------------------------------------------

/// η = dt, ω = p1·dp1∧dq1 on a thin box around p1 = 0: forced degeneracy,
/// fails the nondegeneracy check deterministically.
pub fn degenerate_omega_r3() -> AlmostCosymplectic {
    let chart = Chart::new(
        "degenerate-omega-r3",
        &["p1", "q1", "t"],
        vec![-1e-3, -1.0, -1.0],
        vec![1e-3, 1.0, 1.0],
    )
    .expect("valid chart");
    let eta = dt_form(&chart);
    let omega = KForm::from_jets(&chart, 2, |p| {
        let n = p[0].n_partials();
        vec![p[0].clone(), Jet::constant(0.0, n), Jet::constant(0.0, n)]
    });
    AlmostCosymplectic::new(chart, eta, omega)
}

/// η = dt, ω = 0 on R³: rank-deficient everywhere (singularity error path).
pub fn zero_omega_r3() -> AlmostCosymplectic {
    let chart = Chart::symmetric("zero-omega-r3", &["p", "q", "t"], 1.0);
    let eta = dt_form(&chart);
    let omega = KForm::constant(&chart, 2, vec![0.0; 3]);
    AlmostCosymplectic::new(chart, eta, omega)
}

/// η = dt, ω = dp∧dq + q·dp∧dt on R³: almost cosymplectic but dω ≠ 0.
pub fn nonclosed_omega_r3() -> AlmostCosymplectic {
    let chart = Chart::symmetric("nonclosed-omega-r3", &["p", "q", "t"], 1.0);
    let eta = dt_form(&chart);
    let omega = KForm::from_jets(&chart, 2, |p| {
        let n = p[0].n_partials();
        vec![Jet::constant(1.0, n), p[1].clone(), Jet::constant(0.0, n)]
    });
    AlmostCosymplectic::new(chart, eta, omega)
}

/// Contact R³: η = dt − p dq, ω = dη = −dp∧dq. Almost cosymplectic; fails
/// the dη = 0 stage (the contact/cosymplectic dichotomy).
pub fn contact_r3() -> AlmostCosymplectic {
    let chart = Chart::symmetric("contact-r3", &["p", "q", "t"], 1.0);
    let eta = KForm::from_jets(&chart, 1, |p| {
        let n = p[0].n_partials();
        vec![Jet::constant(0.0, n), -&p[0], Jet::constant(1.0, n)]
    });
    let omega = constant_two_form(&chart, &[(0, 1, -1.0)]);
    AlmostCosymplectic::new(chart, eta, omega)
}

/// The Sasakian (Heisenberg) model on R³ with coordinates (x, y, z):
/// η = dz + y dx, ξ = ∂z, orthonormal frame (∂x − y∂z, ∂y, ξ). Its induced
/// ω equals dη ≠ 0: the almost-contact-metric axioms hold, the
/// cosymplectic stage fails.
pub fn sasakian_r3() -> AlmostContactMetric {
    let chart = Chart::symmetric("sasakian-r3", &["x", "y", "z"], 1.0);
    let g = MetricField::from_jets(&chart, |p| {
        let n = p[0].n_partials();
        let y = &p[1];
        let one = Jet::constant(1.0, n);
        let zero = Jet::constant(0.0, n);
        vec![
            y * y + 1.0,
            zero.clone(),
            y.clone(),
            zero.clone(),
            one.clone(),
            zero.clone(),
            y.clone(),
            zero,
            one,
        ]
    });
    let phi = EndoField::from_jets(&chart, |p| {
        let n = p[0].n_partials();
        let zero = Jet::constant(0.0, n);
        let one = Jet::constant(1.0, n);
        vec![
            zero.clone(),
            -&one,
            zero.clone(),
            one,
            zero.clone(),
            zero.clone(),
            zero.clone(),
            p[1].clone(),
            zero,
        ]
    });
    let eta = KForm::from_jets(&chart, 1, |p| {
        let n = p[0].n_partials();
        vec![p[1].clone(), Jet::constant(0.0, n), Jet::constant(1.0, n)]
    });
    AlmostContactMetric {
        xi: VectorField::coordinate(&chart, 2),
        g,
        phi,
        eta,
        chart,
    }
}

/// Flat metric R³ with the contact plane tilted by a position-dependent
/// angle θ(x): ξ_θ = sin θ ∂y + cos θ ∂t. Pointwise axioms hold, but φ is
/// not parallel: the ∇φ check shows nonzero entries.
pub fn tilted_cokahler_r3() -> AlmostContactMetric {
    let chart = Chart::symmetric("tilted-cokahler-r3", &["x", "y", "t"], 1.0);
    let g = MetricField::euclidean(&chart);
    let xi = VectorField::from_jets(&chart, |p| {
        let th = &p[0] * 0.7;
        vec![Jet::constant(0.0, p[0].n_partials()), th.sin(), th.cos()]
    });
    let eta = KForm::from_jets(&chart, 1, |p| {
        let th = &p[0] * 0.7;
        vec![Jet::constant(0.0, p[0].n_partials()), th.sin(), th.cos()]
    });
    // ker η frame: e1 = ∂x, w = cosθ ∂y − sinθ ∂t; φe1 = w, φw = −e1, φξ = 0.
    let phi = EndoField::from_jets(&chart, |p| {
        let th = &p[0] * 0.7;
        let (s, c) = (th.sin(), th.cos());
        let zero = Jet::constant(0.0, p[0].n_partials());
        // columns: x ↦ (0, cosθ, −sinθ); y ↦ −cosθ·e1; t ↦ sinθ·e1 (rows x,y,t)
        vec![
            zero.clone(),
            -&c,
            s.clone(),
            c.clone(),
            zero.clone(),
            zero.clone(),
            -&s,
            zero.clone(),
            zero,
        ]
    });
    AlmostContactMetric {
        g,
        phi,
        xi,
        eta,
        chart,
    }
}

/// A non-integrable almost-complex perturbation of flat C² ≅ R⁴: the
/// standard J conjugated by a position-dependent rotation in the (y1, x2)
/// plane. Pointwise axioms hold; ∇J ≠ 0.
pub fn twisted_kahler_r4() -> KahlerStructure {
    let chart = Chart::symmetric("twisted-kahler-r4", &["x1", "y1", "x2", "y2"], 1.0);
    let j = EndoField::from_jets(&chart, |p| {
        let th = &p[0] * 0.6;
        let (s, c) = (th.sin(), th.cos());
        let n = p[0].n_partials();
        let mut r = vec![Jet::constant(0.0, n); 16];
        let one = Jet::constant(1.0, n);
        r[0] = one.clone();
        r[15] = one;
        r[5] = c.clone();
        r[6] = -&s;
        r[9] = s.clone();
        r[10] = c.clone();
        let mut j0 = vec![Jet::constant(0.0, n); 16];
        for b in 0..2 {
            let o = 2 * b;
            j0[o * 4 + o + 1] = Jet::constant(-1.0, n);
            j0[(o + 1) * 4 + o] = Jet::constant(1.0, n);
        }
        let rj = crate::linalg::jet_mat_mul(&r, &j0, 4, 4, 4);
        let mut rt = vec![Jet::constant(0.0, n); 16];
        for a in 0..4 {
            for b in 0..4 {
                rt[a * 4 + b] = r[b * 4 + a].clone();
            }
        }
        crate::linalg::jet_mat_mul(&rj, &rt, 4, 4, 4)
    });
    KahlerStructure {
        h: MetricField::euclidean(&chart),
        j,
        chart,
    }
}

// ---------------------------------------------------------------------
// Group actions and reduction data
// ---------------------------------------------------------------------

use crate::action::{circle_group, so3_group, translation_group, GroupAction, MomentMap};
use crate::field::{ScalarField, SmoothMap};
use crate::reduction::{
    CoKahlerDatum, CosymplecticDatum, HyperKahlerDatum, KahlerDatum, ReductionDatum,
    ThreeCosymplecticDatum,
};
use crate::report::Tolerances;

/// Diagonal S¹ rotation of the first two complex pairs of a chart; any
/// trailing coordinates ride along unchanged.
pub fn s1_diagonal_action(chart: &Chart) -> GroupAction {
    let dim = chart.dim();
    GroupAction::new(circle_group(), chart.clone(), move |g, p| {
        let (c, s) = (g[0].clone(), g[2].clone());
        let mut out = Vec::with_capacity(dim);
        out.push(&(&c * &p[0]) - &(&s * &p[1]));
        out.push(&(&s * &p[0]) + &(&c * &p[1]));
        out.push(&(&c * &p[2]) - &(&s * &p[3]));
        out.push(&(&s * &p[2]) + &(&c * &p[3]));
        for i in 4..dim {
            out.push(p[i].clone());
        }
        out
    })
}

/// μ = ½(|z1|² + |z2|²) on a chart whose first four coordinates are
/// (x1, y1, x2, y2).
pub fn harmonic_moment(chart: &Chart) -> MomentMap {
    MomentMap::from_jets(chart, |p| {
        vec![
            &(&(&(&p[0] * &p[0]) + &(&p[1] * &p[1])) + &(&(&p[2] * &p[2]) + &(&p[3] * &p[3])))
                * 0.5,
        ]
    })
}

/// Fubini–Study quotient chart (u, v) [+ s]: the affine chart w = z2/z1 of
/// the S¹ quotient of the unit sphere |z| = 1 in C².
pub fn fs_chart(with_line: bool) -> Chart {
    if with_line {
        Chart::new(
            "fs-x-r",
            &["u", "v", "s"],
            vec![-0.45, -0.45, -0.9],
            vec![0.45, 0.45, 0.9],
        )
        .expect("valid chart")
    } else {
        Chart::symmetric("fs", &["u", "v"], 0.45)
    }
}

/// Real-gauge slice of μ⁻¹(½): z1 = 1/√(1+u²+v²) > 0, z2 = (u+iv)·z1
/// (and s ↦ t for charts with the line factor).
fn fs_slice_components(u: &Jet, v: &Jet) -> Vec<Jet> {
    let n2 = &(&(u * u) + &(v * v)) + 1.0;
    let inv = n2.sqrt().recip();
    vec![inv.clone(), Jet::constant(0.0, u.n_partials()), u * &inv, v * &inv]
}

pub fn fs_slice(ambient: &Chart, with_line: bool) -> SmoothMap {
    SmoothMap::from_jets(&fs_chart(with_line), ambient, move |q| {
        let mut out = fs_slice_components(&q[0], &q[1]);
        if with_line {
            out.push(q[2].clone());
        }
        out
    })
}

/// Projection to the FS chart: (u, v) = ((x1x2 + y1y2)/ρ, (x1y2 − y1x2)/ρ)
/// with ρ = x1² + y1² (defined away from z1 = 0).
pub fn fs_projection(ambient: &Chart, with_line: bool) -> SmoothMap {
    SmoothMap::from_jets(ambient, &fs_chart(with_line), move |p| {
        let rho = &(&p[0] * &p[0]) + &(&p[1] * &p[1]);
        let u = &(&(&p[0] * &p[2]) + &(&p[1] * &p[3])) / &rho;
        let v = &(&(&p[0] * &p[3]) - &(&p[1] * &p[2])) / &rho;
        let mut out = vec![u, v];
        if with_line {
            out.push(p[4].clone());
        }
        out
    })
}

/// The Fubini–Study metric of the quotient in the (u, v) chart:
/// (du² + dv²)/(1 + u² + v²)² — the independent oracle for the reduced
/// metric of the S¹ quotient of the unit sphere.
pub fn fs_metric_oracle(u: f64, v: f64) -> [[f64; 2]; 2] {
    let d = 1.0 + u * u + v * v;
    let c = 1.0 / (d * d);
    [[c, 0.0], [0.0, c]]
}

/// S¹ acting diagonally on the flat coKähler C²×R at ζ = ½ with the
/// Fubini–Study slice.
pub fn s1_c2xr_cokahler_datum() -> CoKahlerDatum {
    let structure = flat_cokahler_r5();
    let chart = structure.chart.clone();
    ReductionDatum {
        action: s1_diagonal_action(&chart),
        moments: vec![harmonic_moment(&chart)],
        zetas: vec![nalgebra::DVector::from_vec(vec![0.5])],
        quotient: fs_chart(true),
        slice: fs_slice(&chart, true),
        projection: Some(fs_projection(&chart, true)),
        tol: Tolerances::default(),
        structure,
    }
}

/// The same scenario viewed cosymplectically (η, ω = g(·, φ·)).
pub fn s1_c2xr_cosymplectic_datum() -> CosymplecticDatum {
    let acm = flat_cokahler_r5();
    let structure = acm.underlying();
    let chart = structure.chart.clone();
    ReductionDatum {
        action: s1_diagonal_action(&chart),
        moments: vec![harmonic_moment(&chart)],
        zetas: vec![nalgebra::DVector::from_vec(vec![0.5])],
        quotient: fs_chart(true),
        slice: fs_slice(&chart, true),
        projection: Some(fs_projection(&chart, true)),
        tol: Tolerances::default(),
        structure,
    }
}

/// S¹ acting diagonally on flat Kähler C² at ζ = ½.
pub fn s1_c2_kahler_datum() -> KahlerDatum {
    let structure = flat_kahler_c2();
    let chart = structure.chart.clone();
    ReductionDatum {
        action: s1_diagonal_action(&chart),
        moments: vec![harmonic_moment(&chart)],
        zetas: vec![nalgebra::DVector::from_vec(vec![0.5])],
        quotient: fs_chart(false),
        slice: fs_slice(&chart, false),
        projection: Some(fs_projection(&chart, false)),
        tol: Tolerances::default(),
        structure,
    }
}

/// R-shift of q2 on canonical R⁵ with μ = p2 at ζ = 0; the slice freezes
/// (p2, q2) = (0, 0). Reduces to canonical R³.
pub fn q2_shift_r5_datum() -> CosymplecticDatum {
    let structure = canonical_r5();
    let chart = structure.chart.clone();
    let action = GroupAction::new(translation_group(), chart.clone(), |g, p| {
        vec![
            p[0].clone(),
            p[1].clone(),
            p[2].clone(),
            &p[3] + &g[1],
            p[4].clone(),
        ]
    });
    let mu = MomentMap::from_jets(&chart, |p| vec![p[2].clone()]);
    let quotient = Chart::symmetric("canonical-r3-quotient", &["p1", "q1", "t"], 1.0);
    let slice = SmoothMap::from_jets(&quotient, &chart, |q| {
        let n = q[0].n_partials();
        vec![
            q[0].clone(),
            q[1].clone(),
            Jet::constant(0.0, n),
            Jet::constant(0.0, n),
            q[2].clone(),
        ]
    });
    let projection = SmoothMap::from_jets(&chart, &quotient, |p| {
        vec![p[0].clone(), p[1].clone(), p[4].clone()]
    });
    ReductionDatum {
        structure,
        action,
        moments: vec![mu],
        zetas: vec![nalgebra::DVector::from_vec(vec![0.0])],
        quotient,
        slice,
        projection: Some(projection),
        tol: Tolerances::default(),
    }
}

/// A trivial-group datum: no moments, identity slice; reduction must be
/// the identity.
pub fn trivial_datum<S>(structure: S, chart: &Chart) -> ReductionDatum<S> {
    let trivial = crate::action::MatrixLieGroup::new("trivial", 1, Vec::new()).expect("trivial");
    ReductionDatum {
        structure,
        action: GroupAction::new(trivial, chart.clone(), |_g, p| p.to_vec()),
        moments: Vec::new(),
        zetas: Vec::new(),
        quotient: chart.clone(),
        slice: SmoothMap::identity(chart),
        projection: Some(SmoothMap::identity(chart)),
        tol: Tolerances::default(),
    }
}

/// The right-multiplication S¹ action q ↦ q·e^{iθ} on a chart whose first
/// four coordinates are (a, b, c, d) ∈ H.
pub fn s1_right_mult_action(chart: &Chart) -> GroupAction {
    let dim = chart.dim();
    GroupAction::new(circle_group(), chart.clone(), move |g, p| {
        let (c, s) = (g[0].clone(), g[2].clone());
        let mut out = Vec::with_capacity(dim);
        out.push(&(&c * &p[0]) - &(&s * &p[1]));
        out.push(&(&s * &p[0]) + &(&c * &p[1]));
        out.push(&(&c * &p[2]) + &(&s * &p[3]));
        out.push(&(&c * &p[3]) - &(&s * &p[2]));
        for i in 4..dim {
            out.push(p[i].clone());
        }
        out
    })
}

/// The three hyperKähler moment maps of the right S¹ action on H:
/// μ1 = ½(a²+b²−c²−d²), μ2 = ad + bc, μ3 = bd − ac.
pub fn quaternion_moments(chart: &Chart) -> [MomentMap; 3] {
    [
        MomentMap::from_jets(chart, |p| {
            vec![
                &(&(&(&p[0] * &p[0]) + &(&p[1] * &p[1]))
                    - &(&(&p[2] * &p[2]) + &(&p[3] * &p[3])))
                    * 0.5,
            ]
        }),
        MomentMap::from_jets(chart, |p| {
            vec![&(&p[0] * &p[3]) + &(&p[1] * &p[2])]
        }),
        MomentMap::from_jets(chart, |p| {
            vec![&(&p[1] * &p[3]) - &(&p[0] * &p[2])]
        }),
    ]
}

/// S¹ on H×R³ at ζ = (½, 0, 0): the joint level set through
/// q = (1,0,0,0) with the three t-lines as the quotient.
pub fn s1_hxr3_datum() -> ThreeCosymplecticDatum {
    let structure = flat_3cosymplectic_r7();
    let chart = structure.chart.clone();
    let quotient = Chart::symmetric("t-lines", &["w1", "w2", "w3"], 0.9);
    let slice = SmoothMap::from_jets(&quotient, &chart, |q| {
        let n = q[0].n_partials();
        vec![
            Jet::constant(1.0, n),
            Jet::constant(0.0, n),
            Jet::constant(0.0, n),
            Jet::constant(0.0, n),
            q[0].clone(),
            q[1].clone(),
            q[2].clone(),
        ]
    });
    let projection = SmoothMap::from_jets(&chart, &quotient, |p| {
        vec![p[4].clone(), p[5].clone(), p[6].clone()]
    });
    ReductionDatum {
        action: s1_right_mult_action(&chart),
        moments: quaternion_moments(&chart).to_vec(),
        zetas: vec![
            nalgebra::DVector::from_vec(vec![0.5]),
            nalgebra::DVector::from_vec(vec![0.0]),
            nalgebra::DVector::from_vec(vec![0.0]),
        ],
        quotient,
        slice,
        projection: Some(projection),
        tol: Tolerances::default(),
        structure,
    }
}

/// R translating a1 on flat hyperKähler H², with moment maps
/// (−b1, −c1, −d1) at ζ = 0. The quotient is the flat second factor.
pub fn rtrans_h2_datum() -> HyperKahlerDatum {
    let structure = flat_hyperkahler_h2();
    let chart = structure.chart.clone();
    let action = GroupAction::new(translation_group(), chart.clone(), |g, p| {
        let mut out = p.to_vec();
        out[0] = &p[0] + &g[1];
        out
    });
    let moments = [
        MomentMap::from_jets(&chart, |p| vec![-&p[1]]),
        MomentMap::from_jets(&chart, |p| vec![-&p[2]]),
        MomentMap::from_jets(&chart, |p| vec![-&p[3]]),
    ];
    let quotient = Chart::symmetric("h2-quotient", &["w1", "w2", "w3", "w4"], 0.9);
    let slice = SmoothMap::from_jets(&quotient, &chart, |q| {
        let n = q[0].n_partials();
        let mut out = vec![Jet::constant(0.0, n); 4];
        out.extend(q.iter().cloned());
        out
    });
    let projection = SmoothMap::from_jets(&chart, &quotient, |p| p[4..8].to_vec());
    ReductionDatum {
        structure,
        action,
        moments: moments.to_vec(),
        zetas: vec![
            nalgebra::DVector::from_vec(vec![0.0]),
            nalgebra::DVector::from_vec(vec![0.0]),
            nalgebra::DVector::from_vec(vec![0.0]),
        ],
        quotient,
        slice,
        projection: Some(projection),
        tol: Tolerances::default(),
    }
}

/// R translating x on flat Kähler C with μ = −y at ζ = 0: the quotient is
/// 0-dimensional (degenerate pass with an explicit flag).
pub fn degenerate_point_quotient_datum() -> KahlerDatum {
    let structure = flat_kahler_r2();
    let chart = structure.chart.clone();
    let action = GroupAction::new(translation_group(), chart.clone(), |g, p| {
        vec![&p[0] + &g[1], p[1].clone()]
    });
    let mu = MomentMap::from_jets(&chart, |p| vec![-&p[1]]);
    // dummy quotient/slice: the reduction flags the 0-dimensional case
    // before ever evaluating these
    let quotient = Chart::symmetric("dummy", &["w"], 1.0);
    let slice = SmoothMap::from_jets(&quotient, &chart, |q| {
        let n = q[0].n_partials();
        vec![Jet::constant(0.0, n), Jet::constant(0.0, n)]
    });
    ReductionDatum {
        structure,
        action,
        moments: vec![mu],
        zetas: vec![nalgebra::DVector::from_vec(vec![0.0])],
        quotient,
        slice,
        projection: None,
        tol: Tolerances::default(),
    }
}

/// The rigid-body cosymplectic datum on T*SO(3)×R at ζ. Non-central ζ
/// (like e3) is supported by the plain cosymplectic reduction only.
pub fn rigid_body_datum(inertia: [f64; 3], zeta: [f64; 3]) -> CosymplecticDatum {
    let chart = crate::rigid::tstar_so3_chart();
    let omega_h = crate::rigid::rigid_omega_h(&chart, inertia);
    let eta = dt_form(&chart);
    let structure =
        crate::structures::AlmostCosymplectic::new(chart.clone(), eta, omega_h);
    let moment = crate::rigid::rigid_body_moment();
    let zeta_norm = (zeta[0] * zeta[0] + zeta[1] * zeta[1] + zeta[2] * zeta[2]).sqrt();
    ReductionDatum {
        structure,
        action: moment.action,
        moments: vec![moment.mu],
        zetas: vec![nalgebra::DVector::from_vec(zeta.to_vec())],
        quotient: crate::rigid::momentum_sphere_chart(zeta_norm),
        slice: crate::rigid::rigid_body_slice(zeta),
        projection: None,
        tol: Tolerances::default(),
    }
}

/// Hamiltonian used by the harmonic-oscillator flow fixture.
pub fn harmonic_oscillator_system() -> crate::dynamics::TimeDependentSystem {
    let base = Chart::symmetric("darboux-r2", &["p", "q"], 2.0);
    let omega = constant_two_form(&base, &[(0, 1, -1.0)]);
    let extended = base.extend("darboux-r2-x-r", &[("t", -10.0, 10.0)]);
    let h = ScalarField::from_jets(&extended, |p| {
        &(&(&p[0] * &p[0]) + &(&p[1] * &p[1])) * 0.5
    });
    crate::dynamics::cosymplectize(&base, &omega, &h, -10.0, 10.0).expect("valid system")
}

/// so3_group re-exported through the fixture catalog for the CLI.
pub fn rigid_body_group() -> crate::action::MatrixLieGroup {
    so3_group()
}
