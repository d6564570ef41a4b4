//! Differential operators on tensor fields: exterior derivative, Lie
//! bracket, Nijenhuis tensor, Christoffel symbols, covariant derivatives
//! and pullbacks. Values that need one derivative level are computed from
//! exact jets; the outputs are `Values`-kind fields (their own derivatives
//! fall back to central differences, see `field`).

use nalgebra::DMatrix;

use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::field::{EndoField, KForm, MetricField, ScalarField, SmoothMap, VectorField};
use crate::form::{binomial, combinations, d_components};
use crate::jet::{seed_point, values};
use crate::linalg::cond;

/// All first partials of a scalar field at `p`, computed on jet seeds.
pub fn partials(field: &ScalarField, p: &[f64]) -> Result<Vec<f64>> {
    field.chart.check_point(p)?;
    Ok(field.jet(&seed_point(p)).d)
}

/// The differential of a scalar field as a 1-form.
pub fn differential(field: &ScalarField) -> KForm {
    let eval = field.eval.clone();
    KForm::from_values(&field.chart, 1, move |p| eval.jets(&seed_point(p))[0].d.clone())
}

/// Exterior derivative. For `degree == dim` the result is the zero
/// (dim+1)-form by convention (`is_trivially_zero` flags it).
pub fn exterior_derivative(alpha: &KForm) -> KForm {
    let n = alpha.chart.dim();
    let k = alpha.degree;
    let eval = alpha.eval.clone();
    KForm::from_values(&alpha.chart, k + 1, move |p| {
        if k + 1 > n {
            return Vec::new();
        }
        let jets = eval.jets(&seed_point(p));
        d_components(n, k, &jets)
    })
}

/// Lie bracket [X,Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    x.chart.check_same(&y.chart)?;
    let dim = x.chart.dim();
    let xe = x.eval.clone();
    let ye = y.eval.clone();
    Ok(VectorField::from_values(&x.chart, move |p| {
        let seeds = seed_point(p);
        let xj = xe.jets(&seeds);
        let yj = ye.jets(&seeds);
        (0..dim)
            .map(|i| {
                let mut acc = 0.0;
                for j in 0..dim {
                    acc += xj[j].v * yj[i].d[j] - yj[j].v * xj[i].d[j];
                }
                acc
            })
            .collect()
    }))
}

/// Nijenhuis tensor components N^i_{jk} at a point, assembled on
/// coordinate fields and extended bilinearly:
/// N(X,Y) = φ²[X,Y] + [φX,φY] − φ[φX,Y] − φ[X,φY].
pub fn nijenhuis_tensor(phi: &EndoField, p: &[f64]) -> Vec<Vec<Vec<f64>>> {
    let dim = phi.chart.dim();
    let jets = phi.jet(&seed_point(p));
    let phi_v = |i: usize, j: usize| jets[i * dim + j].v;
    let phi_d = |i: usize, j: usize, l: usize| jets[i * dim + j].d[l];
    let mut n = vec![vec![vec![0.0; dim]; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                let mut acc = 0.0;
                for l in 0..dim {
                    acc += phi_v(l, j) * phi_d(i, k, l) - phi_v(l, k) * phi_d(i, j, l);
                    acc += phi_v(i, l) * (phi_d(l, j, k) - phi_d(l, k, j));
                }
                n[i][j][k] = acc;
            }
        }
    }
    n
}

/// Evaluate the Nijenhuis tensor on two pointwise vectors.
pub fn nijenhuis_apply(tensor: &[Vec<Vec<f64>>], x: &[f64], y: &[f64]) -> Vec<f64> {
    let dim = x.len();
    (0..dim)
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..dim {
                for k in 0..dim {
                    acc += tensor[i][j][k] * x[j] * y[k];
                }
            }
            acc
        })
        .collect()
}

/// Inverse metric with an ill-conditioning guard (condition number above
/// 1e12 aborts the point).
pub fn metric_inverse(g: &DMatrix<f64>, p: &[f64], context: &str) -> Result<DMatrix<f64>> {
    let c = cond(g);
    if !c.is_finite() || c > 1e12 {
        return Err(GeomError::IllConditioned {
            context: context.to_string(),
            point: p.to_vec(),
            cond: c,
        });
    }
    g.clone().try_inverse().ok_or_else(|| GeomError::Singular {
        context: context.to_string(),
        point: p.to_vec(),
        det: g.determinant(),
    })
}

/// Christoffel symbols Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij}),
/// returned as `gamma[k][i][j]`, symmetric in (i,j) exactly.
pub fn christoffel(g: &MetricField, p: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    let dim = g.chart.dim();
    let jets = g.jet(&seed_point(p));
    let gv = DMatrix::from_fn(dim, dim, |i, j| jets[i * dim + j].v);
    let ginv = metric_inverse(&gv, p, "christoffel")?;
    let dg = |i: usize, j: usize, l: usize| jets[i * dim + j].d[l];
    let mut gamma = vec![vec![vec![0.0; dim]; dim]; dim];
    for k in 0..dim {
        for i in 0..dim {
            for j in 0..=i {
                let mut acc = 0.0;
                for l in 0..dim {
                    acc += ginv[(k, l)] * (dg(j, l, i) + dg(i, l, j) - dg(i, j, l));
                }
                let v = 0.5 * acc;
                gamma[k][i][j] = v;
                gamma[k][j][i] = v;
            }
        }
    }
    Ok(gamma)
}

/// Covariant derivative of an endomorphism:
/// (∇_i φ)^j_k = ∂_i φ^j_k + Γ^j_{il} φ^l_k − Γ^l_{ik} φ^j_l,
/// returned as `nabla[i][j][k]`.
pub fn covariant_derivative_endo(
    g: &MetricField,
    phi: &EndoField,
    p: &[f64],
) -> Result<Vec<Vec<Vec<f64>>>> {
    let dim = g.chart.dim();
    let gamma = christoffel(g, p)?;
    let jets = phi.jet(&seed_point(p));
    let phi_v = |i: usize, j: usize| jets[i * dim + j].v;
    let phi_d = |i: usize, j: usize, l: usize| jets[i * dim + j].d[l];
    let mut out = vec![vec![vec![0.0; dim]; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                let mut acc = phi_d(j, k, i);
                for l in 0..dim {
                    acc += gamma[j][i][l] * phi_v(l, k) - gamma[l][i][k] * phi_v(j, l);
                }
                out[i][j][k] = acc;
            }
        }
    }
    Ok(out)
}

/// (∇_X X)^k = X^i ∂_i X^k + Γ^k_{ij} X^i X^j at a point.
pub fn covariant_self_derivative(g: &MetricField, x: &VectorField, p: &[f64]) -> Result<Vec<f64>> {
    let dim = g.chart.dim();
    let gamma = christoffel(g, p)?;
    let xj = x.jet(&seed_point(p));
    let mut out = vec![0.0; dim];
    for k in 0..dim {
        let mut acc = 0.0;
        for i in 0..dim {
            acc += xj[i].v * xj[k].d[i];
            for j in 0..dim {
                acc += gamma[k][i][j] * xj[i].v * xj[j].v;
            }
        }
        out[k] = acc;
    }
    Ok(out)
}

/// Pullback of a k-form along a smooth map:
/// (F*α)(v₁,…,v_k) = α(dF v₁, …, dF v_k).
pub fn pullback(f: &SmoothMap, alpha: &KForm) -> Result<KForm> {
    f.target.check_same(&alpha.chart)?;
    let k = alpha.degree;
    let n_src = f.source.dim();
    let n_tgt = f.target.dim();
    let fe = f.eval.clone();
    let ae = alpha.eval.clone();
    Ok(KForm::from_values(&f.source, k, move |p| {
        if k > n_src {
            return Vec::new();
        }
        if k == 0 {
            return ae.values(&fe.values(p));
        }
        let fj = fe.jets(&seed_point(p));
        let a = ae.values(&values(&fj));
        let jac = |r: usize, c: usize| fj[r].d[c];
        let combos_src = combinations(n_src, k);
        let combos_tgt = combinations(n_tgt, k);
        let mut out = vec![0.0; binomial(n_src, k)];
        for (js, cs) in combos_src.iter().enumerate() {
            let mut acc = 0.0;
            for (jt, ct) in combos_tgt.iter().enumerate() {
                if a[jt] == 0.0 {
                    continue;
                }
                // det of the k x k minor dF[ct, cs]
                let m = DMatrix::from_fn(k, k, |r, c| jac(ct[r], cs[c]));
                acc += a[jt] * m.determinant();
            }
            out[js] = acc;
        }
        out
    }))
}

/// Pullback of a metric: (F*g)(u,v) = g(dF u, dF v).
pub fn pullback_metric(f: &SmoothMap, g: &MetricField) -> Result<MetricField> {
    f.target.check_same(&g.chart)?;
    let fe = f.eval.clone();
    let ge = g.eval.clone();
    let n_src = f.source.dim();
    let n_tgt = f.target.dim();
    Ok(MetricField::from_values(&f.source, move |p| {
        let fj = fe.jets(&seed_point(p));
        let gv = ge.values(&values(&fj));
        let jac = DMatrix::from_fn(n_tgt, n_src, |r, c| fj[r].d[c]);
        let gm = DMatrix::from_row_slice(n_tgt, n_tgt, &gv);
        let out = jac.transpose() * gm * jac;
        out.row_iter()
            .flat_map(|r| r.iter().cloned().collect::<Vec<_>>())
            .collect()
    }))
}

/// Pullback of an endomorphism along a (local) diffeomorphism:
/// F*φ = (dF)⁻¹ ∘ φ(F(·)) ∘ dF.
pub fn pullback_endo(f: &SmoothMap, phi: &EndoField) -> Result<EndoField> {
    f.target.check_same(&phi.chart)?;
    if f.source.dim() != f.target.dim() {
        return Err(GeomError::Config(
            "endomorphism pullback needs equal source/target dimension".into(),
        ));
    }
    let fe = f.eval.clone();
    let pe = phi.eval.clone();
    let n = f.source.dim();
    Ok(EndoField::from_values(&f.source, move |p| {
        let fj = fe.jets(&seed_point(p));
        let pv = pe.values(&values(&fj));
        let jac = DMatrix::from_fn(n, n, |r, c| fj[r].d[c]);
        let phim = DMatrix::from_row_slice(n, n, &pv);
        let jinv = jac.clone().try_inverse().expect("diffeomorphism Jacobian");
        let out = jinv * phim * jac;
        out.row_iter()
            .flat_map(|r| r.iter().cloned().collect::<Vec<_>>())
            .collect()
    }))
}

/// Pullback of a vector field along a diffeomorphism:
/// (F*X)_p = (dF_p)⁻¹ X_{F(p)}.
pub fn pullback_vector(f: &SmoothMap, x: &VectorField) -> Result<VectorField> {
    f.target.check_same(&x.chart)?;
    if f.source.dim() != f.target.dim() {
        return Err(GeomError::Config(
            "vector pullback needs equal source/target dimension".into(),
        ));
    }
    let fe = f.eval.clone();
    let xe = x.eval.clone();
    let n = f.source.dim();
    Ok(VectorField::from_values(&f.source, move |p| {
        let fj = fe.jets(&seed_point(p));
        let xv = nalgebra::DVector::from_vec(xe.values(&values(&fj)));
        let jac = DMatrix::from_fn(n, n, |r, c| fj[r].d[c]);
        let sol = jac.lu().solve(&xv).expect("diffeomorphism Jacobian");
        sol.iter().cloned().collect()
    }))
}

/// Interior product ι_X α at a point, from component values.
pub fn interior_product_values(
    chart: &Chart,
    degree: usize,
    alpha: &[f64],
    x: &[f64],
) -> Vec<f64> {
    let n = chart.dim();
    assert!(degree >= 1);
    let combos_out = combinations(n, degree - 1);
    let mut out = vec![0.0; combos_out.len()];
    for (r, rest) in combos_out.iter().enumerate() {
        let mut acc = 0.0;
        for j in 0..n {
            let mut idx = vec![j];
            idx.extend_from_slice(rest);
            acc += x[j] * crate::form::component(n, alpha, &idx);
        }
        out[r] = acc;
    }
    out
}
