//! Small linear-algebra helpers: jet-valued dense solves (for pointwise
//! Reeb/♭ systems with exact derivatives) and f64 wrappers around nalgebra
//! for rank, null spaces and least squares.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::jet::Jet;

/// Solve `A x = b` by Gaussian elimination with partial pivoting, where the
/// entries are jets. Pivoting compares values; derivatives ride along, so
/// the solution's partials are the exact derivatives of the solution map.
pub fn jet_solve(a: &[Vec<Jet>], b: &[Jet], context: &str) -> Result<Vec<Jet>> {
    let n = b.len();
    let mut m: Vec<Vec<Jet>> = a.to_vec();
    let mut rhs: Vec<Jet> = b.to_vec();
    for col in 0..n {
        let (pivot, pv) = (col..n)
            .map(|r| (r, m[r][col].v.abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pv < 1e-300 {
            return Err(GeomError::Singular {
                context: context.to_string(),
                point: Vec::new(),
                det: 0.0,
            });
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv_piv = m[col][col].recip();
        for r in col + 1..n {
            let factor = &m[r][col] * &inv_piv;
            for c in col..n {
                m[r][c] = &m[r][c] - &(&factor * &m[col][c]);
            }
            rhs[r] = &rhs[r] - &(&factor * &rhs[col]);
        }
    }
    let zero_len = rhs[0].n_partials();
    let mut x = vec![Jet::constant(0.0, zero_len); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for c in row + 1..n {
            acc = &acc - &(&m[row][c] * &x[c]);
        }
        x[row] = &acc / &m[row][row];
    }
    Ok(x)
}

/// Row-major jet matrix product (na x k) * (k x nb).
pub fn jet_mat_mul(a: &[Jet], b: &[Jet], na: usize, k: usize, nb: usize) -> Vec<Jet> {
    let mut out = Vec::with_capacity(na * nb);
    for i in 0..na {
        for j in 0..nb {
            let mut acc = &a[i * k] * &b[j];
            for l in 1..k {
                acc = &acc + &(&a[i * k + l] * &b[l * nb + j]);
            }
            out.push(acc);
        }
    }
    out
}

pub fn jet_mat_vec(a: &[Jet], x: &[Jet], rows: usize, cols: usize) -> Vec<Jet> {
    (0..rows)
        .map(|i| {
            let mut acc = &a[i * cols] * &x[0];
            for j in 1..cols {
                acc = &acc + &(&a[i * cols + j] * &x[j]);
            }
            acc
        })
        .collect()
}

/// Least squares `min |A x - b|` via SVD; returns the solution and the
/// Euclidean residual norm.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let svd = a.clone().svd(true, true);
    let x = svd.solve(b, 1e-13).expect("svd solve");
    let res = (a * &x - b).norm();
    (x, res)
}

/// Orthonormal basis (columns) of the null space of `a`.
pub fn null_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = a.ncols();
    // pad wide matrices to square so the thin SVD carries all n right
    // singular vectors
    let a = if a.nrows() < n {
        let mut padded = DMatrix::zeros(n, n);
        padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        padded
    } else {
        a.clone()
    };
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("v_t");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = tol * smax.max(1.0);
    let mut cols: Vec<usize> = Vec::new();
    for i in 0..v_t.nrows() {
        if i >= svd.singular_values.len() || svd.singular_values[i] <= cut {
            cols.push(i);
        }
    }
    // v_t has min(m,n) rows; coordinates beyond that are free directions too
    let mut basis = DMatrix::zeros(n, cols.len());
    for (c, &i) in cols.iter().enumerate() {
        for r in 0..n {
            basis[(r, c)] = v_t[(i, r)];
        }
    }
    basis
}

pub fn rank(a: &DMatrix<f64>, tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let svd = a.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    svd.singular_values
        .iter()
        .filter(|&&s| s > tol * smax.max(1.0))
        .count()
}

/// 2-norm condition number.
pub fn cond(a: &DMatrix<f64>) -> f64 {
    let svd = a.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().cloned().fold(f64::MAX, f64::min);
    if smin == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// G-orthogonal projection of `v` onto the column span of `basis`.
pub fn g_project(basis: &DMatrix<f64>, g: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    if basis.ncols() == 0 {
        return DVector::zeros(v.len());
    }
    let gram = basis.transpose() * g * basis;
    let rhs = basis.transpose() * g * v;
    let coeff = gram
        .clone()
        .lu()
        .solve(&rhs)
        .unwrap_or_else(|| lstsq(&gram, &rhs).0);
    basis * coeff
}

/// Basis (columns) of the G-orthogonal complement of span(`w`) inside
/// span(`k`). Both bases are given by columns; the result has
/// `k.ncols() - rank` columns.
pub fn g_complement_in(k: &DMatrix<f64>, w: &DMatrix<f64>, g: &DMatrix<f64>) -> DMatrix<f64> {
    if w.ncols() == 0 {
        return k.clone();
    }
    // rows: constraints w_a^T G (K c) = 0
    let constraints = w.transpose() * g * k;
    let nn = null_space(&constraints, 1e-10);
    k * nn
}

/// Inverse square root of a symmetric positive-definite matrix.
pub fn sym_inv_sqrt(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sym = nalgebra::SymmetricEigen::new(a.clone());
    let mut d = DMatrix::zeros(a.nrows(), a.ncols());
    for i in 0..a.nrows() {
        let ev = sym.eigenvalues[i];
        if ev <= 0.0 {
            return Err(GeomError::Numeric(format!(
                "matrix not positive definite (eigenvalue {ev:.3e})"
            )));
        }
        d[(i, i)] = 1.0 / ev.sqrt();
    }
    Ok(&sym.eigenvectors * d * sym.eigenvectors.transpose())
}

pub fn sym_sqrt(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sym = nalgebra::SymmetricEigen::new(a.clone());
    let mut d = DMatrix::zeros(a.nrows(), a.ncols());
    for i in 0..a.nrows() {
        let ev = sym.eigenvalues[i];
        if ev <= 0.0 {
            return Err(GeomError::Numeric(format!(
                "matrix not positive definite (eigenvalue {ev:.3e})"
            )));
        }
        d[(i, i)] = ev.sqrt();
    }
    Ok(&sym.eigenvectors * d * sym.eigenvectors.transpose())
}
