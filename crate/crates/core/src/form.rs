//! Antisymmetric index algebra for differential forms.
//!
//! A degree-k form on an n-dimensional chart is stored as its C(n,k)
//! components over strictly increasing multi-indices in lexicographic
//! order. Degree 0 is a single component; degree n+1 has none (the zero
//! form, used by the top-degree exterior-derivative convention).

use crate::jet::Jet;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// All strictly increasing multi-indices of length `k` in `0..n`,
/// lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Lexicographic rank of a sorted multi-index among `combinations(n, k)`.
pub fn comb_rank(combo: &[usize], n: usize) -> usize {
    let k = combo.len();
    let mut rank = 0;
    let mut prev: isize = -1;
    for (pos, &c) in combo.iter().enumerate() {
        for j in (prev + 1) as usize..c {
            rank += binomial(n - 1 - j, k - 1 - pos);
        }
        prev = c as isize;
    }
    rank
}

/// Sort an index tuple, returning the permutation sign, or `None` when an
/// index repeats (the component is zero).
pub fn sort_with_sign(indices: &[usize]) -> Option<(f64, Vec<usize>)> {
    let mut idx = indices.to_vec();
    let mut sign = 1.0;
    // insertion sort, counting swaps
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in idx.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((sign, idx))
}

/// Component of a stored form at an arbitrary (possibly unsorted) index
/// tuple.
pub fn component(n: usize, comps: &[f64], indices: &[usize]) -> f64 {
    match sort_with_sign(indices) {
        None => 0.0,
        Some((sign, sorted)) => sign * comps[comb_rank(&sorted, n)],
    }
}

/// Wedge product of component arrays (values).
pub fn wedge(n: usize, ka: usize, a: &[f64], kb: usize, b: &[f64]) -> Vec<f64> {
    let k = ka + kb;
    if k > n {
        return Vec::new();
    }
    let combos_a = combinations(n, ka);
    let combos_b = combinations(n, kb);
    let mut out = vec![0.0; binomial(n, k)];
    for (ia, ca) in combos_a.iter().enumerate() {
        if a[ia] == 0.0 {
            continue;
        }
        for (ib, cb) in combos_b.iter().enumerate() {
            if b[ib] == 0.0 {
                continue;
            }
            let mut joined = ca.clone();
            joined.extend_from_slice(cb);
            if let Some((sign, sorted)) = sort_with_sign(&joined) {
                out[comb_rank(&sorted, n)] += sign * a[ia] * b[ib];
            }
        }
    }
    out
}

/// Evaluate a k-form (component array) on k vectors.
pub fn eval_on_vectors(n: usize, k: usize, comps: &[f64], vectors: &[&[f64]]) -> f64 {
    assert_eq!(vectors.len(), k);
    if k == 0 {
        return comps[0];
    }
    let mut total = 0.0;
    for (rank, combo) in combinations(n, k).iter().enumerate() {
        if comps[rank] == 0.0 {
            continue;
        }
        total += comps[rank] * minor_det(combo, vectors);
    }
    total
}

/// det of the k x k matrix with entries vectors[b][combo[a]].
fn minor_det(combo: &[usize], vectors: &[&[f64]]) -> f64 {
    let k = combo.len();
    match k {
        1 => vectors[0][combo[0]],
        2 => {
            vectors[0][combo[0]] * vectors[1][combo[1]]
                - vectors[1][combo[0]] * vectors[0][combo[1]]
        }
        _ => {
            let m = nalgebra::DMatrix::from_fn(k, k, |a, b| vectors[b][combo[a]]);
            m.determinant()
        }
    }
}

/// Exterior-derivative component assembly from jet-evaluated components:
/// (d alpha)_J = sum_m (-1)^m d_{J[m]} alpha_{J \ J[m]}.
pub fn d_components(n: usize, k: usize, comp_jets: &[Jet]) -> Vec<f64> {
    if k + 1 > n {
        return Vec::new();
    }
    let combos_out = combinations(n, k + 1);
    let mut out = Vec::with_capacity(combos_out.len());
    for combo in &combos_out {
        let mut acc = 0.0;
        let mut sign = 1.0;
        for m in 0..combo.len() {
            let mut rest: Vec<usize> = combo.clone();
            let dir = rest.remove(m);
            let rank = comb_rank(&rest, n);
            acc += sign * comp_jets[rank].d[dir];
            sign = -sign;
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_are_lexicographic() {
        for (n, k) in [(4usize, 2usize), (5, 3), (7, 2), (8, 4)] {
            for (i, c) in combinations(n, k).iter().enumerate() {
                assert_eq!(comb_rank(c, n), i, "n={n} k={k} combo={c:?}");
            }
        }
    }

    #[test]
    fn signs_and_lookup() {
        // alpha = dx0 ^ dx1 on R^3
        let comps = vec![1.0, 0.0, 0.0];
        assert_eq!(component(3, &comps, &[0, 1]), 1.0);
        assert_eq!(component(3, &comps, &[1, 0]), -1.0);
        assert_eq!(component(3, &comps, &[1, 1]), 0.0);
    }

    #[test]
    fn wedge_recovers_volume() {
        // (dx0^dx1) ^ (dx2^dx3) = vol on R^4
        let n = 4;
        let a = {
            let mut v = vec![0.0; binomial(n, 2)];
            v[comb_rank(&[0, 1], n)] = 1.0;
            v
        };
        let b = {
            let mut v = vec![0.0; binomial(n, 2)];
            v[comb_rank(&[2, 3], n)] = 1.0;
            v
        };
        let w = wedge(n, 2, &a, 2, &b);
        assert_eq!(w.len(), 1);
        assert!((w[0] - 1.0).abs() < 1e-15);
        // anticommute a 1-form past a 1-form
        let e0 = vec![1.0, 0.0, 0.0, 0.0];
        let e1 = vec![0.0, 1.0, 0.0, 0.0];
        let w01 = wedge(n, 1, &e0, 1, &e1);
        let w10 = wedge(n, 1, &e1, 1, &e0);
        for (x, y) in w01.iter().zip(&w10) {
            assert!((x + y).abs() < 1e-15);
        }
    }

    #[test]
    fn eval_matches_determinant() {
        // (dx^dy)(v, w) = v_x w_y - v_y w_x
        let comps = vec![1.0, 0.0, 0.0]; // dx0^dx1 on R^3
        let v = [2.0, 0.5, -1.0];
        let w = [0.0, 3.0, 4.0];
        let got = eval_on_vectors(3, 2, &comps, &[&v, &w]);
        assert!((got - (2.0 * 3.0 - 0.5 * 0.0)).abs() < 1e-15);
    }
}
