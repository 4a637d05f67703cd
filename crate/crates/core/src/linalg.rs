//! Small numerical helpers over nalgebra shared by the other modules.

use nalgebra::{DMatrix, DVector};

/// Singular values, descending.
pub(crate) fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank: number of singular values above `rel_tol * max(scale, sigma_max)`.
pub(crate) fn rank(m: &DMatrix<f64>, rel_tol: f64, scale: f64) -> usize {
    let s = singular_values(m);
    let top = s.first().copied().unwrap_or(0.0).max(scale);
    s.iter().filter(|&&v| v > rel_tol * top).count()
}

/// Orthonormal basis of the column span by modified Gram-Schmidt with one
/// reorthogonalization pass. Exact zeros shared by the columns stay exact,
/// which keeps block-structured orbits on their blocks. The caller is
/// responsible for checking that `m` has full column rank.
pub(crate) fn orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        for _ in 0..2 {
            for i in 0..j {
                let c = q.column(i).dot(&q.column(j));
                if c != 0.0 {
                    let qi = q.column(i).into_owned();
                    q.column_mut(j).axpy(-c, &qi, 1.0);
                }
            }
        }
        let norm = q.column(j).norm();
        q.column_mut(j).unscale_mut(norm);
    }
    q
}

/// Orthonormal columns spanning the orthogonal complement of the columns of
/// the orthonormal `frame`, built by pivoted Gram-Schmidt over the standard
/// basis. Coordinate-aligned frames give coordinate-aligned complements with
/// no sign flips.
pub(crate) fn complement_columns(frame: &DMatrix<f64>) -> DMatrix<f64> {
    let n = frame.nrows();
    let want = n - frame.ncols();
    let mut basis: Vec<DVector<f64>> = frame.column_iter().map(|c| c.into_owned()).collect();
    let mut chosen: Vec<DVector<f64>> = Vec::with_capacity(want);
    let mut used = vec![false; n];
    for _ in 0..want {
        let mut best: Option<(usize, DVector<f64>, f64)> = None;
        for (j, taken) in used.iter().enumerate() {
            if *taken {
                continue;
            }
            let mut r = DVector::from_fn(n, |i, _| if i == j { 1.0 } else { 0.0 });
            // two passes of classical Gram-Schmidt
            for _ in 0..2 {
                for q in &basis {
                    let c = q.dot(&r);
                    if c != 0.0 {
                        r.axpy(-c, q, 1.0);
                    }
                }
            }
            let norm = r.norm();
            if best.as_ref().is_none_or(|(_, _, b)| norm > *b) {
                best = Some((j, r, norm));
            }
        }
        let (j, r, norm) = best.expect("complement dimension is positive");
        used[j] = true;
        let q = r / norm;
        basis.push(q.clone());
        chosen.push(q);
    }
    DMatrix::from_columns(&chosen)
}

/// `2-norm` condition number and smallest singular value.
pub(crate) fn condition(m: &DMatrix<f64>) -> (f64, f64) {
    let s = singular_values(m);
    let max = s.first().copied().unwrap_or(0.0);
    let min = s.last().copied().unwrap_or(0.0);
    (if min > 0.0 { max / min } else { f64::INFINITY }, min)
}
