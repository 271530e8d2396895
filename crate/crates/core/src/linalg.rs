//! Dense linear algebra in the geometry of a symmetric positive-definite
//! mass matrix `M`: `⟨u, v⟩ = uᵀ M v`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Cholesky factor `M = RᵀR` together with `R⁻¹`.
#[derive(Debug, Clone)]
pub struct MassFactor {
    pub r: DMatrix<f64>,
    pub r_inv: DMatrix<f64>,
}

impl MassFactor {
    /// Panics if `m` is not positive definite; callers validate the mass
    /// matrix when building a [`crate::GramPair`].
    pub fn new(m: &DMatrix<f64>) -> Self {
        let chol = m.clone().cholesky().expect("mass matrix must be SPD");
        let r = chol.l().transpose();
        let r_inv = r
            .clone()
            .try_inverse()
            .expect("triangular Cholesky factor is invertible");
        Self { r, r_inv }
    }
}

pub fn inner(m: &DMatrix<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    (u.transpose() * m * v)[(0, 0)]
}

/// Greedy column selection with M-orthogonal deflation. Returns the indices
/// of columns of `b` whose span is the numerical column space, in pick order.
/// A column is discarded once its deflated M-norm drops below
/// `rel_tol * max_column_norm`.
pub fn effective_columns(b: &DMatrix<f64>, m: &DMatrix<f64>, rel_tol: f64) -> Vec<usize> {
    let ncols = b.ncols();
    let mut work: Vec<DVector<f64>> = (0..ncols).map(|j| b.column(j).into_owned()).collect();
    let norms: Vec<f64> = work.iter().map(|c| inner(m, c, c).max(0.0).sqrt()).collect();
    let scale = norms.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut picked = Vec::new();
    let mut remaining: Vec<usize> = (0..ncols).collect();
    loop {
        let best = remaining
            .iter()
            .map(|&j| (j, inner(m, &work[j], &work[j]).max(0.0).sqrt()))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((j, norm)) = best else { break };
        if norm <= rel_tol * scale {
            break;
        }
        picked.push(j);
        remaining.retain(|&k| k != j);
        let q = &work[j] / norm;
        for &k in &remaining {
            let c = inner(m, &q, &work[k]);
            work[k] -= &q * c;
        }
    }
    picked
}

/// M-orthonormal basis of the column span of `b` (columns assumed independent).
pub fn m_orthonormalize(b: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = b.nrows();
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(b.ncols());
    for j in 0..b.ncols() {
        let mut v = b.column(j).into_owned();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &out {
                let c = inner(m, q, &v);
                v -= q * c;
            }
        }
        let norm = inner(m, &v, &v).sqrt();
        out.push(v / norm);
    }
    if out.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    DMatrix::from_columns(&out)
}

/// M-orthonormal basis of the M-orthogonal complement of the span of the
/// M-orthonormal columns `q`.
pub fn m_complement(q: &DMatrix<f64>, m: &DMatrix<f64>, factor: &MassFactor) -> DMatrix<f64> {
    let n = m.nrows();
    let r = q.ncols();
    if r == 0 {
        return factor.r_inv.clone();
    }
    let rq = &factor.r * q;
    let proj = DMatrix::<f64>::identity(n, n) - &rq * rq.transpose();
    let proj = (&proj + proj.transpose()) * 0.5;
    let eig = SymmetricEigen::new(proj);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let cols: Vec<DVector<f64>> = idx[..n - r]
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    let mut w = DMatrix::from_columns(&cols);
    // block re-orthogonalization in Cholesky coordinates, where M becomes I
    for _ in 0..2 {
        w -= &rq * (rq.transpose() * &w);
    }
    let w = w.qr().q();
    &factor.r_inv * w
}

/// Sine of the largest principal angle between the spans of two
/// M-orthonormal bases, computed as `‖(I − BBᵀM)A‖` in the M-norm.
/// Returns the angle in radians; `π/2` when the dimensions differ.
pub fn max_principal_angle(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    m: &DMatrix<f64>,
    factor: &MassFactor,
) -> f64 {
    if a.ncols() != b.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let resid = a - b * (b.transpose() * m * a);
    let sv = (&factor.r * resid).singular_values();
    sv.max().clamp(0.0, 1.0).asin()
}

/// 2-norm condition number; infinite for singular matrices.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn max_abs(v: &DVector<f64>) -> f64 {
    v.amax()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthogonal_and_complete() {
        let n = 6;
        let m = DMatrix::from_diagonal(&DVector::from_iterator(n, (0..n).map(|i| 1.0 + i as f64)));
        let f = MassFactor::new(&m);
        let b = DMatrix::from_fn(n, 2, |i, j| ((i + 1) * (j + 2)) as f64 + if i == j { 1.0 } else { 0.0 });
        let q = m_orthonormalize(&b, &m);
        let s = m_complement(&q, &m, &f);
        assert_eq!(s.ncols(), n - 2);
        assert!((s.transpose() * &m * &q).amax() < 1e-12);
        let gram = s.transpose() * &m * &s;
        assert!((gram - DMatrix::identity(n - 2, n - 2)).amax() < 1e-12);
    }

    #[test]
    fn effective_columns_drops_dependent_and_zero_columns() {
        let m = DMatrix::identity(4, 4);
        let b = DMatrix::from_columns(&[
            DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]),
            DVector::from_vec(vec![0.0, 0.0, 0.0, 0.0]),
            DVector::from_vec(vec![2.0, 0.0, 0.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]),
        ]);
        let cols = effective_columns(&b, &m, 1e-8);
        assert_eq!(cols.len(), 2);
        assert!(cols.contains(&3));
    }

    #[test]
    fn principal_angle_of_rotated_line() {
        let m = DMatrix::identity(2, 2);
        let f = MassFactor::new(&m);
        let a = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let t: f64 = 0.01;
        let b = DMatrix::from_column_slice(2, 1, &[t.cos(), t.sin()]);
        assert!((max_principal_angle(&a, &b, &m, &f) - t).abs() < 1e-14);
    }
}
