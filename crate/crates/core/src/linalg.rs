//! Dense complex linear algebra shared by the geometric modules.
//!
//! Rank decisions everywhere use singular values relative to the largest
//! one, with the `rank` tolerance from [`Tolerances`](crate::Tolerances).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real_vector(values: &[f64]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&x| c(x, 0.0)))
}

pub fn real_diagonal(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&real_vector(values))
}

pub fn diagonal(values: &[C64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(values))
}

/// Jordan block of size `size` with eigenvalue `lambda` and ones above the diagonal.
pub fn jordan_block(lambda: C64, size: usize) -> CMatrix {
    CMatrix::from_fn(size, size, |i, j| {
        if i == j {
            lambda
        } else if j == i + 1 {
            ONE
        } else {
            ZERO
        }
    })
}

pub fn block_diagonal(blocks: &[CMatrix]) -> CMatrix {
    let size: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(size, size);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, at), (b.nrows(), b.ncols())).copy_from(b);
        at += b.nrows();
    }
    out
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vector_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular values (descending) together with a full set of right singular
/// vectors, padding short matrices with zero rows so the null space is complete.
pub struct FullSvd {
    pub singular_values: Vec<f64>,
    /// Left singular vectors of the (unpadded) input, one per singular value.
    pub u: CMatrix,
    /// Rows are right singular vectors; always square.
    pub v_t: CMatrix,
}

/// Computed with faer: nalgebra's complex SVD occasionally returns a wrong
/// left singular basis for rank-deficient input.
pub fn full_svd(m: &CMatrix) -> FullSvd {
    let (rows, cols) = m.shape();
    let a = faer::Mat::<C64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let svd = a.svd().expect("SVD of a finite matrix converges");
    let s = svd.S().column_vector();
    let (u_full, v_full) = (svd.U(), svd.V());
    let count = rows.min(cols);
    let singular_values = (0..cols).map(|k| if k < count { s[k].re } else { 0.0 }).collect();
    let u = CMatrix::from_fn(rows, cols, |r, k| if k < rows { u_full[(r, k)] } else { ZERO });
    let v_t = CMatrix::from_fn(cols, cols, |k, col| v_full[(col, k)].conj());
    FullSvd { singular_values, u, v_t }
}

pub fn numerical_rank(singular_values: &[f64], rel_tol: f64) -> usize {
    let largest = singular_values.first().copied().unwrap_or(0.0);
    if largest <= f64::MIN_POSITIVE {
        return 0;
    }
    singular_values.iter().filter(|&&s| s > rel_tol * largest).count()
}

pub fn rank(m: &CMatrix, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    numerical_rank(&full_svd(m).singular_values, rel_tol)
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn range_basis(m: &CMatrix, rel_tol: f64) -> CMatrix {
    if m.ncols() == 0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let svd = full_svd(m);
    let r = numerical_rank(&svd.singular_values, rel_tol);
    svd.u.columns(0, r).into_owned()
}

/// The `dim` leading left singular vectors of `m`, together with the ratio
/// `sigma_dim / sigma_1` that measures how well separated that range is.
pub fn leading_range(m: &CMatrix, dim: usize) -> (CMatrix, f64) {
    let svd = full_svd(m);
    let top = svd.singular_values.first().copied().unwrap_or(0.0);
    let gap = if dim == 0 || top == 0.0 { 0.0 } else { svd.singular_values[dim - 1] / top };
    (svd.u.columns(0, dim).into_owned(), gap)
}

/// Orthonormal basis (as columns) of `{x : m x = 0}`.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return CMatrix::identity(cols, cols);
    }
    let svd = full_svd(m);
    let r = numerical_rank(&svd.singular_values, rel_tol);
    let v_t = svd.v_t;
    CMatrix::from_fn(cols, cols - r, |i, k| v_t[(r + k, i)].conj())
}

/// Orthonormal basis of the span of right singular vectors of `m` whose
/// singular values are at most `cutoff`.
pub fn null_space_below(m: &CMatrix, cutoff: f64) -> CMatrix {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return CMatrix::identity(cols, cols);
    }
    let svd = full_svd(m);
    let mut sv = svd.singular_values.clone();
    sv.resize(cols, 0.0);
    let r = sv.iter().filter(|&&s| s > cutoff).count();
    let v_t = svd.v_t;
    CMatrix::from_fn(cols, cols - r, |i, k| v_t[(r + k, i)].conj())
}

/// Orthonormal basis of the orthogonal complement of the span of `basis`.
pub fn orthogonal_complement(basis: &CMatrix, rel_tol: f64) -> CMatrix {
    if basis.ncols() == 0 {
        return CMatrix::identity(basis.nrows(), basis.nrows());
    }
    null_space(&basis.adjoint(), rel_tol)
}

/// Euclidean norm of the component of `v` orthogonal to the orthonormal columns of `basis`.
pub fn residual_from_span(basis: &CMatrix, v: &CVector) -> f64 {
    if basis.ncols() == 0 {
        return vector_norm(v);
    }
    let proj = basis * (basis.adjoint() * v);
    vector_norm(&(v - proj))
}

pub fn project_onto(basis: &CMatrix, v: &CVector) -> CVector {
    basis * (basis.adjoint() * v)
}

pub fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    Ok(m.nrows())
}

/// Ratio of smallest to largest singular value.
pub fn inverse_condition(m: &CMatrix) -> f64 {
    let s = full_svd(m).singular_values;
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        _ => 0.0,
    }
}

/// Eigenvalues of a square complex matrix via the complex Schur form.
pub fn eigenvalues(t: &CMatrix) -> Result<Vec<C64>> {
    check_square(t)?;
    if t.nrows() == 0 {
        return Ok(Vec::new());
    }
    let scale = frobenius(t);
    if scale == 0.0 {
        return Ok(vec![ZERO; t.nrows()]);
    }
    let scaled = t / c(scale, 0.0);
    let schur = scaled.try_schur(f64::EPSILON, 10_000).ok_or(Error::EigenFailure)?;
    let (_, tri) = schur.unpack();
    Ok((0..tri.nrows()).map(|i| tri[(i, i)] * scale).collect())
}

/// A group of numerically coincident eigenvalues.
#[derive(Debug, Clone)]
pub struct EigenGroup {
    /// Mean of the members. For a perturbed multiple eigenvalue the mean is far
    /// more accurate than any individual member.
    pub value: C64,
    pub members: Vec<usize>,
}

impl EigenGroup {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }
}

/// Groups eigenvalues lying within `merge_tol * max(1, |lambda|)` of each other
/// (single linkage).
pub fn group_eigenvalues(eigs: &[C64], merge_tol: f64) -> Vec<EigenGroup> {
    let n = eigs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut k = i;
        while parent[k] != r {
            let next = parent[k];
            parent[k] = r;
            k = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = eigs[i].norm().max(eigs[j].norm()).max(1.0);
            if (eigs[i] - eigs[j]).norm() <= merge_tol * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<EigenGroup> = Vec::new();
    let mut root_index: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_index[r] {
            Some(g) => groups[g].members.push(i),
            None => {
                root_index[r] = Some(groups.len());
                groups.push(EigenGroup { value: ZERO, members: vec![i] });
            }
        }
    }
    for g in &mut groups {
        let sum: C64 = g.members.iter().map(|&i| eigs[i]).sum();
        g.value = sum / c(g.members.len() as f64, 0.0);
    }
    groups
}

/// Basis of the invariant subspace belonging to the eigenvalues selected by
/// `inside`, computed as the range of `prod_{j not inside} (T - lambda_j I)`.
///
/// By Cayley-Hamilton the product annihilates every other generalized
/// eigenspace and is invertible on the selected one, so its range has
/// dimension equal to the number of selected eigenvalues. Returns the basis
/// and the separation ratio of that range.
pub fn invariant_subspace(t: &CMatrix, eigs: &[C64], inside: &[bool]) -> (CMatrix, f64) {
    let n = t.nrows();
    let dim = inside.iter().filter(|&&b| b).count();
    let scale = frobenius(t).max(f64::MIN_POSITIVE);
    let mut product = CMatrix::identity(n, n);
    for (lambda, &keep) in eigs.iter().zip(inside) {
        if keep {
            continue;
        }
        let mut factor = t - CMatrix::identity(n, n) * *lambda;
        factor /= c(scale + lambda.norm(), 0.0);
        product = factor * product;
        let norm = frobenius(&product);
        if norm > 0.0 {
            product /= c(norm, 0.0);
        }
    }
    leading_range(&product, dim)
}

/// Orthonormal basis of the span of all proper eigenvectors of `t`.
///
/// Works for singular `t` as well (the kernel is an eigenspace for 0).
pub fn eigenvector_span_basis(t: &CMatrix, rank_tol: f64, merge_tol: f64) -> Result<CMatrix> {
    let n = check_square(t)?;
    let eigs = eigenvalues(t)?;
    let groups = group_eigenvalues(&eigs, merge_tol);
    // The cutoff is measured against t itself: a shifted scalar block is pure
    // rounding noise and must count as kernel.
    let cutoff = rank_tol.sqrt() * frobenius(t).max(1.0);
    let mut columns: Vec<CVector> = Vec::new();
    for g in &groups {
        let shifted = t - CMatrix::identity(n, n) * g.value;
        let kernel = null_space_below(&shifted, cutoff);
        let kernel = if kernel.ncols() == 0 {
            // The eigenvalue estimate is too coarse for the rank cutoff; fall back
            // to the best-conditioned direction.
            let svd = full_svd(&shifted);
            let last = svd.v_t.nrows() - 1;
            CMatrix::from_fn(n, 1, |i, _| svd.v_t[(last, i)].conj())
        } else {
            kernel
        };
        for k in 0..kernel.ncols() {
            columns.push(kernel.column(k).into_owned());
        }
    }
    let stacked = CMatrix::from_columns(&columns);
    Ok(range_basis(&stacked, rank_tol))
}

/// `t^m` by repeated squaring.
pub fn matrix_power(t: &CMatrix, mut m: u64) -> CMatrix {
    let n = t.nrows();
    let mut result = CMatrix::identity(n, n);
    let mut base = t.clone();
    while m > 0 {
        if m & 1 == 1 {
            result = &result * &base;
        }
        m >>= 1;
        if m > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted ascending.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (h + h.adjoint()) * c(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(h.nrows(), order.len(), |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

pub fn hermitian_asymmetry(h: &CMatrix) -> f64 {
    let scale = frobenius(h).max(1.0);
    frobenius(&(h - h.adjoint())) / scale
}

pub fn hermitize(h: &CMatrix) -> CMatrix {
    (h + h.adjoint()) * c(0.5, 0.0)
}

/// Relative distance between two matrices up to a nonzero complex scalar:
/// `min_c ||b - c a|| / ||b||`.
pub fn projective_matrix_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let aa: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let bb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    if aa == 0.0 || bb == 0.0 {
        return if aa == bb { 0.0 } else { 1.0 };
    }
    let ab: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let scale = ab / aa;
    let resid: f64 = a.iter().zip(b.iter()).map(|(x, y)| (y - scale * x).norm_sqr()).sum();
    (resid / bb).sqrt()
}
