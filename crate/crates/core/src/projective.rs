//! Points and subspaces of complex projective space P^n in homogeneous coordinates.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::codec::{self, Pair};
use crate::error::{Error, Result};
use crate::linalg::{self, vector_norm, CMatrix, CVector, C64};
use crate::sampling;

/// Norms at or below this are treated as the zero vector.
pub const ZERO_NORM: f64 = 1e-14;
/// Relative cutoff for rank decisions in `span`/`intersect`.
pub const RANK_TOL: f64 = 1e-10;

const CANONICAL_TOL: f64 = 1e-12;

/// A point `[w]` of P^n, stored as its canonical unit representative.
///
/// The representative has Euclidean norm 1 and its first coordinate of
/// largest modulus is real and positive, which removes the scalar ambiguity.
#[derive(Clone, PartialEq)]
pub struct ProjPoint {
    coords: CVector,
}

/// Returns the canonical representative of the class of `raw`.
pub fn canonicalize(raw: &CVector) -> Result<ProjPoint> {
    let norm = vector_norm(raw);
    if !(norm > ZERO_NORM) {
        return Err(Error::ZeroVector { norm });
    }
    // Dividing by the pivot first makes the pivot exactly 1, so rescaled inputs
    // land on the same bits whenever the division is exact.
    let pivot = raw[pivot_index(raw)];
    if pivot.im == 0.0 && pivot.re > 0.0 && (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
        return Ok(ProjPoint { coords: raw.clone() });
    }
    let mut w = raw.map(|z| z / pivot);
    let w_norm = vector_norm(&w);
    w.unscale_mut(w_norm);
    Ok(ProjPoint { coords: w })
}

fn pivot_index(v: &CVector) -> usize {
    let largest = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    v.iter().position(|z| z.norm() >= largest * (1.0 - 1e-12)).unwrap_or(0)
}

impl ProjPoint {
    pub fn new(raw: CVector) -> Result<Self> {
        canonicalize(&raw)
    }

    pub fn from_slice(raw: &[C64]) -> Result<Self> {
        canonicalize(&CVector::from_column_slice(raw))
    }

    pub fn from_real(raw: &[f64]) -> Result<Self> {
        canonicalize(&linalg::real_vector(raw))
    }

    /// The coordinate point `e_index` of P^n.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut v = CVector::zeros(n + 1);
        v[index] = linalg::ONE;
        ProjPoint { coords: v }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        canonicalize(&sampling::sphere_point(rng, n + 1)).expect("sphere points are nonzero")
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// The unit representative in C^{n+1}.
    pub fn lift(&self) -> &CVector {
        &self.coords
    }

    pub fn into_lift(self) -> CVector {
        self.coords
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.ambient_dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.ambient_dim() });
        }
        Ok(())
    }

    /// Fubini-Study distance `arccos(|<p,q>|)`, in radians, range `[0, pi/2]`.
    pub fn fs_distance(&self, other: &ProjPoint) -> Result<f64> {
        other.check_dim(self.ambient_dim())?;
        Ok(fs_distance_vectors(&self.coords, &other.coords))
    }

    /// Distance to a subspace: the angle between the line and its projection.
    pub fn distance_to(&self, subspace: &ProjSubspace) -> Result<f64> {
        subspace.distance_to(self)
    }

    /// True when every coordinate of the canonical form is within `tol` of `other`'s.
    pub fn approx_eq(&self, other: &ProjPoint, tol: f64) -> bool {
        self.fs_distance(other).map(|d| d <= tol).unwrap_or(false)
    }
}

/// Fubini-Study distance between the classes of two nonzero vectors.
///
/// Evaluated as `atan2(|x ^ y|, |<x,y>|)`, which is accurate near zero and,
/// because both terms are computed symmetrically, exactly symmetric.
pub fn fs_distance_vectors(x: &CVector, y: &CVector) -> f64 {
    let inner: C64 = x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum();
    let mut wedge = 0.0;
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            wedge += (x[i] * y[j] - x[j] * y[i]).norm_sqr();
        }
    }
    wedge.sqrt().atan2(inner.norm())
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, z) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, " : ")?;
            }
            write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
        }
        write!(f, "]")
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        codec::encode_vector(&self.coords).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = codec::decode_vector(&Vec::<Pair>::deserialize(d)?);
        if is_canonical(&raw) {
            return Ok(ProjPoint { coords: raw });
        }
        canonicalize(&raw).map_err(serde::de::Error::custom)
    }
}

fn is_canonical(v: &CVector) -> bool {
    if v.is_empty() || (vector_norm(v) - 1.0).abs() > CANONICAL_TOL {
        return false;
    }
    let p = v[pivot_index(v)];
    p.im.abs() <= CANONICAL_TOL && p.re > 0.0
}

/// A projective subspace, stored as an orthonormal basis of its lift.
///
/// `proj_dim` is one less than the number of basis columns.
#[derive(Clone, PartialEq)]
pub struct ProjSubspace {
    basis: CMatrix,
}

impl ProjSubspace {
    /// Subspace spanned by the columns of `m` (any spanning set, orthonormalized).
    pub fn from_columns(m: &CMatrix) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::EmptyInput);
        }
        let basis = linalg::range_basis(m, RANK_TOL);
        if basis.ncols() == 0 {
            return Err(Error::ZeroVector { norm: linalg::frobenius(m) });
        }
        Ok(ProjSubspace { basis })
    }

    pub fn from_point(p: &ProjPoint) -> Self {
        ProjSubspace { basis: CMatrix::from_columns(&[p.lift().clone()]) }
    }

    /// The coordinate subspace spanned by `e_i` for `i` in `indices`.
    pub fn coordinate(n: usize, indices: &[usize]) -> Result<Self> {
        let cols: Vec<CVector> = indices.iter().map(|&i| ProjPoint::basis(n, i).into_lift()).collect();
        if cols.is_empty() {
            return Err(Error::EmptyInput);
        }
        Self::from_columns(&CMatrix::from_columns(&cols))
    }

    /// The whole of P^n.
    pub fn full(n: usize) -> Self {
        ProjSubspace { basis: CMatrix::identity(n + 1, n + 1) }
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows() - 1
    }

    pub fn check_ambient(&self, n: usize) -> Result<()> {
        if self.ambient_dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.ambient_dim() });
        }
        Ok(())
    }

    pub fn proj_dim(&self) -> usize {
        self.basis.ncols() - 1
    }

    pub fn contains(&self, p: &ProjPoint, tol: f64) -> bool {
        self.distance_to(p).map(|d| d <= tol).unwrap_or(false)
    }

    /// Fubini-Study distance from `p` to the nearest point of the subspace.
    pub fn distance_to(&self, p: &ProjPoint) -> Result<f64> {
        p.check_dim(self.ambient_dim())?;
        Ok(distance_vector_to_basis(&self.basis, p.lift()))
    }

    /// Nearest point of the subspace to `p` (`None` if `p` is orthogonal to it).
    pub fn project(&self, p: &ProjPoint) -> Result<Option<ProjPoint>> {
        p.check_dim(self.ambient_dim())?;
        let proj = linalg::project_onto(&self.basis, p.lift());
        Ok(canonicalize(&proj).ok())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ProjPoint {
        let coeffs = sampling::sphere_point(rng, self.basis.ncols());
        canonicalize(&(&self.basis * coeffs)).expect("orthonormal basis image is nonzero")
    }

    /// Same subspace within `tol`, measured by the largest principal angle.
    pub fn approx_eq(&self, other: &ProjSubspace, tol: f64) -> bool {
        self.basis.shape() == other.basis.shape() && self.max_principal_angle(other) <= tol
    }

    /// Largest angle from a unit vector of `other` to `self` (0 when `other` is inside `self`).
    pub fn max_principal_angle(&self, other: &ProjSubspace) -> f64 {
        // The sine of the largest angle is the norm of the part of `other` outside `self`.
        let residual = &other.basis - &self.basis * (self.basis.adjoint() * &other.basis);
        let largest = linalg::full_svd(&residual).singular_values.first().copied().unwrap_or(0.0);
        largest.clamp(0.0, 1.0).asin()
    }

    /// Image under a linear map of the lift.
    pub fn map_by(&self, m: &CMatrix) -> Result<Self> {
        if m.ncols() != self.basis.nrows() {
            return Err(Error::DimensionMismatch { expected: self.basis.nrows(), found: m.ncols() });
        }
        Self::from_columns(&(m * &self.basis))
    }
}

pub(crate) fn distance_vector_to_basis(basis: &CMatrix, v: &CVector) -> f64 {
    let inside = basis.adjoint() * v;
    let along = vector_norm(&inside);
    let off = vector_norm(&(v - basis * inside));
    off.atan2(along)
}

impl fmt::Debug for ProjSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProjSubspace(dim {} in P^{})", self.proj_dim(), self.ambient_dim())
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    proj_dim: usize,
    basis: Vec<Vec<Pair>>,
}

impl Serialize for ProjSubspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceRepr { proj_dim: self.proj_dim(), basis: codec::encode_matrix(&self.basis) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjSubspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SubspaceRepr::deserialize(d)?;
        let m = codec::decode_matrix(&repr.basis).map_err(D::Error::custom)?;
        if m.ncols() != repr.proj_dim + 1 {
            return Err(D::Error::custom("proj_dim does not match the basis column count"));
        }
        let gram = m.adjoint() * &m;
        let orthonormal = linalg::frobenius(&(gram - CMatrix::identity(m.ncols(), m.ncols()))) <= 1e-10;
        let sub = if orthonormal {
            ProjSubspace { basis: m }
        } else {
            ProjSubspace::from_columns(&m).map_err(D::Error::custom)?
        };
        if sub.proj_dim() != repr.proj_dim {
            return Err(D::Error::custom("basis columns are linearly dependent"));
        }
        Ok(sub)
    }
}

/// Anything that can be spanned: points or subspaces.
pub trait Spannable {
    fn lift_columns(&self) -> CMatrix;
    fn ambient(&self) -> usize;
}

impl Spannable for ProjPoint {
    fn lift_columns(&self) -> CMatrix {
        CMatrix::from_columns(std::slice::from_ref(&self.coords))
    }

    fn ambient(&self) -> usize {
        self.ambient_dim()
    }
}

impl Spannable for ProjSubspace {
    fn lift_columns(&self) -> CMatrix {
        self.basis.clone()
    }

    fn ambient(&self) -> usize {
        self.ambient_dim()
    }
}

/// The smallest projective subspace containing every input.
pub fn span<T: Spannable>(items: &[T]) -> Result<ProjSubspace> {
    let first = items.first().ok_or(Error::EmptyInput)?;
    let n = first.ambient();
    let mut columns: Vec<CVector> = Vec::new();
    for item in items {
        if item.ambient() != n {
            return Err(Error::DimensionMismatch { expected: n, found: item.ambient() });
        }
        let m = item.lift_columns();
        columns.extend(m.column_iter().map(|col| col.into_owned()));
    }
    ProjSubspace::from_columns(&CMatrix::from_columns(&columns))
}

/// `[A ∩ B]`, or `None` when the linear intersection is `{0}`.
///
/// Computed as the common kernel of the two orthogonal-complement systems.
/// Whenever `dim a + dim b >= n` the kernel has dimension at least one, so the
/// result is never `None` in that case.
pub fn intersect(a: &ProjSubspace, b: &ProjSubspace) -> Result<Option<ProjSubspace>> {
    let n = a.ambient_dim();
    if b.ambient_dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.ambient_dim() });
    }
    let a_perp = linalg::orthogonal_complement(&a.basis, RANK_TOL);
    let b_perp = linalg::orthogonal_complement(&b.basis, RANK_TOL);
    let rows = a_perp.ncols() + b_perp.ncols();
    if rows == 0 {
        return Ok(Some(ProjSubspace::full(n)));
    }
    let mut system = CMatrix::zeros(rows, n + 1);
    system.view_mut((0, 0), (a_perp.ncols(), n + 1)).copy_from(&a_perp.adjoint());
    system.view_mut((a_perp.ncols(), 0), (b_perp.ncols(), n + 1)).copy_from(&b_perp.adjoint());
    let expected = (a.proj_dim() + b.proj_dim()) as isize - n as isize;
    let kernel = if expected >= 0 {
        // The dimension count guarantees a kernel of at least expected+1 columns;
        // take them by singular value order so a borderline rank call cannot drop it.
        let svd = linalg::full_svd(&system);
        let r = linalg::numerical_rank(&svd.singular_values, RANK_TOL).min(n - expected as usize);
        CMatrix::from_fn(n + 1, n + 1 - r, |i, k| svd.v_t[(r + k, i)].conj())
    } else {
        linalg::null_space(&system, RANK_TOL)
    };
    if kernel.ncols() == 0 {
        return Ok(None);
    }
    Ok(Some(ProjSubspace { basis: kernel }))
}

/// Projective dimension of an optional subspace, with `-1` for the empty set.
pub fn dim_or_empty(s: &Option<ProjSubspace>) -> isize {
    s.as_ref().map_or(-1, |x| x.proj_dim() as isize)
}

/// Point `[v]` from a lift vector, for callers holding raw coordinates.
pub fn point(v: &[C64]) -> Result<ProjPoint> {
    ProjPoint::from_slice(v)
}

pub fn real_point(v: &[f64]) -> ProjPoint {
    ProjPoint::from_real(v).expect("nonzero real point")
}
