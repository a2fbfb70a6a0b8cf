//! Elements of PSL(n+1, C), their action on P^n, and the eigenvalue-modulus
//! decomposition that describes the limit set of a cyclic group.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::codec::{self, Pair};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::projective::{canonicalize, ProjPoint, ProjSubspace};

/// Smallest-to-largest singular value ratio below which a lift is singular.
pub const INVERTIBILITY_TOL: f64 = 1e-12;

/// A projective transformation, stored through a lift with determinant 1.
///
/// Two lifts of the same map differ by an (n+1)-th root of unity; use
/// [`ProjMap::proj_eq`] to compare maps.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjMap {
    lift: CMatrix,
}

impl ProjMap {
    /// Normalizes `lift` to determinant 1 using the principal (n+1)-th root.
    pub fn new(lift: CMatrix) -> Result<Self> {
        let size = linalg::check_square(&lift)?;
        if size < 2 {
            return Err(Error::InvalidInput("a lift must be at least 2x2".into()));
        }
        let condition = linalg::inverse_condition(&lift);
        if !(condition > INVERTIBILITY_TOL) {
            return Err(Error::Singular { condition });
        }
        let det = lift.determinant();
        if (det - linalg::ONE).norm() <= 1e-13 {
            return Ok(ProjMap { lift });
        }
        let root = (det.ln() / c(size as f64, 0.0)).exp();
        Ok(ProjMap { lift: lift / root })
    }

    pub fn identity(n: usize) -> Self {
        ProjMap { lift: CMatrix::identity(n + 1, n + 1) }
    }

    /// Gaussian lift, redrawn until consecutive eigenvalue moduli differ by a
    /// factor greater than `gap`.
    pub fn random_with_gap<R: rand::Rng + ?Sized>(rng: &mut R, n: usize, gap: f64) -> Self {
        loop {
            let lift = crate::sampling::gaussian_matrix(rng, n + 1, n + 1);
            let Ok(eigs) = linalg::eigenvalues(&lift) else { continue };
            let mut moduli: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
            moduli.sort_by(f64::total_cmp);
            if moduli[0] > 0.0 && moduli.windows(2).all(|w| w[1] > gap * w[0]) {
                if let Ok(map) = ProjMap::new(lift) {
                    return map;
                }
            }
        }
    }

    pub fn diagonal(entries: &[C64]) -> Result<Self> {
        Self::new(linalg::diagonal(entries))
    }

    pub fn real_diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(linalg::real_diagonal(entries))
    }

    pub fn lift(&self) -> &CMatrix {
        &self.lift
    }

    pub fn ambient_dim(&self) -> usize {
        self.lift.nrows() - 1
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.ambient_dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.ambient_dim() });
        }
        Ok(())
    }

    /// `g([w]) = [g~ w]`.
    pub fn apply(&self, p: &ProjPoint) -> Result<ProjPoint> {
        p.check_dim(self.ambient_dim())?;
        canonicalize(&(&self.lift * p.lift()))
    }

    pub fn apply_lift(&self, v: &CVector) -> CVector {
        &self.lift * v
    }

    pub fn inverse(&self) -> ProjMap {
        let inv = self.lift.clone().try_inverse().expect("lift is invertible by construction");
        ProjMap { lift: inv }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ProjMap) -> Result<ProjMap> {
        other.check_dim(self.ambient_dim())?;
        Ok(ProjMap { lift: &self.lift * &other.lift })
    }

    /// `self^m` for any integer `m`.
    pub fn pow(&self, m: i64) -> ProjMap {
        let base = if m < 0 { self.inverse() } else { self.clone() };
        ProjMap { lift: linalg::matrix_power(&base.lift, m.unsigned_abs()) }
    }

    /// `h ∘ self ∘ h^{-1}`.
    pub fn conjugate_by(&self, h: &ProjMap) -> Result<ProjMap> {
        h.compose(self)?.compose(&h.inverse())
    }

    /// Equality in PSL: lifts agree up to a scalar within relative `tol`.
    pub fn proj_eq(&self, other: &ProjMap, tol: f64) -> bool {
        self.lift.shape() == other.lift.shape() && linalg::projective_matrix_distance(&self.lift, &other.lift) <= tol
    }

    pub fn is_projective_identity(&self, tol: f64) -> bool {
        let n = self.lift.nrows();
        linalg::projective_matrix_distance(&CMatrix::identity(n, n), &self.lift) <= tol
    }

    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        linalg::eigenvalues(&self.lift)
    }

    /// Smallest `m <= cap` with `g^m = id` in PSL, if any.
    pub fn finite_order(&self, tol: &Tolerances) -> Option<u32> {
        let n = self.lift.nrows();
        let mut power = CMatrix::identity(n, n);
        for m in 1..=tol.finite_order_cap {
            power = &power * &self.lift;
            let norm = linalg::frobenius(&power);
            power /= c(norm, 0.0);
            if linalg::projective_matrix_distance(&CMatrix::identity(n, n), &power) <= tol.finite_order {
                return Some(m);
            }
        }
        None
    }

    pub fn modulus_decomposition(&self) -> Result<ModulusDecomposition> {
        self.modulus_decomposition_with(&Tolerances::default())
    }

    /// Splits the lift by eigenvalue modulus.
    ///
    /// Eigenvalues that agree within `eigen_merge` are first replaced by their
    /// mean (a perturbed multiple eigenvalue scatters, but its mean stays
    /// accurate). The resulting moduli are sorted and cut wherever consecutive
    /// ratios exceed `1 + cluster_gap`.
    pub fn modulus_decomposition_with(&self, tol: &Tolerances) -> Result<ModulusDecomposition> {
        let size = self.lift.nrows();
        let eigs = self.eigenvalues()?;
        let mut groups = linalg::group_eigenvalues(&eigs, tol.eigen_merge);
        groups.sort_by(|a, b| a.value.norm().total_cmp(&b.value.norm()));

        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut last_modulus = f64::NAN;
        for (g, group) in groups.iter().enumerate() {
            let modulus = group.value.norm();
            if !(modulus > 0.0) {
                return Err(Error::Singular { condition: 0.0 });
            }
            if classes.is_empty() || modulus > last_modulus * (1.0 + tol.cluster_gap) {
                classes.push(Vec::new());
            }
            classes.last_mut().expect("pushed above").push(g);
            last_modulus = modulus;
        }

        let mut parts = Vec::with_capacity(classes.len());
        for class in &classes {
            let mut inside = vec![false; eigs.len()];
            let mut class_eigs = Vec::new();
            for &g in class {
                for &i in &groups[g].members {
                    inside[i] = true;
                    class_eigs.push(groups[g].value);
                }
            }
            let (basis, separation) = linalg::invariant_subspace(&self.lift, &eigs, &inside);
            if separation <= tol.rank {
                return Err(Error::IllConditioned(format!(
                    "invariant subspace of dimension {} is not separated (ratio {separation:e})",
                    class_eigs.len()
                )));
            }
            let restricted = basis.adjoint() * &self.lift * &basis;
            let modulus = restricted.determinant().norm().powf(1.0 / restricted.nrows() as f64);
            let deviation = class_eigs.iter().map(|z| (z.norm() / modulus - 1.0).abs()).fold(0.0, f64::max);
            if deviation > tol.unit_modulus.max(tol.cluster_gap * class_eigs.len() as f64) {
                return Err(Error::IllConditioned(format!(
                    "modulus class around {modulus} spreads by {deviation:e}; classes cannot be separated"
                )));
            }
            parts.push(ModulusPart {
                modulus,
                basis,
                unit_part: restricted / c(modulus, 0.0),
                eigenvalues: class_eigs,
            });
        }

        let decomposition = ModulusDecomposition { size, parts };
        let err = decomposition.reassembly_error(&self.lift)?;
        if err > tol.reassembly {
            return Err(Error::IllConditioned(format!("decomposition reassembles with relative error {err:e}")));
        }
        Ok(decomposition)
    }

    pub fn level_set(&self, r: f64) -> Result<Option<ProjSubspace>> {
        self.level_set_with(r, &Tolerances::default())
    }

    /// `L_r(g)`: the projectivized span of eigenvectors with eigenvalue modulus `r`.
    pub fn level_set_with(&self, r: f64, tol: &Tolerances) -> Result<Option<ProjSubspace>> {
        let d = self.modulus_decomposition_with(tol)?;
        d.parts.iter().find(|p| (p.modulus - r).abs() <= tol.cluster_gap * r).map(|p| p.level_set(tol)).transpose()
    }

    pub fn limit_set(&self) -> Result<Vec<LevelSet>> {
        self.limit_set_with(&Tolerances::default())
    }

    /// `L(g) = ⋃_r L_r(g)`, one entry per modulus class (ascending modulus).
    pub fn limit_set_with(&self, tol: &Tolerances) -> Result<Vec<LevelSet>> {
        let d = self.modulus_decomposition_with(tol)?;
        if d.parts.len() == 1 {
            if let Some(order) = self.finite_order(tol) {
                return Err(Error::FiniteOrder { order });
            }
        }
        d.parts.iter().map(|p| Ok(LevelSet { modulus: p.modulus, subspace: p.level_set(tol)? })).collect()
    }
}

impl Serialize for ProjMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapRepr { n: self.ambient_dim(), lift: codec::encode_matrix(&self.lift) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = MapRepr::deserialize(d)?;
        let lift = codec::decode_matrix(&repr.lift).map_err(D::Error::custom)?;
        let map = ProjMap::new(lift).map_err(D::Error::custom)?;
        if map.ambient_dim() != repr.n {
            return Err(D::Error::custom(format!("n = {} but lift is {}x{}", repr.n, repr.n + 1, repr.n + 1)));
        }
        Ok(map)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapRepr {
    n: usize,
    lift: Vec<Vec<Pair>>,
}

/// One modulus class `(r_i, V_i, gamma_i)` of a decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusPart {
    pub modulus: f64,
    /// Orthonormal columns spanning the invariant subspace `V_i` of C^{n+1}.
    #[serde(with = "codec::matrix")]
    pub basis: CMatrix,
    /// `gamma_i` in the coordinates of `basis`; its spectrum lies on the unit circle.
    #[serde(with = "codec::matrix")]
    pub unit_part: CMatrix,
    /// Eigenvalues of the lift in this class, with multiplicity.
    #[serde(serialize_with = "serialize_scalars", deserialize_with = "deserialize_scalars")]
    pub eigenvalues: Vec<C64>,
}

impl ModulusPart {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthonormal basis of `Eve(gamma_i)` carried into C^{n+1}.
    pub fn eigenvector_basis(&self, tol: &Tolerances) -> Result<CMatrix> {
        let local = linalg::eigenvector_span_basis(&self.unit_part, tol.rank, tol.eigen_merge)?;
        Ok(&self.basis * local)
    }

    pub fn level_set(&self, tol: &Tolerances) -> Result<ProjSubspace> {
        ProjSubspace::from_columns(&self.eigenvector_basis(tol)?)
    }

    /// Largest deviation of an eigenvalue of `unit_part` from the unit circle.
    pub fn unit_deviation(&self) -> Result<f64> {
        Ok(linalg::eigenvalues(&self.unit_part)?.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max))
    }
}

fn serialize_scalars<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|&z| codec::encode_scalar(z)).collect::<Vec<_>>().serialize(s)
}

fn deserialize_scalars<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<C64>, D::Error> {
    Ok(Vec::<Pair>::deserialize(d)?.into_iter().map(codec::decode_scalar).collect())
}

/// The tuple `(k, {V_i}, {gamma_i}, {r_i})` with `⊕ r_i gamma_i = g~` and
/// `r_1 < r_2 < ... < r_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusDecomposition {
    pub size: usize,
    pub parts: Vec<ModulusPart>,
}

impl ModulusDecomposition {
    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.parts.iter().map(|p| p.modulus).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(ModulusPart::dim).collect()
    }

    /// `[V_1 | V_2 | ... | V_k]`.
    pub fn change_of_basis(&self) -> CMatrix {
        let cols: Vec<CVector> = self
            .parts
            .iter()
            .flat_map(|p| p.basis.column_iter().map(|col| col.into_owned()).collect::<Vec<_>>())
            .collect();
        CMatrix::from_columns(&cols)
    }

    /// `⊕ r_i gamma_i` expressed in the standard basis.
    pub fn reassemble(&self) -> Result<CMatrix> {
        let s = self.change_of_basis();
        let blocks: Vec<CMatrix> = self.parts.iter().map(|p| &p.unit_part * c(p.modulus, 0.0)).collect();
        let inv = s.clone().try_inverse().ok_or(Error::Singular { condition: 0.0 })?;
        Ok(&s * linalg::block_diagonal(&blocks) * inv)
    }

    pub fn reassembly_error(&self, lift: &CMatrix) -> Result<f64> {
        let r = self.reassemble()?;
        Ok(linalg::frobenius(&(r - lift)) / linalg::frobenius(lift))
    }

    /// Splits `v = Σ v_i` with `v_i ∈ V_i`; returns the coordinates of each
    /// `v_i` in the basis of its part.
    pub fn split(&self, v: &CVector) -> Result<Vec<CVector>> {
        if v.len() != self.size {
            return Err(Error::DimensionMismatch { expected: self.size, found: v.len() });
        }
        let s = self.change_of_basis();
        let coeffs = s.lu().solve(v).ok_or(Error::Singular { condition: 0.0 })?;
        let mut out = Vec::with_capacity(self.parts.len());
        let mut at = 0;
        for p in &self.parts {
            out.push(coeffs.rows(at, p.dim()).into_owned());
            at += p.dim();
        }
        Ok(out)
    }

    /// Index of the first class at which the cumulative dimension reaches `target`.
    pub fn cumulative_index(&self, target: usize) -> Option<usize> {
        let mut total = 0;
        self.parts.iter().position(|p| {
            total += p.dim();
            total >= target
        })
    }

    /// Orthonormal basis of `⊕_{i in range} V_i`.
    pub fn direct_sum_basis(&self, range: std::ops::Range<usize>) -> CMatrix {
        let cols: Vec<CVector> = self.parts[range]
            .iter()
            .flat_map(|p| p.basis.column_iter().map(|col| col.into_owned()).collect::<Vec<_>>())
            .collect();
        if cols.is_empty() {
            return CMatrix::zeros(self.size, 0);
        }
        linalg::range_basis(&CMatrix::from_columns(&cols), 1e-10)
    }
}

/// `L_r(g)` together with its modulus `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSet {
    pub modulus: f64,
    pub subspace: ProjSubspace,
}

/// Distance from `p` to the union of level sets.
pub fn distance_to_union(sets: &[LevelSet], p: &ProjPoint) -> Result<f64> {
    let mut best = f64::INFINITY;
    for s in sets {
        best = best.min(s.subspace.distance_to(p)?);
    }
    Ok(best)
}

/// Orthonormal basis of the span of proper eigenvectors of `t` (`Eve(t)`).
pub fn eigenvector_span(t: &CMatrix) -> Result<CMatrix> {
    eigenvector_span_with(t, &Tolerances::default())
}

pub fn eigenvector_span_with(t: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    linalg::check_square(t)?;
    let condition = linalg::inverse_condition(t);
    if !(condition > INVERTIBILITY_TOL) {
        return Err(Error::Singular { condition });
    }
    linalg::eigenvector_span_basis(t, tol.rank, tol.eigen_merge)
}
