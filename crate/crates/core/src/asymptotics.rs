//! Binomial-normalized iteration of linear maps: the k-index, decay tables,
//! normalized projective orbits and counted-hits cluster detection.

use serde::{Deserialize, Serialize};

use crate::codec;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::projective::{canonicalize, fs_distance_vectors, ProjPoint};
use crate::psl::{ModulusDecomposition, ProjMap, INVERTIBILITY_TOL};

/// Step at which the k-index witness and the k±1 checks are evaluated.
pub const WITNESS_STEP: u64 = 10_000_000;

/// `C(m, l)` as a real number; zero when `l > m`.
pub fn binom(m: u64, l: u64) -> f64 {
    if l > m {
        return 0.0;
    }
    let l = l.min(m - l);
    let mut exact: u128 = 1;
    for i in 1..=l {
        match exact.checked_mul((m - l + i) as u128) {
            Some(next) => exact = next / i as u128,
            None => {
                let mut acc = exact as f64;
                for j in i..=l {
                    acc *= (m - l + j) as f64 / j as f64;
                }
                return acc;
            }
        }
    }
    exact as f64
}

/// `J^m` for the `size`-dimensional Jordan block at `lambda`, from the closed
/// form `[J^m]_{i,i+d} = C(m, d) lambda^{m-d}`.
pub fn jordan_power(lambda: C64, size: usize, m: u64) -> CMatrix {
    CMatrix::from_fn(size, size, |i, j| {
        if j < i || (j - i) as u64 > m {
            return linalg::ZERO;
        }
        let d = (j - i) as u64;
        let power = m - d;
        let lp = if power <= i32::MAX as u64 { lambda.powi(power as i32) } else { lambda.powf(power as f64) };
        lp * binom(m, d)
    })
}

/// Outcome of [`k_index`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KIndexReport {
    pub k: usize,
    /// `C(M, k)^{-1} t^M v` at `M = step`.
    #[serde(with = "codec::vector")]
    pub witness_limit: CVector,
    /// Relative distance of `witness_limit` from the eigenvector span of `t`.
    pub residual: f64,
    pub step: u64,
    /// Size of the largest Jordan block of `t`.
    pub max_block: usize,
}

pub fn k_index(v: &CVector, t: &CMatrix) -> Result<KIndexReport> {
    k_index_with(v, t, &Tolerances::default())
}

/// The exponent `k` for which `C(m, k)^{-1} t^m v` subconverges to a nonzero
/// eigenvector of a unit-spectrum map `t`.
///
/// `v` is split over the generalized eigenspaces of `t`; each component has a
/// height `p` (least `p` with the component in `ker (t - λ)^p`), and
/// `k = max p - 1`.
pub fn k_index_with(v: &CVector, t: &CMatrix, tol: &Tolerances) -> Result<KIndexReport> {
    let size = linalg::check_square(t)?;
    if v.len() != size {
        return Err(Error::DimensionMismatch { expected: size, found: v.len() });
    }
    let v_norm = linalg::vector_norm(v);
    if !(v_norm > crate::projective::ZERO_NORM) {
        return Err(Error::ZeroVector { norm: v_norm });
    }
    let condition = linalg::inverse_condition(t);
    if !(condition > INVERTIBILITY_TOL) {
        return Err(Error::Singular { condition });
    }
    let eigs = linalg::eigenvalues(t)?;
    let groups = linalg::group_eigenvalues(&eigs, tol.eigen_merge);
    let deviation = groups.iter().map(|g| (g.value.norm() - 1.0).abs()).fold(0.0, f64::max);
    if deviation > tol.unit_modulus {
        return Err(Error::NonUnitarySpectrum { deviation });
    }

    let heights = generalized_heights(v, t, &eigs, &groups, tol)?;
    let k = heights.iter().map(|h| h.height).max().unwrap_or(1).saturating_sub(1);
    let max_block = heights.iter().map(|h| h.max_block).max().unwrap_or(1);

    let step = WITNESS_STEP;
    let witness = normalized_power(t, v, k as u64, step);
    let span = linalg::eigenvector_span_basis(t, tol.rank, tol.eigen_merge)?;
    let residual = linalg::residual_from_span(&span, &witness) / linalg::vector_norm(&witness);
    Ok(KIndexReport { k, witness_limit: witness, residual, step, max_block })
}

struct Height {
    height: usize,
    max_block: usize,
}

fn generalized_heights(
    v: &CVector,
    t: &CMatrix,
    eigs: &[C64],
    groups: &[linalg::EigenGroup],
    tol: &Tolerances,
) -> Result<Vec<Height>> {
    let size = t.nrows();
    let mut bases = Vec::with_capacity(groups.len());
    for g in groups {
        let mut inside = vec![false; size];
        for &i in &g.members {
            inside[i] = true;
        }
        let (basis, separation) = linalg::invariant_subspace(t, eigs, &inside);
        if separation <= tol.rank {
            return Err(Error::IllConditioned("generalized eigenspaces are not separated".into()));
        }
        bases.push(basis);
    }
    let cols: Vec<CVector> =
        bases.iter().flat_map(|b| b.column_iter().map(|col| col.into_owned()).collect::<Vec<_>>()).collect();
    let change = CMatrix::from_columns(&cols);
    let coeffs = change.lu().solve(v).ok_or(Error::Singular { condition: 0.0 })?;
    let v_norm = linalg::vector_norm(v);

    let mut out = Vec::with_capacity(groups.len());
    let mut at = 0;
    for (g, basis) in groups.iter().zip(&bases) {
        let d = basis.ncols();
        let local: CVector = coeffs.rows(at, d).into_owned();
        at += d;
        let shifted = basis.adjoint() * t * basis - CMatrix::identity(d, d) * g.value;
        // Filtration ranks of the nilpotent part give the largest block.
        let mut power = CMatrix::identity(d, d);
        let mut max_block = d;
        let mut height = 0;
        let component_norm = linalg::vector_norm(&local);
        let is_zero = component_norm <= tol.rank * v_norm;
        for p in 1..=d {
            power = &power * &shifted;
            let scale = linalg::frobenius(&shifted).max(1.0).powi(p as i32);
            let null_rank = d - rank_against_scale(&power, scale, tol.rank);
            if null_rank == d && max_block == d {
                max_block = p;
            }
            if height == 0
                && !is_zero
                && linalg::vector_norm(&(&power * &local)) <= tol.rank.sqrt() * scale * component_norm
            {
                height = p;
            }
        }
        if !is_zero && height == 0 {
            height = d;
        }
        out.push(Height { height, max_block });
    }
    Ok(out)
}

fn rank_against_scale(m: &CMatrix, scale: f64, rel_tol: f64) -> usize {
    let svd = linalg::full_svd(m);
    svd.singular_values.iter().filter(|&&s| s > rel_tol.sqrt() * scale).count()
}

/// `C(m, k)^{-1} t^m v`, computed by repeated squaring.
pub fn normalized_power(t: &CMatrix, v: &CVector, k: u64, m: u64) -> CVector {
    let mut w = linalg::matrix_power(t, m) * v;
    let b = binom(m, k);
    if b > 0.0 {
        w.unscale_mut(b);
    }
    w
}

/// Norms of `C(m, k')^{-1} t^m v` for `k' = k - 1` and `k' = k + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniquenessCheck {
    pub k: usize,
    pub step: u64,
    pub below: Option<f64>,
    pub above: f64,
    pub diverges_below: bool,
    pub vanishes_above: bool,
}

impl UniquenessCheck {
    pub fn passed(&self) -> bool {
        self.diverges_below && self.vanishes_above
    }
}

/// Checks that no exponent other than `k` normalizes the iterates: with
/// `k - 1` they diverge past `divergence`, with `k + 1` they fall under `vanishing`.
pub fn uniqueness_check(v: &CVector, t: &CMatrix, k: usize, step: u64, tol: &Tolerances) -> UniquenessCheck {
    let raw = linalg::matrix_power(t, step) * v;
    let norm = linalg::vector_norm(&raw);
    let below = (k > 0).then(|| norm / binom(step, k as u64 - 1));
    let above = norm / binom(step, k as u64 + 1);
    UniquenessCheck {
        k,
        step,
        below,
        above,
        diverges_below: below.is_none_or(|b| b > tol.divergence),
        vanishes_above: above < tol.vanishing,
    }
}

/// `C(m, k)^{-1} t^m v` for `m = k..=m_max`, via `w_m = t w_{m-1} (m - k) / m`.
pub fn normalized_iterates(t: &CMatrix, v: &CVector, k: usize, m_max: u64) -> Vec<(u64, CVector)> {
    let k64 = k as u64;
    if m_max < k64 {
        return Vec::new();
    }
    let mut w = linalg::matrix_power(t, k64) * v;
    let mut out = vec![(k64, w.clone())];
    for m in (k64 + 1)..=m_max {
        w = (t * &w) * c((m - k64) as f64 / m as f64, 0.0);
        out.push((m, w.clone()));
    }
    out
}

/// One row of a decay table or orbit diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceRow {
    pub m: u64,
    pub norm: f64,
    pub distance_to_span: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayTable {
    pub rows: Vec<SequenceRow>,
    /// First `m` from which the norms never increase.
    pub burn_in: u64,
    /// First `m` at or after `burn_in` whose norm is below the decay threshold.
    pub first_below: Option<u64>,
}

impl DecayTable {
    pub fn final_norm(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.norm)
    }
}

pub fn verify_decay(t: &CMatrix, lam: C64, l: u64, v: &CVector, m_max: u64) -> Result<DecayTable> {
    verify_decay_with(t, lam, l, v, m_max, &Tolerances::default())
}

/// `||lam^{-m} C(m, l) t^m v||` for `m = 1..=m_max`, requiring the spectral
/// radius of `t` to be below `|lam|`.
pub fn verify_decay_with(
    t: &CMatrix,
    lam: C64,
    l: u64,
    v: &CVector,
    m_max: u64,
    tol: &Tolerances,
) -> Result<DecayTable> {
    let size = linalg::check_square(t)?;
    if v.len() != size {
        return Err(Error::DimensionMismatch { expected: size, found: v.len() });
    }
    let radius = linalg::eigenvalues(t)?.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bound = lam.norm() * (1.0 - tol.boundary);
    if !(radius < bound) {
        return Err(Error::SpectralRadiusViolation { radius, bound });
    }
    let span = linalg::eigenvector_span_basis(t, tol.rank, tol.eigen_merge)?;
    let mut u = v.clone();
    let mut rows = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        u = (t * &u) / lam;
        let u_norm = linalg::vector_norm(&u);
        let distance = if u_norm > 0.0 { linalg::residual_from_span(&span, &u) / u_norm } else { 0.0 };
        rows.push(SequenceRow { m, norm: binom(m, l) * u_norm, distance_to_span: distance });
    }
    let mut burn_in = m_max.max(1);
    for i in (1..rows.len()).rev() {
        if rows[i].norm > rows[i - 1].norm {
            break;
        }
        burn_in = rows[i - 1].m;
    }
    let first_below = rows.iter().find(|r| r.m >= burn_in && r.norm < tol.decay).map(|r| r.m);
    Ok(DecayTable { rows, burn_in, first_below })
}

/// Forward orbit of a point under `g` with the binomial normalization of the
/// dominant modulus class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedOrbit {
    /// 1-based index (ascending modulus) of the largest class meeting the start.
    pub dominant_class: usize,
    pub modulus: f64,
    pub k: usize,
    /// `[g^m p]` for `m = 0..=m_max`.
    pub points: Vec<ProjPoint>,
    /// Normalized lift norms and the distance of `[g^m p]` from `L_r` of the dominant class.
    pub rows: Vec<SequenceRow>,
    pub final_distance: f64,
}

pub fn normalized_orbit(g: &ProjMap, p: &ProjPoint, m_max: u64) -> Result<NormalizedOrbit> {
    normalized_orbit_with(g, p, m_max, &Tolerances::default())
}

/// Iterates `g` on `p` inside the modulus decomposition.
///
/// Components of `p` in classes above the dominant one are below the rank
/// tolerance and are dropped, so the orbit stays in `⊕_{j ≤ j0} V_j`.
pub fn normalized_orbit_with(g: &ProjMap, p: &ProjPoint, m_max: u64, tol: &Tolerances) -> Result<NormalizedOrbit> {
    p.check_dim(g.ambient_dim())?;
    let d = g.modulus_decomposition_with(tol)?;
    normalized_orbit_in(&d, p, m_max, tol)
}

pub fn normalized_orbit_in(
    d: &ModulusDecomposition,
    p: &ProjPoint,
    m_max: u64,
    tol: &Tolerances,
) -> Result<NormalizedOrbit> {
    let comps = d.split(p.lift())?;
    let threshold = tol.rank * linalg::vector_norm(p.lift());
    let j0 = comps
        .iter()
        .rposition(|cj| linalg::vector_norm(cj) > threshold)
        .ok_or(Error::ZeroVector { norm: linalg::vector_norm(p.lift()) })?;
    let top = &d.parts[j0];
    let k = k_index_with(&comps[j0], &top.unit_part, tol)?.k;
    let level = top.level_set(tol)?;

    // Per-class steps, each scaled by r_j / r_{j0} <= 1.
    let steps: Vec<CMatrix> =
        d.parts[..=j0].iter().map(|part| &part.unit_part * c(part.modulus / top.modulus, 0.0)).collect();
    let mut coords: Vec<CVector> = comps[..=j0].to_vec();
    let assemble = |coords: &[CVector]| -> CVector {
        let mut x = CVector::zeros(d.size);
        for (part, cj) in d.parts.iter().zip(coords) {
            x += &part.basis * cj;
        }
        x
    };

    let mut points = Vec::with_capacity(m_max as usize + 1);
    let mut rows = Vec::with_capacity(m_max as usize + 1);
    let mut x = assemble(&coords);
    for m in 0..=m_max {
        if m > 0 {
            for (cj, step) in coords.iter_mut().zip(&steps) {
                *cj = step * &*cj;
            }
            x = assemble(&coords);
        }
        let point = canonicalize(&x)?;
        let b = binom(m, k as u64);
        let norm = if b > 0.0 { linalg::vector_norm(&x) / b } else { linalg::vector_norm(&x) };
        let distance = level.distance_to(&point)?;
        rows.push(SequenceRow { m, norm, distance_to_span: distance });
        points.push(point);
    }
    let final_distance = rows.last().map_or(f64::NAN, |r| r.distance_to_span);
    Ok(NormalizedOrbit { dominant_class: j0 + 1, modulus: top.modulus, k, points, rows, final_distance })
}

/// Orbit `[g^m p]` for `m = -steps..=steps`, both halves computed stably
/// inside the respective modulus decompositions.
pub fn two_sided_orbit(g: &ProjMap, p: &ProjPoint, steps: u64, tol: &Tolerances) -> Result<Vec<(i64, ProjPoint)>> {
    let forward = normalized_orbit_with(g, p, steps, tol)?;
    let backward = normalized_orbit_with(&g.inverse(), p, steps, tol)?;
    let mut out: Vec<(i64, ProjPoint)> =
        backward.points.into_iter().enumerate().skip(1).map(|(m, q)| (-(m as i64), q)).collect();
    out.reverse();
    out.extend(forward.points.into_iter().enumerate().map(|(m, q)| (m as i64, q)));
    Ok(out)
}

/// Points `q` of `tail` with at least `min_hits` members of `tail` within
/// `radius` of `q`. Representatives are pairwise more than `radius` apart.
pub fn cluster_points(tail: &[ProjPoint], radius: f64, min_hits: usize) -> Vec<ProjPoint> {
    let mut reps: Vec<ProjPoint> = Vec::new();
    for q in tail {
        if reps.iter().any(|r| fs_distance_vectors(r.lift(), q.lift()) <= radius) {
            continue;
        }
        let hits = tail.iter().filter(|x| fs_distance_vectors(x.lift(), q.lift()) <= radius).count();
        if hits >= min_hits {
            reps.push(q.clone());
        }
    }
    reps
}

/// Cluster points of one orbit tail and their distance from `L(g)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitClusters {
    pub start: ProjPoint,
    /// `+1` for the forward tail, `-1` for the backward one.
    pub direction: i8,
    pub clusters: Vec<ProjPoint>,
    pub max_distance: f64,
}

/// Whether some orbit accumulates on `L_r` for one modulus class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassWitness {
    /// 1-based class index, ascending modulus.
    pub class: usize,
    pub modulus: f64,
    pub start: ProjPoint,
    /// Distance from the nearest cluster point to `L_r`; absent when the
    /// orbit has no cluster point.
    pub distance: Option<f64>,
    pub hit: bool,
}

/// Comparison of orbit accumulation with the limit set computed from the
/// modulus decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSetOracle {
    pub steps: u64,
    pub tails: Vec<OrbitClusters>,
    pub classes: Vec<ClassWitness>,
    /// Largest distance from a cluster point to `L(g)`.
    pub max_distance: f64,
}

impl LimitSetOracle {
    pub fn passed(&self, radius: f64) -> bool {
        self.max_distance <= radius && self.classes.iter().all(|c| c.hit)
    }
}

/// Clusters the last halves of the two-sided orbits of `starts` random
/// points, and for each class `i` follows a start drawn from
/// `V_1 ⊕ ... ⊕ V_i`, whose forward orbit accumulates on `L_{r_i}`.
pub fn limit_set_oracle(g: &ProjMap, starts: usize, steps: u64, seed: u64, tol: &Tolerances) -> Result<LimitSetOracle> {
    let sets = g.limit_set_with(tol)?;
    let d = g.modulus_decomposition_with(tol)?;
    let mut rng = crate::sampling::seeded_rng(seed);
    let n = g.ambient_dim();
    let burn_in = (steps / 2) as i64;

    let mut tails = Vec::new();
    for _ in 0..starts {
        let p = ProjPoint::random(&mut rng, n);
        let orbit = two_sided_orbit(g, &p, steps, tol)?;
        for direction in [1i8, -1] {
            let tail: Vec<ProjPoint> = orbit
                .iter()
                .filter(|(m, _)| m.signum() == direction as i64 && m.abs() >= burn_in)
                .map(|(_, q)| q.clone())
                .collect();
            let clusters = cluster_points(&tail, tol.cluster_radius, tol.cluster_hits);
            let mut max_distance: f64 = 0.0;
            for q in &clusters {
                max_distance = max_distance.max(crate::psl::distance_to_union(&sets, q)?);
            }
            tails.push(OrbitClusters { start: p.clone(), direction, clusters, max_distance });
        }
    }

    let mut classes = Vec::with_capacity(d.k());
    for (i, part) in d.parts.iter().enumerate() {
        let basis = d.direct_sum_basis(0..i + 1);
        let start = canonicalize(&(&basis * crate::sampling::sphere_point(&mut rng, basis.ncols())))?;
        let orbit = normalized_orbit_in(&d, &start, steps, tol)?;
        let level = part.level_set(tol)?;
        let clusters = cluster_points(&orbit.points[steps as usize / 2..], tol.cluster_radius, tol.cluster_hits);
        let mut distance: Option<f64> = None;
        for q in &clusters {
            let d = level.distance_to(q)?;
            distance = Some(distance.map_or(d, |best| best.min(d)));
        }
        let hit = distance.is_some_and(|d| d <= 1e-4);
        classes.push(ClassWitness { class: i + 1, modulus: part.modulus, start, distance, hit });
    }
    let max_distance = tails.iter().map(|t| t.max_distance).fold(0.0, f64::max);
    Ok(LimitSetOracle { steps, tails, classes, max_distance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{block_diagonal, jordan_block, real_diagonal, real_vector};
    use crate::projective::real_point;

    #[test]
    fn binom_examples() {
        assert_eq!(binom(5, 2), 10.0);
        assert_eq!(binom(17, 0), 1.0);
        assert_eq!(binom(3, 5), 0.0);
        assert!((binom(100, 1) / binom(100, 2) - 100.0 / 4950.0).abs() < 1e-15);
        assert_eq!(binom(60, 30), 118264581564861424.0);
        assert!(binom(1_000_000, 3).is_finite());
    }

    #[test]
    fn jordan_power_matches_direct_power() {
        let lambda = c(0.6, 0.8);
        for size in 2..=6 {
            let j = jordan_block(lambda, size);
            for m in [0u64, 1, 7, 50, 200] {
                let direct = linalg::matrix_power(&j, m);
                let closed = jordan_power(lambda, size, m);
                let err = linalg::frobenius(&(&direct - &closed)) / linalg::frobenius(&closed);
                assert!(err < 1e-10, "size {size} m {m}: {err:e}");
            }
        }
    }

    #[test]
    fn k_index_examples() {
        let j = jordan_block(linalg::ONE, 3);
        assert_eq!(k_index(&real_vector(&[1.0, 0.0, 0.0]), &j).unwrap().k, 0);
        let r = k_index(&real_vector(&[1.0, 0.0, 1.0]), &j).unwrap();
        assert_eq!(r.k, 2);
        assert_eq!(r.max_block, 3);
        // Oracle: C(M,2)^{-1} J^M e3 -> e1.
        assert!((r.witness_limit[0] - linalg::ONE).norm() < 1e-6);
        assert!(r.residual < 1e-6);
        let u = linalg::diagonal(&[c(0.6, 0.8), c(0.0, 1.0), c(-1.0, 0.0)]);
        assert_eq!(k_index(&real_vector(&[0.3, -2.0, 1.0]), &u).unwrap().k, 0);
    }

    #[test]
    fn k_index_rejects_bad_input() {
        let j = jordan_block(linalg::ONE, 2);
        assert!(matches!(k_index(&real_vector(&[0.0, 0.0]), &j), Err(Error::ZeroVector { .. })));
        assert!(matches!(
            k_index(&real_vector(&[1.0, 1.0]), &real_diagonal(&[2.0, 1.0])),
            Err(Error::NonUnitarySpectrum { .. })
        ));
    }

    #[test]
    fn k_index_mixed_blocks() {
        let t = block_diagonal(&[jordan_block(linalg::ONE, 2), jordan_block(c(0.0, 1.0), 3)]);
        let v = real_vector(&[0.0, 1.0, 1.0, 0.0, 0.0]);
        assert_eq!(k_index(&v, &t).unwrap().k, 1);
        let v = real_vector(&[0.0, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(k_index(&v, &t).unwrap().k, 1);
        let v = real_vector(&[1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(k_index(&v, &t).unwrap().k, 2);
    }

    #[test]
    fn uniqueness_at_neighbours() {
        let j = jordan_block(linalg::ONE, 4);
        let v = real_vector(&[0.0, 0.0, 1.0, 0.0]);
        let k = k_index(&v, &j).unwrap().k;
        assert_eq!(k, 2);
        assert!(uniqueness_check(&v, &j, k, WITNESS_STEP, &Tolerances::default()).passed());
    }

    #[test]
    fn decay_examples() {
        let t = real_diagonal(&[0.5, 0.5, 0.5]);
        let table = verify_decay(&t, linalg::ONE, 0, &real_vector(&[1.0, 0.0, 0.0]), 40).unwrap();
        assert_eq!(table.first_below, Some(27));
        assert!((table.rows[9].norm - 2f64.powi(-10)).abs() < 1e-18);
        assert_eq!(table.burn_in, 1);

        let t = jordan_block(c(0.5, 0.0), 2);
        let table = verify_decay(&t, linalg::ONE, 1, &real_vector(&[0.0, 1.0]), 200).unwrap();
        assert!(table.first_below.is_some());
        // Oracle: ||J^m e2|| with J^m e2 = (m 2^{1-m}, 2^{-m}).
        let m = 30.0f64;
        let oracle = m * (m * 2f64.powf(1.0 - m)).hypot(2f64.powf(-m));
        assert!((table.rows[29].norm - oracle).abs() < 1e-12 * oracle);

        let table = verify_decay(&CMatrix::zeros(3, 3), linalg::ONE, 2, &real_vector(&[1.0, 1.0, 1.0]), 5).unwrap();
        assert!(table.rows.iter().all(|r| r.norm == 0.0));

        assert!(matches!(
            verify_decay(&real_diagonal(&[1.0, 0.5]), linalg::ONE, 0, &real_vector(&[1.0, 0.0]), 5),
            Err(Error::SpectralRadiusViolation { .. })
        ));
    }

    #[test]
    fn normalized_orbit_examples() {
        let g = ProjMap::real_diagonal(&[2.0, 1.0]).unwrap();
        let o = normalized_orbit(&g, &real_point(&[0.0, 1.0]), 10).unwrap();
        assert_eq!(o.dominant_class, 1);
        assert!(o.points.iter().all(|q| q.approx_eq(&ProjPoint::basis(1, 1), 1e-15)));

        let o = normalized_orbit(&g, &real_point(&[1.0, 1.0]), 40).unwrap();
        assert_eq!(o.dominant_class, 2);
        assert!(o.points[40].fs_distance(&ProjPoint::basis(1, 0)).unwrap() < 1e-8);

        let lift = block_diagonal(&[jordan_block(linalg::ONE, 2), real_diagonal(&[3.0])]);
        let g = ProjMap::new(lift).unwrap();
        let o = normalized_orbit(&g, &real_point(&[0.4, -0.7, 0.2]), 60).unwrap();
        assert_eq!(o.dominant_class, 2);
        assert!(o.final_distance < 1e-12);
        assert!(o.points[60].fs_distance(&ProjPoint::basis(2, 2)).unwrap() < 1e-12);
    }

    #[test]
    fn oracle_on_diagonal_map() {
        let g = ProjMap::real_diagonal(&[3.0, 2.0, 1.0, 0.5]).unwrap();
        let oracle = limit_set_oracle(&g, 4, 200, 1, &Tolerances::default()).unwrap();
        assert!(oracle.passed(1e-4), "{:?}", oracle.classes);
        assert_eq!(oracle.classes.len(), 4);
    }

    #[test]
    fn cluster_detection() {
        let a = ProjPoint::basis(1, 0);
        let b = ProjPoint::basis(1, 1);
        let tail: Vec<ProjPoint> = (0..20).map(|i| if i % 2 == 0 { a.clone() } else { b.clone() }).collect();
        let reps = cluster_points(&tail, 1e-5, 5);
        assert_eq!(reps.len(), 2);
        assert!(cluster_points(&tail[..8], 1e-5, 5).is_empty());
    }
}
