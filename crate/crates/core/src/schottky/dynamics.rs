//! The fundamental domain, nested region chains and accumulation of orbits.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{cluster_points, normalized_orbit_with};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::projective::ProjPoint;
use crate::psl::{distance_to_union, ProjMap};
use crate::sampling;

use super::region::{classify_value, region_image, Position, QuadricRegion};
use super::words::enumerate_reduced_words;
use super::{RegionRef, SchottkyData, Side};

/// Where a point sits relative to `F = P^n - ⋃ (R_j ∪ S_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Membership {
    InteriorF,
    BoundaryF,
    InRegion { region: RegionRef },
}

/// Classifies by the sign of each region form, with a band of width
/// `tol.boundary` counted as boundary.
pub fn fundamental_domain_membership(s: &SchottkyData, p: &ProjPoint, tol: &Tolerances) -> Membership {
    let mut on_boundary = false;
    for r in s.region_refs() {
        match classify_value(s.region(r).value_at(p), tol.boundary) {
            Position::Inside => return Membership::InRegion { region: r },
            Position::Boundary => on_boundary = true,
            Position::Outside => {}
        }
    }
    if on_boundary {
        Membership::BoundaryF
    } else {
        Membership::InteriorF
    }
}

/// `count` points of `Int(F)`, drawn uniformly on the sphere and filtered.
pub fn sample_interior_points(s: &SchottkyData, count: usize, seed: u64, tol: &Tolerances) -> Result<Vec<ProjPoint>> {
    let mut rng = sampling::seeded_rng(seed);
    let mut out = Vec::with_capacity(count);
    let budget = count.saturating_mul(10_000).max(10_000);
    for _ in 0..budget {
        if out.len() == count {
            break;
        }
        let p = ProjPoint::random(&mut rng, s.n());
        if fundamental_domain_membership(s, &p, tol) == Membership::InteriorF {
            out.push(p);
        }
    }
    if out.len() < count {
        return Err(Error::InvalidInput(format!("found only {} of {count} interior points", out.len())));
    }
    Ok(out)
}

/// `gamma_j^k(S_j)` (side S) or `gamma_j^{-k}(R_j)` (side R) for `k = 0..=depth`.
pub fn nested_region(s: &SchottkyData, j: usize, side: Side, depth: usize) -> Result<Vec<QuadricRegion>> {
    s.check_generator(j)?;
    let step = match side {
        Side::S => s.generator(j, 1),
        Side::R => s.generator(j, -1),
    };
    let mut chain = vec![s.region(RegionRef { generator: j, side }).clone()];
    for k in 0..depth {
        let next = region_image(&chain[k], step)?;
        chain.push(next);
    }
    Ok(chain)
}

/// Whether `p` lies in the depth-`depth` element of the chain, evaluated by
/// pulling `p` back to the base region.
pub fn chain_contains(s: &SchottkyData, j: usize, side: Side, depth: usize, p: &ProjPoint) -> Result<bool> {
    s.check_generator(j)?;
    let back = match side {
        Side::S => s.generator(j, -1),
        Side::R => s.generator(j, 1),
    };
    let mut q = p.clone();
    for _ in 0..depth {
        q = back.apply(&q)?;
    }
    Ok(s.region(RegionRef { generator: j, side }).contains(&q))
}

/// Whether some word `w` of length at most `k` has `w^{-1} p` in `F`, i.e.
/// `p` lies in `F_k = ⋃_{|w| ≤ k} w(F)`.
pub fn fk_contains(s: &SchottkyData, p: &ProjPoint, k: usize, tol: &Tolerances) -> Result<bool> {
    for w in enumerate_reduced_words(s.g(), k) {
        let q = w.inverse().apply(s, p)?;
        if !matches!(fundamental_domain_membership(s, &q, tol), Membership::InRegion { .. }) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRecord {
    pub start: usize,
    pub point: ProjPoint,
    /// Distance to the attracting (forward) or repelling (backward) level set.
    pub distance_to_limit: f64,
    pub inside_chain: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccumulationReport {
    pub generator: usize,
    pub direction: Direction,
    pub m_max: u64,
    /// `floor(m_max / 2)`.
    pub requested_depth: usize,
    /// The chain depth actually tested; see [`resolvable_depth`].
    pub chain_depth: usize,
    pub clusters: Vec<ClusterRecord>,
    pub all_inside: bool,
}

/// Deepest chain level whose membership is resolvable in double precision:
/// the largest `d` with `(r_max / r_min)^d <= 1e8` for the generator's moduli.
pub fn resolvable_depth(g: &ProjMap, tol: &Tolerances) -> Result<usize> {
    let moduli = g.modulus_decomposition_with(tol)?.moduli();
    let ratio = moduli.last().expect("nonempty") / moduli[0];
    if ratio <= 1.0 + tol.cluster_gap {
        return Ok(usize::MAX);
    }
    Ok((8.0 / ratio.log10()).floor() as usize)
}

/// Cluster points of `{gamma_j^{±m}(p)}` for each start `p` in `Int(F)`,
/// each checked against the nested chain on the matching side.
pub fn accumulation_estimate(
    s: &SchottkyData,
    j: usize,
    points: &[ProjPoint],
    m_max: u64,
    direction: Direction,
    tol: &Tolerances,
) -> Result<AccumulationReport> {
    s.check_generator(j)?;
    for (i, p) in points.iter().enumerate() {
        p.check_dim(s.n())?;
        if fundamental_domain_membership(s, p, tol) != Membership::InteriorF {
            return Err(Error::PointNotInDomain(i));
        }
    }
    let (map, side) = match direction {
        Direction::Forward => (s.generator(j, 1).clone(), Side::S),
        Direction::Backward => (s.generator(j, -1).clone(), Side::R),
    };
    let limit = map.limit_set_with(tol)?;
    let attracting = &limit[limit.len() - 1..];
    let requested_depth = (m_max / 2) as usize;
    let chain_depth = requested_depth.min(resolvable_depth(&map, tol)?);

    let mut clusters = Vec::new();
    for (start, p) in points.iter().enumerate() {
        let orbit = normalized_orbit_with(&map, p, m_max, tol)?;
        let tail: Vec<ProjPoint> = orbit.points.into_iter().skip(requested_depth + 1).collect();
        for q in cluster_points(&tail, tol.cluster_radius, tol.cluster_hits) {
            let inside_chain = chain_contains(s, j, side, chain_depth, &q)?;
            let distance_to_limit = distance_to_union(attracting, &q)?;
            clusters.push(ClusterRecord { start, point: q, distance_to_limit, inside_chain });
        }
    }
    let all_inside = clusters.iter().all(|c| c.inside_chain);
    Ok(AccumulationReport { generator: j, direction, m_max, requested_depth, chain_depth, clusters, all_inside })
}

/// One orbit point for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudRow {
    pub start: usize,
    pub m: i64,
    pub distance_to_limit: f64,
    pub point: ProjPoint,
}

/// Two-sided orbits `gamma_j^m(p)`, `|m| <= m_max`, with distances to `L(gamma_j)`.
pub fn orbit_cloud(
    s: &SchottkyData,
    j: usize,
    points: &[ProjPoint],
    m_max: u64,
    tol: &Tolerances,
) -> Result<Vec<CloudRow>> {
    s.check_generator(j)?;
    let g = s.generator(j, 1);
    let limit = g.limit_set_with(tol)?;
    let mut rows = Vec::new();
    for (start, p) in points.iter().enumerate() {
        for (m, q) in crate::asymptotics::two_sided_orbit(g, p, m_max, tol)? {
            let distance_to_limit = distance_to_union(&limit, &q)?;
            rows.push(CloudRow { start, m, distance_to_limit, point: q });
        }
    }
    Ok(rows)
}
