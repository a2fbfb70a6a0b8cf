//! The obstruction on even-dimensional P^{2n}.
//!
//! For a single map of infinite order, [`build_bridge`] assembles a connected
//! union of projective subspaces through its limit set, every point of which
//! is approached by orbits of points off the bridge. [`subspace_exclusion_check`]
//! shows that a region system leaving an `n`-dimensional subspace inside one
//! region produces a point that breaks disjointness or the mapping axiom.
//! [`contradiction_harness`] runs both against candidate data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{k_index_with, normalized_power};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::projective::{canonicalize, fs_distance_vectors, intersect, ProjPoint, ProjSubspace};
use crate::psl::{LevelSet, ModulusDecomposition, ProjMap};
use crate::sampling;
use crate::schottky::region::{classify_value, Position, QuadricRegion};
use crate::schottky::verify::{AXIOM_DISJOINT, AXIOM_MAPPING};
use crate::schottky::{
    chain_contains, verify_schottky_with, AxiomCheck, Direction, RegionPair, RegionRef, SchottkyData, Side, Status,
    VerificationReport,
};

/// Iteration count used to approximate the connector limits.
pub const CONNECTOR_STEP: u64 = 10_000;
/// Depth of the region chains the harness tests bridge points against.
pub const HARNESS_DEPTH: usize = 8;

/// `n` for a lift of size `2n + 1`.
fn half_dimension(size: usize) -> Result<usize> {
    let dim = size - 1;
    if dim % 2 == 1 {
        return Err(Error::OddDimension(dim));
    }
    Ok(dim / 2)
}

/// 1-based index of the first modulus class (ascending) at which the
/// cumulative dimension reaches `n + 1`.
pub fn pivot_index(d: &ModulusDecomposition, n: usize) -> Result<usize> {
    if d.size != 2 * n + 1 {
        return Err(Error::DimensionMismatch { expected: 2 * n + 1, found: d.size });
    }
    d.cumulative_index(n + 1).map(|i| i + 1).ok_or(Error::EmptyInput)
}

/// Position of the pivot among the modulus classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BridgeCase {
    /// The pivot is the smallest modulus; only a forward connector is needed.
    Lowest,
    Interior,
    /// The pivot is the largest modulus; only a backward connector is needed.
    Highest,
}

/// A limit point of normalized iterates in the pivot class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Connector {
    pub direction: Direction,
    pub point: ProjPoint,
    pub k: usize,
    pub step: u64,
    /// Relative distance of the last iterate from the eigenvector span.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    /// `L_r` for the pivot modulus.
    LevelSet,
    /// Forward connector joined with the classes above the pivot.
    ForwardSpan,
    /// Backward connector joined with the classes below the pivot.
    BackwardSpan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeComponent {
    pub kind: ComponentKind,
    pub span: ProjSubspace,
    /// Point shared with the level-set component.
    pub attachment: ProjPoint,
}

/// A bridge point approached by `g^exponent` applied to `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitWitness {
    pub component: usize,
    pub target: ProjPoint,
    pub start: ProjPoint,
    pub exponent: i64,
    pub distance: f64,
    /// Distance from `start` to the nearest component span.
    pub start_clearance: f64,
    pub reached: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeSet {
    pub n: usize,
    /// 1-based pivot class.
    pub pivot: usize,
    pub moduli: Vec<f64>,
    pub dims: Vec<usize>,
    pub case: BridgeCase,
    pub connectors: Vec<Connector>,
    /// The level-set component comes first.
    pub components: Vec<BridgeComponent>,
    pub level_sets: Vec<LevelSet>,
    pub witnesses: Vec<OrbitWitness>,
    /// Whether the complement-dimension hypothesis was checked for this map.
    pub hypothesis_verified: bool,
}

impl BridgeSet {
    pub fn distance_to(&self, p: &ProjPoint) -> Result<f64> {
        let mut best = f64::INFINITY;
        for comp in &self.components {
            best = best.min(comp.span.distance_to(p)?);
        }
        Ok(best)
    }

    pub fn contains(&self, p: &ProjPoint, tol: f64) -> Result<bool> {
        Ok(self.distance_to(p)? <= tol)
    }

    /// For each component, the larger distance of its attachment from its
    /// own span and from the level-set component.
    pub fn attachment_defects(&self) -> Result<Vec<f64>> {
        let level = &self.components[0].span;
        self.components
            .iter()
            .map(|comp| Ok(comp.span.distance_to(&comp.attachment)?.max(level.distance_to(&comp.attachment)?)))
            .collect()
    }

    pub fn is_connected(&self, tol: f64) -> Result<bool> {
        Ok(self.attachment_defects()?.iter().all(|&d| d < tol))
    }

    /// Largest distance from a sampled point of `L(g)` to the bridge.
    pub fn limit_coverage(&self, samples_per_set: usize, seed: u64) -> Result<f64> {
        let mut rng = sampling::seeded_rng(seed);
        let mut worst: f64 = 0.0;
        for set in &self.level_sets {
            for _ in 0..samples_per_set {
                worst = worst.max(self.distance_to(&set.subspace.sample(&mut rng))?);
            }
        }
        Ok(worst)
    }

    pub fn reached_fraction(&self) -> f64 {
        if self.witnesses.is_empty() {
            return 1.0;
        }
        self.witnesses.iter().filter(|w| w.reached).count() as f64 / self.witnesses.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeOptions {
    pub seed: u64,
    /// Orbit witnesses drawn on each spanning component.
    pub witnesses: usize,
    pub orbit_steps: u64,
    pub orbit_radius: f64,
    /// Size of the decaying part of a witness start relative to the target.
    pub near_scale: f64,
    /// Starts closer than this to the bridge count as on it.
    pub min_clearance: f64,
}

impl Default for BridgeOptions {
    fn default() -> Self {
        BridgeOptions {
            seed: 0,
            witnesses: 8,
            orbit_steps: 500,
            orbit_radius: 1e-4,
            near_scale: 1e-2,
            min_clearance: 1e-12,
        }
    }
}

pub fn build_bridge(g: &ProjMap) -> Result<BridgeSet> {
    build_bridge_with(g, &BridgeOptions::default(), &Tolerances::default())
}

pub fn build_bridge_with(g: &ProjMap, opts: &BridgeOptions, tol: &Tolerances) -> Result<BridgeSet> {
    let n = half_dimension(g.lift().nrows())?;
    let d = g.modulus_decomposition_with(tol)?;
    if d.k() < 2 {
        if let Some(order) = g.finite_order(tol) {
            return Err(Error::FiniteOrder { order });
        }
        return Err(Error::SingleModulusClass);
    }
    let pivot = pivot_index(&d, n)?;
    let i = pivot - 1;
    let k = d.k();
    let case = if i == 0 {
        BridgeCase::Lowest
    } else if i + 1 == k {
        BridgeCase::Highest
    } else {
        BridgeCase::Interior
    };
    let mut rng = sampling::seeded_rng(opts.seed);
    let level = d.parts[i].level_set(tol)?;

    let mut connectors = Vec::new();
    let mut spans = Vec::new();
    if i + 1 < k {
        let conn = connector(&d, i, Direction::Forward, &mut rng, tol)?;
        let span = joined_span(&conn.point, &d.direct_sum_basis(i + 1..k))?;
        spans.push((ComponentKind::ForwardSpan, span, conn.point.clone()));
        connectors.push(conn);
    }
    if i > 0 {
        let conn = connector(&d, i, Direction::Backward, &mut rng, tol)?;
        let span = joined_span(&conn.point, &d.direct_sum_basis(0..i))?;
        spans.push((ComponentKind::BackwardSpan, span, conn.point.clone()));
        connectors.push(conn);
    }
    let mut components =
        vec![BridgeComponent { kind: ComponentKind::LevelSet, span: level, attachment: connectors[0].point.clone() }];
    components.extend(spans.into_iter().map(|(kind, span, attachment)| BridgeComponent { kind, span, attachment }));

    let change = d.change_of_basis();
    let change_inv = change.clone().try_inverse().ok_or(Error::Singular { condition: 0.0 })?;
    let forward = orbit_blocks(&d, i, Direction::Forward, &change)?;
    let backward = orbit_blocks(&d, i, Direction::Backward, &change)?;
    let mut jobs = Vec::new();
    for (index, comp) in components.iter().enumerate().skip(1) {
        let (blocks, near, far, sign) = match comp.kind {
            ComponentKind::ForwardSpan => (&forward, d.direct_sum_basis(0..i), d.direct_sum_basis(i + 1..k), 1),
            _ => (&backward, d.direct_sum_basis(i + 1..k), d.direct_sum_basis(0..i), -1),
        };
        for _ in 0..opts.witnesses {
            let a = sampling::gaussian_vector(&mut rng, 1)[0];
            let target = comp.attachment.lift() * a + &far * sampling::sphere_point(&mut rng, far.ncols());
            let near_part = if near.ncols() > 0 {
                &near * sampling::sphere_point(&mut rng, near.ncols()) * (a * opts.near_scale)
            } else {
                CVector::zeros(change.nrows())
            };
            let target_local = split_blocks(blocks, &(&change_inv * &target));
            let near_local = split_blocks(blocks, &(&change_inv * &near_part));
            jobs.push(WitnessJob { index, blocks, target, target_local, near_local, sign });
        }
    }
    let spans: Vec<&ProjSubspace> = components.iter().map(|c| &c.span).collect();
    let witnesses = jobs.par_iter().map(|job| orbit_witness(job, opts, &spans)).collect::<Result<Vec<_>>>()?;

    Ok(BridgeSet {
        n,
        pivot,
        moduli: d.moduli(),
        dims: d.dims(),
        case,
        connectors,
        components,
        level_sets: g.limit_set_with(tol)?,
        witnesses,
        hypothesis_verified: false,
    })
}

fn joined_span(point: &ProjPoint, block: &CMatrix) -> Result<ProjSubspace> {
    let mut cols = vec![point.lift().clone()];
    cols.extend(block.column_iter().map(|col| col.into_owned()));
    ProjSubspace::from_columns(&CMatrix::from_columns(&cols))
}

/// Normalized iterate of a generic vector of the pivot class at
/// [`CONNECTOR_STEP`], projected onto the eigenvector span.
fn connector(
    d: &ModulusDecomposition,
    i: usize,
    direction: Direction,
    rng: &mut sampling::SampleRng,
    tol: &Tolerances,
) -> Result<Connector> {
    let part = &d.parts[i];
    let t = match direction {
        Direction::Forward => part.unit_part.clone(),
        Direction::Backward => part.unit_part.clone().try_inverse().ok_or(Error::Singular { condition: 0.0 })?,
    };
    let start = sampling::sphere_point(rng, part.dim());
    let k = k_index_with(&start, &t, tol)?.k;
    let iterate = normalized_power(&t, &start, k as u64, CONNECTOR_STEP);
    let span = linalg::eigenvector_span_basis(&t, tol.rank, tol.eigen_merge)?;
    let projected = linalg::project_onto(&span, &iterate);
    let residual = linalg::vector_norm(&(&iterate - &projected)) / linalg::vector_norm(&iterate);
    Ok(Connector { direction, point: canonicalize(&(&part.basis * projected))?, k, step: CONNECTOR_STEP, residual })
}

/// One modulus class as seen by `h = g` (forward) or `h = g^{-1}` (backward),
/// rescaled by the pivot modulus: `h / rho` acts on the class as
/// `exp(log_rate) * step`.
struct OrbitBlock {
    basis: CMatrix,
    step: CMatrix,
    back: CMatrix,
    log_rate: f64,
}

fn orbit_blocks(
    d: &ModulusDecomposition,
    pivot: usize,
    direction: Direction,
    change: &CMatrix,
) -> Result<Vec<OrbitBlock>> {
    let pivot_log = d.parts[pivot].modulus.ln();
    let mut offset = 0;
    let mut blocks = Vec::with_capacity(d.k());
    for part in &d.parts {
        let t = part.unit_part.clone();
        let t_inv = t.clone().try_inverse().ok_or(Error::Singular { condition: 0.0 })?;
        let basis = change.columns(offset, part.dim()).into_owned();
        offset += part.dim();
        let rate = part.modulus.ln() - pivot_log;
        blocks.push(match direction {
            Direction::Forward => OrbitBlock { basis, step: t, back: t_inv, log_rate: rate },
            Direction::Backward => OrbitBlock { basis, step: t_inv, back: t, log_rate: -rate },
        });
    }
    Ok(blocks)
}

fn split_blocks(blocks: &[OrbitBlock], local: &CVector) -> Vec<CVector> {
    let mut offset = 0;
    blocks
        .iter()
        .map(|b| {
            let part = local.rows(offset, b.basis.ncols()).into_owned();
            offset += b.basis.ncols();
            part
        })
        .collect()
}

struct WitnessJob<'a> {
    index: usize,
    blocks: &'a [OrbitBlock],
    target: CVector,
    target_local: Vec<CVector>,
    near_local: Vec<CVector>,
    sign: i64,
}

/// Start `x_m = rho^m h^{-m}(target) + near_part`. Then
/// `rho^{-m} h^m x_m = target + rho^{-m} h^m near_part`, and the second term
/// decays, while `x_m` itself stays off the bridge.
///
/// The iteration runs in the coordinates of the modulus classes, where `h`
/// is block diagonal, with each block's growth kept as a logarithm. Standard
/// coordinates would lose the fast classes to rounding long before the slow
/// near part has decayed.
fn orbit_witness(job: &WitnessJob<'_>, opts: &BridgeOptions, spans: &[&ProjSubspace]) -> Result<OrbitWitness> {
    let size = job.target.len();
    let mut pulled = job.target_local.clone();
    let mut best: Option<(u64, f64, CVector)> = None;
    for m in 1..=opts.orbit_steps {
        let mut start = CVector::zeros(size);
        let mut image = CVector::zeros(size);
        for (j, block) in job.blocks.iter().enumerate() {
            // Decaying classes carry the near part, the others the pulled-back target.
            let decaying = block.log_rate < 0.0;
            let mut moved = if decaying {
                start += &block.basis * &job.near_local[j];
                job.near_local[j].clone()
            } else {
                pulled[j] = &block.back * &pulled[j];
                let shrink = (-(m as f64) * block.log_rate).exp();
                start += &block.basis * (&pulled[j] * c(shrink, 0.0));
                pulled[j].clone()
            };
            for _ in 0..m {
                moved = &block.step * moved;
            }
            if decaying {
                moved *= c((m as f64 * block.log_rate).exp(), 0.0);
            }
            image += &block.basis * moved;
        }
        let distance = fs_distance_vectors(&image, &job.target);
        if best.as_ref().is_none_or(|b| distance < b.1) {
            best = Some((m, distance, start));
        }
        if distance < opts.orbit_radius {
            break;
        }
    }
    let (m, distance, start) = best.ok_or(Error::EmptyInput)?;
    let start = canonicalize(&start)?;
    let mut clearance = f64::INFINITY;
    for span in spans {
        clearance = clearance.min(span.distance_to(&start)?);
    }
    Ok(OrbitWitness {
        component: job.index,
        target: canonicalize(&job.target)?,
        start,
        exponent: job.sign * m as i64,
        distance,
        start_clearance: clearance,
        reached: distance < opts.orbit_radius && clearance > opts.min_clearance,
    })
}

/// A relation between regions broken at an explicit point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `point` lies in the closures of both regions; `values` are the two form values.
    RegionsMeet { first: RegionRef, second: RegionRef, point: ProjPoint, values: [f64; 2] },
    /// `point` is outside the closure of `R_generator` yet `image = gamma(point)`
    /// is outside the closure of `S_generator`.
    MappingBroken { generator: usize, point: ProjPoint, image: ProjPoint },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExclusionWitness {
    /// Region containing the candidate subspace.
    pub region: RegionRef,
    /// The other generator moving the subspace.
    pub sigma: usize,
    pub subspace: ProjSubspace,
    pub moved: ProjSubspace,
    pub intersection: ProjPoint,
    pub dim_sum: usize,
    pub violation: Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// No region contains a subspace of the required dimension.
    NoCandidate {
        largest_dim: isize,
        required: usize,
    },
    /// A candidate exists but there is no second generator.
    NoOtherGenerator {
        region: RegionRef,
    },
    NoForcedIntersection {
        dim_sum: usize,
        required: usize,
    },
    Contradiction(Box<ExclusionWitness>),
}

impl Verdict {
    pub fn witness(&self) -> Option<&ExclusionWitness> {
        match self {
            Verdict::Contradiction(w) => Some(w),
            _ => None,
        }
    }
}

/// Largest subspace on which the region form is negative definite: the
/// span of its negative eigenvectors. Returns its projective dimension and,
/// when it is at least `n`, an `n`-dimensional subspace spanned by the most
/// negative ones, confirmed by sampling.
pub fn region_subspace(region: &QuadricRegion, n: usize, seed: u64) -> (isize, Option<ProjSubspace>) {
    let (values, vectors) = linalg::hermitian_eigen(&linalg::hermitize(&region.form()));
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let negative = values.iter().filter(|&&v| v < -1e-12 * scale).count();
    let largest = negative as isize - 1;
    if negative < n + 1 {
        return (largest, None);
    }
    let Ok(sub) = ProjSubspace::from_columns(&vectors.columns(0, n + 1).into_owned()) else {
        return (largest, None);
    };
    let mut rng = sampling::seeded_rng(seed);
    let inside = (0..64).all(|_| region.contains(&sub.sample(&mut rng)));
    (largest, inside.then_some(sub))
}

pub fn subspace_exclusion_check(s: &SchottkyData) -> Result<Verdict> {
    subspace_exclusion_check_with(s, &Tolerances::default())
}

/// Looks for an `n`-dimensional subspace inside some region and moves it
/// by every other generator.
pub fn subspace_exclusion_check_with(s: &SchottkyData, tol: &Tolerances) -> Result<Verdict> {
    let n = half_dimension(s.n() + 1)?;
    let mut largest = -1;
    let mut lonely = None;
    for (index, r) in s.region_refs().into_iter().enumerate() {
        let (dim, candidate) = region_subspace(s.region(r), n, index as u64);
        largest = largest.max(dim);
        let Some(sub) = candidate else { continue };
        for sigma in (1..=s.g()).filter(|&sigma| sigma != r.generator) {
            let verdict = exclusion_for(s, r, &sub, sigma, tol)?;
            if matches!(verdict, Verdict::Contradiction(_)) {
                return Ok(verdict);
            }
        }
        lonely.get_or_insert(r);
    }
    Ok(match lonely {
        Some(region) if s.g() == 1 => Verdict::NoOtherGenerator { region },
        _ => Verdict::NoCandidate { largest_dim: largest, required: n },
    })
}

/// Runs the exclusion argument for a subspace assumed to lie in `region`,
/// moved by generator `sigma`.
pub fn exclusion_for(
    s: &SchottkyData,
    region: RegionRef,
    subspace: &ProjSubspace,
    sigma: usize,
    tol: &Tolerances,
) -> Result<Verdict> {
    s.check_generator(sigma)?;
    subspace.check_ambient(s.n())?;
    // An S-subspace is pulled back by sigma, an R-subspace pushed forward.
    let (toward, back) = match region.side {
        Side::S => (s.generator(sigma, -1), s.generator(sigma, 1)),
        Side::R => (s.generator(sigma, 1), s.generator(sigma, -1)),
    };
    let moved = subspace.map_by(toward.lift())?;
    let dim_sum = subspace.proj_dim() + moved.proj_dim();
    if dim_sum < s.n() {
        return Ok(Verdict::NoForcedIntersection { dim_sum, required: s.n() });
    }
    let common =
        intersect(subspace, &moved)?.ok_or_else(|| Error::InvalidInput("forced intersection came out empty".into()))?;
    let point = canonicalize(&common.basis().column(0).into_owned())?;
    // point lies in the subspace and in its image; its partner back(point) does too.
    let partner = back.apply(&point)?;
    let base = s.region(region);
    let (opposite, same) = match region.side {
        Side::S => (RegionRef { generator: sigma, side: Side::R }, RegionRef { generator: sigma, side: Side::S }),
        Side::R => (RegionRef { generator: sigma, side: Side::S }, RegionRef { generator: sigma, side: Side::R }),
    };
    let violation = if s.region(opposite).contains(&point) {
        Violation::RegionsMeet {
            first: region,
            second: opposite,
            values: [base.value_at(&point), s.region(opposite).value_at(&point)],
            point,
        }
    } else if classify_value(s.region(same).value_at(&partner), tol.boundary) != Position::Outside {
        Violation::RegionsMeet {
            first: region,
            second: same,
            values: [base.value_at(&partner), s.region(same).value_at(&partner)],
            point: partner,
        }
    } else {
        match region.side {
            Side::S => Violation::MappingBroken { generator: sigma, point, image: partner },
            Side::R => Violation::MappingBroken { generator: sigma, point: partner, image: point },
        }
    };
    Ok(Verdict::Contradiction(Box::new(ExclusionWitness {
        region,
        sigma,
        subspace: subspace.clone(),
        moved,
        intersection: common.sample(&mut sampling::seeded_rng(0)),
        dim_sum,
        violation,
    })))
}

/// A sampled bridge point tested against the depth-limited chains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainHit {
    /// Component index, or `None` for a sample of `L(g)`.
    pub component: Option<usize>,
    pub point: ProjPoint,
    pub in_r_chain: bool,
    pub in_s_chain: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorAnalysis {
    pub generator: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bridge: Option<BridgeSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bridge_error: Option<String>,
    pub hits: Vec<ChainHit>,
    pub r_witness: Option<ProjPoint>,
    pub s_witness: Option<ProjPoint>,
    /// A bridge point in neither chain.
    pub gap_witness: Option<ProjPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HarnessVerdict {
    NotApplicable {
        reason: String,
    },
    AxiomFailure {
        check: AxiomCheck,
    },
    /// The connected bridge of `generator` meets both chains.
    BridgeInBothChains {
        generator: usize,
        r_point: ProjPoint,
        s_point: ProjPoint,
        gap_point: Option<ProjPoint>,
    },
    SubspaceContradiction {
        witness: Box<ExclusionWitness>,
    },
    /// The bridge contains `limit_point` of `L(g)` yet misses the chain on `side`.
    SideMissed {
        generator: usize,
        side: Side,
        limit_point: ProjPoint,
    },
    NoWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub n: usize,
    pub g: usize,
    pub depth: usize,
    pub verdict: HarnessVerdict,
    pub summary: String,
    pub verification: VerificationReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exclusion: Option<Verdict>,
    pub generators: Vec<GeneratorAnalysis>,
}

impl ObstructionReport {
    pub fn has_witness(&self) -> bool {
        !matches!(self.verdict, HarnessVerdict::NotApplicable { .. } | HarnessVerdict::NoWitness)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarnessOptions {
    pub samples: usize,
    pub seed: u64,
    pub depth: usize,
    /// Random points drawn on each bridge component.
    pub points_per_component: usize,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        HarnessOptions { samples: 2000, seed: 0, depth: HARNESS_DEPTH, points_per_component: 16 }
    }
}

pub fn contradiction_harness(s: &SchottkyData) -> ObstructionReport {
    contradiction_harness_with(s, &HarnessOptions::default(), &Tolerances::default())
}

pub fn contradiction_harness_with(s: &SchottkyData, opts: &HarnessOptions, tol: &Tolerances) -> ObstructionReport {
    let verification = verify_schottky_with(s, opts.samples, opts.seed, tol);
    let report = |verdict: HarnessVerdict, exclusion, generators| ObstructionReport {
        n: s.n(),
        g: s.g(),
        depth: opts.depth,
        summary: summarize(&verdict, opts.depth),
        verdict,
        verification: verification.clone(),
        exclusion,
        generators,
    };
    if s.n() % 2 == 1 {
        return report(
            HarnessVerdict::NotApplicable { reason: "not applicable: odd dimension".into() },
            None,
            Vec::new(),
        );
    }
    if let Some(check) = verification
        .checks
        .iter()
        .find(|c| c.status == Status::Fail && (c.axiom == AXIOM_DISJOINT || c.axiom == AXIOM_MAPPING))
    {
        return report(HarnessVerdict::AxiomFailure { check: check.clone() }, None, Vec::new());
    }

    let exclusion = subspace_exclusion_check_with(s, tol).ok();
    let generators: Vec<GeneratorAnalysis> =
        (1..=s.g()).into_par_iter().map(|j| analyze_generator(s, j, opts, tol)).collect();

    let verdict = if let Some(a) = generators.iter().find(|a| a.r_witness.is_some() && a.s_witness.is_some()) {
        HarnessVerdict::BridgeInBothChains {
            generator: a.generator,
            r_point: a.r_witness.clone().expect("checked"),
            s_point: a.s_witness.clone().expect("checked"),
            gap_point: a.gap_witness.clone(),
        }
    } else if let Some(w) = exclusion.as_ref().and_then(Verdict::witness) {
        HarnessVerdict::SubspaceContradiction { witness: Box::new(w.clone()) }
    } else if let Some(missed) = generators.iter().find_map(side_missed) {
        missed
    } else {
        HarnessVerdict::NoWitness
    };
    report(verdict, exclusion, generators)
}

fn analyze_generator(s: &SchottkyData, j: usize, opts: &HarnessOptions, tol: &Tolerances) -> GeneratorAnalysis {
    let mut analysis = GeneratorAnalysis {
        generator: j,
        bridge: None,
        bridge_error: None,
        hits: Vec::new(),
        r_witness: None,
        s_witness: None,
        gap_witness: None,
    };
    let bridge_opts = BridgeOptions { seed: sampling::derive_seed(opts.seed, j as u64), ..BridgeOptions::default() };
    let bridge = match build_bridge_with(s.generator(j, 1), &bridge_opts, tol) {
        Ok(b) => b,
        Err(e) => {
            analysis.bridge_error = Some(e.to_string());
            return analysis;
        }
    };
    let mut rng = sampling::substream(opts.seed, 1000 + j as u64);
    let mut points: Vec<(Option<usize>, ProjPoint)> = Vec::new();
    for (index, comp) in bridge.components.iter().enumerate() {
        points.push((Some(index), comp.attachment.clone()));
        points.extend((0..opts.points_per_component).map(|_| (Some(index), comp.span.sample(&mut rng))));
    }
    points.extend(bridge.witnesses.iter().map(|w| (Some(w.component), w.target.clone())));
    for set in &bridge.level_sets {
        points.push((None, set.subspace.sample(&mut rng)));
    }
    for (component, point) in points {
        let in_r = chain_contains(s, j, Side::R, opts.depth, &point).unwrap_or(false);
        let in_s = chain_contains(s, j, Side::S, opts.depth, &point).unwrap_or(false);
        if in_r && analysis.r_witness.is_none() {
            analysis.r_witness = Some(point.clone());
        }
        if in_s && analysis.s_witness.is_none() {
            analysis.s_witness = Some(point.clone());
        }
        if !in_r && !in_s && analysis.gap_witness.is_none() {
            analysis.gap_witness = Some(point.clone());
        }
        analysis.hits.push(ChainHit { component, point, in_r_chain: in_r, in_s_chain: in_s });
    }
    analysis.bridge = Some(bridge);
    analysis
}

/// The bridge holds `L(g)`, so a chain it never meets is a chain `L(g)` misses.
fn side_missed(a: &GeneratorAnalysis) -> Option<HarnessVerdict> {
    let bridge = a.bridge.as_ref()?;
    let (side, set) = match (&a.r_witness, &a.s_witness) {
        (None, _) => (Side::R, bridge.level_sets.first()?),
        (_, None) => (Side::S, bridge.level_sets.last()?),
        _ => return None,
    };
    let limit_point = set.subspace.sample(&mut sampling::seeded_rng(0));
    Some(HarnessVerdict::SideMissed { generator: a.generator, side, limit_point })
}

fn summarize(verdict: &HarnessVerdict, depth: usize) -> String {
    match verdict {
        HarnessVerdict::NotApplicable { reason } => reason.clone(),
        HarnessVerdict::AxiomFailure { check } => {
            format!("axiom failure: {} ({}) with witness", check.axiom, check.subject)
        }
        HarnessVerdict::BridgeInBothChains { generator, .. } => {
            format!("generator {generator}: connected bridge meets both depth-{depth} chains")
        }
        HarnessVerdict::SubspaceContradiction { witness } => {
            format!("subspace in {} meets its image under generator {}", witness.region, witness.sigma)
        }
        HarnessVerdict::SideMissed { generator, side, .. } => {
            format!("generator {generator}: limit set misses the depth-{depth} {side} chain")
        }
        HarnessVerdict::NoWitness => "no witness found".into(),
    }
}

/// Nori-style data on even-dimensional P^{2n}: generator `j` scales the first
/// `n + 1` coordinates of `frames[j]` by `1/alpha - 1`, and the regions are
/// `{phi < alpha}` and `{phi > 1 - alpha}` for the matching coordinate ratio.
pub fn quadric_candidate(n: usize, alpha: f64, frames: &[CMatrix]) -> Result<SchottkyData> {
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let top = n / 2 + 1;
    let lambda = 1.0 / alpha - 1.0;
    let scaling = linalg::real_diagonal(&(0..=n).map(|i| if i < top { lambda } else { 1.0 }).collect::<Vec<_>>());
    let mask = linalg::real_diagonal(&(0..=n).map(|i| if i < top { 1.0 } else { 0.0 }).collect::<Vec<_>>());
    let mut generators = Vec::with_capacity(frames.len());
    let mut regions = Vec::with_capacity(frames.len());
    for frame in frames {
        if frame.shape() != (n + 1, n + 1) {
            return Err(Error::DimensionMismatch { expected: n + 1, found: frame.nrows() });
        }
        let inv = frame.clone().try_inverse().ok_or(Error::Singular { condition: 0.0 })?;
        generators.push(ProjMap::new(frame * &scaling * &inv)?);
        let gram = inv.adjoint() * &inv;
        let top_form = inv.adjoint() * &mask * &inv;
        let r = QuadricRegion::new(top_form.clone(), &gram * c(alpha, 0.0))?;
        let s = QuadricRegion::new(&gram * c(2.0 - alpha, 0.0), &gram + &top_form)?;
        regions.push(RegionPair { r, s });
    }
    SchottkyData::new(n, generators, regions)
}

/// [`quadric_candidate`] with the identity frame first and seeded Gaussian
/// frames after it.
pub fn transplanted_nori(n: usize, g: usize, alpha: f64, seed: u64) -> Result<SchottkyData> {
    let frames: Vec<CMatrix> = (0..g)
        .map(|j| {
            if j == 0 {
                CMatrix::identity(n + 1, n + 1)
            } else {
                sampling::gaussian_matrix(&mut sampling::substream(seed, j as u64), n + 1, n + 1)
            }
        })
        .collect();
    quadric_candidate(n, alpha, &frames)
}

/// A seeded candidate: one or two generators, `alpha` in `[0.1, 0.4)`, all
/// frames Gaussian.
pub fn seeded_candidate(n: usize, seed: u64) -> Result<SchottkyData> {
    use rand::Rng;
    let mut rng = sampling::seeded_rng(seed);
    let g = 1 + (seed % 2) as usize;
    let alpha = rng.random_range(0.1..0.4);
    let frames: Vec<CMatrix> = (0..g).map(|_| sampling::gaussian_matrix(&mut rng, n + 1, n + 1)).collect();
    quadric_candidate(n, alpha, &frames)
}

/// `diag(4, 2, 1)` on P^2 with `R = {|x_2|^2 > |x_0|^2 + |x_1|^2}` around `e_3`
/// and `S` the complement of the closure of its image, which contains `e_1`.
pub fn diagonal_candidate() -> Result<SchottkyData> {
    let g = ProjMap::real_diagonal(&[4.0, 2.0, 1.0])?;
    let r = QuadricRegion::from_form(&linalg::real_diagonal(&[1.0, 1.0, -1.0]))?;
    let s = QuadricRegion::from_form(&linalg::real_diagonal(&[-1.0 / 16.0, -0.25, 1.0]))?;
    SchottkyData::new(2, vec![g], vec![RegionPair { r, s }])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::real_point;
    use crate::schottky::{nori_build, SubspaceConfig};

    fn decomposition_with_dims(dims: &[usize]) -> ModulusDecomposition {
        let entries: Vec<f64> =
            dims.iter().enumerate().flat_map(|(i, &d)| std::iter::repeat_n(2f64.powi(i as i32), d)).collect();
        ProjMap::real_diagonal(&entries).unwrap().modulus_decomposition().unwrap()
    }

    #[test]
    fn pivot_examples() {
        assert_eq!(pivot_index(&decomposition_with_dims(&[1, 1, 1]), 1).unwrap(), 2);
        assert_eq!(pivot_index(&decomposition_with_dims(&[3]), 1).unwrap(), 1);
        assert_eq!(pivot_index(&decomposition_with_dims(&[2, 2, 1]), 2).unwrap(), 2);
        assert!(matches!(
            pivot_index(&decomposition_with_dims(&[2, 2, 1]), 1),
            Err(Error::DimensionMismatch { expected: 3, found: 5 })
        ));
    }

    #[test]
    fn bridge_through_middle_eigenvector() {
        let g = ProjMap::real_diagonal(&[4.0, 2.0, 1.0]).unwrap();
        let b = build_bridge(&g).unwrap();
        assert_eq!((b.pivot, b.case), (2, BridgeCase::Interior));
        let middle = ProjPoint::basis(2, 1);
        for conn in &b.connectors {
            assert!(conn.point.fs_distance(&middle).unwrap() < 1e-12);
        }
        let forward = ProjSubspace::coordinate(2, &[0, 1]).unwrap();
        let backward = ProjSubspace::coordinate(2, &[1, 2]).unwrap();
        assert!(b.components[1].span.approx_eq(&forward, 1e-10));
        assert!(b.components[2].span.approx_eq(&backward, 1e-10));
        assert!(b.is_connected(1e-9).unwrap());
        assert!(b.limit_coverage(4, 1).unwrap() < 1e-8);
        assert_eq!(b.reached_fraction(), 1.0);
    }

    #[test]
    fn bridge_case_split() {
        // Ascending moduli put the double eigenvalue 1 first.
        let low = build_bridge(&ProjMap::real_diagonal(&[2.0, 1.0, 1.0]).unwrap()).unwrap();
        assert_eq!((low.dims.clone(), low.pivot, low.case), (vec![2, 1], 1, BridgeCase::Lowest));
        let high = build_bridge(&ProjMap::real_diagonal(&[2.0, 2.0, 1.0]).unwrap()).unwrap();
        assert_eq!((high.dims.clone(), high.pivot, high.case), (vec![1, 2], 2, BridgeCase::Highest));
        for b in [&low, &high] {
            assert!(b.is_connected(1e-9).unwrap());
            assert!(b.limit_coverage(8, 2).unwrap() < 1e-8);
        }
    }

    #[test]
    fn bridge_rejections() {
        let even = ProjMap::real_diagonal(&[3.0, 2.0, 1.0, 0.5]).unwrap();
        assert_eq!(build_bridge(&even).unwrap_err(), Error::OddDimension(3));
        assert_eq!(build_bridge(&ProjMap::identity(2)).unwrap_err(), Error::FiniteOrder { order: 1 });
        let unipotent = ProjMap::new(linalg::jordan_block(linalg::ONE, 3)).unwrap();
        assert_eq!(build_bridge(&unipotent).unwrap_err(), Error::SingleModulusClass);
    }

    #[test]
    fn exclusion_on_transplanted_nori() {
        let data = transplanted_nori(2, 2, 0.2, 3).unwrap();
        let verdict = subspace_exclusion_check(&data).unwrap();
        let w = verdict.witness().expect("contradiction");
        assert!(w.dim_sum >= 2);
        assert!(w.subspace.contains(&w.intersection, 1e-9));
        assert!(w.moved.contains(&w.intersection, 1e-9));
    }

    #[test]
    fn exclusion_needs_dimension() {
        let data = transplanted_nori(4, 2, 0.2, 5).unwrap();
        let point = ProjSubspace::from_point(&real_point(&[1.0, 0.0, 0.0, 0.0, 0.0]));
        let line = ProjSubspace::coordinate(4, &[0, 1]).unwrap();
        for sub in [point, line] {
            let r = RegionRef { generator: 1, side: Side::S };
            let v = exclusion_for(&data, r, &sub, 2, &Tolerances::default()).unwrap();
            assert!(matches!(v, Verdict::NoForcedIntersection { required: 4, .. }), "{v:?}");
        }
    }

    #[test]
    fn harness_on_diagonal_candidate() {
        let report = contradiction_harness(&diagonal_candidate().unwrap());
        assert_eq!(report.verification.axiom_status(AXIOM_DISJOINT), Status::Pass);
        assert_eq!(report.verification.axiom_status(AXIOM_MAPPING), Status::Pass);
        match &report.verdict {
            HarnessVerdict::BridgeInBothChains { generator: 1, r_point, s_point, .. } => {
                assert!(r_point.fs_distance(&ProjPoint::basis(2, 2)).unwrap() < 0.5);
                assert!(chain_contains(&diagonal_candidate().unwrap(), 1, Side::S, 8, s_point).unwrap());
            }
            other => panic!("unexpected verdict {other:?}"),
        }
        assert!(report.has_witness());
    }

    #[test]
    fn harness_short_circuits_and_skips_odd() {
        let data = transplanted_nori(2, 2, 0.3, 1).unwrap();
        let report = contradiction_harness(&data);
        assert!(report.has_witness(), "{}", report.summary);

        let nori = nori_build(3, 2, 0.2, &SubspaceConfig::CoordinateDefault).unwrap();
        let report = contradiction_harness(&nori);
        assert_eq!(report.summary, "not applicable: odd dimension");
        assert_eq!(report.verification.status, Status::Pass);
        assert!(!report.has_witness());
    }

    #[test]
    fn report_json_round_trip() {
        let report = contradiction_harness(&diagonal_candidate().unwrap());
        let text = serde_json::to_string(&report).unwrap();
        let back: ObstructionReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }
}
