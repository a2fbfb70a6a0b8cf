//! Schottky data on P^n: quadric regions paired by generators, the Nori
//! construction, verification of the Schottky axioms and word dynamics.

pub mod dynamics;
pub mod nori;
pub mod region;
pub mod verify;
pub mod words;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::psl::ProjMap;

pub use dynamics::{
    accumulation_estimate, chain_contains, fk_contains, fundamental_domain_membership, nested_region,
    sample_interior_points, AccumulationReport, Direction, Membership,
};
pub use nori::{nori_build, nori_factor, phi_transfer, NoriParams, SubspaceConfig};
pub use region::{region_disjoint, region_disjoint_with, region_image, Disjointness, Position, QuadricRegion};
pub use verify::{verify_schottky, verify_schottky_with, AxiomCheck, Certificate, Status, VerificationReport};
pub use words::{
    check_words, enumerate_reduced_words, reduced_word_count, word_image_region, Letter, ReducedWord, WordCheckReport,
    WordIter,
};

/// Which region of a pair: `R_j` (repelling) or `S_j` (attracting).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    R,
    S,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::R => "R",
            Side::S => "S",
        })
    }
}

/// `R_j` or `S_j`, with `generator` counted from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RegionRef {
    pub generator: usize,
    pub side: Side,
}

impl fmt::Display for RegionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.side, self.generator)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionPair {
    #[serde(rename = "R")]
    pub r: QuadricRegion,
    #[serde(rename = "S")]
    pub s: QuadricRegion,
}

impl RegionPair {
    pub fn get(&self, side: Side) -> &QuadricRegion {
        match side {
            Side::R => &self.r,
            Side::S => &self.s,
        }
    }
}

/// Generators `gamma_1..gamma_g` with region pairs `(R_j, S_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchottkyData {
    n: usize,
    generators: Vec<ProjMap>,
    inverses: Vec<ProjMap>,
    regions: Vec<RegionPair>,
    nori: Option<NoriParams>,
}

impl SchottkyData {
    /// Checks shapes only; the axioms are left to [`verify_schottky`].
    pub fn new(n: usize, generators: Vec<ProjMap>, regions: Vec<RegionPair>) -> Result<Self> {
        Self::build(n, generators, regions, None)
    }

    pub(crate) fn with_nori(
        n: usize,
        generators: Vec<ProjMap>,
        regions: Vec<RegionPair>,
        nori: NoriParams,
    ) -> Result<Self> {
        Self::build(n, generators, regions, Some(nori))
    }

    fn build(n: usize, generators: Vec<ProjMap>, regions: Vec<RegionPair>, nori: Option<NoriParams>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::EmptyInput);
        }
        if generators.len() != regions.len() {
            return Err(Error::InvalidInput(format!(
                "{} generators but {} region pairs",
                generators.len(),
                regions.len()
            )));
        }
        for g in &generators {
            g.check_dim(n)?;
        }
        for pair in &regions {
            for r in [&pair.r, &pair.s] {
                if r.ambient_dim() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: r.ambient_dim() });
                }
            }
        }
        if let Some(p) = &nori {
            if p.frames.len() != generators.len() || p.frames.iter().any(|f| f.nrows() != n + 1 || f.ncols() != n + 1) {
                return Err(Error::InvalidInput("Nori frames do not match the generators".into()));
            }
        }
        let inverses = generators.iter().map(ProjMap::inverse).collect();
        Ok(SchottkyData { n, generators, inverses, regions, nori })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn g(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[ProjMap] {
        &self.generators
    }

    pub fn regions(&self) -> &[RegionPair] {
        &self.regions
    }

    pub fn nori(&self) -> Option<&NoriParams> {
        self.nori.as_ref()
    }

    /// `gamma_j^{sign}` with `j` counted from 1.
    pub fn generator(&self, j: usize, sign: i8) -> &ProjMap {
        if sign >= 0 {
            &self.generators[j - 1]
        } else {
            &self.inverses[j - 1]
        }
    }

    pub fn region(&self, r: RegionRef) -> &QuadricRegion {
        self.regions[r.generator - 1].get(r.side)
    }

    /// `R_1, S_1, R_2, S_2, ...`.
    pub fn region_refs(&self) -> Vec<RegionRef> {
        (1..=self.g()).flat_map(|generator| [Side::R, Side::S].map(|side| RegionRef { generator, side })).collect()
    }

    pub fn check_generator(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.g() {
            return Err(Error::InvalidInput(format!("generator index {j} is outside 1..={}", self.g())));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DataRepr {
    n: usize,
    generators: Vec<ProjMap>,
    regions: Vec<RegionPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nori: Option<NoriParams>,
}

impl Serialize for SchottkyData {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DataRepr {
            n: self.n,
            generators: self.generators.clone(),
            regions: self.regions.clone(),
            nori: self.nori.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SchottkyData {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = DataRepr::deserialize(d)?;
        Self::build(repr.n, repr.generators, repr.regions, repr.nori).map_err(serde::de::Error::custom)
    }
}
