//! JSON artifacts defined by the tool itself. Reports that already exist in
//! the library (groups, verification and obstruction reports, word checks)
//! are written as they are.

use serde::{Deserialize, Serialize};

use schottky_core::asymptotics::LimitSetOracle;
use schottky_core::codec;
use schottky_core::{CMatrix, CVector, LevelSet, ModulusDecomposition, ProjMap, ReducedWord, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordList {
    pub g: usize,
    pub max_len: usize,
    /// Including the identity.
    pub count: usize,
    pub words: Vec<ReducedWord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitSetReport {
    pub map: ProjMap,
    pub decomposition: ModulusDecomposition,
    /// One level set per modulus class, ascending.
    pub limit_set: Vec<LevelSet>,
    /// Orbit clustering checked against the level sets.
    pub oracle: LimitSetOracle,
    /// Largest cluster distance accepted by the oracle.
    pub radius: f64,
}

/// Input of the `decay` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayInput {
    #[serde(with = "codec::matrix")]
    pub t: CMatrix,
    #[serde(with = "codec::scalar")]
    pub lambda: C64,
    pub power: u64,
    /// A seeded point of the unit sphere when absent.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "optional_vector")]
    pub vector: Option<CVector>,
}

mod optional_vector {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use schottky_core::codec::{self, Pair};
    use schottky_core::CVector;

    pub fn serialize<S: Serializer>(v: &Option<CVector>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(codec::encode_vector).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<CVector>, D::Error> {
        Ok(Option::<Vec<Pair>>::deserialize(d)?.map(|pairs| codec::decode_vector(&pairs)))
    }
}
