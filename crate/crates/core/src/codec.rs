//! JSON encoding of complex data: every complex number is a `[re, im]` pair,
//! vectors are arrays of pairs and matrices are row-major arrays of rows.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{CMatrix, CVector, C64};

pub type Pair = [f64; 2];

pub fn encode_scalar(z: C64) -> Pair {
    [z.re, z.im]
}

pub fn decode_scalar(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

pub fn encode_vector(v: &CVector) -> Vec<Pair> {
    v.iter().map(|&z| encode_scalar(z)).collect()
}

pub fn decode_vector(pairs: &[Pair]) -> CVector {
    CVector::from_iterator(pairs.len(), pairs.iter().map(|&p| decode_scalar(p)))
}

pub fn encode_matrix(m: &CMatrix) -> Vec<Vec<Pair>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| encode_scalar(m[(i, j)])).collect()).collect()
}

pub fn decode_matrix(rows: &[Vec<Pair>]) -> Result<CMatrix, String> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err("ragged matrix rows".into());
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| decode_scalar(rows[i][j])))
}

pub mod scalar {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        encode_scalar(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        Ok(decode_scalar(Pair::deserialize(d)?))
    }
}

pub mod vector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &CVector, s: S) -> Result<S::Ok, S::Error> {
        encode_vector(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVector, D::Error> {
        Ok(decode_vector(&Vec::<Pair>::deserialize(d)?))
    }
}

pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        encode_matrix(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        decode_matrix(&Vec::<Vec<Pair>>::deserialize(d)?).map_err(D::Error::custom)
    }
}

pub mod matrices {
    use super::*;

    pub fn serialize<S: Serializer>(ms: &[CMatrix], s: S) -> Result<S::Ok, S::Error> {
        ms.iter().map(encode_matrix).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMatrix>, D::Error> {
        Vec::<Vec<Vec<Pair>>>::deserialize(d)?
            .iter()
            .map(|rows| decode_matrix(rows).map_err(D::Error::custom))
            .collect()
    }
}
