//! Nori's construction of Schottky groups on odd-dimensional P^n.
//!
//! For `n = 2k + 1`, each generator comes with a frame `M_j` whose first
//! `k + 1` columns span the attracting subspace and whose last `k + 1` columns
//! span the repelling one. In frame coordinates `z = M_j^{-1} x`, the
//! function `phi_j(x) = |z_top|^2 / |z|^2` defines `R_j = {phi_j < alpha}` and
//! `S_j = {phi_j > 1 - alpha}`, and `gamma_j` scales `z_top` by
//! `lambda = 1/alpha - 1`.

use serde::{Deserialize, Serialize};

use crate::codec;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::projective::{intersect, ProjSubspace};
use crate::psl::ProjMap;

use super::region::QuadricRegion;
use super::{RegionPair, SchottkyData};

/// Placement of the `2g` subspaces `L_1, ..., L_{2g}`.
#[derive(Debug, Clone, PartialEq)]
pub enum SubspaceConfig {
    /// Built-in frames; generator 1 uses coordinate subspaces.
    CoordinateDefault,
    /// `L_j` repels and `L_{g+j}` attracts for generator `j`.
    Explicit(Vec<ProjSubspace>),
}

/// Parameters recorded alongside data built by [`nori_build`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoriParams {
    pub alpha: f64,
    pub lambda: f64,
    #[serde(with = "codec::matrices")]
    pub frames: Vec<CMatrix>,
}

impl NoriParams {
    /// `phi_j(x)` for generator `j` (1-based).
    pub fn phi(&self, j: usize, x: &CVector) -> f64 {
        let frame = &self.frames[j - 1];
        let half = frame.ncols() / 2;
        let z = frame.clone().lu().solve(x).expect("frames are invertible");
        let top: f64 = z.rows(0, half).iter().map(|w| w.norm_sqr()).sum();
        top / z.iter().map(|w| w.norm_sqr()).sum::<f64>()
    }
}

/// `1/alpha - 1`.
pub fn nori_factor(alpha: f64) -> f64 {
    1.0 / alpha - 1.0
}

/// `phi(gamma x)` in terms of `phi(x)` when `gamma` scales the top block by `lambda`.
pub fn phi_transfer(phi: f64, lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    l2 * phi / (l2 * phi + 1.0 - phi)
}

pub fn nori_build(n: usize, g: usize, alpha: f64, config: &SubspaceConfig) -> Result<SchottkyData> {
    if n.is_multiple_of(2) {
        return Err(Error::BadDimension(n));
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    if g == 0 {
        return Err(Error::InvalidInput("at least one generator is required".into()));
    }
    let frames = match config {
        SubspaceConfig::CoordinateDefault => default_frames(n, g, alpha),
        SubspaceConfig::Explicit(subspaces) => explicit_frames(n, g, subspaces)?,
    };
    let lambda = nori_factor(alpha);
    let half = n.div_ceil(2);
    let scaling = linalg::real_diagonal(&(0..n + 1).map(|i| if i < half { lambda } else { 1.0 }).collect::<Vec<_>>());
    let top = linalg::real_diagonal(&(0..n + 1).map(|i| if i < half { 1.0 } else { 0.0 }).collect::<Vec<_>>());

    let mut generators = Vec::with_capacity(g);
    let mut regions = Vec::with_capacity(g);
    for frame in &frames {
        let inv = frame.clone().try_inverse().ok_or(Error::Singular { condition: 0.0 })?;
        generators.push(ProjMap::new(frame * &scaling * &inv)?);
        let gram = inv.adjoint() * &inv;
        let top_form = inv.adjoint() * &top * &inv;
        let r = QuadricRegion::new(top_form.clone(), &gram * c(alpha, 0.0))?;
        let s = QuadricRegion::new(&gram * c(2.0 - alpha, 0.0), &gram + &top_form)?;
        regions.push(RegionPair { r, s });
    }
    let params = NoriParams { alpha, lambda, frames };
    SchottkyData::with_nori(n, generators, regions, params)
}

/// Generator 1 uses the standard basis. Generator 2 uses
/// `[[1, s], [s, 1]] ⊗ I_{k+1}` with `s` halfway between the smallest value
/// that separates the regions, `2 sqrt(alpha (1 - alpha))`, and 1. Further
/// generators rotate that frame by `diag(e^{i t/2}, e^{-i t/2}) ⊗ I_{k+1}`.
pub fn default_frames(n: usize, g: usize, alpha: f64) -> Vec<CMatrix> {
    let half = n.div_ceil(2);
    let s = (2.0 * (alpha * (1.0 - alpha)).sqrt() + 1.0) / 2.0;
    let mixed = CMatrix::from_fn(n + 1, n + 1, |i, j| {
        if i == j {
            linalg::ONE
        } else if i % half == j % half {
            c(s, 0.0)
        } else {
            linalg::ZERO
        }
    });
    (0..g)
        .map(|j| match j {
            0 => CMatrix::identity(n + 1, n + 1),
            1 => mixed.clone(),
            _ => {
                let t = std::f64::consts::PI * (j - 1) as f64 / (g - 1) as f64;
                let phase: Vec<C64> =
                    (0..n + 1).map(|i| C64::from_polar(1.0, if i < half { t / 2.0 } else { -t / 2.0 })).collect();
                linalg::diagonal(&phase) * &mixed
            }
        })
        .collect()
}

fn explicit_frames(n: usize, g: usize, subspaces: &[ProjSubspace]) -> Result<Vec<CMatrix>> {
    if subspaces.len() != 2 * g {
        return Err(Error::InvalidInput(format!("expected {} subspaces, found {}", 2 * g, subspaces.len())));
    }
    let k = (n - 1) / 2;
    for s in subspaces {
        s.check_ambient(n)?;
        if s.proj_dim() != k {
            return Err(Error::InvalidInput(format!("subspaces must have dimension {k}, found {}", s.proj_dim())));
        }
    }
    for i in 0..subspaces.len() {
        for j in i + 1..subspaces.len() {
            if intersect(&subspaces[i], &subspaces[j])?.is_some() {
                return Err(Error::SubspacesNotDisjoint(i + 1, j + 1));
            }
        }
    }
    Ok((0..g)
        .map(|j| {
            let attracting = subspaces[g + j].basis();
            let repelling = subspaces[j].basis();
            let cols: Vec<CVector> =
                attracting.column_iter().chain(repelling.column_iter()).map(|col| col.into_owned()).collect();
            CMatrix::from_columns(&cols)
        })
        .collect())
}
