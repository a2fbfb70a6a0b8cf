//! Named numerical thresholds.
//!
//! Every threshold used by the library has a documented default and can be
//! overridden by name, either from a `--tol.<name>=<value>` flag or from the
//! `[tolerances]` table of a config file. Unknown names are rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Singular values below `rank * sigma_max` count as zero.
    pub rank: f64,
    /// Consecutive sorted moduli whose ratio exceeds `1 + cluster_gap` start a new class.
    pub cluster_gap: f64,
    /// Eigenvalues closer than `eigen_merge * max(1, |lambda|)` are treated as one
    /// (perturbed) multiple eigenvalue and replaced by their mean.
    pub eigen_merge: f64,
    /// Allowed deviation of a unit-modulus eigenvalue from 1.
    pub unit_modulus: f64,
    /// Relative Frobenius error allowed when reassembling a decomposition.
    pub reassembly: f64,
    /// Projective-identity tolerance for the finite-order test.
    pub finite_order: f64,
    /// Largest exponent probed by the finite-order test.
    pub finite_order_cap: u32,
    /// Quadric values within this band count as boundary points.
    pub boundary: f64,
    /// Decay tables must fall below this value.
    pub decay: f64,
    /// Normalized iterates above this norm count as divergent.
    pub divergence: f64,
    /// Normalized iterates below this norm count as vanishing.
    pub vanishing: f64,
    /// Radius of the counted-hits cluster-point rule.
    pub cluster_radius: f64,
    /// Minimum number of late iterates within `cluster_radius` of a cluster point.
    pub cluster_hits: usize,
    /// Minimum eigenvalue of a pencil combination accepted as a disjointness certificate.
    pub certificate_margin: f64,
    /// Relative residual allowed when matching two region forms up to positive scale.
    pub form_match: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: 1e-10,
            cluster_gap: 1e-6,
            eigen_merge: 1e-4,
            unit_modulus: 1e-8,
            reassembly: 1e-8,
            finite_order: 1e-9,
            finite_order_cap: 360,
            boundary: 1e-10,
            decay: 1e-8,
            divergence: 1e6,
            vanishing: 1e-6,
            cluster_radius: 1e-5,
            cluster_hits: 5,
            certificate_margin: 1e-10,
            form_match: 1e-8,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 15] = [
        "rank",
        "cluster_gap",
        "eigen_merge",
        "unit_modulus",
        "reassembly",
        "finite_order",
        "finite_order_cap",
        "boundary",
        "decay",
        "divergence",
        "vanishing",
        "cluster_radius",
        "cluster_hits",
        "certificate_margin",
        "form_match",
    ];

    /// Overrides one threshold by name.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidInput(format!("tolerance `{key}` must be finite and nonnegative")));
        }
        match key {
            "rank" => self.rank = value,
            "cluster_gap" => self.cluster_gap = value,
            "eigen_merge" => self.eigen_merge = value,
            "unit_modulus" => self.unit_modulus = value,
            "reassembly" => self.reassembly = value,
            "finite_order" => self.finite_order = value,
            "finite_order_cap" => self.finite_order_cap = integral(key, value)? as u32,
            "boundary" => self.boundary = value,
            "decay" => self.decay = value,
            "divergence" => self.divergence = value,
            "vanishing" => self.vanishing = value,
            "cluster_radius" => self.cluster_radius = value,
            "cluster_hits" => self.cluster_hits = integral(key, value)? as usize,
            "certificate_margin" => self.certificate_margin = value,
            "form_match" => self.form_match = value,
            other => return Err(Error::UnknownTolerance(other.to_string())),
        }
        Ok(())
    }

    pub fn with_overrides(overrides: &BTreeMap<String, f64>) -> Result<Self> {
        let mut tol = Self::default();
        for (key, value) in overrides {
            tol.set(key, *value)?;
        }
        Ok(tol)
    }
}

fn integral(key: &str, value: f64) -> Result<f64> {
    if value.fract() != 0.0 || value > u32::MAX as f64 {
        return Err(Error::InvalidInput(format!("tolerance `{key}` must be an integer")));
    }
    Ok(value)
}
