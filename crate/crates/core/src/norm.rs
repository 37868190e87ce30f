//! Mass bookkeeping shared by mass functions and permutation mass functions.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Masses below this are dropped after every operation.
pub const PRUNE_BELOW: f64 = 1e-12;
/// A total within this distance of 1 is accepted as is.
pub const SUM_TOLERANCE: f64 = 1e-9;
/// A total within this distance of 1 is silently renormalized on construction.
pub const RENORMALIZE_WITHIN: f64 = 1e-6;

pub(crate) fn check_mass(mass: f64) -> Result<()> {
    if mass.is_finite() && (0.0..=1.0 + SUM_TOLERANCE).contains(&mass) {
        Ok(())
    } else {
        Err(Error::InvalidMass(mass))
    }
}

/// Scale factor that brings a user-supplied total back to 1.
pub(crate) fn construction_scale(total: f64) -> Result<f64> {
    let deviation = (total - 1.0).abs();
    if deviation <= SUM_TOLERANCE {
        Ok(1.0)
    } else if deviation <= RENORMALIZE_WITHIN {
        Ok(1.0 / total)
    } else {
        Err(Error::NotNormalized(total))
    }
}

/// Drops negligible entries and rescales the rest to sum to exactly 1.
pub(crate) fn prune_and_normalize<K: Ord>(map: BTreeMap<K, f64>) -> Result<BTreeMap<K, f64>> {
    let mut kept: BTreeMap<K, f64> = map.into_iter().filter(|(_, m)| *m >= PRUNE_BELOW).collect();
    let total: f64 = kept.values().sum();
    if total.is_nan() || total <= 0.0 || total.is_infinite() {
        return Err(Error::NotNormalized(total));
    }
    if total != 1.0 {
        for mass in kept.values_mut() {
            *mass /= total;
        }
    }
    Ok(kept)
}
