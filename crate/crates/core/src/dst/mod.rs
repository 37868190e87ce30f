//! Classical Dempster-Shafer primitives.

mod frame;
mod mass;
mod probability;

use std::collections::BTreeMap;

pub use frame::{FocalSet, Frame};
pub use mass::{FocalMassDoc, MassFunction, MassFunctionDoc};
pub use probability::ProbabilityDistribution;

use crate::error::{Error, Result};
use crate::norm::PRUNE_BELOW;

/// Pignistic transformation: each focal mass is shared evenly among its members.
pub fn pignistic(m: &MassFunction) -> ProbabilityDistribution {
    let mut betp = vec![0.0; m.frame().len()];
    for (focal, mass) in m.iter() {
        let share = mass / focal.len() as f64;
        for i in focal.iter() {
            betp[i] += share;
        }
    }
    ProbabilityDistribution::from_weights(m.frame().clone(), betp)
}

/// Classical discounting with reliability `beta`: the withheld mass moves to the
/// whole frame.
pub fn discount_bpa(m: &MassFunction, beta: f64) -> Result<MassFunction> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::out_of_range("beta", beta, "[0, 1]"));
    }
    if beta == 1.0 {
        return Ok(m.clone());
    }
    let full = m.frame().full_set();
    let mut out: BTreeMap<FocalSet, f64> = m.iter().map(|(f, v)| (f, v * beta)).collect();
    *out.entry(full).or_insert(0.0) += 1.0 - beta;
    MassFunction::from_raw(m.frame().clone(), out)
}

/// Dempster's rule of combination.
///
/// Fails with [`Error::TotalConflict`] when `1 - K` falls below 1e-12.
pub fn dempster_combine(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    m1.frame().ensure_same(m2.frame())?;
    let mut joint: BTreeMap<FocalSet, f64> = BTreeMap::new();
    let mut conflict = 0.0;
    for (a, ma) in m1.iter() {
        for (b, mb) in m2.iter() {
            let c = a.intersection(b);
            if c.is_empty() {
                conflict += ma * mb;
            } else {
                *joint.entry(c).or_insert(0.0) += ma * mb;
            }
        }
    }
    let agreement = 1.0 - conflict;
    if agreement < PRUNE_BELOW {
        return Err(Error::TotalConflict(conflict));
    }
    joint.values_mut().for_each(|v| *v /= agreement);
    MassFunction::from_raw(m1.frame().clone(), joint)
}

/// Folds [`dempster_combine`] over the sources left to right.
pub fn dempster_combine_all<'a, I>(sources: I) -> Result<Option<MassFunction>>
where
    I: IntoIterator<Item = &'a MassFunction>,
{
    let mut acc: Option<MassFunction> = None;
    for m in sources {
        acc = Some(match acc {
            None => m.clone(),
            Some(prev) => dempster_combine(&prev, m)?,
        });
    }
    Ok(acc)
}

/// Jousselme distance `sqrt(½ (m1 − m2)ᵀ D (m1 − m2))` with `D(A, B) = |A∩B| / |A∪B|`.
pub fn jousselme_distance(m1: &MassFunction, m2: &MassFunction) -> Result<f64> {
    m1.frame().ensure_same(m2.frame())?;
    let mut diff: BTreeMap<FocalSet, f64> = m1.iter().collect();
    for (focal, mass) in m2.iter() {
        *diff.entry(focal).or_insert(0.0) -= mass;
    }
    let terms: Vec<(FocalSet, f64)> = diff.into_iter().collect();
    let mut quad = 0.0;
    for &(a, da) in &terms {
        for &(b, db) in &terms {
            let jaccard = a.intersection(b).len() as f64 / a.union(b).len() as f64;
            quad += da * jaccard * db;
        }
    }
    Ok((0.5 * quad).max(0.0).sqrt().min(1.0))
}
