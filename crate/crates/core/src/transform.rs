//! Order-aware transformations between mass functions, permutation mass
//! functions and probability distributions.
//!
//! A mass function is lifted to a random permutation set by splitting every
//! focal mass across the orderings of its members. The split follows the
//! ordered support degree: the probability of drawing that ordering by
//! sampling without replacement, with pignistic probabilities as weights.
//!
//! The ranked probability transformation goes the other way. Each event's
//! mass is shared among its members with weights `exp(−λ/(1−λ)·rank)`, so
//! leading elements receive more. At `λ = 0` it reduces to the pignistic
//! transformation of the order-erased mass function.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dst::{pignistic, Frame, MassFunction, ProbabilityDistribution};
use crate::error::{Error, Result};
use crate::rps::{permutations_of, PermutationEvent, RandomPermutationSet, MAX_PES_FRAME};

/// Dispersion factor of the ranked probability transformation, `0 ≤ λ < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Lambda(f64);

impl Lambda {
    pub const DEFAULT: Lambda = Lambda(0.67);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && (0.0..1.0).contains(&value) {
            Ok(Lambda(value))
        } else {
            Err(Error::out_of_range("lambda", value, "[0, 1)"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `λ / (1 − λ)`, the exponent scale applied to ranks.
    pub fn decay(self) -> f64 {
        self.0 / (1.0 - self.0)
    }
}

impl Default for Lambda {
    fn default() -> Self {
        Lambda::DEFAULT
    }
}

impl TryFrom<f64> for Lambda {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Lambda::new(value)
    }
}

impl From<Lambda> for f64 {
    fn from(l: Lambda) -> f64 {
        l.0
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Fixed-width rank slots of an event: its labels in order, then empty slots
/// up to the frame size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternalOrderRanking {
    slots: Vec<Option<usize>>,
}

impl InternalOrderRanking {
    pub fn slots(&self) -> &[Option<usize>] {
        &self.slots
    }

    /// Slot labels, `"0"` for empty slots.
    pub fn render(&self, frame: &Frame) -> Vec<String> {
        self.slots
            .iter()
            .map(|s| s.map_or_else(|| "0".to_string(), |i| frame.label(i).to_string()))
            .collect()
    }
}

pub fn internal_order_ranking(event: &PermutationEvent, frame: &Frame) -> Result<InternalOrderRanking> {
    if event.len() > frame.len() {
        return Err(Error::Shape("event is longer than the frame".into()));
    }
    for i in event.iter() {
        frame.check_index(i)?;
    }
    let mut slots: Vec<Option<usize>> = event.iter().map(Some).collect();
    slots.resize(frame.len(), None);
    Ok(InternalOrderRanking { slots })
}

/// Ordered support degree `Sord(A) = Π_i BetP(β_i) / Σ_{j≥i} BetP(β_j)`.
///
/// If the remaining suffix carries no probability at some step, each remaining
/// ordering of it gets an equal share, so the supports of all orderings of a
/// set still sum to one.
pub fn ordered_support(event: &PermutationEvent, betp: &ProbabilityDistribution) -> f64 {
    let weights: Vec<f64> = event.iter().map(|i| betp.prob(i)).collect();
    let mut suffix = vec![0.0; weights.len() + 1];
    for i in (0..weights.len()).rev() {
        suffix[i] = suffix[i + 1] + weights[i];
    }
    let mut support = 1.0;
    for (i, &w) in weights.iter().enumerate() {
        if suffix[i] <= 0.0 {
            let remaining = weights.len() - i;
            for r in 2..=remaining {
                support /= r as f64;
            }
            break;
        }
        support *= w / suffix[i];
    }
    support
}

/// Lifts a mass function to a random permutation set: every ordering `σ` of a
/// focal set `S` gets `m(S) · Sord(σ)` against the pignistic distribution of `m`.
///
/// Focal sets with more than [`MAX_PES_FRAME`] members are rejected.
pub fn rps_transform(m: &MassFunction) -> Result<RandomPermutationSet> {
    let betp = pignistic(m);
    let mut out: BTreeMap<PermutationEvent, f64> = BTreeMap::new();
    for (focal, mass) in m.iter() {
        if focal.len() > MAX_PES_FRAME {
            return Err(Error::FrameTooLarge {
                len: focal.len(),
                max: MAX_PES_FRAME,
            });
        }
        for sigma in permutations_of(focal) {
            let support = ordered_support(&sigma, &betp);
            if support > 0.0 {
                out.insert(sigma, mass * support);
            }
        }
    }
    RandomPermutationSet::from_raw(m.frame().clone(), out)
}

/// Ranked probability transformation.
pub fn ranked_probability_transform(mu: &RandomPermutationSet, lambda: Lambda) -> ProbabilityDistribution {
    // Weights are taken relative to the leading element (rank offset −1); the
    // per-event ratios are unchanged and large decays cannot underflow to 0/0.
    rpt_with_rank_offset(mu, lambda, -1.0)
}

/// Evaluates the transformation with weights `exp(−decay · (rank + offset))`.
pub(crate) fn rpt_with_rank_offset(
    mu: &RandomPermutationSet,
    lambda: Lambda,
    offset: f64,
) -> ProbabilityDistribution {
    let decay = lambda.decay();
    let mut probs = vec![0.0; mu.frame().len()];
    let mut weights = Vec::new();
    for (event, mass) in mu.iter() {
        weights.clear();
        weights.extend((1..=event.len()).map(|rank| (-decay * (rank as f64 + offset)).exp()));
        let total: f64 = weights.iter().sum();
        for (i, w) in event.iter().zip(&weights) {
            probs[i] += mass * w / total;
        }
    }
    ProbabilityDistribution::from_weights(mu.frame().clone(), probs)
}

/// Distance between two random permutation sets: total variation distance
/// `½ Σ |Rpt₁(x) − Rpt₂(x)|` between their ranked probability transforms.
pub fn rpt_distance(mu1: &RandomPermutationSet, mu2: &RandomPermutationSet, lambda: Lambda) -> Result<f64> {
    mu1.frame().ensure_same(mu2.frame())?;
    let p = ranked_probability_transform(mu1, lambda);
    let q = ranked_probability_transform(mu2, lambda);
    Ok(total_variation(&p, &q))
}

pub(crate) fn total_variation(p: &ProbabilityDistribution, q: &ProbabilityDistribution) -> f64 {
    0.5 * p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
}
