//! Outcome-driven source reliability.
//!
//! Each training sample scores every source by its decision contribution:
//! the ranked probability of the true label minus the mean ranked probability
//! of the other labels. Per-source totals are min-max normalized into
//! reliabilities in `[0, 1]`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dst::{MassFunction, ProbabilityDistribution};
use crate::error::{Error, Result};
use crate::transform::{ranked_probability_transform, rps_transform, Lambda};

/// One source's contribution on one training sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionContribution {
    pub source: usize,
    pub sample: usize,
    pub value: f64,
}

/// Per-source totals, normalized reliabilities and the resulting fusion order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    pub dc: Vec<f64>,
    pub reliability: Vec<f64>,
    pub fusion_order: Vec<usize>,
}

impl ReliabilityReport {
    pub fn from_totals(dc: Vec<f64>) -> Result<Self> {
        let reliability = source_reliability(&dc)?;
        let fusion_order = fusion_order(&reliability);
        Ok(ReliabilityReport {
            dc,
            reliability,
            fusion_order,
        })
    }

    pub fn sources(&self) -> usize {
        self.reliability.len()
    }
}

impl fmt::Display for ReliabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>6}  {:>14}  {:>11}  {:>5}", "source", "DC", "reliability", "rank")?;
        let mut rank = vec![0; self.sources()];
        for (pos, &k) in self.fusion_order.iter().enumerate() {
            rank[k] = pos + 1;
        }
        for (k, ((dc, r), rank)) in self.dc.iter().zip(&self.reliability).zip(&rank).enumerate() {
            writeln!(f, "{k:>6}  {dc:>14.6}  {r:>11.6}  {rank:>5}")?;
        }
        Ok(())
    }
}

/// `Rpt(x*) − mean of Rpt over the other labels`.
pub fn decision_contribution(rpt: &ProbabilityDistribution, true_label: &str) -> Result<f64> {
    let truth = rpt.frame().require_index(true_label)?;
    decision_contribution_at(rpt, truth)
}

pub fn decision_contribution_at(rpt: &ProbabilityDistribution, truth: usize) -> Result<f64> {
    let n = rpt.frame().len();
    rpt.frame().check_index(truth)?;
    if n < 2 {
        return Err(Error::Shape(
            "decision contribution needs a frame of at least two labels".into(),
        ));
    }
    let others: f64 = rpt
        .probs()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != truth)
        .map(|(_, p)| p)
        .sum();
    Ok(rpt.prob(truth) - others / (n - 1) as f64)
}

/// Sums contributions per source. Summation runs in (source, sample) order
/// regardless of input order.
pub fn aggregate_dc(contributions: &[DecisionContribution], sources: usize) -> Result<Vec<f64>> {
    let mut sorted: Vec<&DecisionContribution> = contributions.iter().collect();
    sorted.sort_by_key(|c| (c.source, c.sample));
    let mut totals = vec![0.0; sources];
    for c in sorted {
        let slot = totals.get_mut(c.source).ok_or_else(|| {
            Error::Shape(format!("contribution for source {} but only {sources} sources", c.source))
        })?;
        *slot += c.value;
    }
    Ok(totals)
}

/// Min-max normalization of per-source totals. When every total is equal all
/// sources get reliability 1.
pub fn source_reliability(dc_totals: &[f64]) -> Result<Vec<f64>> {
    if dc_totals.is_empty() {
        return Err(Error::Shape("reliability needs at least one source".into()));
    }
    if let Some(bad) = dc_totals.iter().find(|v| !v.is_finite()) {
        return Err(Error::Shape(format!("non-finite decision contribution {bad}")));
    }
    let min = dc_totals.iter().copied().fold(f64::INFINITY, f64::min);
    let max = dc_totals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return Ok(vec![1.0; dc_totals.len()]);
    }
    let span = max - min;
    Ok(dc_totals.iter().map(|v| (v - min) / span).collect())
}

/// Source indices by descending reliability, ascending index on ties.
pub fn fusion_order(reliability: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..reliability.len()).collect();
    order.sort_by(|&a, &b| reliability[b].total_cmp(&reliability[a]).then(a.cmp(&b)));
    order
}

/// Reliability of `k` sources from their BPAs on `N` labelled training samples.
///
/// `per_source[k][j]` is source `k`'s BPA for sample `j`.
pub fn compute_reliabilities<S: AsRef<str> + Sync>(
    per_source: &[Vec<MassFunction>],
    truths: &[S],
    lambda: Lambda,
) -> Result<ReliabilityReport> {
    let wrapped: Vec<Vec<Option<&MassFunction>>> = per_source
        .iter()
        .map(|row| row.iter().map(Some).collect())
        .collect();
    compute_reliabilities_partial(&wrapped, truths, lambda)
}

/// Like [`compute_reliabilities`], but a sample whose BPA could not be
/// generated (`None`) contributes 0 for that source.
pub fn compute_reliabilities_partial<S: AsRef<str> + Sync>(
    per_source: &[Vec<Option<&MassFunction>>],
    truths: &[S],
    lambda: Lambda,
) -> Result<ReliabilityReport> {
    if per_source.is_empty() {
        return Err(Error::Shape("no sources".into()));
    }
    if truths.is_empty() {
        return Err(Error::Shape("empty training set".into()));
    }
    for (k, row) in per_source.iter().enumerate() {
        if row.len() != truths.len() {
            return Err(Error::Shape(format!(
                "source {k} has {} samples, expected {}",
                row.len(),
                truths.len()
            )));
        }
    }
    let totals: Result<Vec<f64>> = per_source
        .par_iter()
        .enumerate()
        .map(|(k, row)| {
            let mut total = 0.0;
            for (j, (bpa, truth)) in row.iter().zip(truths).enumerate() {
                let Some(bpa) = bpa else {
                    log::debug!("source {k}, sample {j}: no BPA, contributing 0");
                    continue;
                };
                total += sample_contribution(bpa, truth.as_ref(), lambda)?;
            }
            Ok(total)
        })
        .collect();
    ReliabilityReport::from_totals(totals?)
}

pub(crate) fn sample_contribution(bpa: &MassFunction, truth: &str, lambda: Lambda) -> Result<f64> {
    let rps = rps_transform(bpa)?;
    decision_contribution(&ranked_probability_transform(&rps, lambda), truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dst::Frame;

    fn f3() -> Frame {
        Frame::new(["x1", "x2", "x3"]).unwrap()
    }

    #[test]
    fn contribution_examples() {
        let certain = ProbabilityDistribution::new(f3(), vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(decision_contribution(&certain, "x1").unwrap(), 1.0);
        let uniform = ProbabilityDistribution::uniform(Frame::new(["a", "b", "c", "d"]).unwrap());
        assert_eq!(decision_contribution(&uniform, "c").unwrap(), 0.0);
        assert!(matches!(decision_contribution(&certain, "x9"), Err(Error::UnknownLabel(_))));
        let single = ProbabilityDistribution::uniform(Frame::new(["a"]).unwrap());
        assert!(decision_contribution(&single, "a").is_err());
    }

    #[test]
    fn contribution_of_opposing_source() {
        let m2 = MassFunction::from_labels(f3(), [(vec!["x2", "x3"], 1.0)]).unwrap();
        let dc = sample_contribution(&m2, "x1", Lambda::DEFAULT).unwrap();
        assert!((dc + 0.5).abs() < 1e-12);
    }

    #[test]
    fn aggregation() {
        let stream = [
            DecisionContribution { source: 0, sample: 0, value: 1.0 },
            DecisionContribution { source: 0, sample: 1, value: -0.5 },
            DecisionContribution { source: 1, sample: 0, value: 0.2 },
        ];
        assert_eq!(aggregate_dc(&stream, 2).unwrap(), vec![0.5, 0.2]);
        assert!(aggregate_dc(&stream, 1).is_err());
        let repeated: Vec<_> = (0..7)
            .map(|j| DecisionContribution { source: 0, sample: j, value: 0.25 })
            .collect();
        assert_eq!(aggregate_dc(&repeated, 1).unwrap(), vec![1.75]);
    }

    #[test]
    fn min_max_normalization() {
        assert_eq!(source_reliability(&[3.0, 1.0, -1.0]).unwrap(), vec![1.0, 0.5, 0.0]);
        assert_eq!(source_reliability(&[0.4, 0.4, 0.4]).unwrap(), vec![1.0, 1.0, 1.0]);
        assert!(source_reliability(&[]).is_err());
    }

    #[test]
    fn fusion_order_ties_by_index() {
        assert_eq!(fusion_order(&[0.5, 1.0, 0.5, 0.0]), vec![1, 0, 2, 3]);
    }

    #[test]
    fn single_source_is_fully_reliable() {
        let m = MassFunction::from_labels(f3(), [(vec!["x2"], 0.6), (vec!["x1", "x2", "x3"], 0.4)]).unwrap();
        let report = compute_reliabilities(&[vec![m.clone(), m]], &["x1", "x3"], Lambda::DEFAULT).unwrap();
        assert_eq!(report.reliability, vec![1.0]);
        assert_eq!(report.fusion_order, vec![0]);
    }

    #[test]
    fn shape_errors() {
        let m = MassFunction::vacuous(f3());
        assert!(compute_reliabilities(&[vec![m.clone()]], &["x1", "x2"], Lambda::DEFAULT).is_err());
        assert!(compute_reliabilities::<&str>(&[vec![]], &[], Lambda::DEFAULT).is_err());
    }
}
