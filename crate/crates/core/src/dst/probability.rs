use std::fmt;

use serde::{Deserialize, Serialize};

use super::Frame;
use crate::error::{Error, Result};
use crate::norm::SUM_TOLERANCE;

/// Probability distribution over the labels of a frame, indexed in frame order.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityDistribution {
    frame: Frame,
    probs: Vec<f64>,
}

impl ProbabilityDistribution {
    pub fn new(frame: Frame, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != frame.len() {
            return Err(Error::Shape(format!(
                "{} probabilities for a frame of {} labels",
                probs.len(),
                frame.len()
            )));
        }
        if let Some(&bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidMass(bad));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::NotNormalized(total));
        }
        Ok(ProbabilityDistribution { frame, probs })
    }

    pub fn uniform(frame: Frame) -> Self {
        let n = frame.len();
        ProbabilityDistribution {
            frame,
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// Normalizes accumulated non-negative weights.
    pub(crate) fn from_weights(frame: Frame, mut weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        if total > 0.0 && total != 1.0 {
            for w in &mut weights {
                *w /= total;
            }
        }
        ProbabilityDistribution {
            frame,
            probs: weights,
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.frame.index_of(label).map(|i| self.probs[i])
    }

    /// Index of the most probable label; the lowest index wins ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate().skip(1) {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.frame
            .labels()
            .iter()
            .map(String::as_str)
            .zip(self.probs.iter().copied())
    }
}

impl fmt::Display for ProbabilityDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(l, p)| format!("{l}: {p}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// JSON form: `{"frame": [...], "probs": [...]}`, probabilities in frame order.
#[derive(Serialize, Deserialize)]
struct DistributionDoc {
    frame: Vec<String>,
    probs: Vec<f64>,
}

impl Serialize for ProbabilityDistribution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        DistributionDoc {
            frame: self.frame.labels().to_vec(),
            probs: self.probs.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProbabilityDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = DistributionDoc::deserialize(deserializer)?;
        let frame = Frame::new(doc.frame).map_err(serde::de::Error::custom)?;
        ProbabilityDistribution::new(frame, doc.probs).map_err(serde::de::Error::custom)
    }
}
