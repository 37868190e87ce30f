use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{FocalSet, Frame};
use crate::error::{Error, Result};
use crate::norm;

/// Basic probability assignment over the non-empty subsets of a frame.
///
/// Entries are kept sparse (no zero masses, no empty set) in canonical focal
/// order, and always sum to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct MassFunction {
    frame: Frame,
    masses: BTreeMap<FocalSet, f64>,
}

impl MassFunction {
    /// Validates and builds a mass function.
    ///
    /// Zero masses are dropped. Repeated focal sets are rejected. A total
    /// within 1e-6 of one is renormalized; anything further off is an error.
    pub fn new<I>(frame: Frame, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FocalSet, f64)>,
    {
        let full = frame.full_set();
        let mut masses = BTreeMap::new();
        for (focal, mass) in entries {
            if focal.is_empty() {
                return Err(Error::EmptyFocal);
            }
            if !focal.is_subset_of(full) {
                return Err(Error::Shape(format!(
                    "focal set {focal:?} is not a subset of the frame"
                )));
            }
            norm::check_mass(mass)?;
            if masses.insert(focal, mass).is_some() {
                return Err(Error::DuplicateFocal(focal.display(&frame)));
            }
        }
        masses.retain(|_, m| *m > 0.0);
        let scale = norm::construction_scale(masses.values().sum())?;
        if scale != 1.0 {
            masses.values_mut().for_each(|m| *m *= scale);
        }
        Ok(MassFunction { frame, masses })
    }

    /// Builds a mass function from label lists, e.g. `[(vec!["N", "A"], 0.2)]`.
    pub fn from_labels<I, L, S>(frame: Frame, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (L, f64)>,
        L: AsRef<[S]>,
        S: AsRef<str>,
    {
        let mut pairs = Vec::new();
        for (labels, mass) in entries {
            let labels = labels.as_ref();
            let mut focal = FocalSet::EMPTY;
            for label in labels {
                let index = frame.require_index(label.as_ref())?;
                if focal.contains(index) {
                    return Err(Error::RepeatedLabel(label.as_ref().to_string()));
                }
                focal = focal.with(index);
            }
            pairs.push((focal, mass));
        }
        MassFunction::new(frame, pairs)
    }

    /// All mass on the whole frame.
    pub fn vacuous(frame: Frame) -> Self {
        let full = frame.full_set();
        MassFunction {
            frame,
            masses: BTreeMap::from([(full, 1.0)]),
        }
    }

    /// All mass on a single label.
    pub fn certain(frame: Frame, index: usize) -> Result<Self> {
        frame.check_index(index)?;
        Ok(MassFunction {
            frame,
            masses: BTreeMap::from([(FocalSet::singleton(index), 1.0)]),
        })
    }

    /// Result of an internal operation: prune dust and renormalize.
    pub(crate) fn from_raw(frame: Frame, masses: BTreeMap<FocalSet, f64>) -> Result<Self> {
        Ok(MassFunction {
            frame,
            masses: norm::prune_and_normalize(masses)?,
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn mass(&self, focal: FocalSet) -> f64 {
        self.masses.get(&focal).copied().unwrap_or(0.0)
    }

    /// Focal sets and masses in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (FocalSet, f64)> + '_ {
        self.masses.iter().map(|(f, m)| (*f, *m))
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.masses.values().sum()
    }

    /// True when every focal set is a single label.
    pub fn is_bayesian(&self) -> bool {
        self.masses.keys().all(|f| f.len() == 1)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: MassFunctionDoc = serde_json::from_str(text)?;
        doc.try_into()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&MassFunctionDoc::from(self)).expect("mass function serializes")
    }
}

impl fmt::Display for MassFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .iter()
            .map(|(focal, m)| format!("m({}) = {m}", focal.display(&self.frame)))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Wire form of a mass function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassFunctionDoc {
    pub frame: Vec<String>,
    pub masses: Vec<FocalMassDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FocalMassDoc {
    pub focal: Vec<String>,
    pub mass: f64,
}

impl From<&MassFunction> for MassFunctionDoc {
    fn from(m: &MassFunction) -> Self {
        MassFunctionDoc {
            frame: m.frame.labels().to_vec(),
            masses: m
                .iter()
                .map(|(focal, mass)| FocalMassDoc {
                    focal: focal.labels(&m.frame).into_iter().map(String::from).collect(),
                    mass,
                })
                .collect(),
        }
    }
}

impl TryFrom<MassFunctionDoc> for MassFunction {
    type Error = Error;

    fn try_from(doc: MassFunctionDoc) -> Result<Self> {
        let frame = Frame::new(doc.frame)?;
        MassFunction::from_labels(frame, doc.masses.iter().map(|e| (&e.focal, e.mass)))
    }
}

impl Serialize for MassFunction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MassFunctionDoc::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MassFunction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        MassFunctionDoc::deserialize(deserializer)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dna() -> Frame {
        Frame::new(["D", "N", "A"]).unwrap()
    }

    #[test]
    fn drops_zero_masses() {
        let m = MassFunction::from_labels(dna(), [(vec!["D"], 1.0), (vec!["N"], 0.0)]).unwrap();
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn renormalizes_small_drift_and_rejects_large() {
        let m = MassFunction::from_labels(dna(), [(vec!["D"], 0.5), (vec!["N"], 0.5000004)]).unwrap();
        assert!((m.total() - 1.0).abs() < 1e-15);
        let err = MassFunction::from_labels(dna(), [(vec!["D"], 0.5), (vec!["N"], 0.6)]).unwrap_err();
        assert!(matches!(err, Error::NotNormalized(_)));
    }

    #[test]
    fn json_rejects_bad_documents() {
        let dup = r#"{"frame":["D","N","A"],"masses":[{"focal":["N","A"],"mass":0.5},{"focal":["A","N"],"mass":0.5}]}"#;
        assert!(matches!(MassFunction::from_json_str(dup), Err(Error::DuplicateFocal(_))));
        let empty = r#"{"frame":["D","N","A"],"masses":[{"focal":[],"mass":1.0}]}"#;
        assert!(matches!(MassFunction::from_json_str(empty), Err(Error::EmptyFocal)));
        let short = r#"{"frame":["D","N","A"],"masses":[{"focal":["D"],"mass":0.9}]}"#;
        assert!(matches!(MassFunction::from_json_str(short), Err(Error::NotNormalized(_))));
        let truncated = r#"{"frame":["D","N","A"],"masses":[{"focal":["D"],"#;
        assert!(matches!(MassFunction::from_json_str(truncated), Err(Error::Json(_))));
    }

    #[test]
    fn json_round_trip() {
        let m = MassFunction::from_labels(
            dna(),
            [(vec!["D"], 0.1), (vec!["N", "A"], 0.2), (vec!["D", "N", "A"], 0.7)],
        )
        .unwrap();
        let text = m.to_json_string();
        assert!(text.contains(r#""focal": ["#));
        assert_eq!(MassFunction::from_json_str(&text).unwrap(), m);
    }
}
