use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::event::PermutationEvent;
use crate::dst::{FocalSet, Frame, MassFunction};
use crate::error::{Error, Result};
use crate::norm;

/// Permutation mass function over the permutation event space of a frame.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomPermutationSet {
    frame: Frame,
    masses: BTreeMap<PermutationEvent, f64>,
}

impl RandomPermutationSet {
    /// Validates and builds a permutation mass function; same tolerance rules
    /// as [`MassFunction::new`].
    pub fn new<I>(frame: Frame, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PermutationEvent, f64)>,
    {
        let mut masses = BTreeMap::new();
        for (event, mass) in entries {
            if let Some(bad) = event.iter().find(|&i| i >= frame.len()) {
                return Err(Error::LabelIndex {
                    index: bad,
                    len: frame.len(),
                });
            }
            norm::check_mass(mass)?;
            let shown = event.display(&frame);
            if masses.insert(event, mass).is_some() {
                return Err(Error::DuplicateEvent(shown));
            }
        }
        masses.retain(|_, m| *m > 0.0);
        let scale = norm::construction_scale(masses.values().sum())?;
        if scale != 1.0 {
            masses.values_mut().for_each(|m| *m *= scale);
        }
        Ok(RandomPermutationSet { frame, masses })
    }

    /// Builds from label sequences, e.g. `[(vec!["N", "A"], 0.1)]`.
    pub fn from_labels<I, L, S>(frame: Frame, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (L, f64)>,
        L: AsRef<[S]>,
        S: AsRef<str>,
    {
        let mut pairs = Vec::new();
        for (labels, mass) in entries {
            pairs.push((PermutationEvent::from_labels(&frame, labels.as_ref())?, mass));
        }
        RandomPermutationSet::new(frame, pairs)
    }

    pub fn certain(frame: Frame, event: PermutationEvent) -> Result<Self> {
        RandomPermutationSet::new(frame, [(event, 1.0)])
    }

    pub(crate) fn from_raw(frame: Frame, masses: BTreeMap<PermutationEvent, f64>) -> Result<Self> {
        Ok(RandomPermutationSet {
            frame,
            masses: norm::prune_and_normalize(masses)?,
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn mass(&self, event: &PermutationEvent) -> f64 {
        self.masses.get(event).copied().unwrap_or(0.0)
    }

    /// Events and masses in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&PermutationEvent, f64)> + '_ {
        self.masses.iter().map(|(e, m)| (e, *m))
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

    /// Forgets the internal order: masses of events with the same elements are
    /// summed into one focal set.
    pub fn order_erased(&self) -> MassFunction {
        let mut out: BTreeMap<FocalSet, f64> = BTreeMap::new();
        for (event, mass) in self.iter() {
            *out.entry(event.elements()).or_insert(0.0) += mass;
        }
        MassFunction::from_raw(self.frame.clone(), out).expect("non-empty permutation mass function")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: RpsDoc = serde_json::from_str(text)?;
        doc.try_into()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&RpsDoc::from(self)).expect("permutation mass function serializes")
    }
}

impl fmt::Display for RandomPermutationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .iter()
            .map(|(e, m)| format!("μ{} = {m}", e.display(&self.frame)))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Wire form of a random permutation set; event arrays are order-significant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RpsDoc {
    pub frame: Vec<String>,
    pub pmf: Vec<EventMassDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventMassDoc {
    pub event: Vec<String>,
    pub mass: f64,
}

impl From<&RandomPermutationSet> for RpsDoc {
    fn from(rps: &RandomPermutationSet) -> Self {
        RpsDoc {
            frame: rps.frame.labels().to_vec(),
            pmf: rps
                .iter()
                .map(|(event, mass)| EventMassDoc {
                    event: event.labels(&rps.frame).into_iter().map(String::from).collect(),
                    mass,
                })
                .collect(),
        }
    }
}

impl TryFrom<RpsDoc> for RandomPermutationSet {
    type Error = Error;

    fn try_from(doc: RpsDoc) -> Result<Self> {
        let frame = Frame::new(doc.frame)?;
        RandomPermutationSet::from_labels(frame, doc.pmf.iter().map(|e| (&e.event, e.mass)))
    }
}

impl Serialize for RandomPermutationSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RpsDoc::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RandomPermutationSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        RpsDoc::deserialize(deserializer)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}
