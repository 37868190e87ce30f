use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered list of distinct class labels.
///
/// Label order is fixed at construction. It drives canonical iteration and
/// tie-breaking only; the set semantics never depend on it.
#[derive(Clone, Debug)]
pub struct Frame {
    labels: Arc<[String]>,
}

impl Frame {
    /// Focal sets are stored as 64-bit masks.
    pub const MAX_LABELS: usize = 64;

    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyFrame);
        }
        if labels.len() > Self::MAX_LABELS {
            return Err(Error::FrameTooLarge {
                len: labels.len(),
                max: Self::MAX_LABELS,
            });
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Frame {
            labels: labels.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn require_index(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// The whole frame as a focal set.
    pub fn full_set(&self) -> FocalSet {
        FocalSet::full(self.len())
    }

    /// Builds a focal set from label names.
    pub fn focal<S: AsRef<str>>(&self, labels: &[S]) -> Result<FocalSet> {
        let mut set = FocalSet::EMPTY;
        for label in labels {
            set = set.with(self.require_index(label.as_ref())?);
        }
        if set.is_empty() {
            return Err(Error::EmptyFocal);
        }
        Ok(set)
    }

    pub(crate) fn ensure_same(&self, other: &Frame) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FrameMismatch)
        }
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::LabelIndex {
                index,
                len: self.len(),
            })
        }
    }
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl Eq for Frame {}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(", "))
    }
}

/// Unordered set of label indices, stored as a bit mask.
///
/// Ordering is canonical: by cardinality, then lexicographic over the member
/// indices in frame order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FocalSet(u64);

impl FocalSet {
    pub const EMPTY: FocalSet = FocalSet(0);

    pub fn singleton(index: usize) -> Self {
        FocalSet(1u64 << index)
    }

    pub fn full(len: usize) -> Self {
        if len >= 64 {
            FocalSet(u64::MAX)
        } else {
            FocalSet((1u64 << len) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices.into_iter().fold(FocalSet::EMPTY, FocalSet::with)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn with(self, index: usize) -> Self {
        FocalSet(self.0 | (1u64 << index))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, index: usize) -> bool {
        index < 64 && self.0 & (1u64 << index) != 0
    }

    pub fn intersection(self, other: FocalSet) -> FocalSet {
        FocalSet(self.0 & other.0)
    }

    pub fn union(self, other: FocalSet) -> FocalSet {
        FocalSet(self.0 | other.0)
    }

    pub fn is_subset_of(self, other: FocalSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Member indices in ascending (frame) order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let index = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(index)
            }
        })
    }

    pub fn labels(self, frame: &Frame) -> Vec<&str> {
        self.iter().map(|i| frame.label(i)).collect()
    }

    pub fn display(self, frame: &Frame) -> String {
        format!("{{{}}}", self.labels(frame).join(", "))
    }
}

impl Ord for FocalSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for FocalSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for FocalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
