use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::dst::{FocalSet, Frame};
use crate::error::{Error, Result};

/// Largest frame whose permutation event space is enumerated.
pub const MAX_PES_FRAME: usize = 8;

/// Non-empty ordered sequence of distinct label indices.
///
/// Canonical order is by length, then lexicographic over frame indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PermutationEvent(Box<[u8]>);

impl PermutationEvent {
    /// Validates an index sequence against a frame of `frame_len` labels.
    pub fn new(indices: &[usize], frame_len: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyEvent);
        }
        let mut seen = FocalSet::EMPTY;
        for &i in indices {
            if i >= frame_len {
                return Err(Error::LabelIndex {
                    index: i,
                    len: frame_len,
                });
            }
            if seen.contains(i) {
                return Err(Error::RepeatedLabel(i.to_string()));
            }
            seen = seen.with(i);
        }
        Ok(PermutationEvent(indices.iter().map(|&i| i as u8).collect()))
    }

    pub fn from_labels<S: AsRef<str>>(frame: &Frame, labels: &[S]) -> Result<Self> {
        let mut indices = Vec::with_capacity(labels.len());
        for label in labels {
            let index = frame.require_index(label.as_ref())?;
            if indices.contains(&index) {
                return Err(Error::RepeatedLabel(label.as_ref().to_string()));
            }
            indices.push(index);
        }
        PermutationEvent::new(&indices, frame.len())
    }

    pub(crate) fn from_raw(indices: Vec<u8>) -> Option<Self> {
        if indices.is_empty() {
            None
        } else {
            Some(PermutationEvent(indices.into_boxed_slice()))
        }
    }

    pub fn singleton(index: usize) -> Self {
        PermutationEvent(Box::new([index as u8]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Label indices in rank order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.0.iter().map(|&i| i as usize)
    }

    pub fn first(&self) -> usize {
        self.0[0] as usize
    }

    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1] as usize
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.iter().any(|&i| i as usize == index)
    }

    /// 1-based position of a label, if present.
    pub fn rank_of(&self, index: usize) -> Option<usize> {
        self.0.iter().position(|&i| i as usize == index).map(|p| p + 1)
    }

    /// The underlying unordered set.
    pub fn elements(&self) -> FocalSet {
        FocalSet::from_indices(self.iter())
    }

    pub fn labels<'a>(&self, frame: &'a Frame) -> Vec<&'a str> {
        self.iter().map(|i| frame.label(i)).collect()
    }

    pub fn display(&self, frame: &Frame) -> String {
        format!("({})", self.labels(frame).join(", "))
    }

    /// Left intersection: `self` with every element absent from `other`
    /// removed, keeping `self`'s order.
    pub fn left_intersect(&self, other: &PermutationEvent) -> Option<PermutationEvent> {
        let keep = other.elements();
        PermutationEvent::from_raw(self.0.iter().copied().filter(|&i| keep.contains(i as usize)).collect())
    }

    /// Right intersection: `other` filtered by membership in `self`, keeping
    /// `other`'s order.
    pub fn right_intersect(&self, other: &PermutationEvent) -> Option<PermutationEvent> {
        other.left_intersect(self)
    }
}

impl Ord for PermutationEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for PermutationEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PermutationEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Pe").field(&self.0).finish()
    }
}

/// `A ⃖∩ B`; `None` stands for the empty event.
pub fn left_intersect(a: &PermutationEvent, b: &PermutationEvent) -> Option<PermutationEvent> {
    a.left_intersect(b)
}

/// `A ⃗∩ B`; `None` stands for the empty event.
pub fn right_intersect(a: &PermutationEvent, b: &PermutationEvent) -> Option<PermutationEvent> {
    a.right_intersect(b)
}

/// Number of non-empty permutation events on `n` labels: `Σ_{i=1..n} n!/(n−i)!`.
pub fn pes_size(n: usize) -> usize {
    let mut total = 0usize;
    let mut falling = 1usize;
    for i in 0..n {
        falling *= n - i;
        total += falling;
    }
    total
}

type PesCache = RwLock<HashMap<usize, Arc<[PermutationEvent]>>>;

fn pes_cache() -> &'static PesCache {
    static CACHE: OnceLock<PesCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Every non-empty permutation event of the frame in canonical order.
///
/// Results are shared per frame size; frames above [`MAX_PES_FRAME`] labels
/// are rejected.
pub fn enumerate_pes(frame: &Frame) -> Result<Arc<[PermutationEvent]>> {
    let n = frame.len();
    if n > MAX_PES_FRAME {
        return Err(Error::FrameTooLarge {
            len: n,
            max: MAX_PES_FRAME,
        });
    }
    if let Some(hit) = pes_cache().read().expect("pes cache poisoned").get(&n) {
        return Ok(Arc::clone(hit));
    }
    let mut events = Vec::with_capacity(pes_size(n));
    let all: Vec<usize> = (0..n).collect();
    for len in 1..=n {
        arrangements(&all, len, &mut Vec::with_capacity(len), &mut events);
    }
    let events: Arc<[PermutationEvent]> = events.into();
    pes_cache()
        .write()
        .expect("pes cache poisoned")
        .entry(n)
        .or_insert_with(|| Arc::clone(&events));
    Ok(events)
}

/// All orderings of a set's members, lexicographic in frame order.
pub fn permutations_of(set: FocalSet) -> Vec<PermutationEvent> {
    let members: Vec<usize> = set.iter().collect();
    let mut out = Vec::new();
    arrangements(&members, members.len(), &mut Vec::with_capacity(members.len()), &mut out);
    out
}

// Emits the `len`-arrangements of `pool` in lexicographic order.
fn arrangements(pool: &[usize], len: usize, prefix: &mut Vec<usize>, out: &mut Vec<PermutationEvent>) {
    if prefix.len() == len {
        if let Some(event) = PermutationEvent::from_raw(prefix.iter().map(|&i| i as u8).collect()) {
            out.push(event);
        }
        return;
    }
    for &candidate in pool {
        if prefix.contains(&candidate) {
            continue;
        }
        prefix.push(candidate);
        arrangements(pool, len, prefix, out);
        prefix.pop();
    }
}
