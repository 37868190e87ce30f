//! Random permutation sets: permutation events, ordered intersections,
//! left/right orthogonal sums, the ordered probability transformation and
//! discounting.

mod event;
mod set;

use std::collections::BTreeMap;

pub use event::{
    enumerate_pes, left_intersect, permutations_of, pes_size, right_intersect, PermutationEvent,
    MAX_PES_FRAME,
};
pub use set::{EventMassDoc, RandomPermutationSet, RpsDoc};

use crate::dst::ProbabilityDistribution;
use crate::error::{Error, Result};
use crate::norm::PRUNE_BELOW;

/// Which ordered intersection drives an orthogonal sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// The left operand's order survives.
    #[default]
    Left,
    /// The right operand's order survives.
    Right,
}

fn orthogonal_sum(
    mu1: &RandomPermutationSet,
    mu2: &RandomPermutationSet,
    orientation: Orientation,
) -> Result<RandomPermutationSet> {
    mu1.frame().ensure_same(mu2.frame())?;
    let mut joint: BTreeMap<PermutationEvent, f64> = BTreeMap::new();
    let mut conflict = 0.0;
    for (b, mb) in mu1.iter() {
        for (c, mc) in mu2.iter() {
            let meet = match orientation {
                Orientation::Left => b.left_intersect(c),
                Orientation::Right => b.right_intersect(c),
            };
            match meet {
                Some(a) => *joint.entry(a).or_insert(0.0) += mb * mc,
                None => conflict += mb * mc,
            }
        }
    }
    let agreement = 1.0 - conflict;
    if agreement < PRUNE_BELOW {
        return Err(Error::TotalConflict(conflict));
    }
    joint.values_mut().for_each(|v| *v /= agreement);
    RandomPermutationSet::from_raw(mu1.frame().clone(), joint)
}

/// Left orthogonal sum `μ1 ⃖⊕ μ2`.
pub fn left_orthogonal_sum(
    mu1: &RandomPermutationSet,
    mu2: &RandomPermutationSet,
) -> Result<RandomPermutationSet> {
    orthogonal_sum(mu1, mu2, Orientation::Left)
}

/// Right orthogonal sum `μ1 ⃗⊕ μ2`.
pub fn right_orthogonal_sum(
    mu1: &RandomPermutationSet,
    mu2: &RandomPermutationSet,
) -> Result<RandomPermutationSet> {
    orthogonal_sum(mu1, mu2, Orientation::Right)
}

/// Sequentially fuses sources in the order given. `None` for no sources.
pub fn fuse_sequential<'a, I>(sources: I, orientation: Orientation) -> Result<Option<RandomPermutationSet>>
where
    I: IntoIterator<Item = &'a RandomPermutationSet>,
{
    let mut acc: Option<RandomPermutationSet> = None;
    for mu in sources {
        acc = Some(match acc {
            None => mu.clone(),
            Some(prev) => orthogonal_sum(&prev, mu, orientation)?,
        });
    }
    Ok(acc)
}

/// Ordered probability transformation: the mass of a multi-element event is
/// shared evenly among all but its last element.
pub fn opt(mu: &RandomPermutationSet) -> ProbabilityDistribution {
    let mut probs = vec![0.0; mu.frame().len()];
    for (event, mass) in mu.iter() {
        if event.len() == 1 {
            probs[event.first()] += mass;
            continue;
        }
        let share = mass / (event.len() - 1) as f64;
        let last = event.last();
        for i in event.iter().filter(|&i| i != last) {
            probs[i] += share;
        }
    }
    ProbabilityDistribution::from_weights(mu.frame().clone(), probs)
}

/// Discounting with reliability `alpha`.
///
/// Singleton masses are scaled by `alpha`; the withheld `1 − alpha` is spread
/// evenly over every multi-element event of the frame's permutation event
/// space, whether or not it already carries mass.
pub fn discount_rps(mu: &RandomPermutationSet, alpha: f64) -> Result<RandomPermutationSet> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::out_of_range("alpha", alpha, "[0, 1]"));
    }
    let n = mu.frame().len();
    if n < 2 {
        return Err(Error::Shape(
            "permutation discounting needs a frame of at least two labels".into(),
        ));
    }
    if alpha == 1.0 {
        return Ok(mu.clone());
    }
    let pes = enumerate_pes(mu.frame())?;
    let share = (1.0 - alpha) / (pes.len() - n) as f64;
    let mut out: BTreeMap<PermutationEvent, f64> =
        mu.iter().map(|(e, m)| (e.clone(), m * alpha)).collect();
    for event in pes.iter().filter(|e| e.len() > 1) {
        *out.entry(event.clone()).or_insert(0.0) += share;
    }
    RandomPermutationSet::from_raw(mu.frame().clone(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dst::Frame;

    fn f2() -> Frame {
        Frame::new(["x1", "x2"]).unwrap()
    }

    fn f3() -> Frame {
        Frame::new(["x1", "x2", "x3"]).unwrap()
    }

    fn rps(frame: &Frame, entries: &[(&[&str], f64)]) -> RandomPermutationSet {
        RandomPermutationSet::from_labels(frame.clone(), entries.iter().map(|(l, m)| (*l, *m))).unwrap()
    }

    fn pe(frame: &Frame, labels: &[&str]) -> PermutationEvent {
        PermutationEvent::from_labels(frame, labels).unwrap()
    }

    #[test]
    fn los_keeps_left_order_ros_keeps_right() {
        let f = f2();
        let a = rps(&f, &[(&["x1", "x2"], 1.0)]);
        let b = rps(&f, &[(&["x2", "x1"], 1.0)]);
        assert_eq!(left_orthogonal_sum(&a, &b).unwrap(), a);
        assert_eq!(right_orthogonal_sum(&a, &b).unwrap(), b);
    }

    #[test]
    fn full_event_is_neutral_under_left_intersection() {
        let f = f3();
        let mu1 = rps(&f, &[(&["x2"], 0.3), (&["x3", "x1"], 0.5), (&["x1", "x2", "x3"], 0.2)]);
        let full = rps(&f, &[(&["x3", "x1", "x2"], 1.0)]);
        let out = left_orthogonal_sum(&mu1, &full).unwrap();
        assert_eq!(out.len(), mu1.len());
        for (event, mass) in mu1.iter() {
            assert!((out.mass(event) - mass).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_singletons_half_conflict() {
        // Brute force over the four (B, C) pairs: two agree, two conflict.
        let f = f2();
        let mu = rps(&f, &[(&["x1"], 0.5), (&["x2"], 0.5)]);
        let mut agree = 0.0;
        let mut conflict = 0.0;
        for (b, mb) in mu.iter() {
            for (c, mc) in mu.iter() {
                if b == c {
                    agree += mb * mc;
                } else {
                    conflict += mb * mc;
                }
            }
        }
        assert_eq!(conflict, 0.5);
        let expected = 0.25 / agree;
        for out in [left_orthogonal_sum(&mu, &mu).unwrap(), right_orthogonal_sum(&mu, &mu).unwrap()] {
            assert!((out.mass(&pe(&f, &["x1"])) - expected).abs() < 1e-12);
            assert!((out.mass(&pe(&f, &["x2"])) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn certain_identical_inputs_unchanged() {
        let f = f3();
        let mu = rps(&f, &[(&["x2"], 1.0)]);
        assert_eq!(right_orthogonal_sum(&mu, &mu).unwrap(), mu);
    }

    #[test]
    fn total_conflict_is_reported() {
        let f = f3();
        let a = rps(&f, &[(&["x1"], 1.0)]);
        let b = rps(&f, &[(&["x2", "x3"], 1.0)]);
        assert!(matches!(left_orthogonal_sum(&a, &b), Err(Error::TotalConflict(_))));
        assert!(matches!(right_orthogonal_sum(&a, &b), Err(Error::TotalConflict(_))));
    }

    #[test]
    fn opt_examples() {
        let f = f3();
        let p = opt(&rps(&f, &[(&["x1"], 0.5), (&["x1", "x2"], 0.5)]));
        assert_eq!(p.probs(), &[1.0, 0.0, 0.0]);
        let p = opt(&rps(&f, &[(&["x1"], 1.0)]));
        assert_eq!(p.probs(), &[1.0, 0.0, 0.0]);
        let p = opt(&rps(&f, &[(&["x1", "x2", "x3"], 1.0)]));
        assert_eq!(p.probs(), &[0.5, 0.5, 0.0]);
        let single = Frame::new(["only"]).unwrap();
        assert_eq!(opt(&rps(&single, &[(&["only"], 1.0)])).probs(), &[1.0]);
    }

    #[test]
    fn discount_examples() {
        let f = f3();
        let certain = rps(&f, &[(&["x1"], 1.0)]);
        assert_eq!(discount_rps(&certain, 1.0).unwrap(), certain);

        let d = discount_rps(&certain, 0.4).unwrap();
        assert!((d.mass(&pe(&f, &["x1"])) - 0.4).abs() < 1e-12);
        let multi: Vec<_> = d.iter().filter(|(e, _)| e.len() > 1).collect();
        assert_eq!(multi.len(), 12);
        for (_, m) in multi {
            assert!((m - 0.05).abs() < 1e-12);
        }

        let zero = discount_rps(&certain, 0.0).unwrap();
        assert_eq!(zero.len(), 12);
        assert!(zero.iter().all(|(e, m)| e.len() > 1 && (m - 1.0 / 12.0).abs() < 1e-12));

        assert!(matches!(discount_rps(&certain, -0.1), Err(Error::OutOfRange { .. })));
        let single = Frame::new(["only"]).unwrap();
        assert!(discount_rps(&rps(&single, &[(&["only"], 1.0)]), 0.5).is_err());
    }
}
