//! Reconstructions of the standard worked examples, shared by the test suite
//! and the `examples` command.

use crate::dst::{jousselme_distance, Frame, MassFunction};
use crate::error::Result;
use crate::reliability::{compute_reliabilities, ReliabilityReport};
use crate::rps::{PermutationEvent, RandomPermutationSet};
use crate::transform::{rps_transform, rpt_distance, Lambda};

/// `η = 0.00, 0.01, …, 0.70`, computed from integer steps so every grid point
/// is the nearest double to its decimal value.
pub fn eta_grid() -> Vec<f64> {
    (0..=70).map(|i| i as f64 / 100.0).collect()
}

pub fn x123() -> Frame {
    Frame::new(["x1", "x2", "x3"]).expect("static frame")
}

pub fn dna() -> Frame {
    Frame::new(["D", "N", "A"]).expect("static frame")
}

/// `m(D)=0.1, m(N)=0.2, m(A)=0.2, m(N,A)=0.2, m(D,N,A)=0.3`.
pub fn table2_bpa() -> MassFunction {
    MassFunction::from_labels(
        dna(),
        [
            (vec!["D"], 0.1),
            (vec!["N"], 0.2),
            (vec!["A"], 0.2),
            (vec!["N", "A"], 0.2),
            (vec!["D", "N", "A"], 0.3),
        ],
    )
    .expect("static mass function")
}

/// `m*(x1) = 1`, the reference source agreeing with the truth.
pub fn m_star() -> MassFunction {
    MassFunction::from_labels(x123(), [(vec!["x1"], 1.0)]).expect("static mass function")
}

/// `m2(x2, x3) = 1`, the reference source opposing the truth.
pub fn m_opposed() -> MassFunction {
    MassFunction::from_labels(x123(), [(vec!["x2", "x3"], 1.0)]).expect("static mass function")
}

/// First sweep: `m1(x1)=η, m1(x3)=0.7−η, m1(x2,x3)=0.2, m1(Θ)=0.1`.
pub fn sweep_one_source(eta: f64) -> Result<MassFunction> {
    MassFunction::from_labels(
        x123(),
        [
            (vec!["x1"], eta),
            (vec!["x3"], 0.7 - eta),
            (vec!["x2", "x3"], 0.2),
            (vec!["x1", "x2", "x3"], 0.1),
        ],
    )
}

/// Second sweep: `m1(x1)=0.1, m1(x3)=η, m1(x2,x3)=0.7−η, m1(Θ)=0.2`.
pub fn sweep_two_source(eta: f64) -> Result<MassFunction> {
    MassFunction::from_labels(
        x123(),
        [
            (vec!["x1"], 0.1),
            (vec!["x3"], eta),
            (vec!["x2", "x3"], 0.7 - eta),
            (vec!["x1", "x2", "x3"], 0.2),
        ],
    )
}

/// One grid point of a reliability sweep. Sources are ordered `[m1, m*, m2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub eta: f64,
    pub report: ReliabilityReport,
}

impl SweepPoint {
    pub fn r_m1(&self) -> f64 {
        self.report.reliability[0]
    }

    pub fn r_star(&self) -> f64 {
        self.report.reliability[1]
    }

    pub fn r_opposed(&self) -> f64 {
        self.report.reliability[2]
    }
}

/// Reliabilities of `{m1(η), m*, m2}` on a single sample with truth `x1`.
pub fn reliability_sweep(source: fn(f64) -> Result<MassFunction>, lambda: Lambda) -> Result<Vec<SweepPoint>> {
    eta_grid()
        .into_iter()
        .map(|eta| {
            let sources = [vec![source(eta)?], vec![m_star()], vec![m_opposed()]];
            let report = compute_reliabilities(&sources, &["x1"], lambda)?;
            Ok(SweepPoint { eta, report })
        })
        .collect()
}

/// Renders a sweep as CSV: `eta,r_m1,r_star,r_opposed`.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("eta,r_m1,r_star,r_opposed\n");
    for p in points {
        out.push_str(&format!("{:.2},{:?},{:?},{:?}\n", p.eta, p.r_m1(), p.r_star(), p.r_opposed()));
    }
    out
}

pub fn is_nondecreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] >= w[0])
}

pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// The fifteen choices of the event `A` in the distance comparison, in table
/// order.
pub const DISTANCE_ROWS: [&[&str]; 15] = [
    &["x1"],
    &["x2"],
    &["x3"],
    &["x1", "x2"],
    &["x2", "x1"],
    &["x1", "x3"],
    &["x3", "x1"],
    &["x2", "x3"],
    &["x3", "x2"],
    &["x1", "x2", "x3"],
    &["x1", "x3", "x2"],
    &["x2", "x1", "x3"],
    &["x2", "x3", "x1"],
    &["x3", "x1", "x2"],
    &["x3", "x2", "x1"],
];

/// Published Jousselme distances for [`DISTANCE_ROWS`].
pub const PUBLISHED_J_DISTANCE: [f64; 15] = [
    0.141, 0.510, 0.469, 0.424, 0.424, 0.356, 0.356, 0.497, 0.497, 0.440, 0.440, 0.440, 0.440, 0.440, 0.440,
];

/// Published permutation-set distances for [`DISTANCE_ROWS`].
pub const PUBLISHED_RPS_DISTANCE: [f64; 15] = [
    0.036, 0.436, 0.327, 0.109, 0.364, 0.082, 0.273, 0.327, 0.327, 0.092, 0.092, 0.275, 0.316, 0.275, 0.316,
];

/// `{(x1):0.4, (x1,x2):0.2, (A):0.4}`, merging `A` into an identical entry.
pub fn distance_rps(a: &[&str]) -> Result<RandomPermutationSet> {
    let f = x123();
    let fixed: [(&[&str], f64); 2] = [(&["x1"], 0.4), (&["x1", "x2"], 0.2)];
    let mut entries: Vec<(PermutationEvent, f64)> = Vec::new();
    for (labels, mass) in fixed.into_iter().chain([(a, 0.4)]) {
        let event = PermutationEvent::from_labels(&f, labels)?;
        match entries.iter_mut().find(|(e, _)| *e == event) {
            Some((_, m)) => *m += mass,
            None => entries.push((event, mass)),
        }
    }
    RandomPermutationSet::new(f, entries)
}

/// One row of the distance comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceRow {
    pub event: Vec<String>,
    pub j_distance: f64,
    pub rps_distance: f64,
}

/// Jousselme and permutation-set distance of every row against `(x1):1`.
pub fn distance_table(lambda: Lambda) -> Result<Vec<DistanceRow>> {
    let star_rps = rps_transform(&m_star())?;
    DISTANCE_ROWS
        .iter()
        .map(|a| {
            let mu = distance_rps(a)?;
            Ok(DistanceRow {
                event: a.iter().map(|s| s.to_string()).collect(),
                j_distance: jousselme_distance(&mu.order_erased(), &m_star())?,
                rps_distance: rpt_distance(&mu, &star_rps, lambda)?,
            })
        })
        .collect()
}

/// Row pairs whose published permutation-set distances coincide.
pub const EQUAL_DISTANCE_PAIRS: [(usize, usize); 4] = [(9, 10), (11, 13), (12, 14), (7, 8)];

/// Groups of rows that must be strictly ordered, closest first.
pub const ORDERED_GROUPS: [&[usize]; 3] = [&[9, 10], &[11, 13], &[12, 14]];
