//! Reliability-weighted fusion classifier.
//!
//! Every feature is an evidence source. A Gaussian model per class turns a
//! feature value into normalized class memberships, and the memberships into
//! a nested mass function. Training estimates one reliability per feature;
//! at test time each feature's permutation mass function is discounted by its
//! reliability and the sources are fused with the left orthogonal sum from
//! most to least reliable. The class with the largest ranked probability wins.

mod gaussian;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use gaussian::{gaussian_train, GaussianClassModel, MembershipVector};

use crate::data::{kfold_split, Dataset};
use crate::dst::{
    dempster_combine, discount_bpa, pignistic, FocalSet, Frame, MassFunction, ProbabilityDistribution,
};
use crate::error::{Error, Result};
use crate::reliability::{compute_reliabilities_partial, ReliabilityReport};
use crate::rps::{discount_rps, left_orthogonal_sum, RandomPermutationSet};
use crate::transform::{ranked_probability_transform, rps_transform, Lambda};

/// Nested mass function from class memberships: each class `θ` puts its
/// membership on `{θ} ∪ {classes ranked above θ}`. Equal memberships rank by
/// class index.
pub fn generate_bpa(membership: &MembershipVector) -> Result<MassFunction> {
    let values = membership.values();
    let mut prefix = FocalSet::EMPTY;
    let mut entries = Vec::with_capacity(values.len());
    for class in membership.ranking() {
        prefix = prefix.with(class);
        entries.push((prefix, values[class]));
    }
    MassFunction::new(membership.classes().clone(), entries)
}

/// How per-feature evidence is combined at test time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionMethod {
    /// Permutation discounting, left orthogonal sum, ranked probability argmax.
    #[default]
    Rps,
    /// Classical discounting, Dempster's rule, pignistic argmax.
    Dempster,
}

impl std::str::FromStr for FusionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rps" => Ok(FusionMethod::Rps),
            "dempster" | "dst" => Ok(FusionMethod::Dempster),
            other => Err(Error::Shape(format!("unknown fusion method `{other}`"))),
        }
    }
}

/// Outcome of fusing one sample's sources.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    /// Fused permutation mass function (RPS method only).
    pub fused: Option<RandomPermutationSet>,
    pub probabilities: ProbabilityDistribution,
    pub predicted: usize,
}

/// Discounts, fuses and decides. `bpas[k]` is source `k`'s evidence, `None`
/// when the source has nothing to say about this sample.
pub fn fuse_and_decide(
    bpas: &[Option<MassFunction>],
    reliabilities: &ReliabilityReport,
    lambda: Lambda,
    method: FusionMethod,
) -> Result<Decision> {
    if bpas.len() != reliabilities.sources() {
        return Err(Error::Shape(format!(
            "{} sources but {} reliabilities",
            bpas.len(),
            reliabilities.sources()
        )));
    }
    let ordered = reliabilities
        .fusion_order
        .iter()
        .filter_map(|&k| bpas[k].as_ref().map(|m| (m, reliabilities.reliability[k])));
    match method {
        FusionMethod::Rps => {
            let mut acc: Option<RandomPermutationSet> = None;
            for (m, r) in ordered {
                let mu = discount_rps(&rps_transform(m)?, r)?;
                acc = Some(match acc {
                    None => mu,
                    Some(prev) => left_orthogonal_sum(&prev, &mu)?,
                });
            }
            let fused = acc.ok_or_else(|| Error::Shape("no usable source for this sample".into()))?;
            let probabilities = ranked_probability_transform(&fused, lambda);
            let predicted = probabilities.argmax();
            Ok(Decision {
                fused: Some(fused),
                probabilities,
                predicted,
            })
        }
        FusionMethod::Dempster => {
            let mut acc: Option<MassFunction> = None;
            for (m, r) in ordered {
                let d = discount_bpa(m, r)?;
                acc = Some(match acc {
                    None => d,
                    Some(prev) => dempster_combine(&prev, &d)?,
                });
            }
            let fused = acc.ok_or_else(|| Error::Shape("no usable source for this sample".into()))?;
            let probabilities = pignistic(&fused);
            let predicted = probabilities.argmax();
            Ok(Decision {
                fused: None,
                probabilities,
                predicted,
            })
        }
    }
}

/// Per-feature BPAs of one sample. Missing values give `None`.
pub fn sample_bpas(model: &GaussianClassModel, sample: &[f64]) -> Result<Vec<Option<MassFunction>>> {
    if sample.len() != model.n_features() {
        return Err(Error::Shape(format!(
            "sample has {} features, model expects {}",
            sample.len(),
            model.n_features()
        )));
    }
    sample
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            if v.is_nan() {
                Ok(None)
            } else {
                generate_bpa(&model.membership(j, v)?).map(Some)
            }
        })
        .collect()
}

/// Everything produced for one test sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub sample: usize,
    pub bpas: Vec<Option<MassFunction>>,
    pub fused: Option<RandomPermutationSet>,
    pub probabilities: Option<ProbabilityDistribution>,
    /// Predicted class index; `None` when fusion failed.
    pub predicted: Option<usize>,
    pub truth: Option<usize>,
    pub failure: Option<String>,
}

impl PredictionRecord {
    pub fn is_correct(&self) -> bool {
        matches!((self.predicted, self.truth), (Some(p), Some(t)) if p == t)
    }
}

/// A trained classifier: Gaussian model plus per-feature reliabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedClassifier {
    pub model: GaussianClassModel,
    pub reliabilities: ReliabilityReport,
    pub lambda: Lambda,
    pub method: FusionMethod,
}

impl TrainedClassifier {
    /// Fits the Gaussian model and estimates each feature's reliability from
    /// its decision contributions on the same training samples.
    pub fn train(
        features: &[Vec<f64>],
        labels: &[usize],
        classes: &Frame,
        lambda: Lambda,
        method: FusionMethod,
    ) -> Result<Self> {
        let model = gaussian_train(features, labels, classes)?;
        let per_sample: Vec<Vec<Option<MassFunction>>> = features
            .par_iter()
            .map(|row| sample_bpas(&model, row))
            .collect::<Result<_>>()?;
        let per_source: Vec<Vec<Option<&MassFunction>>> = (0..model.n_features())
            .map(|k| per_sample.iter().map(|bpas| bpas[k].as_ref()).collect())
            .collect();
        let truths: Vec<&str> = labels.iter().map(|&l| classes.label(l)).collect();
        let reliabilities = compute_reliabilities_partial(&per_source, &truths, lambda)?;
        Ok(TrainedClassifier {
            model,
            reliabilities,
            lambda,
            method,
        })
    }

    /// Predicts one sample. Fusion failures (total conflict, every feature
    /// missing) are recorded on the returned record rather than raised.
    pub fn predict(&self, sample_id: usize, sample: &[f64], truth: Option<usize>) -> Result<PredictionRecord> {
        let bpas = sample_bpas(&self.model, sample)?;
        let mut record = PredictionRecord {
            sample: sample_id,
            bpas: Vec::new(),
            fused: None,
            probabilities: None,
            predicted: None,
            truth,
            failure: None,
        };
        match fuse_and_decide(&bpas, &self.reliabilities, self.lambda, self.method) {
            Ok(decision) => {
                record.fused = decision.fused;
                record.predicted = Some(decision.predicted);
                record.probabilities = Some(decision.probabilities);
            }
            Err(e @ (Error::TotalConflict(_) | Error::Shape(_))) => {
                log::debug!("sample {sample_id}: {e}");
                record.failure = Some(e.to_string());
            }
            Err(e) => return Err(e),
        }
        record.bpas = bpas;
        Ok(record)
    }
}

/// Settings of a cross-validation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvOptions {
    pub folds: usize,
    pub seed: u64,
    pub lambda: Lambda,
    pub method: FusionMethod,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            folds: 5,
            seed: 42,
            lambda: Lambda::DEFAULT,
            method: FusionMethod::Rps,
        }
    }
}

/// Cross-validation summary. `std` is the population standard deviation of
/// the per-fold accuracies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub dataset: String,
    pub folds: usize,
    pub seed: u64,
    pub lambda: f64,
    pub per_fold_accuracy: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub per_source_reliability: Vec<Vec<f64>>,
}

/// Stratified k-fold cross-validation. Folds are evaluated in parallel and
/// reported in fold order.
pub fn cross_validate(dataset: &Dataset, options: &CvOptions) -> Result<AccuracyReport> {
    let classes = dataset.classes()?;
    if classes.len() < 2 {
        return Err(Error::Shape("classification needs at least two classes".into()));
    }
    let labels = dataset.label_indices(&classes)?;
    let split = kfold_split(dataset, options.folds, options.seed)?;
    let outcomes: Vec<(f64, Vec<f64>)> = (0..options.folds)
        .into_par_iter()
        .map(|fold| {
            let train = split.train_indices(fold);
            let test = split.test_indices(fold);
            let train_x: Vec<Vec<f64>> = train.iter().map(|&i| dataset.features[i].clone()).collect();
            let train_y: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
            let clf = TrainedClassifier::train(&train_x, &train_y, &classes, options.lambda, options.method)?;
            let mut correct = 0usize;
            let mut failed = 0usize;
            for &i in &test {
                let record = clf.predict(i, &dataset.features[i], Some(labels[i]))?;
                correct += usize::from(record.is_correct());
                failed += usize::from(record.failure.is_some());
            }
            if failed > 0 {
                log::info!("fold {fold}: {failed} of {} test samples could not be fused", test.len());
            }
            Ok((correct as f64 / test.len() as f64, clf.reliabilities.reliability))
        })
        .collect::<Result<_>>()?;
    let (per_fold_accuracy, per_source_reliability): (Vec<f64>, Vec<Vec<f64>>) = outcomes.into_iter().unzip();
    let k = per_fold_accuracy.len() as f64;
    let mean = per_fold_accuracy.iter().sum::<f64>() / k;
    let std = (per_fold_accuracy.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / k).sqrt();
    Ok(AccuracyReport {
        dataset: dataset.name.clone(),
        folds: options.folds,
        seed: options.seed,
        lambda: options.lambda.value(),
        per_fold_accuracy,
        mean,
        std,
        per_source_reliability,
    })
}

/// Class counts in frame order, used for stratification checks.
pub fn class_counts(labels: &[usize], n_classes: usize) -> Vec<usize> {
    let mut counts = vec![0; n_classes];
    for &l in labels {
        counts[l] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rps::PermutationEvent;

    fn f3() -> Frame {
        Frame::new(["t1", "t2", "t3"]).unwrap()
    }

    fn membership(values: Vec<f64>) -> MembershipVector {
        MembershipVector::from_densities(Frame::new((0..values.len()).map(|i| format!("t{}", i + 1))).unwrap(), values)
    }

    #[test]
    fn nested_bpa_from_memberships() {
        let f = f3();
        let m = generate_bpa(&membership(vec![0.5, 0.3, 0.2])).unwrap();
        assert_eq!(m.mass(f.focal(&["t1"]).unwrap()), 0.5);
        assert_eq!(m.mass(f.focal(&["t1", "t2"]).unwrap()), 0.3);
        assert_eq!(m.mass(f.full_set()), 0.2);

        let m = generate_bpa(&membership(vec![0.2, 0.3, 0.5])).unwrap();
        assert_eq!(m.mass(f.focal(&["t3"]).unwrap()), 0.5);
        assert_eq!(m.mass(f.focal(&["t2", "t3"]).unwrap()), 0.3);

        let m = generate_bpa(&membership(vec![1.0, 0.0])).unwrap();
        assert_eq!(m.len(), 1);

        let m = generate_bpa(&membership(vec![0.5, 0.5])).unwrap();
        let f2 = m.frame().clone();
        assert_eq!(m.mass(f2.focal(&["t1"]).unwrap()), 0.5);
        assert_eq!(m.mass(f2.full_set()), 0.5);
    }

    fn certain(f: &Frame, label: &str) -> Option<MassFunction> {
        Some(MassFunction::certain(f.clone(), f.require_index(label).unwrap()).unwrap())
    }

    #[test]
    fn single_certain_source_decides() {
        let f = f3();
        let report = ReliabilityReport::from_totals(vec![0.0]).unwrap();
        let d = fuse_and_decide(&[certain(&f, "t2")], &report, Lambda::DEFAULT, FusionMethod::Rps).unwrap();
        assert_eq!(d.predicted, 1);
    }

    #[test]
    fn agreeing_sources_in_any_order() {
        let f = f3();
        for totals in [vec![1.0, 0.0], vec![0.0, 1.0]] {
            let report = ReliabilityReport::from_totals(totals).unwrap();
            let d = fuse_and_decide(&[certain(&f, "t3"), certain(&f, "t3")], &report, Lambda::DEFAULT, FusionMethod::Rps)
                .unwrap();
            assert_eq!(d.predicted, 2);
        }
    }

    #[test]
    fn unreliable_source_is_flattened() {
        let f = f3();
        let report = ReliabilityReport::from_totals(vec![1.0, 0.0]).unwrap();
        let d = fuse_and_decide(&[certain(&f, "t1"), certain(&f, "t2")], &report, Lambda::DEFAULT, FusionMethod::Rps)
            .unwrap();
        assert_eq!(d.predicted, 0);
        // The R = 0 source spreads over the 12 multi-element events; each
        // contains t1, so the left sum keeps (t1) with all the mass.
        let fused = d.fused.unwrap();
        assert_eq!(fused.len(), 1);
        assert!((fused.mass(&PermutationEvent::singleton(0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_everything_is_a_failure() {
        let f = f3();
        let report = ReliabilityReport::from_totals(vec![0.0]).unwrap();
        assert!(fuse_and_decide(&[None], &report, Lambda::DEFAULT, FusionMethod::Rps).is_err());
        assert!(fuse_and_decide(&[certain(&f, "t1"), None], &report, Lambda::DEFAULT, FusionMethod::Rps).is_err());
    }

    fn separable(n_per_class: usize) -> Dataset {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n_per_class {
            let t = i as f64 / n_per_class as f64;
            features.push(vec![t, 5.0 + t]);
            labels.push("low".to_string());
            features.push(vec![10.0 + t, 20.0 - t]);
            labels.push("high".to_string());
        }
        Dataset::new("separable", vec!["a".into(), "b".into()], features, labels).unwrap()
    }

    #[test]
    fn separable_data_is_classified_perfectly() {
        let report = cross_validate(&separable(20), &CvOptions::default()).unwrap();
        assert_eq!(report.mean, 1.0);
        assert_eq!(report.per_fold_accuracy.len(), 5);
        assert_eq!(report.per_source_reliability.len(), 5);
        assert_eq!(report.std, 0.0);
    }

    #[test]
    fn cross_validation_is_deterministic() {
        let d = separable(10);
        let options = CvOptions { seed: 3, method: FusionMethod::Dempster, ..CvOptions::default() };
        assert_eq!(cross_validate(&d, &options).unwrap(), cross_validate(&d, &options).unwrap());
    }

    #[test]
    fn missing_feature_is_skipped() {
        let d = separable(10);
        let labels = d.label_indices(&d.classes().unwrap()).unwrap();
        let clf = TrainedClassifier::train(&d.features, &labels, &d.classes().unwrap(), Lambda::DEFAULT, FusionMethod::Rps)
            .unwrap();
        let record = clf.predict(0, &[f64::NAN, 19.5], Some(0)).unwrap();
        assert!(record.bpas[0].is_none());
        assert_eq!(record.predicted, Some(0));
        let record = clf.predict(1, &[f64::NAN, f64::NAN], Some(0)).unwrap();
        assert!(record.failure.is_some());
        assert!(!record.is_correct());
    }

    #[test]
    fn counts_per_class() {
        assert_eq!(class_counts(&[0, 2, 2], 3), vec![1, 0, 2]);
    }
}
