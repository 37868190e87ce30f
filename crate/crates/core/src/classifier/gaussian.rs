use crate::dst::Frame;
use crate::error::{Error, Result};

/// Densities below this are treated as underflow when every class is below it.
const UNDERFLOW: f64 = 1e-300;

/// Per-class, per-feature Gaussian parameters.
///
/// `means[j][c]` and `stds[j][c]` belong to feature `j` and class `c`. A class
/// with no observed value for a feature has a NaN mean and never receives
/// membership for it.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianClassModel {
    classes: Frame,
    means: Vec<Vec<f64>>,
    stds: Vec<Vec<f64>>,
}

impl GaussianClassModel {
    pub fn classes(&self) -> &Frame {
        &self.classes
    }

    pub fn n_features(&self) -> usize {
        self.means.len()
    }

    pub fn mean(&self, feature: usize, class: usize) -> f64 {
        self.means[feature][class]
    }

    /// Standard deviation after the floor is applied.
    pub fn std(&self, feature: usize, class: usize) -> f64 {
        self.stds[feature][class]
    }

    /// Normalized membership of `value` in every class for `feature`.
    pub fn membership(&self, feature: usize, value: f64) -> Result<MembershipVector> {
        if feature >= self.n_features() {
            return Err(Error::Shape(format!(
                "feature {feature} out of range for a model of {} features",
                self.n_features()
            )));
        }
        if !value.is_finite() {
            return Err(Error::Shape(format!("feature value {value} is not finite")));
        }
        let densities: Vec<f64> = self.means[feature]
            .iter()
            .zip(&self.stds[feature])
            .map(|(&mean, &std)| {
                if mean.is_nan() {
                    0.0
                } else {
                    let z = (value - mean) / std;
                    (-0.5 * z * z).exp() / (std * (2.0 * std::f64::consts::PI).sqrt())
                }
            })
            .collect();
        Ok(MembershipVector::from_densities(self.classes.clone(), densities))
    }
}

/// Class memberships normalized to sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipVector {
    classes: Frame,
    values: Vec<f64>,
}

impl MembershipVector {
    /// Normalizes raw densities. If every density underflows the result is
    /// uniform.
    pub fn from_densities(classes: Frame, densities: Vec<f64>) -> Self {
        let n = classes.len();
        if densities.iter().all(|&d| d.is_nan() || d < UNDERFLOW) {
            return MembershipVector {
                classes,
                values: vec![1.0 / n as f64; n],
            };
        }
        let total: f64 = densities.iter().sum();
        MembershipVector {
            classes,
            values: densities.iter().map(|d| d / total).collect(),
        }
    }

    pub fn classes(&self) -> &Frame {
        &self.classes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Class indices by descending membership, ascending index on ties.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| self.values[b].total_cmp(&self.values[a]).then(a.cmp(&b)));
        order
    }
}

/// Fits per-class means and `N − 1` standard deviations for every feature.
///
/// `labels[i]` indexes `classes`. NaN feature values are skipped. The
/// standard deviation is floored at `1e-6 ·` the feature's range over the
/// whole training set (or `1e-6` for a constant feature), which also covers
/// classes with a single observation.
pub fn gaussian_train(features: &[Vec<f64>], labels: &[usize], classes: &Frame) -> Result<GaussianClassModel> {
    if features.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    if features.is_empty() {
        return Err(Error::Shape("empty training set".into()));
    }
    let width = features[0].len();
    if features.iter().any(|row| row.len() != width) {
        return Err(Error::Shape("ragged feature matrix".into()));
    }
    for &l in labels {
        classes.check_index(l)?;
    }
    let n_classes = classes.len();
    let mut means = Vec::with_capacity(width);
    let mut stds = Vec::with_capacity(width);
    for j in 0..width {
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); n_classes];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (row, &label) in features.iter().zip(labels) {
            let v = row[j];
            if v.is_nan() {
                continue;
            }
            columns[label].push(v);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let range = if hi > lo { hi - lo } else { 1.0 };
        let floor = 1e-6 * range;
        let (m, s): (Vec<f64>, Vec<f64>) = columns
            .iter()
            .map(|values| {
                if values.is_empty() {
                    return (f64::NAN, floor);
                }
                let n = values.len() as f64;
                let mean = values.iter().sum::<f64>() / n;
                let std = if values.len() < 2 {
                    0.0
                } else {
                    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
                };
                (mean, std.max(floor))
            })
            .unzip();
        means.push(m);
        stds.push(s);
    }
    Ok(GaussianClassModel {
        classes: classes.clone(),
        means,
        stds,
    })
}
