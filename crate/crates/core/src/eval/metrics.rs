use serde::{Deserialize, Serialize};

/// Detection rates of an estimated community set against the truth. A rate
/// is `None` when its denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionRates {
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
}

/// `TPR = |D^ ∩ D| / |D|`, `FPR = |D^ \ D| / (K - |D|)`.
pub fn detection_metrics(d_hat: &[usize], d_true: &[usize], k: usize) -> DetectionRates {
    let hits = d_hat.iter().filter(|c| d_true.contains(c)).count();
    let false_hits = d_hat.len() - hits;
    let negatives = k.saturating_sub(d_true.len());
    DetectionRates {
        tpr: (!d_true.is_empty()).then(|| hits as f64 / d_true.len() as f64),
        fpr: (negatives > 0).then(|| false_hits as f64 / negatives as f64),
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; 0 for fewer than two values.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}
