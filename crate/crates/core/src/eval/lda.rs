//! Linear discriminant analysis with a pooled, ridge-regularized covariance.

use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};

/// Relative ridge added to the covariance diagonal: `RIDGE * trace / d`.
pub const RIDGE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel {
    /// Training classes present, ascending.
    pub classes: Vec<usize>,
    /// One row per entry of `classes`.
    pub class_means: Array2<f64>,
    /// Pooled within-class covariance with the ridge already added.
    pub pooled_covariance: Array2<f64>,
    pub priors: Vec<f64>,
    pub ridge: f64,
    // discriminant(x) = x . weights[c] + offsets[c]
    weights: Array2<f64>,
    offsets: Array1<f64>,
}

impl LdaModel {
    pub fn dim(&self) -> usize {
        self.class_means.ncols()
    }

    /// Linear discriminant scores, one column per class.
    pub fn decision_function(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.ncols(),
            });
        }
        let mut scores = x.dot(&self.weights.t());
        scores += &self.offsets;
        Ok(scores)
    }
}

/// Fits LDA on rows of `x` with labels `y` (values >= 1). Rows labeled 0 are
/// ignored, and classes without rows are left out of the model.
pub fn lda_fit(x: ArrayView2<'_, f64>, y: &[usize]) -> Result<LdaModel> {
    if x.nrows() != y.len() {
        return Err(Error::LengthMismatch {
            labels: y.len(),
            vertices: x.nrows(),
        });
    }
    let d = x.ncols();
    if d == 0 {
        return Err(Error::InvalidArgument(
            "LDA needs at least one feature".into(),
        ));
    }
    let mut classes: Vec<usize> = y.iter().copied().filter(|&l| l > 0).collect();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "LDA needs at least two classes, found {}",
            classes.len()
        )));
    }
    let slot = |l: usize| classes.binary_search(&l).expect("class listed");

    let c = classes.len();
    let mut means = Array2::<f64>::zeros((c, d));
    let mut counts = vec![0usize; c];
    for (row, &l) in x.axis_iter(Axis(0)).zip(y) {
        if l == 0 {
            continue;
        }
        let s = slot(l);
        counts[s] += 1;
        let mut m = means.row_mut(s);
        m += &row;
    }
    for (s, &count) in counts.iter().enumerate() {
        means.row_mut(s).mapv_inplace(|v| v / count as f64);
    }

    let total: usize = counts.iter().sum();
    let mut cov = Array2::<f64>::zeros((d, d));
    let mut centered = Array1::<f64>::zeros(d);
    for (row, &l) in x.axis_iter(Axis(0)).zip(y) {
        if l == 0 {
            continue;
        }
        centered.assign(&row);
        centered -= &means.row(slot(l));
        for i in 0..d {
            let ci = centered[i];
            if ci == 0.0 {
                continue;
            }
            for j in i..d {
                cov[[i, j]] += ci * centered[j];
            }
        }
    }
    let dof = total.saturating_sub(c).max(1) as f64;
    for i in 0..d {
        for j in i..d {
            let v = cov[[i, j]] / dof;
            cov[[i, j]] = v;
            cov[[j, i]] = v;
        }
    }

    let trace = cov.diag().sum();
    let mut ridge = RIDGE * trace / d as f64;
    if ridge <= 0.0 || !ridge.is_finite() {
        ridge = RIDGE;
    }
    let (factor, ridge) = loop {
        let mut reg = cov.clone();
        reg.diag_mut().mapv_inplace(|v| v + ridge);
        if let Some(l) = cholesky(&reg) {
            cov = reg;
            break (l, ridge);
        }
        ridge *= 10.0;
    };

    let priors: Vec<f64> = counts.iter().map(|&k| k as f64 / total as f64).collect();
    let mut weights = Array2::<f64>::zeros((c, d));
    let mut offsets = Array1::<f64>::zeros(c);
    for s in 0..c {
        let mean = means.row(s).to_owned();
        let w = cholesky_solve(&factor, &mean);
        offsets[s] = -0.5 * mean.dot(&w) + priors[s].ln();
        weights.row_mut(s).assign(&w);
    }

    Ok(LdaModel {
        classes,
        class_means: means,
        pooled_covariance: cov,
        priors,
        ridge,
        weights,
        offsets,
    })
}

/// Predicted class per row; ties go to the lowest class id.
pub fn lda_predict(model: &LdaModel, x: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
    let scores = model.decision_function(x)?;
    Ok(scores
        .axis_iter(Axis(0))
        .map(|row| {
            let mut best = 0;
            for (s, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = s;
                }
            }
            model.classes[best]
        })
        .collect())
}

// Lower-triangular L with A = L L^T, or None if A is not positive definite.
fn cholesky(a: &Array2<f64>) -> Option<Array2<f64>> {
    let n = a.nrows();
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut diag = a[[j, j]];
        for k in 0..j {
            diag -= l[[j, k]] * l[[j, k]];
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return None;
        }
        let ljj = diag.sqrt();
        l[[j, j]] = ljj;
        for i in (j + 1)..n {
            let mut v = a[[i, j]];
            for k in 0..j {
                v -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = v / ljj;
        }
    }
    Some(l)
}

fn cholesky_solve(l: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let n = l.nrows();
    let mut z = b.clone();
    for i in 0..n {
        let mut v = z[i];
        for k in 0..i {
            v -= l[[i, k]] * z[k];
        }
        z[i] = v / l[[i, i]];
    }
    for i in (0..n).rev() {
        let mut v = z[i];
        for k in (i + 1)..n {
            v -= l[[k, i]] * z[k];
        }
        z[i] = v / l[[i, i]];
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn separated_one_dimensional_classes() {
        let x = array![[0.0], [0.01], [1.0], [0.99]];
        let y = [1, 1, 2, 2];
        let model = lda_fit(x.view(), &y).unwrap();
        assert_eq!(lda_predict(&model, x.view()).unwrap(), vec![1, 1, 2, 2]);
        // equal priors: the boundary sits at the midpoint of the means
        let grid = array![[0.49], [0.51]];
        assert_eq!(lda_predict(&model, grid.view()).unwrap(), vec![1, 2]);
    }

    #[test]
    fn identical_classes_follow_prior() {
        let x = array![[0.0], [1.0], [0.0], [1.0], [0.0], [1.0]];
        let y = [1, 1, 2, 2, 2, 2];
        let model = lda_fit(x.view(), &y).unwrap();
        assert_eq!(lda_predict(&model, x.view()).unwrap(), vec![2; 6]);
    }

    #[test]
    fn single_class_is_an_error() {
        let x = array![[0.0], [1.0]];
        assert!(lda_fit(x.view(), &[1, 1]).is_err());
        // unknown rows do not count as a class
        assert!(lda_fit(x.view(), &[1, 0]).is_err());
    }

    #[test]
    fn absent_classes_are_skipped() {
        let x = array![[0.0, 0.0], [0.1, 0.0], [1.0, 1.0], [0.9, 1.0]];
        let model = lda_fit(x.view(), &[1, 1, 4, 4]).unwrap();
        assert_eq!(model.classes, vec![1, 4]);
        assert!((model.priors.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_rows_are_deterministic() {
        let x = array![[0.2, 0.8], [0.3, 0.7], [0.8, 0.2], [0.7, 0.3]];
        let model = lda_fit(x.view(), &[1, 1, 2, 2]).unwrap();
        let origin = array![[0.0, 0.0], [0.0, 0.0]];
        let a = lda_predict(&model, origin.view()).unwrap();
        assert_eq!(a[0], a[1]);
        assert_eq!(a, lda_predict(&model, origin.view()).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        let x = array![[0.0], [1.0]];
        let model = lda_fit(x.view(), &[1, 2]).unwrap();
        assert!(lda_predict(&model, array![[0.0, 1.0]].view()).is_err());
    }

    #[test]
    fn covariance_is_symmetric_and_positive() {
        let x = array![[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]];
        let model = lda_fit(x.view(), &[1, 1, 2, 2]).unwrap();
        let c = &model.pooled_covariance;
        assert_eq!(c, &c.t());
        assert!(cholesky(c).is_some());
        assert!(model.ridge > 0.0);
    }
}
