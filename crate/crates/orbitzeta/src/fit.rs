//! Small numeric helpers: deterministic summation and least-squares lines.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("abscissae are (numerically) constant")]
    DegenerateAbscissae,
    #[error("non-finite value in fit input")]
    NonFinite,
}

/// Sum with a fixed pairwise reduction tree.
///
/// The bracketing depends only on the slice length, so results are bit-stable
/// across runs and worker counts, and rounding error grows like O(log n).
pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Default + std::ops::Add<Output = T>,
{
    if xs.len() <= 32 {
        let mut s = T::default();
        for &x in xs {
            s = s + x;
        }
        s
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// Ordinary least-squares line fit.
#[derive(Clone, Copy, Debug)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (0 when there are no residual degrees of
    /// freedom).
    pub slope_se: f64,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit, FitError> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return Err(FitError::TooFewPoints { need: 2, got: n.min(ys.len()) });
    }
    if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
        return Err(FitError::NonFinite);
    }
    let nf = n as f64;
    let xbar = pairwise_sum(xs) / nf;
    let ybar = pairwise_sum(ys) / nf;
    let sxx: Vec<f64> = xs.iter().map(|&x| (x - xbar) * (x - xbar)).collect();
    let sxy: Vec<f64> = xs.iter().zip(ys).map(|(&x, &y)| (x - xbar) * (y - ybar)).collect();
    let sxx = pairwise_sum(&sxx);
    let sxy = pairwise_sum(&sxy);
    let xspread = xs.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if sxx <= 0.0 || (xspread.1 - xspread.0) < 1e-300 {
        return Err(FitError::DegenerateAbscissae);
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let slope_se = if n > 2 {
        let resid2: Vec<f64> = xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let r = y - (slope * x + intercept);
                r * r
            })
            .collect();
        let s2 = pairwise_sum(&resid2) / (nf - 2.0);
        (s2 / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit { slope, intercept, slope_se })
}
