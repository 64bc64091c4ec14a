//! Closed-form performance curves of an ideal random classifier as a
//! function of the minority-to-majority ratio `r`, plus through-origin
//! fits of the linear law `metric = coefficient * r`.
//!
//! For a classifier that predicts each class with probability 0.5 on data
//! with minority fraction `P_p = r/(1+r)`, the expected F1 is `2r/(3r+1)`
//! and the expected AUPRC is `r/(1+r)` (the precision-recall curve is a
//! horizontal line at `P_p`). Both are strictly increasing on (0, 1] and
//! peak at 0.5 when the data is balanced; for small r they collapse to the
//! linear forms `2r` and `r`.

use crate::error::{Error, Result};
use crate::metrics::point_metrics_from_cells;
use crate::stats;

fn check_domain(r: f64) -> Result<()> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::param("r", format!("must lie in (0, 1], got {r}")));
    }
    Ok(())
}

/// Expected F1 of the ideal random classifier: `2r / (3r + 1)`.
pub fn f1_random(r: f64) -> Result<f64> {
    check_domain(r)?;
    Ok(2.0 * r / (3.0 * r + 1.0))
}

/// Derivative of [`f1_random`]: `2 / (3r + 1)^2`.
pub fn f1_random_deriv(r: f64) -> Result<f64> {
    check_domain(r)?;
    let d = 3.0 * r + 1.0;
    Ok(2.0 / (d * d))
}

/// Expected AUPRC of the ideal random classifier: `r / (1 + r)`.
pub fn auprc_random(r: f64) -> Result<f64> {
    check_domain(r)?;
    Ok(r / (1.0 + r))
}

/// Derivative of [`auprc_random`]: `1 / (1 + r)^2`.
pub fn auprc_random_deriv(r: f64) -> Result<f64> {
    check_domain(r)?;
    let d = 1.0 + r;
    Ok(1.0 / (d * d))
}

/// Expected confusion cells of the ideal random classifier, as fractions
/// of the evaluation population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedConfusion {
    pub tp: f64,
    pub fp: f64,
    pub fn_: f64,
    pub tn: f64,
}

impl ExpectedConfusion {
    pub fn total(&self) -> f64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// Point metrics over the expected cells. Precision comes out as
    /// `r/(1+r)` and recall as 0.5, so F1 reproduces [`f1_random`].
    pub fn point_metrics(&self) -> crate::metrics::PointMetrics {
        point_metrics_from_cells(self.tp, self.fp, self.fn_, self.tn)
    }
}

/// Expected confusion fractions: a coin-flip classifier catches half of
/// each class, so `tp = fn = P_p/2` and `fp = tn = P_n/2`.
pub fn expected_confusion_random(r: f64) -> Result<ExpectedConfusion> {
    check_domain(r)?;
    let p_pos = r / (1.0 + r);
    let p_neg = 1.0 / (1.0 + r);
    Ok(ExpectedConfusion {
        tp: 0.5 * p_pos,
        fp: 0.5 * p_neg,
        fn_: 0.5 * p_pos,
        tn: 0.5 * p_neg,
    })
}

/// Absolute error of the small-r linear approximations `F1 ~ 2r` and
/// `AUPRC ~ r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallRError {
    pub f1_abs_err: f64,
    pub auprc_abs_err: f64,
}

pub fn small_r_error(r: f64) -> Result<SmallRError> {
    Ok(SmallRError {
        f1_abs_err: (f1_random(r)? - 2.0 * r).abs(),
        auprc_abs_err: (auprc_random(r)? - r).abs(),
    })
}

/// Through-origin least-squares fit of `metric = coefficient * r`, with
/// the Pearson correlation of the raw points and its two-sided p-value.
///
/// With only two points the correlation is forced to +/-1 and carries no
/// evidence, so the p-value is reported as 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub coefficient: f64,
    pub pearson_r: f64,
    pub p_value: f64,
    pub n_points: usize,
}

/// Ordinary least-squares diagnostic fit with an intercept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Fits the intercept-free law to `(r, metric)` points:
/// `coefficient = sum(metric * r) / sum(r^2)`.
pub fn fit_ratio_law(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 2 {
        return Err(Error::param("points", "need at least 2 points"));
    }
    let first_r = points[0].0;
    if points.iter().all(|&(r, _)| r == first_r) {
        return Err(Error::param("points", "r values are all identical"));
    }
    let sum_mr: f64 = points.iter().map(|&(r, m)| m * r).sum();
    let sum_rr: f64 = points.iter().map(|&(r, _)| r * r).sum();
    let coefficient = sum_mr / sum_rr;

    let xs: Vec<f64> = points.iter().map(|&(r, _)| r).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, m)| m).collect();
    let (pearson_r, p_value) = if points.len() == 2 {
        let slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        (slope.signum(), 1.0)
    } else {
        let t = stats::pearson(&xs, &ys)?;
        (t.statistic, t.p_value)
    };
    Ok(LinearFit {
        coefficient,
        pearson_r,
        p_value,
        n_points: points.len(),
    })
}

/// Intercepted least-squares fit, reported alongside the through-origin
/// law for diagnostics.
pub fn fit_ols(points: &[(f64, f64)]) -> Result<OlsFit> {
    if points.len() < 2 {
        return Err(Error::param("points", "need at least 2 points"));
    }
    let n = points.len() as f64;
    let mean_x: f64 = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y: f64 = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    if sxx == 0.0 {
        return Err(Error::param("points", "r values are all identical"));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    Ok(OlsFit {
        slope,
        intercept: mean_y - slope * mean_x,
    })
}
