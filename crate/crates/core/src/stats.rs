//! Pearson correlation and t-tests, built on an in-crate regularized
//! incomplete beta function.
//!
//! All p-values are two-sided. The "independent samples" test defaults to
//! Welch's form (no equal-variance assumption); a pooled-variance variant
//! is available for sensitivity checks.

use crate::error::{Error, Result};

/// Result of a statistical test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub degrees_of_freedom: f64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance (n - 1 denominator).
fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Product-moment correlation with a two-sided p-value from
/// `t = R * sqrt((n-2) / (1-R^2))` on n-2 degrees of freedom.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<TestResult> {
    if xs.len() != ys.len() {
        return Err(Error::param(
            "ys",
            format!("length {} != xs length {}", ys.len(), xs.len()),
        ));
    }
    if xs.len() < 3 {
        return Err(Error::param("xs", "need at least 3 points"));
    }
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("constant input sequence".into()));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = (xs.len() - 2) as f64;
    let p_value = if 1.0 - r * r <= 0.0 {
        0.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        2.0 * student_t_sf(t.abs(), df)?
    };
    Ok(TestResult {
        statistic: r,
        p_value,
        degrees_of_freedom: df,
    })
}

/// Paired t-test on the differences `a - b`.
pub fn paired_ttest(a: &[f64], b: &[f64]) -> Result<TestResult> {
    if a.len() != b.len() {
        return Err(Error::param(
            "b",
            format!("length {} != a length {}", b.len(), a.len()),
        ));
    }
    if a.len() < 2 {
        return Err(Error::param("a", "need at least 2 pairs"));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
    let sd = variance(&d).sqrt();
    if sd == 0.0 {
        return Err(Error::UndefinedTest("zero variance".into()));
    }
    let n = d.len() as f64;
    let t = mean(&d) / (sd / n.sqrt());
    let df = n - 1.0;
    Ok(TestResult {
        statistic: t,
        p_value: 2.0 * student_t_sf(t.abs(), df)?,
        degrees_of_freedom: df,
    })
}

/// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of
/// freedom.
pub fn welch_ttest(a: &[f64], b: &[f64]) -> Result<TestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::param("samples", "each sample needs at least 2 values"));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (variance(a), variance(b));
    if va == 0.0 && vb == 0.0 {
        return Err(Error::UndefinedTest("zero variance in both samples".into()));
    }
    let sea = va / na;
    let seb = vb / nb;
    let t = (mean(a) - mean(b)) / (sea + seb).sqrt();
    let df = (sea + seb) * (sea + seb) / (sea * sea / (na - 1.0) + seb * seb / (nb - 1.0));
    Ok(TestResult {
        statistic: t,
        p_value: 2.0 * student_t_sf(t.abs(), df)?,
        degrees_of_freedom: df,
    })
}

/// Pooled-variance two-sample t-test (assumes equal variances); kept as a
/// sensitivity check next to [`welch_ttest`].
pub fn pooled_ttest(a: &[f64], b: &[f64]) -> Result<TestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::param("samples", "each sample needs at least 2 values"));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (variance(a), variance(b));
    let pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
    if pooled == 0.0 {
        return Err(Error::UndefinedTest("zero pooled variance".into()));
    }
    let t = (mean(a) - mean(b)) / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    let df = na + nb - 2.0;
    Ok(TestResult {
        statistic: t,
        p_value: 2.0 * student_t_sf(t.abs(), df)?,
        degrees_of_freedom: df,
    })
}

/// Upper-tail survival function of Student's t distribution:
/// `P(T > t)` with `df` degrees of freedom.
pub fn student_t_sf(t: f64, df: f64) -> Result<f64> {
    if !(df > 0.0) {
        return Err(Error::param("df", "must be > 0"));
    }
    if t.is_nan() {
        return Err(Error::param("t", "must not be NaN"));
    }
    if t == 0.0 {
        return Ok(0.5);
    }
    let x = df / (df + t * t);
    let half_tail = 0.5 * reg_inc_beta(0.5 * df, 0.5, x);
    Ok(if t > 0.0 { half_tail } else { 1.0 - half_tail })
}

/// Regularized incomplete beta function `I_x(a, b)`.
///
/// Continued fraction (Lentz) with the symmetry switch at
/// `x = (a+1)/(a+b+2)`; convergence tolerance 1e-12, capped at 300
/// iterations.
pub(crate) fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front = (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln())
        .exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Lentz's modified continued fraction for the incomplete beta.
pub(crate) fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TOL: f64 = 1e-12;
    const MAX_ITER: usize = 300;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=MAX_ITER {
        let m_f = m as f64;
        let m2 = 2.0 * m_f;

        let aa = m_f * (b - m_f) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m_f) * (qab + m_f) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < TOL {
            break;
        }
    }
    h
}

/// Power-series branch of `I_x(a, b)`, via the hypergeometric identity
/// `B_x(a,b) = x^a (1-x)^b / a * 2F1(a+b, 1; a+1; x)`. Converges well for
/// small x; kept as an independent cross-check of the continued fraction.
#[cfg(test)]
pub(crate) fn reg_inc_beta_series(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front = (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln())
        .exp();
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..5000 {
        let n_f = n as f64;
        term *= (a + b + n_f) / (a + 1.0 + n_f) * x;
        sum += term;
        if term.abs() < 1e-16 * sum.abs() {
            break;
        }
    }
    front * sum / a
}

/// Natural log of the gamma function (Lanczos, g = 7, 9 terms).
pub(crate) fn ln_gamma(z: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if z < 0.5 {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let pi = std::f64::consts::PI;
        return pi.ln() - (pi * z).sin().ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut acc = 0.99999999999980993;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (z + i as f64 + 1.0);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}
