use statrs::function::beta::beta_reg;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    /// Two-sided p-value.
    pub p: f64,
    /// Both samples have zero variance; `p` is 1 for equal means, else 0.
    pub degenerate: bool,
}

fn moments(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Sample mean and its standard error (sample sd / √n).
pub fn mean_and_se(x: &[f64]) -> (f64, f64) {
    match x.len() {
        0 => (f64::NAN, f64::NAN),
        1 => (x[0], 0.0),
        n => {
            let (m, v) = moments(x);
            (m, (v / n as f64).sqrt())
        }
    }
}

/// Welch's unequal-variance t-test.
pub fn two_sample_t(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Argument("each sample needs at least 2 values".into()));
    }
    let (ma, va) = moments(a);
    let (mb, vb) = moments(b);
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se2 = sa + sb;
    if se2 == 0.0 {
        let p = if ma == mb { 1.0 } else { 0.0 };
        let t = if ma == mb { 0.0 } else { f64::INFINITY.copysign(ma - mb) };
        return Ok(TTest { t, df: f64::NAN, p, degenerate: true });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (a.len() as f64 - 1.0) + sb * sb / (b.len() as f64 - 1.0));
    let p = beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0);
    Ok(TTest { t, df, p, degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_symmetric() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!((two_sample_t(&a, &a).unwrap().p - 1.0).abs() < 1e-12);
        let b = [2.5, 3.1, 4.7, 5.0, 6.2];
        let (x, y) = (two_sample_t(&a, &b).unwrap(), two_sample_t(&b, &a).unwrap());
        assert!((x.p - y.p).abs() < 1e-14);
        assert!((x.t + y.t).abs() < 1e-14);
    }

    #[test]
    fn separated_samples() {
        let a = [0.0, 1e-3, -1e-3, 2e-3, 0.0];
        let b = [10.0, 10.001, 9.999, 10.0, 10.002];
        assert!(two_sample_t(&a, &b).unwrap().p < 1e-4);
        let d = two_sample_t(&[1.0, 1.0], &[2.0, 2.0]).unwrap();
        assert!(d.degenerate && d.p == 0.0);
    }

    #[test]
    fn textbook_value() {
        // t = -2, df = 8 (equal n and variances): table two-sided p = 0.080516
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [3.0, 4.0, 5.0, 6.0, 7.0];
        let r = two_sample_t(&a, &b).unwrap();
        assert!((r.df - 8.0).abs() < 1e-12);
        assert!((r.p - 0.080516).abs() < 1e-5, "{}", r.p);
    }

    #[test]
    fn standard_error() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
