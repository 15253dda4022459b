use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub coords: Vec<Vec<f64>>,
    pub components: Vec<Vec<f64>>,
    /// Fraction of total variance per component, non-increasing.
    pub explained: Vec<f64>,
    /// The data has no variance; all coordinates are zero.
    pub degenerate: bool,
}

const MAX_ITER: usize = 20_000;

/// Leading eigenpair of a symmetric positive semi-definite matrix.
fn power_iteration(c: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let d = c.len();
    // start from the largest covariance column so the start is never orthogonal
    // to the whole dominant eigenspace
    let start = (0..d)
        .max_by(|&a, &b| {
            let na: f64 = c.iter().map(|r| r[a] * r[a]).sum();
            let nb: f64 = c.iter().map(|r| r[b] * r[b]).sum();
            na.total_cmp(&nb)
        })
        .unwrap_or(0);
    let mut v: Vec<f64> = c.iter().map(|r| r[start]).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return (0.0, vec![0.0; d]);
    }
    v.iter_mut().for_each(|x| *x /= norm);
    let mut lambda = 0.0;
    for _ in 0..MAX_ITER {
        let mut w: Vec<f64> = c.iter().map(|r| r.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            return (0.0, v);
        }
        w.iter_mut().for_each(|x| *x /= n);
        let delta: f64 = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        v = w;
        lambda = n;
        if delta < 1e-13 {
            break;
        }
    }
    (lambda, v)
}

/// Project mean-centred patterns onto their top `k` principal components.
/// Each component is signed so that its largest-magnitude loading is positive.
pub fn pca_project(patterns: &[Vec<f64>], k: usize) -> Result<Projection> {
    if patterns.len() < 2 {
        return Err(Error::Argument("PCA needs at least 2 patterns".into()));
    }
    let d = patterns[0].len();
    if patterns.iter().any(|p| p.len() != d) || k == 0 || k > d {
        return Err(Error::Argument(format!("PCA needs uniform dims and 1 ≤ k ≤ {d}")));
    }
    let n = patterns.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| patterns.iter().map(|p| p[j]).sum::<f64>() / n).collect();
    let centred: Vec<Vec<f64>> = patterns.iter().map(|p| p.iter().zip(&mean).map(|(a, m)| a - m).collect()).collect();
    let mut cov = vec![vec![0.0; d]; d];
    for p in &centred {
        for i in 0..d {
            for j in 0..d {
                cov[i][j] += p[i] * p[j] / n;
            }
        }
    }
    let total: f64 = (0..d).map(|i| cov[i][i]).sum();
    if total <= 1e-300 {
        return Ok(Projection {
            coords: vec![vec![0.0; k]; patterns.len()],
            components: vec![vec![0.0; d]; k],
            explained: vec![0.0; k],
            degenerate: true,
        });
    }
    let mut components = Vec::with_capacity(k);
    let mut explained = Vec::with_capacity(k);
    for _ in 0..k {
        let (lambda, mut v) = power_iteration(&cov);
        if lambda <= total * 1e-14 {
            components.push(vec![0.0; d]);
            explained.push(0.0);
            continue;
        }
        let lead = (0..d).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap_or(0);
        if v[lead] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        for i in 0..d {
            for j in 0..d {
                cov[i][j] -= lambda * v[i] * v[j];
            }
        }
        explained.push((lambda / total).min(1.0));
        components.push(v);
    }
    let coords = centred
        .iter()
        .map(|p| components.iter().map(|c| c.iter().zip(p).map(|(a, b)| a * b).sum()).collect())
        .collect();
    Ok(Projection { coords, components, explained, degenerate: false })
}
