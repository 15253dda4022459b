use std::collections::BTreeMap;

use crate::{Error, Result};

pub fn dist(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Argument(format!("pattern dims {} and {} differ", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

fn pair_distances(patterns: &[Vec<f64>]) -> Result<Vec<f64>> {
    if patterns.len() < 2 {
        return Err(Error::Argument(format!("need at least 2 patterns, got {}", patterns.len())));
    }
    let mut out = Vec::with_capacity(patterns.len() * (patterns.len() - 1) / 2);
    for i in 0..patterns.len() {
        for j in i + 1..patterns.len() {
            out.push(dist(&patterns[i], &patterns[j])?);
        }
    }
    Ok(out)
}

/// Mean distance over all unordered pattern pairs.
pub fn d_avg(patterns: &[Vec<f64>]) -> Result<f64> {
    let d = pair_distances(patterns)?;
    Ok(d.iter().sum::<f64>() / d.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeDistance {
    pub value: f64,
    /// Some pair of patterns coincides; `value` is then 0.
    pub degenerate: bool,
}

/// Geometric mean of pair distances relative to their arithmetic mean: 1 when
/// all patterns are equidistant, smaller the more uneven the spread.
pub fn d_rel(patterns: &[Vec<f64>]) -> Result<RelativeDistance> {
    let d = pair_distances(patterns)?;
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    if d.contains(&0.0) {
        return Ok(RelativeDistance { value: 0.0, degenerate: true });
    }
    let log_mean = d.iter().map(|x| (x / mean).ln()).sum::<f64>() / d.len() as f64;
    Ok(RelativeDistance { value: log_mean.exp(), degenerate: false })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterDistances {
    /// Mean within-cluster pair distance, averaged over clusters.
    pub d_inter: f64,
    /// Mean distance between cluster centroids.
    pub d_intra: f64,
    /// Clusters with a single member, left out of `d_inter`.
    pub skipped: usize,
}

pub fn cluster_distances<L: Ord + Clone>(patterns: &[Vec<f64>], labels: &[L]) -> Result<ClusterDistances> {
    if patterns.len() != labels.len() {
        return Err(Error::Argument("one label per pattern required".into()));
    }
    let mut clusters: BTreeMap<L, Vec<Vec<f64>>> = BTreeMap::new();
    for (p, l) in patterns.iter().zip(labels) {
        clusters.entry(l.clone()).or_default().push(p.clone());
    }
    if clusters.len() < 2 {
        return Err(Error::Argument("need at least 2 labels".into()));
    }
    let mut inter = Vec::new();
    let mut centroids = Vec::new();
    let mut skipped = 0;
    for members in clusters.values() {
        if members.len() >= 2 {
            inter.push(d_avg(members)?);
        } else {
            skipped += 1;
        }
        let dim = members[0].len();
        let mut c = vec![0.0; dim];
        for m in members {
            if m.len() != dim {
                return Err(Error::Argument("patterns differ in dimension".into()));
            }
            for (ci, mi) in c.iter_mut().zip(m) {
                *ci += mi;
            }
        }
        c.iter_mut().for_each(|v| *v /= members.len() as f64);
        centroids.push(c);
    }
    if inter.is_empty() {
        return Err(Error::Argument("every cluster is a singleton".into()));
    }
    Ok(ClusterDistances {
        d_inter: inter.iter().sum::<f64>() / inter.len() as f64,
        d_intra: d_avg(&centroids)?,
        skipped,
    })
}

pub fn d_inter<L: Ord + Clone>(patterns: &[Vec<f64>], labels: &[L]) -> Result<f64> {
    cluster_distances(patterns, labels).map(|c| c.d_inter)
}

pub fn d_intra<L: Ord + Clone>(patterns: &[Vec<f64>], labels: &[L]) -> Result<f64> {
    cluster_distances(patterns, labels).map(|c| c.d_intra)
}
