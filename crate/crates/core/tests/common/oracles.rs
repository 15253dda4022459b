//! Brute-force reference implementations for the metrics.

/// Edit distance with insertion and deletion 1 and substitution 2. A
/// substitution never beats a deletion plus an insertion, so the distance is
/// `|a| + |b| - 2 * LCS`; the LCS is found by trying every subsequence of `a`.
pub fn edit_distance_exhaustive<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    assert!(a.len() <= 16, "exhaustive oracle is exponential");
    let mut best = 0;
    for mask in 0u32..(1 << a.len()) {
        let len = mask.count_ones() as usize;
        if len <= best {
            continue;
        }
        let mut pos = 0;
        let mut ok = true;
        for (i, x) in a.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            match b[pos..].iter().position(|y| y == x) {
                Some(k) => pos += k + 1,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            best = len;
        }
    }
    a.len() + b.len() - 2 * best
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// `(d_inter, d_intra)` from all ordered pairs of the whole set: the mean
/// same-label pair distance per label (labels with one member left out),
/// averaged over labels, and the mean distance between label centroids.
pub fn cluster_distances_brute(patterns: &[Vec<f64>], labels: &[usize]) -> (f64, f64) {
    let mut distinct: Vec<usize> = labels.to_vec();
    distinct.sort();
    distinct.dedup();
    let mut inter = Vec::new();
    let mut centroids = Vec::new();
    for &l in &distinct {
        let (mut sum, mut pairs) = (0.0, 0usize);
        for i in 0..patterns.len() {
            for j in 0..patterns.len() {
                if i != j && labels[i] == l && labels[j] == l {
                    sum += euclid(&patterns[i], &patterns[j]);
                    pairs += 1;
                }
            }
        }
        if pairs > 0 {
            inter.push(sum / pairs as f64);
        }
        let members: Vec<&Vec<f64>> = patterns.iter().zip(labels).filter(|(_, x)| **x == l).map(|(p, _)| p).collect();
        let centroid: Vec<f64> =
            (0..patterns[0].len()).map(|k| members.iter().map(|m| m[k]).sum::<f64>() / members.len() as f64).collect();
        centroids.push(centroid);
    }
    let (mut sum, mut pairs) = (0.0, 0usize);
    for i in 0..centroids.len() {
        for j in 0..centroids.len() {
            if i != j {
                sum += euclid(&centroids[i], &centroids[j]);
                pairs += 1;
            }
        }
    }
    (inter.iter().sum::<f64>() / inter.len() as f64, sum / pairs as f64)
}
