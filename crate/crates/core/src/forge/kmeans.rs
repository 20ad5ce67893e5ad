use super::mandatory::{select_diverse, MandatoryMethod};

pub const MAX_ITERATIONS: usize = 100;

fn sq(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)
}

fn nearest(p: (f64, f64), centroids: &[(f64, f64)]) -> usize {
    let mut best = 0;
    for (k, &c) in centroids.iter().enumerate().skip(1) {
        if sq(p, c) < sq(p, centroids[best]) {
            best = k;
        }
    }
    best
}

/// Lloyd's iterations from a deterministic start: the `c` points chosen by
/// the scattered greedy. An empty cluster is re-seeded with the point
/// farthest from every centroid (lowest index on ties). Returns the cluster
/// of each point.
pub fn kmeans(points: &[(f64, f64)], c: usize) -> Vec<usize> {
    if points.is_empty() || c == 0 {
        return vec![0; points.len()];
    }
    let c = c.min(points.len());
    let seeds = select_diverse(points, c, MandatoryMethod::Sm).expect("c <= points");
    let mut centroids: Vec<(f64, f64)> = seeds.iter().map(|&i| points[i]).collect();
    let mut assign: Vec<usize> = points.iter().map(|&p| nearest(p, &centroids)).collect();
    for _ in 0..MAX_ITERATIONS {
        let mut sums = vec![(0.0, 0.0, 0usize); c];
        for (i, &k) in assign.iter().enumerate() {
            sums[k].0 += points[i].0;
            sums[k].1 += points[i].1;
            sums[k].2 += 1;
        }
        for k in 0..c {
            if sums[k].2 > 0 {
                centroids[k] = (sums[k].0 / sums[k].2 as f64, sums[k].1 / sums[k].2 as f64);
            } else {
                let mut far = 0;
                let gap = |i: usize| {
                    centroids
                        .iter()
                        .map(|&m| sq(points[i], m))
                        .fold(f64::INFINITY, f64::min)
                };
                for i in 1..points.len() {
                    if gap(i) > gap(far) {
                        far = i;
                    }
                }
                centroids[k] = points[far];
            }
        }
        let next: Vec<usize> = points.iter().map(|&p| nearest(p, &centroids)).collect();
        if next == assign {
            break;
        }
        assign = next;
    }
    assign
}
