use super::GenError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MandatoryMethod {
    /// Scattered: maximize the pairwise distance sum.
    Sm,
    /// Clustered: minimize it.
    Cm,
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// `a` is strictly better than `b` for the method, with a little slack so
/// that float noise does not decide ties.
fn better(method: MandatoryMethod, a: f64, b: f64) -> bool {
    match method {
        MandatoryMethod::Sm => a > b + 1e-9,
        MandatoryMethod::Cm => a < b - 1e-9,
    }
}

/// Sum of pairwise distances within `chosen`.
pub fn dispersion(points: &[(f64, f64)], chosen: &[usize]) -> f64 {
    let mut total = 0.0;
    for (a, &i) in chosen.iter().enumerate() {
        for &j in &chosen[a + 1..] {
            total += dist(points[i], points[j]);
        }
    }
    total
}

/// Picks `count` of the `points` (indices into the slice) by a greedy
/// construction followed by best-improvement swaps. The first pick is the
/// point with the largest (SM) or smallest (CM) distance sum to all points;
/// ties go to the lowest index throughout.
pub fn select_diverse(
    points: &[(f64, f64)],
    count: usize,
    method: MandatoryMethod,
) -> Result<Vec<usize>, GenError> {
    if count > points.len() {
        return Err(GenError::TooFewCustomers {
            needed: count,
            available: points.len(),
        });
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut chosen = Vec::with_capacity(count);
    let mut in_set = vec![false; points.len()];
    let score_to =
        |i: usize, set: &[usize]| set.iter().map(|&j| dist(points[i], points[j])).sum::<f64>();

    let all: Vec<usize> = (0..points.len()).collect();
    let mut first = 0;
    for i in 1..points.len() {
        if better(method, score_to(i, &all), score_to(first, &all)) {
            first = i;
        }
    }
    chosen.push(first);
    in_set[first] = true;
    while chosen.len() < count {
        let mut pick = None;
        for i in (0..points.len()).filter(|&i| !in_set[i]) {
            let s = score_to(i, &chosen);
            if pick.is_none_or(|(_, best)| better(method, s, best)) {
                pick = Some((i, s));
            }
        }
        let (i, _) = pick.expect("enough points");
        chosen.push(i);
        in_set[i] = true;
    }

    // swap local search
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for a in 0..chosen.len() {
            let out = chosen[a];
            let rest: Vec<usize> = chosen.iter().copied().filter(|&v| v != out).collect();
            let lose = score_to(out, &rest);
            for u in (0..points.len()).filter(|&u| !in_set[u]) {
                let delta = score_to(u, &rest) - lose;
                let improves = better(method, delta, 0.0);
                let beats = best.is_none_or(|(_, _, d)| better(method, delta, d));
                if improves && beats {
                    best = Some((a, u, delta));
                }
            }
        }
        let Some((a, u, _)) = best else { break };
        in_set[chosen[a]] = false;
        in_set[u] = true;
        chosen[a] = u;
    }
    chosen.sort_unstable();
    Ok(chosen)
}
