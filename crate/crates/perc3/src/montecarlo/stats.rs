//! Small statistical helpers: Wilson score intervals, quantiles, and an
//! exact-permutation Spearman rank test for very short series.

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959963984540054;
/// One-sided 95% normal quantile.
pub const Z_ONE_SIDED_95: f64 = 1.6448536269514722;

/// Wilson score interval centre and half-width.
fn wilson_parts(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (centre, half)
}

/// Lower Wilson bound on a binomial proportion; 0 when there are no trials.
pub fn wilson_lower(successes: u64, trials: u64, z: f64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let (centre, half) = wilson_parts(successes, trials, z);
    (centre - half).max(0.0)
}

/// Upper Wilson bound on a binomial proportion; 1 when there are no trials.
pub fn wilson_upper(successes: u64, trials: u64, z: f64) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    let (centre, half) = wilson_parts(successes, trials, z);
    (centre + half).min(1.0)
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Quantile of an ascending-sorted slice with the convention that the
/// `q`-quantile of `N` values is element `⌈q·N⌉ − 1` (clamped to the range).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty slice");
    assert!((0.0..=1.0).contains(&q));
    let idx = ((q * sorted.len() as f64).ceil() as usize).saturating_sub(1);
    sorted[idx.min(sorted.len() - 1)]
}

/// Result of the exact permutation test for positive rank correlation.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct SpearmanTest {
    pub rho: f64,
    /// One-sided p-value: probability, under uniformly random reassignment
    /// of `ys` to `xs`, of a rank correlation at least as large as observed.
    pub p_positive: f64,
}

/// Mid-ranks (average ranks for ties), 1-based.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for i in 0..a.len() {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma).powi(2);
        vb += (b[i] - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

fn spearman_rho(xs: &[f64], ys: &[f64]) -> f64 {
    pearson(&ranks(xs), &ranks(ys))
}

/// Exact permutation test of positive monotone association between `xs` and
/// `ys`. Enumerates all `n!` reassignments, so `n` is capped at 8.
pub fn spearman_exact(xs: &[f64], ys: &[f64]) -> SpearmanTest {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    assert!((2..=8).contains(&n), "exact permutation test needs 2..=8 points");
    let observed = spearman_rho(xs, ys);
    let mut idx: Vec<usize> = (0..n).collect();
    let mut at_least = 0u64;
    let mut total = 0u64;
    permute(&mut idx, 0, &mut |perm| {
        let permuted: Vec<f64> = perm.iter().map(|&i| ys[i]).collect();
        if spearman_rho(xs, &permuted) >= observed - 1e-9 {
            at_least += 1;
        }
        total += 1;
    });
    SpearmanTest { rho: observed, p_positive: at_least as f64 / total as f64 }
}

fn permute(idx: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == idx.len() {
        visit(idx);
        return;
    }
    for i in k..idx.len() {
        idx.swap(k, i);
        permute(idx, k + 1, visit);
        idx.swap(k, i);
    }
}
