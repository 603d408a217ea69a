//! The quantitative experiments: cluster-density estimation, exit-time
//! tails against the `(1-θ)^k` bound, per-square and per-triangle tail
//! factorizations, and the `(ln n)²` scaling scan.
//!
//! Determinism contract: trial `i` of any experiment uses the seed
//! `derive_seed(stream, i)` where `stream` is derived from the base seed by
//! position, never from scheduling; parallel runs therefore reproduce the
//! sequential rows exactly.

use rayon::prelude::*;

use crate::clusters::reaches_boundary;
use crate::events::F_THICKNESS;
use crate::geometry::quarter_squares;
use crate::lattice::rng::{derive_seed, SplitMix64};
use crate::lattice::{inner_boundary, BallSpec, BoxSpec, Configuration, Region, Site};
use crate::montecarlo::report::ExperimentReport;
use crate::montecarlo::stats::{mean, quantile, wilson_lower, wilson_upper, Z_95};
use crate::traveltime::{travel_field, travel_to_set_cost};
use crate::walks::{theorem_path, WalkBudget, WalkOutcome};

/// Default multiplicative slack applied to the cluster-density estimate
/// before it enters a tail bound: the finite-box estimate overshoots the
/// infinite-volume density, so the bound uses `(1-δ)·θ̂`.
pub const THETA_SLACK: f64 = 0.1;

/// Stream index reserved for auxiliary draws (pair coordinates); far above
/// any site index, so it never collides with configuration sampling.
const AUX_STREAM: u64 = u64::MAX;

fn binomial_row(r: i32, successes: u64, trials: u64) -> Vec<f64> {
    let hat = successes as f64 / trials as f64;
    vec![
        r as f64,
        hat,
        wilson_lower(successes, trials, Z_95),
        wilson_upper(successes, trials, Z_95),
        trials as f64,
    ]
}

fn count_boundary_hits(p: f64, r: i32, trials: u64, stream: u64) -> u64 {
    let region = Region::lambda(r);
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let config = Configuration::sample(r, p, derive_seed(stream, i));
            reaches_boundary(&config, &region, Site::ORIGIN) as u64
        })
        .sum()
}

/// Estimates the probability that the origin joins an open path to the
/// inner boundary of `Λ(r)`, for each `r` in `radii` — a finite upper
/// proxy for the infinite-cluster density, non-increasing in `r`.
pub fn estimate_theta(p: f64, radii: &[i32], trials: u64, base_seed: u64) -> ExperimentReport {
    assert!(trials >= 1);
    assert!(radii.iter().all(|&r| r >= 1), "boundary radii must be positive");
    let mut report = ExperimentReport::new("theta", "wilson-95");
    report.set_param("p", p);
    report.set_param(
        "radii",
        radii.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(","),
    );
    report.set_param("trials", trials);
    report.set_param("base_seed", base_seed);
    report.columns =
        vec!["r".into(), "theta_hat".into(), "lower95".into(), "upper95".into(), "trials".into()];
    for (idx, &r) in radii.iter().enumerate() {
        let stream = derive_seed(base_seed, idx as u64);
        let successes = count_boundary_hits(p, r, trials, stream);
        report.push_row(binomial_row(r, successes, trials));
    }
    report
}

/// Survival counts `#{T ≥ k}` for `k = 0..=max(T)`.
fn survival_counts(times: &[u32]) -> Vec<u64> {
    let kmax = times.iter().copied().max().unwrap_or(0) as usize;
    let mut counts = vec![0u64; kmax + 2];
    for &t in times {
        counts[t as usize + 1] += 1;
    }
    // Prefix-sum the "first reached at" histogram into survivors-from-above.
    let mut survivors = vec![0u64; kmax + 1];
    let mut alive = times.len() as u64;
    for k in 0..=kmax {
        if k > 0 {
            alive -= counts[k];
        }
        survivors[k] = alive;
    }
    survivors
}

/// Exit-time tail of `T(0, ∂ⁱⁿΛ(m))` against the `(1 - (1-δ)·θ̂)^k` bound,
/// with the density estimated first on `Λ(theta_r)` from an independent
/// substream.
pub fn tail_exit(
    p: f64,
    m: i32,
    trials: u64,
    base_seed: u64,
    theta_r: i32,
    delta: f64,
) -> ExperimentReport {
    assert!(trials >= 1);
    assert!(m >= 1 && theta_r >= 1);
    assert!((0.0..1.0).contains(&delta));
    let theta_stream = derive_seed(base_seed, 1);
    let exit_stream = derive_seed(base_seed, 2);

    let successes = count_boundary_hits(p, theta_r, trials, theta_stream);
    let theta_hat = successes as f64 / trials as f64;

    let region = Region::lambda(m);
    let boundary = inner_boundary(&region);
    let times: Vec<u32> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let config = Configuration::sample(m, p, derive_seed(exit_stream, i));
            travel_to_set_cost(&config, &region, Site::ORIGIN, &boundary)
                .expect("the box contains its boundary")
                .expect("the full box is connected")
                .0
        })
        .collect();

    let mut report = ExperimentReport::new("tail_exit", "wilson-95");
    report.set_param("p", p);
    report.set_param("m", m);
    report.set_param("trials", trials);
    report.set_param("base_seed", base_seed);
    report.set_param("theta_r", theta_r);
    report.set_param("delta", delta);
    report.set_param("theta_hat", theta_hat);
    report.set_param("theta_lower95", wilson_lower(successes, trials, Z_95));
    report.set_param("theta_upper95", wilson_upper(successes, trials, Z_95));
    report.columns = vec!["k".into(), "tail".into(), "bound".into(), "survivors".into()];
    let base = 1.0 - (1.0 - delta) * theta_hat;
    for (k, &alive) in survival_counts(&times).iter().enumerate() {
        let tail = alive as f64 / trials as f64;
        report.push_row(vec![k as f64, tail, base.powi(k as i32), alive as f64]);
    }
    report
}

/// One trial's travel times to every factor target of the tail
/// factorization experiment.
pub(crate) struct SquareSample {
    /// `T_{Λ(m)}(0, F_i^j(Λ(m)))`, face-major square order.
    pub squares: [u32; 24],
    /// `T_{Λ(m)}(0, ∂ⁱⁿΛ(m))` — the minimum of the 24.
    pub exit: u32,
    /// `T_{B_m}(0, thickened T_m^l)` for the 48 triangles.
    pub triangles: [u32; 48],
    /// `T_{B_m}(0, ∂ⁱⁿB_m)`.
    pub ball_exit: u32,
}

fn field_min(field: &crate::traveltime::DistanceField, sites: &[Site]) -> u32 {
    sites.iter().map(|&s| field.dist(s)).min().expect("target sets are nonempty")
}

pub(crate) fn square_samples(p: f64, m: i32, trials: u64, base_seed: u64) -> Vec<SquareSample> {
    assert!(m >= 1);
    let box_region = Region::lambda(m);
    let ball_region = Region::Ball(BallSpec::new(Site::ORIGIN, (m as i64) * (m as i64)));
    let squares: Vec<Vec<Site>> =
        quarter_squares(BoxSpec::lambda(m)).iter().map(|q| q.sites()).collect();
    let thick: Vec<Vec<Site>> =
        crate::geometry::thickened_all(Site::ORIGIN, (m as i64) * (m as i64), F_THICKNESS)
            .into_iter()
            .map(|t| t.sites)
            .collect();
    let ball_boundary = inner_boundary(&ball_region);

    (0..trials)
        .into_par_iter()
        .map(|i| {
            let config = Configuration::sample(m, p, derive_seed(base_seed, i));
            let box_field = travel_field(&config, &box_region, Site::ORIGIN)
                .expect("origin lies in its own box");
            let mut sample = SquareSample {
                squares: [0; 24],
                exit: u32::MAX,
                triangles: [0; 48],
                ball_exit: 0,
            };
            for (j, sq) in squares.iter().enumerate() {
                sample.squares[j] = field_min(&box_field, sq);
                sample.exit = sample.exit.min(sample.squares[j]);
            }
            let ball_field = travel_field(&config, &ball_region, Site::ORIGIN)
                .expect("origin centers the ball");
            for (l, tri) in thick.iter().enumerate() {
                sample.triangles[l] = field_min(&ball_field, tri);
            }
            sample.ball_exit = field_min(&ball_field, &ball_boundary);
            sample
        })
        .collect()
}

/// Tail factorization: the exit tail versus the 24th power of one
/// quarter-square tail, and the ball analogue versus the 48th power of one
/// triangle tail, with the one-sided comparison bands made explicit.
pub fn tail_square(p: f64, m: i32, trials: u64, base_seed: u64) -> ExperimentReport {
    assert!(trials >= 1);
    let samples = square_samples(p, m, trials, base_seed);
    let exit: Vec<u32> = samples.iter().map(|s| s.exit).collect();
    let square: Vec<u32> = samples.iter().map(|s| s.squares[0]).collect();
    let ball_exit: Vec<u32> = samples.iter().map(|s| s.ball_exit).collect();
    let triangle: Vec<u32> = samples.iter().map(|s| s.triangles[0]).collect();

    let surv = [
        survival_counts(&exit),
        survival_counts(&square),
        survival_counts(&ball_exit),
        survival_counts(&triangle),
    ];
    let kmax = surv.iter().map(|s| s.len() - 1).max().unwrap();
    let alive = |s: &Vec<u64>, k: usize| s.get(k).copied().unwrap_or(0);

    let mut report = ExperimentReport::new("tail_square", "wilson-95");
    report.set_param("p", p);
    report.set_param("m", m);
    report.set_param("trials", trials);
    report.set_param("base_seed", base_seed);
    report.set_param("thickness", F_THICKNESS);
    report.columns = vec![
        "k".into(),
        "exit_tail".into(),
        "square_tail".into(),
        "square_pow24".into(),
        "exit_upper95".into(),
        "square_lower95".into(),
        "ball_exit_tail".into(),
        "triangle_tail".into(),
        "triangle_pow48".into(),
        "ball_exit_upper95".into(),
        "triangle_lower95".into(),
    ];
    for k in 0..=kmax {
        let [e, s, be, tr] = [
            alive(&surv[0], k),
            alive(&surv[1], k),
            alive(&surv[2], k),
            alive(&surv[3], k),
        ];
        report.push_row(vec![
            k as f64,
            e as f64 / trials as f64,
            s as f64 / trials as f64,
            (s as f64 / trials as f64).powi(24),
            wilson_upper(e, trials, Z_95),
            wilson_lower(s, trials, Z_95),
            be as f64 / trials as f64,
            tr as f64 / trials as f64,
            (tr as f64 / trials as f64).powi(48),
            wilson_upper(be, trials, Z_95),
            wilson_lower(tr, trials, Z_95),
        ]);
    }
    report
}

struct ConfigStat {
    max: u32,
    walk_totals: Vec<u64>,
    min_gap: i64,
}

fn random_site(rng: &mut SplitMix64, n: i32) -> Site {
    Site::new(
        rng.next_range_i64(-n as i64, n as i64) as i32,
        rng.next_range_i64(-n as i64, n as i64) as i32,
        rng.next_range_i64(-n as i64, n as i64) as i32,
    )
}

fn scan_config(p: f64, n: i32, seed: u64, pairs: u32) -> ConfigStat {
    let config = Configuration::sample(n, p, seed);
    let region = Region::lambda(n);
    let mut rng = SplitMix64::new(derive_seed(seed, AUX_STREAM));
    let budget = WalkBudget::for_box(n, u32::MAX);

    let mut stat = ConfigStat { max: 0, walk_totals: Vec::new(), min_gap: i64::MAX };
    for _ in 0..pairs {
        let x = random_site(&mut rng, n);
        let y = random_site(&mut rng, n);
        let (exact, _) = travel_to_set_cost(&config, &region, x, &[y])
            .expect("pair endpoints lie in the box")
            .expect("the full box is connected");
        let trace = theorem_path(&config, x, y, budget)
            .expect("desk-scale walks stay below the guaranteed-contraction radius");
        debug_assert_eq!(trace.outcome, WalkOutcome::Reached);
        stat.max = stat.max.max(exact);
        stat.min_gap = stat.min_gap.min(trace.total_cost as i64 - exact as i64);
        stat.walk_totals.push(trace.total_cost);
    }
    stat
}

/// Scaling scan: per box size, samples configurations, measures random
/// exact pairs in each, runs the composed walk on the same pairs, and
/// reports the normalized maxima `κ̂ = sampled_max / (ln n)²` alongside the
/// constructive-versus-optimal gap. Maxima are sampled lower bounds over
/// the drawn pairs, not exhaustive.
pub fn scaling_scan(
    p: f64,
    sizes: &[i32],
    configs_per_n: u32,
    pairs_per_config: u32,
    base_seed: u64,
) -> ExperimentReport {
    assert!(configs_per_n >= 1);
    assert!(sizes.windows(2).all(|w| w[0] < w[1]), "sizes must be strictly ascending");
    assert!(sizes.first().is_some_and(|&n| n >= 2), "scaling needs ln n > 0");

    let mut report = ExperimentReport::new("scaling", "spearman-exact");
    report.set_param("p", p);
    report.set_param(
        "sizes",
        sizes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","),
    );
    report.set_param("configs_per_n", configs_per_n);
    report.set_param("pairs_per_config", pairs_per_config);
    report.set_param("base_seed", base_seed);
    report.columns = vec![
        "n".into(),
        "sampled_max".into(),
        "q99".into(),
        "mean_max".into(),
        "kappa_hat".into(),
        "walk_max".into(),
        "walk_mean".into(),
        "min_gap".into(),
    ];

    for &n in sizes {
        let stream = derive_seed(base_seed, n as u64);
        let stats: Vec<ConfigStat> = (0..configs_per_n as u64)
            .into_par_iter()
            .map(|c| scan_config(p, n, derive_seed(stream, c), pairs_per_config))
            .collect();
        let mut maxima: Vec<f64> = stats.iter().map(|s| s.max as f64).collect();
        maxima.sort_unstable_by(f64::total_cmp);
        let sampled_max = *maxima.last().unwrap();
        let walk_totals: Vec<f64> =
            stats.iter().flat_map(|s| s.walk_totals.iter().map(|&w| w as f64)).collect();
        let min_gap = stats.iter().map(|s| s.min_gap).min().unwrap();
        let log_sq = (n as f64).ln().powi(2);
        report.push_row(vec![
            n as f64,
            sampled_max,
            quantile(&maxima, 0.99),
            mean(&maxima),
            sampled_max / log_sq,
            walk_totals.iter().copied().fold(0.0, f64::max),
            if walk_totals.is_empty() { 0.0 } else { mean(&walk_totals) },
            if min_gap == i64::MAX { 0.0 } else { min_gap as f64 },
        ]);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::stats::{wilson_lower, wilson_upper};

    #[test]
    fn theta_is_exact_at_the_extremes() {
        let ones = estimate_theta(1.0, &[3, 5], 200, 7);
        assert_eq!(ones.column_values("theta_hat").unwrap(), vec![1.0, 1.0]);
        let zeros = estimate_theta(0.0, &[3], 200, 7);
        assert_eq!(zeros.column_values("theta_hat").unwrap(), vec![0.0]);
        for row in &ones.rows {
            let (hat, lo, hi) = (row[1], row[2], row[3]);
            assert!(lo <= hat && hat <= hi && (0.0..=1.0).contains(&hat));
        }
    }

    #[test]
    fn theta_rows_follow_the_documented_seed_schedule() {
        let (p, trials, base) = (0.5, 150u64, 99u64);
        let report = estimate_theta(p, &[2, 4], trials, base);
        for (idx, &r) in [2, 4].iter().enumerate() {
            let stream = derive_seed(base, idx as u64);
            let mut successes = 0u64;
            for i in 0..trials {
                let config = Configuration::sample(r, p, derive_seed(stream, i));
                successes += reaches_boundary(&config, &Region::lambda(r), Site::ORIGIN) as u64;
            }
            assert_eq!(report.rows[idx][1], successes as f64 / trials as f64);
        }
    }

    #[test]
    fn tail_exit_has_unit_mass_at_zero_and_monotone_tails() {
        let report = tail_exit(0.6, 6, 400, 11, 8, THETA_SLACK);
        let tails = report.column_values("tail").unwrap();
        assert_eq!(tails[0], 1.0);
        assert!(tails.windows(2).all(|w| w[1] <= w[0]));
        let theta_hat: f64 = report.param("theta_hat").unwrap().parse().unwrap();
        let bounds = report.column_values("bound").unwrap();
        for (k, b) in bounds.iter().enumerate() {
            assert!((b - (1.0 - 0.9 * theta_hat).powi(k as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_exit_is_trivial_when_everything_is_open() {
        let report = tail_exit(1.0, 5, 100, 3, 5, THETA_SLACK);
        assert_eq!(report.rows.len(), 1, "no trial ever pays a closed site");
        assert_eq!(report.rows[0][1], 1.0);
    }

    #[test]
    fn raising_p_lowers_every_tail_under_the_shared_seeds() {
        let lo = tail_exit(0.45, 6, 300, 5, 6, THETA_SLACK);
        let hi = tail_exit(0.75, 6, 300, 5, 6, THETA_SLACK);
        let lo_tails = lo.column_values("tail").unwrap();
        let hi_tails = hi.column_values("tail").unwrap();
        for k in 0..lo_tails.len().max(hi_tails.len()) {
            let l = lo_tails.get(k).copied().unwrap_or(0.0);
            let h = hi_tails.get(k).copied().unwrap_or(0.0);
            assert!(h <= l, "k={k}: coupling must not raise the tail ({h} > {l})");
        }
    }

    #[test]
    fn square_tails_factor_in_the_right_direction() {
        let report = tail_square(0.6, 4, 400, 21);
        let exit = report.column_values("exit_tail").unwrap();
        let square = report.column_values("square_tail").unwrap();
        let ball = report.column_values("ball_exit_tail").unwrap();
        let tri = report.column_values("triangle_tail").unwrap();
        for k in 0..exit.len() {
            // Exit is the minimum over squares, so its tail is the smaller.
            assert!(exit[k] <= square[k] + 1e-12);
            assert!(ball[k] <= tri[k] + 1e-12);
        }
        let exit_hi = report.column_values("exit_upper95").unwrap();
        let square_lo = report.column_values("square_lower95").unwrap();
        let ball_hi = report.column_values("ball_exit_upper95").unwrap();
        let tri_lo = report.column_values("triangle_lower95").unwrap();
        for k in 0..exit.len() {
            assert!(exit_hi[k] >= square_lo[k].powi(24) - 1e-12);
            assert!(ball_hi[k] >= tri_lo[k].powi(48) - 1e-12);
        }
    }

    #[test]
    fn the_24_square_tails_are_exchangeable_within_confidence() {
        let trials = 400u64;
        let samples = square_samples(0.6, 4, trials, 33);
        let k = 1u32;
        let counts: Vec<u64> = (0..24)
            .map(|j| samples.iter().filter(|s| s.squares[j] >= k).count() as u64)
            .collect();
        for a in 0..24 {
            for b in (a + 1)..24 {
                let overlap = wilson_lower(counts[a], trials, Z_95)
                    <= wilson_upper(counts[b], trials, Z_95)
                    && wilson_lower(counts[b], trials, Z_95)
                        <= wilson_upper(counts[a], trials, Z_95);
                assert!(overlap, "squares {a} and {b} drifted apart: {counts:?}");
            }
        }
    }

    #[test]
    fn scaling_scan_is_deterministic_and_gap_nonnegative() {
        let a = scaling_scan(0.6, &[4, 8], 3, 2, 77);
        let b = scaling_scan(0.6, &[4, 8], 3, 2, 77);
        assert_eq!(a, b);
        for gap in a.column_values("min_gap").unwrap() {
            assert!(gap >= 0.0, "a constructed path can never beat the optimum");
        }
        for row in &a.rows {
            let (max, q99, mean_max) = (row[1], row[2], row[3]);
            assert!(max >= q99 && q99 >= mean_max);
        }
    }

    #[test]
    fn scaling_scan_is_all_zero_when_everything_is_open() {
        let report = scaling_scan(1.0, &[4, 8], 2, 2, 5);
        for name in ["sampled_max", "kappa_hat", "walk_max", "min_gap"] {
            for v in report.column_values(name).unwrap() {
                assert_eq!(v, 0.0, "{name} must vanish in the all-open regime");
            }
        }
    }
}
