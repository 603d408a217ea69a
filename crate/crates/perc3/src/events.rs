//! Checkers for the two good events behind the waypoint walks.
//!
//! Event E(Λ, k) asks that every center of every sub-box reaches all 24
//! quarter squares of that sub-box within travel time `k`, the travel being
//! measured in the full box. Event F(Λ, k) asks the same for ball centers
//! and the 48 thickened spherical triangles, the travel being measured
//! inside the ball. Both can be verified exhaustively (small boxes),
//! estimated on sampled centers with a confidence bound, or replayed on
//! demand for exactly the queries a walk issued.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{quarter_squares, thickened_triangle, TriangleIndex};
use crate::lattice::rng::SplitMix64;
use crate::lattice::{admissible_radii, BallSpec, BoxSpec, Configuration, Region, Site};
use crate::montecarlo::stats::{wilson_upper, Z_ONE_SIDED_95};
use crate::traveltime::{travel_field, travel_to_set_cost, TravelError, UNREACHABLE};

/// Thickness of the spherical-triangle target sets used by event F.
pub const F_THICKNESS: f64 = 3.0;

/// Exhaustive checking is quadratic in the box volume; larger boxes must use
/// sampled or on-demand mode.
pub const EXHAUSTIVE_SITE_LIMIT: usize = 50_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum EventKind {
    E,
    F,
}

/// How the event is verified.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Mode {
    /// Every center, every admissible sub-shape.
    Exhaustive,
    /// `count` centers drawn uniformly from the box with the given seed;
    /// each drawn center is still checked against all its sub-shapes.
    Sampled { count: u64, seed: u64 },
    /// Exactly the listed queries, answered in order with caching.
    OnDemand(Vec<EventQuery>),
}

/// One elementary check: a center together with the target sub-shape.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum EventQuery {
    /// Travel in the full box from `center` to quarter square
    /// (`face`, `quadrant`) of the box `center + Λ(m)`.
    Square { center: Site, m: i32, face: u8, quadrant: u8 },
    /// Travel inside `center + B_r` (clipped to the configuration box) from
    /// `center` to the thickened triangle of thickness 3.
    Ball { center: Site, r_squared: i64, triangle: TriangleIndex },
}

impl EventQuery {
    pub fn center(&self) -> Site {
        match *self {
            EventQuery::Square { center, .. } | EventQuery::Ball { center, .. } => center,
        }
    }
}

/// Failing check, re-runnable in isolation.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub query: EventQuery,
    /// True travel time of the failing check (`u32::MAX` when the target is
    /// unreachable in the region).
    pub measured: u32,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct EventReport {
    pub event: EventKind,
    pub k: u32,
    pub mode: Mode,
    pub holds: bool,
    pub violation: Option<Violation>,
    pub checks_performed: u64,
    /// One-sided 95% Wilson bound on the per-center violation probability;
    /// present in sampled mode only.
    pub violation_upper_bound: Option<f64>,
}

/// Travel time of a single query, measured exactly as the event checkers and
/// walks do.
pub fn measure_query(config: &Configuration, query: &EventQuery) -> Result<u32, TravelError> {
    let found = match *query {
        EventQuery::Square { center, m, face, quadrant } => {
            let square = crate::geometry::QuarterSquare::new(BoxSpec::new(center, m), face, quadrant);
            travel_to_set_cost(config, &Region::lambda(config.n()), center, &square.sites())?
        }
        EventQuery::Ball { center, r_squared, triangle } => {
            let thick = thickened_triangle(center, r_squared, triangle, F_THICKNESS);
            let region = Region::Ball(BallSpec::new(center, r_squared));
            travel_to_set_cost(config, &region, center, &thick.sites)?
        }
    };
    Ok(found.map_or(UNREACHABLE, |(cost, _)| cost))
}

/// Outcome of scanning all sub-shapes of one center: number of checks
/// performed (the scan stops at the center's first violation) plus that
/// violation, if any.
struct CenterScan {
    checks: u64,
    violation: Option<Violation>,
}

fn scan_center_e(config: &Configuration, k: u32, center: Site) -> CenterScan {
    let n = config.n();
    let m_max = n - center.chebyshev();
    let mut scan = CenterScan { checks: 0, violation: None };
    if m_max < 1 {
        return scan;
    }
    let field = travel_field(config, &Region::lambda(n), center)
        .expect("center lies inside the box");
    for m in 1..=m_max {
        for square in quarter_squares(BoxSpec::new(center, m)) {
            scan.checks += 1;
            let mut measured = UNREACHABLE;
            for s in square.sites() {
                measured = measured.min(field.dist(s));
                if measured <= k {
                    break;
                }
            }
            if measured > k {
                scan.violation = Some(Violation {
                    query: EventQuery::Square {
                        center,
                        m,
                        face: square.face,
                        quadrant: square.quadrant,
                    },
                    measured,
                });
                return scan;
            }
        }
    }
    scan
}

/// Origin-centered thick-set site lists per radius, shared across centers.
type ThickCache = HashMap<i64, Vec<Vec<Site>>>;

fn thick_site_lists(r_squared: i64) -> Vec<Vec<Site>> {
    crate::geometry::thickened_all(Site::ORIGIN, r_squared, F_THICKNESS)
        .into_iter()
        .map(|t| t.sites)
        .collect()
}

fn scan_center_f(
    config: &Configuration,
    k: u32,
    center: Site,
    cache: Option<&ThickCache>,
) -> CenterScan {
    let mut scan = CenterScan { checks: 0, violation: None };
    for r_squared in admissible_radii(center, &config.box_spec()) {
        let field = travel_field(config, &Region::Ball(BallSpec::new(center, r_squared)), center)
            .expect("center lies inside its own ball");
        let local;
        let lists = match cache.and_then(|c| c.get(&r_squared)) {
            Some(lists) => lists,
            None => {
                local = thick_site_lists(r_squared);
                &local
            }
        };
        for (t, sites) in lists.iter().enumerate() {
            scan.checks += 1;
            let mut measured = UNREACHABLE;
            for s in sites {
                measured = measured.min(field.dist(s.add(center)));
                if measured <= k {
                    break;
                }
            }
            if measured > k {
                scan.violation = Some(Violation {
                    query: EventQuery::Ball {
                        center,
                        r_squared,
                        triangle: TriangleIndex::from_index(t),
                    },
                    measured,
                });
                return scan;
            }
        }
    }
    scan
}

fn merge_indexed(
    config: &Configuration,
    scans: Vec<(Site, CenterScan)>,
) -> (u64, Option<Violation>) {
    let bs = config.box_spec();
    let checks = scans.iter().map(|(_, s)| s.checks).sum();
    let violation = scans
        .iter()
        .filter_map(|(c, s)| s.violation.map(|v| (bs.index_of(*c), v)))
        .min_by_key(|(i, _)| *i)
        .map(|(_, v)| v);
    (checks, violation)
}

fn drawn_centers(config: &Configuration, count: u64, seed: u64) -> Vec<Site> {
    let bs = config.box_spec();
    let mut rng = SplitMix64::new(seed);
    (0..count)
        .map(|_| bs.site_at(rng.next_below(bs.site_count() as u64) as usize))
        .collect()
}

fn run_checker(
    config: &Configuration,
    event: EventKind,
    k: u32,
    mode: Mode,
    scan: impl Fn(Site) -> CenterScan + Sync,
) -> EventReport {
    match mode {
        Mode::Exhaustive => {
            let bs = config.box_spec();
            assert!(
                bs.site_count() <= EXHAUSTIVE_SITE_LIMIT,
                "exhaustive mode is limited to {EXHAUSTIVE_SITE_LIMIT} sites; \
                 use sampled or on-demand mode for larger boxes"
            );
            let scans: Vec<(Site, CenterScan)> = (0..bs.site_count())
                .into_par_iter()
                .map(|i| {
                    let c = bs.site_at(i);
                    (c, scan(c))
                })
                .collect();
            let (checks, violation) = merge_indexed(config, scans);
            EventReport {
                event,
                k,
                mode: Mode::Exhaustive,
                holds: violation.is_none(),
                violation,
                checks_performed: checks,
                violation_upper_bound: None,
            }
        }
        Mode::Sampled { count, seed } => {
            let centers = drawn_centers(config, count, seed);
            let scans: Vec<(Site, CenterScan)> =
                centers.into_par_iter().map(|c| (c, scan(c))).collect();
            let violating_draws = scans.iter().filter(|(_, s)| s.violation.is_some()).count();
            let (checks, violation) = merge_indexed(config, scans);
            EventReport {
                event,
                k,
                mode: Mode::Sampled { count, seed },
                holds: violation.is_none(),
                violation,
                checks_performed: checks,
                violation_upper_bound: Some(wilson_upper(
                    violating_draws as u64,
                    count,
                    Z_ONE_SIDED_95,
                )),
            }
        }
        Mode::OnDemand(queries) => {
            let mut cache: HashMap<EventQuery, u32> = HashMap::new();
            let mut checks = 0u64;
            let mut violation = None;
            for q in &queries {
                checks += 1;
                let measured = match cache.get(q) {
                    Some(&m) => m,
                    None => {
                        let m = measure_query(config, q).map_or(UNREACHABLE, |m| m);
                        cache.insert(*q, m);
                        m
                    }
                };
                if measured > k {
                    violation = Some(Violation { query: *q, measured });
                    break;
                }
            }
            EventReport {
                event,
                k,
                mode: Mode::OnDemand(queries),
                holds: violation.is_none(),
                violation,
                checks_performed: checks,
                violation_upper_bound: None,
            }
        }
    }
}

/// Verifies event E(Λ(n), k): every center of every contained sub-box
/// reaches all 24 quarter squares of that sub-box within `k`, travelling in
/// the full box. One travel field per center serves all sub-boxes.
pub fn check_event_e(config: &Configuration, k: u32, mode: Mode) -> EventReport {
    run_checker(config, EventKind::E, k, mode, |c| scan_center_e(config, k, c))
}

/// Verifies event F(Λ(n), k): every center, every admissible contained ball,
/// every thickened triangle reachable within `k`, travelling inside the
/// ball.
pub fn check_event_f(config: &Configuration, k: u32, mode: Mode) -> EventReport {
    let cache: Option<ThickCache> = match mode {
        Mode::Exhaustive => {
            let radii = admissible_radii(Site::ORIGIN, &config.box_spec());
            Some(
                radii
                    .into_par_iter()
                    .map(|r| (r, thick_site_lists(r)))
                    .collect(),
            )
        }
        _ => None,
    };
    run_checker(config, EventKind::F, k, mode, |c| {
        scan_center_f(config, k, c, cache.as_ref())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::dijkstra_field;

    /// Definition-chasing re-implementation of the exhaustive E check using
    /// the heap-based reference field.
    fn brute_e(config: &Configuration, k: u32) -> Option<Violation> {
        let n = config.n();
        let bs = config.box_spec();
        for i in 0..bs.site_count() {
            let x = bs.site_at(i);
            if n - x.chebyshev() < 1 {
                continue;
            }
            let field: HashMap<Site, u32> =
                dijkstra_field(config, &Region::lambda(n), x).into_iter().collect();
            for m in 1..=(n - x.chebyshev()) {
                for sq in quarter_squares(BoxSpec::new(x, m)) {
                    let measured =
                        sq.sites().iter().map(|s| field[s]).min().unwrap();
                    if measured > k {
                        return Some(Violation {
                            query: EventQuery::Square {
                                center: x,
                                m,
                                face: sq.face,
                                quadrant: sq.quadrant,
                            },
                            measured,
                        });
                    }
                }
            }
        }
        None
    }

    fn brute_f(config: &Configuration, k: u32) -> Option<Violation> {
        let bs = config.box_spec();
        for i in 0..bs.site_count() {
            let x = bs.site_at(i);
            for r_squared in admissible_radii(x, &bs) {
                let region = Region::Ball(BallSpec::new(x, r_squared));
                let field: HashMap<Site, u32> =
                    dijkstra_field(config, &region, x).into_iter().collect();
                for tri in TriangleIndex::all() {
                    let thick = thickened_triangle(x, r_squared, tri, F_THICKNESS);
                    let measured = thick
                        .sites
                        .iter()
                        .map(|s| field.get(s).copied().unwrap_or(UNREACHABLE))
                        .min()
                        .unwrap();
                    if measured > k {
                        return Some(Violation {
                            query: EventQuery::Ball { center: x, r_squared, triangle: tri },
                            measured,
                        });
                    }
                }
            }
        }
        None
    }

    #[test]
    fn all_open_box_holds_at_zero() {
        let config = Configuration::sample(2, 1.0, 7);
        let e = check_event_e(&config, 0, Mode::Exhaustive);
        assert!(e.holds && e.violation.is_none());
        let f = check_event_f(&config, 0, Mode::Exhaustive);
        assert!(f.holds && f.violation.is_none());
        // Every center with room contributes 24 checks per sub-box size.
        assert_eq!(e.checks_performed, 24 + 27 * 24);
    }

    #[test]
    fn all_closed_box_fails_at_zero_with_smallest_witness() {
        let config = Configuration::sample(2, 0.0, 7);
        let e = check_event_e(&config, 0, Mode::Exhaustive);
        assert!(!e.holds);
        let v = e.violation.unwrap();
        // Smallest center index with any sub-box is (-1,-1,-1); its first
        // violating shape is m=1, face 1, quadrant 1.
        assert_eq!(
            v.query,
            EventQuery::Square { center: Site::new(-1, -1, -1), m: 1, face: 1, quadrant: 1 }
        );
        assert!(v.measured > 0);
        // The witness re-measures to the same value.
        assert_eq!(measure_query(&config, &v.query).unwrap(), v.measured);

        let f = check_event_f(&config, 0, Mode::Exhaustive);
        assert!(!f.holds);
        let w = f.violation.unwrap();
        assert_eq!(measure_query(&config, &w.query).unwrap(), w.measured);
    }

    #[test]
    fn exhaustive_e_matches_brute_force() {
        for seed in [1, 9, 23] {
            let config = Configuration::sample(3, 0.7, seed);
            for k in 0..4 {
                let report = check_event_e(&config, k, Mode::Exhaustive);
                let brute = brute_e(&config, k);
                assert_eq!(report.holds, brute.is_none(), "seed={seed} k={k}");
                assert_eq!(report.violation, brute, "seed={seed} k={k}");
            }
        }
    }

    #[test]
    fn exhaustive_f_matches_brute_force() {
        for seed in [1, 9] {
            let config = Configuration::sample(3, 0.7, seed);
            for k in 0..3 {
                let report = check_event_f(&config, k, Mode::Exhaustive);
                let brute = brute_f(&config, k);
                assert_eq!(report.holds, brute.is_none(), "seed={seed} k={k}");
                assert_eq!(report.violation, brute, "seed={seed} k={k}");
            }
        }
    }

    #[test]
    fn monotone_in_k() {
        for seed in 0..6 {
            let config = Configuration::sample(3, 0.6, seed);
            let mut prev_holds = false;
            for k in 0..8 {
                let holds = check_event_e(&config, k, Mode::Exhaustive).holds;
                assert!(holds || !prev_holds, "holding must be monotone in k");
                prev_holds = holds;
            }
        }
    }

    #[test]
    fn monotone_in_openness() {
        // Opening sites (same seed, higher p under the shared-uniform
        // coupling) never breaks a holding event.
        for seed in 0..4 {
            for k in [1, 2] {
                let mut held = false;
                for p in [0.3, 0.6, 0.9] {
                    let config = Configuration::sample(2, p, seed);
                    let holds = check_event_e(&config, k, Mode::Exhaustive).holds;
                    assert!(holds || !held, "opening sites broke event E at p={p}");
                    held = holds;
                }
            }
        }
    }

    #[test]
    fn event_frequency_rises_with_budget() {
        let ks = [0u32, 1, 2, 4];
        let mut counts = [0u32; 4];
        for seed in 0..30 {
            let config = Configuration::sample(2, 0.6, seed);
            for (i, &k) in ks.iter().enumerate() {
                if check_event_e(&config, k, Mode::Exhaustive).holds {
                    counts[i] += 1;
                }
            }
        }
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
        assert!(counts[3] > 0);
    }

    #[test]
    fn sampled_mode_is_deterministic_and_bounded() {
        let config = Configuration::sample(6, 0.7, 9);
        let a = check_event_e(&config, 3, Mode::Sampled { count: 40, seed: 5 });
        let b = check_event_e(&config, 3, Mode::Sampled { count: 40, seed: 5 });
        assert_eq!(a, b);
        let bound = a.violation_upper_bound.unwrap();
        assert!((0.0..=1.0).contains(&bound));
        if a.holds {
            assert!(bound < 1.0);
        }
    }

    #[test]
    fn on_demand_replays_and_caches() {
        let config = Configuration::sample(3, 0.5, 11);
        let q1 = EventQuery::Square { center: Site::ORIGIN, m: 2, face: 1, quadrant: 1 };
        let q2 = EventQuery::Ball { center: Site::ORIGIN, r_squared: 4, triangle: TriangleIndex::identity() };
        let queries = vec![q1, q2, q1];
        let m1 = measure_query(&config, &q1).unwrap();
        let m2 = measure_query(&config, &q2).unwrap();
        let k = m1.max(m2);
        let holds = check_event_e(&config, k, Mode::OnDemand(queries.clone()));
        assert!(holds.holds);
        assert_eq!(holds.checks_performed, 3);
        if k > 0 {
            let fails = check_event_e(&config, k - 1, Mode::OnDemand(queries));
            assert!(!fails.holds);
            let v = fails.violation.unwrap();
            assert_eq!(v.measured, k);
        }
    }

    #[test]
    fn check_count_respects_pair_bound() {
        let config = Configuration::sample(2, 1.0, 0);
        let report = check_event_e(&config, 0, Mode::Exhaustive);
        let pairs = report.checks_performed / 24;
        let bs = config.box_spec();
        assert!(pairs <= (bs.site_count() as u64) * (2 * 2 + 1));
    }
}
