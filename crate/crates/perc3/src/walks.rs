//! Constructive waypoint walks: the outward-doubling cube walk, the
//! geometrically contracting sphere walk, and their composition.
//!
//! Both walks chain short point-to-set travels whose target shapes are
//! exactly the sub-shapes of the good events in [`crate::events`], so every
//! leg over budget doubles as an event violation witness. Traces record
//! waypoints, per-leg costs, labels and the replayable queries.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::events::{EventQuery, F_THICKNESS};
use crate::geometry::{canonicalize_site, thickened_triangle, QuarterSquare};
use crate::lattice::{BallSpec, BoxSpec, Configuration, Region, Site};
use crate::traveltime::{travel_to_set_cost, TravelError};

/// Per-walk cost and safety limits.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct WalkBudget {
    /// Maximal admissible cost of a single leg.
    pub leg_budget: u32,
    /// Thickness of the sphere walk's triangle targets.
    pub thickness: f64,
    /// Contraction factor asserted per sphere step at large radii.
    pub lambda: f64,
    /// Below this radius the sphere walk finishes with one direct leg.
    pub stop_radius: f64,
    /// Hard cap on the number of legs of a single walk.
    pub max_steps: u32,
}

impl WalkBudget {
    /// Practical defaults for a box of half-side `n`: thickness 3,
    /// contraction 0.97, stop radius `min(600, n/8)` and a step cap of
    /// `64·⌈ln(2n+1)⌉`.
    pub fn for_box(n: i32, leg_budget: u32) -> Self {
        assert!(n >= 0);
        WalkBudget {
            leg_budget,
            thickness: 3.0,
            lambda: 0.97,
            stop_radius: 600.0_f64.min((n / 8).max(1) as f64),
            max_steps: max_steps_for(n),
        }
    }

    /// Radius above which each sphere step provably contracts by `lambda`.
    pub fn r_min(&self) -> f64 {
        crate::geometry::r_min(self.thickness, self.lambda)
    }
}

fn max_steps_for(n: i32) -> u32 {
    64 * ((2 * n + 1) as f64).ln().ceil() as u32
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LegLabel {
    /// Outward step to a quarter square of the largest centered cube.
    Doubling,
    /// Direct hop of the final cube stage (or the boundary adjustment).
    Chain,
    /// Sphere step into a thickened triangle.
    Triangle,
    /// Closing leg of the sphere walk below the stop radius.
    Fallback,
}

/// One executed leg, from one waypoint to the next.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct Leg {
    pub from: Site,
    pub to: Site,
    pub label: LegLabel,
    pub cost: u32,
    /// The event query this leg instantiates, when it has event shape.
    pub query: Option<EventQuery>,
    /// For triangle legs: whether the travel ball fit inside the box
    /// without clipping.
    pub ball_in_box: Option<bool>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkOutcome {
    /// The walk finished at its goal with every leg within budget.
    Reached,
    /// Some leg exceeded the budget; the leg (and its query witness) sits at
    /// this index of the leg list.
    BudgetExceeded { leg_index: usize },
    /// The step cap fired before the goal was reached.
    StepLimit,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct WalkTrace {
    /// Visited sites, starting at the walk's origin.
    pub waypoints: Vec<Site>,
    /// For a single walk, `legs[i]` connects `waypoints[i]` to
    /// `waypoints[i+1]`; a composed trace concatenates its phases' lists.
    pub legs: Vec<Leg>,
    pub total_cost: u64,
    pub outcome: WalkOutcome,
}

impl WalkTrace {
    pub fn steps(&self) -> usize {
        self.legs.len()
    }

    pub fn leg_costs(&self) -> Vec<u32> {
        self.legs.iter().map(|l| l.cost).collect()
    }

    pub fn final_waypoint(&self) -> Site {
        *self.waypoints.last().expect("a trace has at least its origin")
    }

    /// Largest single-leg cost (0 for an empty walk).
    pub fn max_leg_cost(&self) -> u32 {
        self.legs.iter().map(|l| l.cost).max().unwrap_or(0)
    }

    /// All event queries the walk issued, in leg order.
    pub fn queries(&self) -> Vec<EventQuery> {
        self.legs.iter().filter_map(|l| l.query).collect()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum WalkError {
    /// A sphere step at a radius above `r_min` failed to contract; this
    /// indicates a geometry bug, not a property of the configuration.
    #[error(
        "contraction violated at step {step}: radius {radius} contracted only to {next_radius}"
    )]
    ContractionViolated { step: usize, radius: f64, next_radius: f64, waypoint: Site },
    /// No face quadrant satisfied the doubling step's depth rule; kept for
    /// reporting completeness, the rule below always selects one.
    #[error("no feasible quadrant at waypoint {waypoint:?} for face {face}")]
    NoFeasibleQuadrant { waypoint: Site, face: u8 },
    #[error(transparent)]
    Travel(#[from] TravelError),
}

/// Trace under construction.
struct Builder<'a> {
    config: &'a Configuration,
    budget: WalkBudget,
    waypoints: Vec<Site>,
    legs: Vec<Leg>,
    total: u64,
}

enum LegResult {
    Ok,
    OverBudget,
}

impl<'a> Builder<'a> {
    fn new(config: &'a Configuration, budget: WalkBudget, start: Site) -> Self {
        Builder { config, budget, waypoints: vec![start], legs: Vec::new(), total: 0 }
    }

    fn here(&self) -> Site {
        *self.waypoints.last().unwrap()
    }

    /// Measures a candidate leg without recording it: minimal cost and hit.
    fn probe(&self, region: &Region, targets: &[Site]) -> Result<(u32, Site), WalkError> {
        Ok(travel_to_set_cost(self.config, region, self.here(), targets)?
            .expect("leg regions are connected, so some target is reachable"))
    }

    fn commit(
        &mut self,
        cost: u32,
        hit: Site,
        label: LegLabel,
        query: Option<EventQuery>,
        ball_in_box: Option<bool>,
    ) -> LegResult {
        let from = self.here();
        self.total += cost as u64;
        self.waypoints.push(hit);
        self.legs.push(Leg { from, to: hit, label, cost, query, ball_in_box });
        if cost > self.budget.leg_budget {
            LegResult::OverBudget
        } else {
            LegResult::Ok
        }
    }

    fn leg(
        &mut self,
        region: &Region,
        targets: &[Site],
        label: LegLabel,
        query: Option<EventQuery>,
        ball_in_box: Option<bool>,
    ) -> Result<LegResult, WalkError> {
        let (cost, hit) = self.probe(region, targets)?;
        Ok(self.commit(cost, hit, label, query, ball_in_box))
    }

    fn finish(self, outcome: WalkOutcome) -> WalkTrace {
        WalkTrace {
            waypoints: self.waypoints,
            legs: self.legs,
            total_cost: self.total,
            outcome,
        }
    }

    fn over_budget(self) -> WalkTrace {
        let leg_index = self.legs.len() - 1;
        self.finish(WalkOutcome::BudgetExceeded { leg_index })
    }
}

/// Opposite face index (1↔2, 3↔4, 5↔6).
fn opposite_face(f: u8) -> u8 {
    if f % 2 == 1 {
        f + 1
    } else {
        f - 1
    }
}

/// Face index pointing from `y` toward the origin along `axis`.
fn face_toward_origin(axis: usize, coord: i32) -> u8 {
    let positive_dir = 2 * axis as u8 + 1;
    if coord > 0 {
        positive_dir + 1
    } else {
        positive_dir
    }
}

/// Quadrant whose tangential sides point away from the nearer wall of each
/// tangential axis; at a centered coordinate the non-negative side is taken.
fn away_quadrant(face: u8, y: Site) -> u8 {
    let normal = (face as usize - 1) / 2;
    let (t1, t2) = match normal {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let mut bits = 0u8;
    if y.component(t1) <= 0 {
        bits |= 1;
    }
    if y.component(t2) <= 0 {
        bits |= 2;
    }
    bits + 1
}

/// Walks from `x` to the central box `Λ(n/4)` by outward doubling followed
/// by a chain of quarter-square hops, every leg measured in the full box.
pub fn cube_walk(
    config: &Configuration,
    x: Site,
    budget: WalkBudget,
) -> Result<WalkTrace, WalkError> {
    let n = config.n();
    let bs = config.box_spec();
    if !bs.contains(x) {
        return Err(TravelError::SourceOutsideRegion(x.x, x.y, x.z).into());
    }
    let region = Region::lambda(n);
    let quarter = n / 4;
    let three_quarter = 3 * n / 4;
    let mut b = Builder::new(config, budget, x);

    // Boundary adjustment: step off the inner boundary first.
    if n >= 1 && bs.min_face_distance(x) == 0 {
        let clamp = |c: i32| c.clamp(-(n - 1), n - 1);
        let inside = Site::new(clamp(x.x), clamp(x.y), clamp(x.z));
        if let LegResult::OverBudget = b.leg(&region, &[inside], LegLabel::Chain, None, None)? {
            return Ok(b.over_budget());
        }
    }

    // Doubling stage: while outside Λ(3n/4), travel to a quarter square of
    // the largest centered cube, on the face opposite the nearest wall.
    while b.here().chebyshev() > three_quarter {
        if b.legs.len() as u32 >= budget.max_steps {
            return Ok(b.finish(WalkOutcome::StepLimit));
        }
        let y = b.here();
        let g = bs.min_face_distance(y);
        debug_assert!(g >= 1, "waypoints stay interior after the adjustment");
        let h = bs.nearest_face(y);
        let i = opposite_face(h);
        let j = away_quadrant(i, y);
        let square = QuarterSquare::new(BoxSpec::new(y, g), i, j);
        let query = EventQuery::Square { center: y, m: g, face: i, quadrant: j };
        if let LegResult::OverBudget =
            b.leg(&region, &square.sites(), LegLabel::Doubling, Some(query), None)?
        {
            return Ok(b.over_budget());
        }
        let z = b.here();
        debug_assert_eq!(bs.face_distance(z, h), 2 * g, "binding face distance doubles");
        debug_assert!(bs.min_face_distance(z) >= g, "the walk never returns toward the wall");
    }

    // Chain stage: hop boxes of half-side ⌊n/8⌋ toward the origin, each hop
    // an event-shaped travel into the quarter square facing the origin.
    while b.here().chebyshev() > quarter {
        if b.legs.len() as u32 >= budget.max_steps {
            return Ok(b.finish(WalkOutcome::StepLimit));
        }
        let y = b.here();
        let s = (n / 8).max(1);
        debug_assert!(y.chebyshev() + s <= n, "chain boxes fit inside the box");
        let coords = [y.x, y.y, y.z];
        let axis = (0..3).max_by_key(|&a| (coords[a].abs(), 2 - a)).unwrap();
        let i = face_toward_origin(axis, coords[axis]);
        let j = away_quadrant(i, y);
        let square = QuarterSquare::new(BoxSpec::new(y, s), i, j);
        let query = EventQuery::Square { center: y, m: s, face: i, quadrant: j };
        if let LegResult::OverBudget =
            b.leg(&region, &square.sites(), LegLabel::Chain, Some(query), None)?
        {
            return Ok(b.over_budget());
        }
    }

    Ok(b.finish(WalkOutcome::Reached))
}

/// Walks from `x` to `y` (both inside `Λ(n/4)`) through thickened-triangle
/// waypoints on shrinking spheres around the current position, closing with
/// one direct leg once the radius drops below the stop radius.
///
/// Above `budget.r_min()` every triangle step contracts the remaining radius
/// by `lambda` as a matter of geometry; a failure there is reported as
/// [`WalkError::ContractionViolated`]. Below `r_min` a candidate step that
/// does not contract is discarded and the walk closes with the fallback leg
/// instead, which keeps the step count geometric at every scale.
pub fn sphere_walk(
    config: &Configuration,
    x: Site,
    y: Site,
    budget: WalkBudget,
) -> Result<WalkTrace, WalkError> {
    let n = config.n();
    let quarter = n / 4;
    assert!(
        x.chebyshev() <= quarter && y.chebyshev() <= quarter,
        "sphere walk endpoints must lie in the central quarter box"
    );
    let r_min = budget.r_min();
    let mut b = Builder::new(config, budget, x);

    while b.here() != y {
        if b.legs.len() as u32 >= budget.max_steps {
            return Ok(b.finish(WalkOutcome::StepLimit));
        }
        let here = b.here();
        let v = y.sub(here);
        let r_squared = v.norm_sq();
        let r = (r_squared as f64).sqrt();
        let mut take_fallback = r < budget.stop_radius;
        if !take_fallback {
            let (triangle, _) = canonicalize_site(v).expect("y differs from the current waypoint");
            let thick = thickened_triangle(here, r_squared, triangle, budget.thickness);
            debug_assert!(thick.contains(y), "the goal lies on its own sphere patch");
            let ball = BallSpec::new(here, r_squared);
            let contained = here.chebyshev() + crate::geometry::isqrt(r_squared) as i32 <= n;
            let query = (budget.thickness == F_THICKNESS)
                .then_some(EventQuery::Ball { center: here, r_squared, triangle });
            let (cost, hit) = b.probe(&Region::Ball(ball), &thick.sites)?;
            let next_r = (y.sub(hit).norm_sq() as f64).sqrt();
            if next_r > budget.lambda * r {
                if r >= r_min {
                    // Geometry guarantees contraction here; failing means the
                    // patch construction is wrong, not the configuration.
                    return Err(WalkError::ContractionViolated {
                        step: b.legs.len(),
                        radius: r,
                        next_radius: next_r,
                        waypoint: hit,
                    });
                }
                // Below the guaranteed regime the patch diameter may exceed
                // λ·r and deterministic hits could cycle; close directly.
                take_fallback = true;
            } else {
                if let LegResult::OverBudget =
                    b.commit(cost, hit, LegLabel::Triangle, query, Some(contained))
                {
                    return Ok(b.over_budget());
                }
                continue;
            }
        }
        debug_assert!(take_fallback);
        // Close with a single direct travel inside the full box.
        if let LegResult::OverBudget =
            b.leg(&Region::lambda(n), &[y], LegLabel::Fallback, None, None)?
        {
            return Ok(b.over_budget());
        }
        break;
    }

    Ok(b.finish(WalkOutcome::Reached))
}

/// Composes the theorem's route between two arbitrary sites of the box:
/// cube walk from `x` into `Λ(n/4)` (skipped when `x` is already inside),
/// the same from `y`, then a sphere walk between the two entry points.
///
/// Legs are concatenated in execution order, so the `y`-side cube legs run
/// outward from `y`; travel times are symmetric, which makes the reversed
/// reading of that segment cost-exact. On the first failing sub-walk the
/// later phases are skipped and the failure outcome is returned.
pub fn theorem_path(
    config: &Configuration,
    x: Site,
    y: Site,
    budget: WalkBudget,
) -> Result<WalkTrace, WalkError> {
    let n = config.n();
    let quarter = n / 4;

    let mut waypoints = Vec::new();
    let mut legs = Vec::new();
    let mut total = 0u64;

    let mut absorb = |trace: WalkTrace| -> (Site, WalkOutcome) {
        let last = trace.final_waypoint();
        waypoints.extend(trace.waypoints);
        legs.extend(trace.legs);
        total += trace.total_cost;
        (last, trace.outcome)
    };

    let mut run_side = |endpoint: Site| -> Result<(Site, WalkOutcome), WalkError> {
        if endpoint.chebyshev() <= quarter {
            return Ok((endpoint, WalkOutcome::Reached));
        }
        let trace = cube_walk(config, endpoint, budget)?;
        Ok(absorb(trace))
    };

    let assemble = |waypoints: Vec<Site>, legs: Vec<Leg>, total: u64, outcome: WalkOutcome| {
        WalkTrace { waypoints, legs, total_cost: total, outcome }
    };

    let (x_star, outcome) = run_side(x)?;
    if outcome != WalkOutcome::Reached {
        return Ok(assemble(waypoints, legs, total, outcome));
    }
    let (y_star, outcome) = run_side(y)?;
    if outcome != WalkOutcome::Reached {
        return Ok(assemble(waypoints, legs, total, outcome));
    }

    let sphere = sphere_walk(config, x_star, y_star, budget)?;
    let outcome = sphere.outcome;
    let last = sphere.final_waypoint();
    waypoints.extend(sphere.waypoints);
    legs.extend(sphere.legs);
    total += sphere.total_cost;
    debug_assert!(outcome != WalkOutcome::Reached || last == y_star);

    Ok(assemble(waypoints, legs, total, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::{check_event_e, check_event_f, Mode};
    use crate::lattice::rng::SplitMix64;
    use crate::traveltime::travel_time;

    fn corner(n: i32) -> Site {
        Site::new(n, n, n)
    }

    #[test]
    fn all_open_walks_cost_nothing() {
        let config = Configuration::sample(16, 1.0, 3);
        let budget = WalkBudget::for_box(16, 5);
        let cube = cube_walk(&config, corner(16), budget).unwrap();
        assert_eq!(cube.outcome, WalkOutcome::Reached);
        assert_eq!(cube.total_cost, 0);
        assert!(cube.final_waypoint().chebyshev() <= 4);

        let sphere = sphere_walk(&config, Site::new(4, 0, -4), Site::new(-4, 2, 0), budget).unwrap();
        assert_eq!(sphere.outcome, WalkOutcome::Reached);
        assert_eq!(sphere.total_cost, 0);
        assert_eq!(sphere.final_waypoint(), Site::new(-4, 2, 0));

        let full = theorem_path(&config, corner(16), Site::new(-16, -16, 16), budget).unwrap();
        assert_eq!(full.outcome, WalkOutcome::Reached);
        assert_eq!(full.total_cost, 0);
    }

    #[test]
    fn all_closed_walk_exceeds_zero_budget() {
        let config = Configuration::sample(8, 0.0, 3);
        let budget = WalkBudget::for_box(8, 0);
        let trace = cube_walk(&config, corner(8), budget).unwrap();
        let WalkOutcome::BudgetExceeded { leg_index } = trace.outcome else {
            panic!("expected budget exceedance, got {:?}", trace.outcome);
        };
        assert_eq!(leg_index, trace.legs.len() - 1);
        assert!(trace.legs[leg_index].cost > 0);
    }

    #[test]
    fn traces_are_deterministic() {
        let config = Configuration::sample(24, 0.6, 41);
        let budget = WalkBudget::for_box(24, 40);
        let a = theorem_path(&config, Site::new(24, -13, 7), Site::new(-20, 22, -24), budget);
        let b = theorem_path(&config, Site::new(24, -13, 7), Site::new(-20, 22, -24), budget);
        assert_eq!(a.unwrap(), b.unwrap());
    }

    #[test]
    fn cube_walk_doubles_and_never_regresses() {
        for seed in 0..8 {
            let config = Configuration::sample(32, 0.6, seed);
            let bs = config.box_spec();
            let budget = WalkBudget::for_box(32, 60);
            let trace = cube_walk(&config, Site::new(32, 31, -32), budget).unwrap();
            assert_eq!(trace.outcome, WalkOutcome::Reached);
            assert!(trace.final_waypoint().chebyshev() <= 8);
            // Identify the doubling prefix and check the adapted face rules.
            for (idx, leg) in trace.legs.iter().enumerate() {
                assert_eq!(leg.from, trace.waypoints[idx]);
                assert_eq!(leg.to, trace.waypoints[idx + 1]);
                if leg.label != LegLabel::Doubling {
                    continue;
                }
                let from = trace.waypoints[idx];
                let to = trace.waypoints[idx + 1];
                let g = bs.min_face_distance(from);
                assert!(bs.min_face_distance(to) >= g);
                let h = bs.nearest_face(from);
                assert_eq!(bs.face_distance(to, h), 2 * g);
                // Per-axis slack toward the nearer wall never drops below
                // min(previous slack, n − g).
                for axis in 0..3 {
                    let (old, new) = (from.component(axis), to.component(axis));
                    let old_slack = 32 - old.abs();
                    let new_slack = 32 - new.abs();
                    assert!(new_slack >= old_slack.min(32 - g), "axis {axis}: {from:?}->{to:?}");
                }
            }
            // Three consecutive doubling steps double the wall distance.
            let doubling: Vec<Site> = trace
                .legs
                .iter()
                .enumerate()
                .filter(|(_, l)| l.label == LegLabel::Doubling)
                .map(|(i, _)| trace.waypoints[i])
                .collect();
            for w in doubling.windows(4) {
                assert!(bs.min_face_distance(w[3]) >= 2 * bs.min_face_distance(w[0]));
            }
        }
    }

    #[test]
    fn chain_marches_toward_origin() {
        let config = Configuration::sample(40, 0.55, 11);
        let budget = WalkBudget::for_box(40, 60);
        let trace = cube_walk(&config, Site::new(40, 40, 40), budget).unwrap();
        assert_eq!(trace.outcome, WalkOutcome::Reached);
        let mut seen_chain = false;
        for (idx, leg) in trace.legs.iter().enumerate() {
            if leg.label == LegLabel::Chain && leg.query.is_some() {
                seen_chain = true;
                let from = trace.waypoints[idx];
                let to = trace.waypoints[idx + 1];
                assert!(to.chebyshev() <= from.chebyshev().max(5));
            }
        }
        assert!(seen_chain);
        assert!(trace.legs.len() <= 16 + 2, "chain stays short: {}", trace.legs.len());
    }

    #[test]
    fn sphere_walk_contracts_geometrically() {
        // Tight thickness so the contraction threshold is active at this
        // scale: r_min = 2·0.25/(0.98−0.96) = 25.
        let mut budget = WalkBudget::for_box(64, 40);
        budget.thickness = 0.25;
        budget.lambda = 0.98;
        budget.stop_radius = 8.0;
        assert!((budget.r_min() - 25.0).abs() < 1e-9);
        for seed in 0..6 {
            let config = Configuration::sample(64, 0.6, seed);
            let a = Site::new(16, 16, 16);
            let z = Site::new(-16, -16, -16);
            let trace = sphere_walk(&config, a, z, budget).unwrap();
            assert_eq!(trace.outcome, WalkOutcome::Reached);
            assert_eq!(trace.final_waypoint(), z);
            let mut checked = 0;
            for (idx, leg) in trace.legs.iter().enumerate() {
                if leg.label != LegLabel::Triangle {
                    continue;
                }
                let r = (z.sub(trace.waypoints[idx]).norm_sq() as f64).sqrt();
                let next = (z.sub(trace.waypoints[idx + 1]).norm_sq() as f64).sqrt();
                if r >= budget.r_min() {
                    assert!(next <= budget.lambda * r, "step {idx}: {r} -> {next}");
                    checked += 1;
                }
            }
            assert!(checked > 0, "the contraction regime must not be vacuous");
        }
    }

    #[test]
    fn sphere_step_count_matches_geometric_series() {
        let config = Configuration::sample(64, 1.0, 0);
        let mut budget = WalkBudget::for_box(64, 5);
        budget.thickness = 0.25;
        budget.lambda = 0.98;
        budget.stop_radius = 8.0;
        let a = Site::new(16, 16, 16);
        let z = Site::new(-16, -16, -16);
        let trace = sphere_walk(&config, a, z, budget).unwrap();
        let start = (z.sub(a).norm_sq() as f64).sqrt();
        let bound = (start / budget.stop_radius).ln() / (1.0 / budget.lambda).ln();
        let triangle_steps =
            trace.legs.iter().filter(|l| l.label == LegLabel::Triangle).count();
        assert!(triangle_steps as f64 <= bound.ceil(), "{triangle_steps} vs {bound}");
    }

    #[test]
    fn walk_queries_replay_through_the_event_checkers() {
        let config = Configuration::sample(20, 0.6, 5);
        let budget = WalkBudget::for_box(20, 50);
        let cube = cube_walk(&config, Site::new(20, -20, 18), budget).unwrap();
        assert_eq!(cube.outcome, WalkOutcome::Reached);
        let k = cube.max_leg_cost();
        let replay = check_event_e(&config, k, Mode::OnDemand(cube.queries()));
        assert!(replay.holds);
        if k > 0 {
            let tight = check_event_e(&config, k - 1, Mode::OnDemand(cube.queries()));
            assert!(!tight.holds, "the maximal leg is a genuine violation at k−1");
        }

        let sphere = sphere_walk(&config, Site::new(5, -5, 5), Site::new(-5, 5, -5), budget).unwrap();
        let queries = sphere.queries();
        if !queries.is_empty() {
            let k = sphere.max_leg_cost();
            assert!(check_event_f(&config, k, Mode::OnDemand(queries)).holds);
        }
    }

    #[test]
    fn theorem_path_beats_no_optimum() {
        let mut rng = SplitMix64::new(99);
        for seed in 0..5 {
            let config = Configuration::sample(16, 0.6, seed);
            let budget = WalkBudget::for_box(16, 60);
            for _ in 0..4 {
                let x = Site::new(
                    rng.next_range_i64(-16, 16) as i32,
                    rng.next_range_i64(-16, 16) as i32,
                    rng.next_range_i64(-16, 16) as i32,
                );
                let y = Site::new(
                    rng.next_range_i64(-16, 16) as i32,
                    rng.next_range_i64(-16, 16) as i32,
                    rng.next_range_i64(-16, 16) as i32,
                );
                let trace = theorem_path(&config, x, y, budget).unwrap();
                assert_eq!(trace.outcome, WalkOutcome::Reached);
                let exact = travel_time(&config, &Region::lambda(16), x, y)
                    .unwrap()
                    .expect("full box is connected");
                assert!(
                    trace.total_cost >= exact as u64,
                    "constructed {} vs optimal {exact}",
                    trace.total_cost
                );
            }
        }
    }

    #[test]
    fn step_limit_reports_instead_of_hanging() {
        let config = Configuration::sample(16, 0.5, 1);
        let mut budget = WalkBudget::for_box(16, 50);
        budget.max_steps = 1;
        let trace = cube_walk(&config, corner(16), budget).unwrap();
        assert!(matches!(trace.outcome, WalkOutcome::StepLimit | WalkOutcome::Reached));
    }

    #[test]
    fn outside_source_is_rejected() {
        let config = Configuration::sample(4, 0.5, 1);
        let budget = WalkBudget::for_box(4, 5);
        assert!(matches!(
            cube_walk(&config, Site::new(9, 0, 0), budget),
            Err(WalkError::Travel(TravelError::SourceOutsideRegion(9, 0, 0)))
        ));
    }
}
