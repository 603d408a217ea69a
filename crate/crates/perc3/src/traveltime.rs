//! Node-weighted shortest paths: the travel time `T_A(x,y)` is the least
//! number of closed sites on a nearest-neighbour path from `x` to `y` inside
//! the region `A`, both endpoints counted. Closed sites cost 1, open sites 0,
//! so `T(x,x)` is 1 on a closed site and 0 on an open one.
//!
//! Distances are computed by a two-bucket 0–1 BFS (Dial's scheme): the
//! current cost plateau is expanded breadth-first through weight-0 moves
//! before the next cost level starts. Point-to-set queries stop once the
//! plateau containing the first reached target is exhausted, which finalizes
//! every minimum-cost target and makes the smallest-index tie-break exact.

use std::collections::VecDeque;

use thiserror::Error;

use crate::lattice::bits::BitSet;
use crate::lattice::{BoxSpec, Configuration, Region, Site, FACE_DIRS};

/// Sentinel distance for sites that are outside the region or not connected
/// to the source within it.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TravelError {
    #[error("source site ({0}, {1}, {2}) lies outside the search region")]
    SourceOutsideRegion(i32, i32, i32),
    #[error("no target site lies inside the search region")]
    NoTargetInRegion,
}

/// Result of a point-to-set query: minimal cost, the reached target (smallest
/// site index among minimum-cost targets), and a path realizing the cost.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PathWitness {
    pub cost: u32,
    pub hit: Site,
    /// Sites from source to hit inclusive; exactly `cost` of them are closed.
    pub path: Vec<Site>,
}

/// Distances from one source to every site of a region, with predecessor
/// records for path reconstruction.
pub struct DistanceField {
    source: Site,
    grid: Grid,
    dist: Vec<u32>,
    pred: Vec<u8>,
}

impl DistanceField {
    pub fn source(&self) -> Site {
        self.source
    }

    /// `T(source, s)`, or [`UNREACHABLE`] outside the region / component.
    #[inline]
    pub fn dist(&self, s: Site) -> u32 {
        match self.grid.index_checked(s) {
            Some(i) => self.dist[i],
            None => UNREACHABLE,
        }
    }

    /// A minimal path from the source to `s`, if `s` was reached.
    pub fn path_to(&self, s: Site) -> Option<Vec<Site>> {
        let i = self.grid.index_checked(s)?;
        if self.dist[i] == UNREACHABLE {
            return None;
        }
        Some(walk_predecessors(&self.grid, &self.pred, self.source, s))
    }

    /// Reached site of largest distance; ties by smallest site index.
    pub fn farthest(&self) -> Option<(Site, u32)> {
        let mut best: Option<(Site, u32)> = None;
        for i in 0..self.dist.len() {
            let d = self.dist[i];
            if d != UNREACHABLE && best.map_or(true, |(_, bd)| d > bd) {
                best = Some((self.grid.site_at(i), d));
            }
        }
        best
    }
}

/// Distances from `source` to all of `region` (intersected with the
/// configuration box) by 0–1 BFS.
pub fn travel_field(
    config: &Configuration,
    region: &Region,
    source: Site,
) -> Result<DistanceField, TravelError> {
    let mut dial = Dial::new(config, region, source, true)?;
    dial.run(StopRule::Never);
    Ok(DistanceField { source, grid: dial.grid, dist: dial.dist, pred: dial.pred })
}

/// Minimal travel time from `source` to any site of `targets`, with witness;
/// `Ok(None)` when no target is reachable within the region.
pub fn travel_to_set(
    config: &Configuration,
    region: &Region,
    source: Site,
    targets: &[Site],
) -> Result<Option<PathWitness>, TravelError> {
    let mut dial = Dial::new(config, region, source, true)?;
    let marks = mark_targets(&dial, targets)?;
    let found = dial.run(StopRule::Marked(&marks));
    let Some(cost) = found else { return Ok(None) };
    let hit = resolve_hit(&dial, marks, targets, cost);
    let path = walk_predecessors(&dial.grid, &dial.pred, source, hit);
    debug_assert_eq!(path_cost(config, &path), cost);
    Ok(Some(PathWitness { cost, hit, path }))
}

/// Target marks for a prepared search, or the no-target error.
fn mark_targets(dial: &Dial<'_>, targets: &[Site]) -> Result<BitSet, TravelError> {
    let mut marks = BitSet::zeros(dial.grid.count);
    let mut any = false;
    for &t in targets {
        if let Some(i) = dial.grid.index_checked_in(t, &dial.membership) {
            marks.set(i, true);
            any = true;
        }
    }
    if any {
        Ok(marks)
    } else {
        Err(TravelError::NoTargetInRegion)
    }
}

/// Smallest-index target attaining the final cost; the whole cost plateau is
/// finalized when the search returns, so the minimum is exact.
fn resolve_hit(dial: &Dial<'_>, mut marks: BitSet, targets: &[Site], cost: u32) -> Site {
    let mut hit: Option<Site> = None;
    for &t in targets {
        if let Some(i) = dial.grid.index_checked(t) {
            if marks.get(i) && dial.dist[i] == cost {
                marks.set(i, false); // skip duplicates
                if hit.map_or(true, |h| t < h) {
                    hit = Some(t);
                }
            }
        }
    }
    hit.expect("a target attains the reported minimum")
}

/// `T(a, b)` within the region, stopping as soon as `b` is finalized.
pub fn travel_time(
    config: &Configuration,
    region: &Region,
    a: Site,
    b: Site,
) -> Result<Option<u32>, TravelError> {
    let mut dial = Dial::new(config, region, a, false)?;
    let Some(bi) = dial.grid.index_checked_in(b, &dial.membership) else {
        return Err(TravelError::NoTargetInRegion);
    };
    Ok(dial.run(StopRule::Index(bi)))
}

/// Minimal travel time to a target set and the reached target (smallest site
/// index among the minimum-cost targets), without witness-path bookkeeping.
///
/// Behaviourally the `(cost, hit)` of [`travel_to_set`], cheaper on large
/// regions: full-box queries answerable at zero cost are read off the
/// open-cluster labels, single-target searches return the moment the target
/// is finalized, and no predecessor records are kept.
pub(crate) fn travel_to_set_cost(
    config: &Configuration,
    region: &Region,
    source: Site,
    targets: &[Site],
) -> Result<Option<(u32, Site)>, TravelError> {
    let mut seeded: Option<Dial<'_>> = None;
    if let Region::Box(b) = region {
        if *b == config.box_spec() && b.contains(source) && config.is_open(source) {
            let labels = config.cluster_labels();
            let src_label = labels[b.index_of(source)];
            let mut any = false;
            let mut hit: Option<Site> = None;
            for &t in targets {
                if b.contains(t) {
                    any = true;
                    if config.is_open(t)
                        && labels[b.index_of(t)] == src_label
                        && hit.map_or(true, |h| t < h)
                    {
                        hit = Some(t);
                    }
                }
            }
            if !any {
                return Err(TravelError::NoTargetInRegion);
            }
            if let Some(hit) = hit {
                return Ok(Some((0, hit)));
            }
            // No target lies in the source's cluster, so every answer costs at
            // least 1. When the cluster spans a sizable fraction of the box it
            // is cheaper to stream the labels once than to expand the
            // zero-cost plateau site by site through the queue.
            if config.cluster_sizes()[src_label as usize] as usize * 4 >= b.site_count() {
                let mut dial = Dial::new(config, region, source, false)?;
                dial.seed_cluster(labels, src_label);
                seeded = Some(dial);
            }
        }
    }
    let mut dial = match seeded {
        Some(dial) => dial,
        None => Dial::new(config, region, source, false)?,
    };
    if let &[single] = targets {
        // One target: its pop finalizes it, no plateau drain or tie-break.
        let Some(ti) = dial.grid.index_checked_in(single, &dial.membership) else {
            return Err(TravelError::NoTargetInRegion);
        };
        return Ok(dial.run(StopRule::Index(ti)).map(|cost| (cost, single)));
    }
    let marks = mark_targets(&dial, targets)?;
    let Some(cost) = dial.run(StopRule::Marked(&marks)) else { return Ok(None) };
    Ok(Some((cost, resolve_hit(&dial, marks, targets, cost))))
}

/// Number of closed sites on `path`.
pub fn path_cost(config: &Configuration, path: &[Site]) -> u32 {
    path.iter().filter(|s| !config.is_open(**s)).count() as u32
}

// ---------------------------------------------------------------------------

/// Packed coordinates over the bounding box of a search; box sides are
/// limited to 1024 so offsets fit in 10 bits each.
#[derive(Clone, Copy)]
struct Grid {
    origin: Site,
    side: u32,
    count: usize,
}

impl Grid {
    fn new(bbox: BoxSpec) -> Grid {
        let side = bbox.side();
        assert!(side <= 1024, "search regions up to side 1024 are supported (got {side})");
        let h = bbox.half_side;
        Grid {
            origin: bbox.center.sub(Site::new(h, h, h)),
            side: side as u32,
            count: bbox.site_count(),
        }
    }

    #[inline]
    fn pack(&self, s: Site) -> Option<u32> {
        let d = s.sub(self.origin);
        let side = self.side as i32;
        if d.x < 0 || d.y < 0 || d.z < 0 || d.x >= side || d.y >= side || d.z >= side {
            return None;
        }
        Some(d.x as u32 | (d.y as u32) << 10 | (d.z as u32) << 20)
    }

    #[inline]
    fn unpack(&self, p: u32) -> Site {
        self.origin.add(Site::new(
            (p & 0x3FF) as i32,
            (p >> 10 & 0x3FF) as i32,
            (p >> 20 & 0x3FF) as i32,
        ))
    }

    #[inline]
    fn index_of_packed(&self, p: u32) -> usize {
        let s = self.side as usize;
        (p & 0x3FF) as usize + s * ((p >> 10 & 0x3FF) as usize + s * (p >> 20 & 0x3FF) as usize)
    }

    #[inline]
    fn index_checked(&self, s: Site) -> Option<usize> {
        self.pack(s).map(|p| self.index_of_packed(p))
    }

    #[inline]
    fn index_checked_in(&self, s: Site, membership: &Membership) -> Option<usize> {
        if membership.contains(s) {
            self.index_checked(s)
        } else {
            None
        }
    }

    fn site_at(&self, i: usize) -> Site {
        let s = self.side as usize;
        self.origin.add(Site::new((i % s) as i32, (i / s % s) as i32, (i / (s * s)) as i32))
    }
}

/// Effective membership test: region ∩ configuration box, with the common
/// full-box case specialized.
enum Membership<'a> {
    FullBox(BoxSpec),
    Clipped(&'a Region, BoxSpec),
}

impl Membership<'_> {
    #[inline]
    fn contains(&self, s: Site) -> bool {
        match self {
            Membership::FullBox(b) => b.contains(s),
            Membership::Clipped(r, b) => b.contains(s) && r.contains(s),
        }
    }
}

enum StopRule<'t> {
    Never,
    Marked(&'t BitSet),
    Index(usize),
}

struct Dial<'a> {
    config: &'a Configuration,
    grid: Grid,
    membership: Membership<'a>,
    dist: Vec<u32>,
    pred: Vec<u8>,
    // Queue entries are `(flat grid index << 32) | packed coords`, so the
    // inner loop steps to neighbours by adding precomputed offsets instead
    // of repacking coordinates.
    cur: VecDeque<u64>,
    nxt: VecDeque<u64>,
}

impl<'a> Dial<'a> {
    fn new(
        config: &'a Configuration,
        region: &'a Region,
        source: Site,
        want_pred: bool,
    ) -> Result<Self, TravelError> {
        let cbox = config.box_spec();
        let membership = match region {
            Region::Box(b) if *b == cbox => Membership::FullBox(cbox),
            _ => Membership::Clipped(region, cbox),
        };
        if !membership.contains(source) {
            return Err(TravelError::SourceOutsideRegion(source.x, source.y, source.z));
        }
        let grid = Grid::new(region.bounding_box());
        let mut dial = Dial {
            config,
            grid,
            membership,
            dist: vec![UNREACHABLE; grid.count],
            pred: if want_pred { vec![0xFF; grid.count] } else { Vec::new() },
            cur: VecDeque::new(),
            nxt: VecDeque::new(),
        };
        let sp = dial.grid.pack(source).expect("source is inside the region bounding box");
        let si = dial.grid.index_of_packed(sp);
        dial.dist[si] = if config.is_open(source) { 0 } else { 1 };
        dial.cur.push_back((si as u64) << 32 | sp as u64);
        Ok(dial)
    }

    /// Runs the search; returns the stop cost for target rules, finalizing the
    /// whole cost plateau of the first reached target before returning.
    fn run(&mut self, stop: StopRule<'_>) -> Option<u32> {
        let mut cost = match self.cur.front() {
            Some(&e) => self.dist[(e >> 32) as usize],
            None => return None,
        };
        let side = self.grid.side as i64;
        // Packed-field shift plus packed/index offsets per direction, in
        // `FACE_DIRS` order so predecessor codes are unchanged.
        let steps: [(u32, i64, i64); 6] = [
            (0, 1, 1),
            (0, -1, -1),
            (10, 1 << 10, side),
            (10, -(1 << 10), -side),
            (20, 1 << 20, side * side),
            (20, -(1 << 20), -(side * side)),
        ];
        // A search over exactly the configuration box needs no membership
        // test beyond the grid bounds, and its grid indices coincide with
        // configuration indices, so openness is a direct bit read.
        let aligned = matches!(self.membership, Membership::FullBox(_));
        let cbox = self.config.box_spec();
        let cside = cbox.side();
        let csteps: [i64; 6] = [1, -1, cside, -cside, cside * cside, -(cside * cside)];
        let record = !self.pred.is_empty();
        let mut found: Option<u32> = None;
        loop {
            while let Some(e) = self.cur.pop_front() {
                let i = (e >> 32) as usize;
                if self.dist[i] != cost {
                    continue; // stale entry
                }
                match stop {
                    StopRule::Marked(marks) if marks.get(i) => found = Some(cost),
                    StopRule::Index(t) if t == i => return Some(cost),
                    _ => {}
                }
                let p = e as u32;
                let (s, ci) = if aligned {
                    (Site::ORIGIN, 0)
                } else {
                    let s = self.grid.unpack(p);
                    // Visited sites always lie in the configuration box, so
                    // its linear index can follow the grid steps too.
                    (s, cbox.index_of(s) as i64)
                };
                for (d, &(shift, dp, di)) in steps.iter().enumerate() {
                    let f = (p >> shift & 0x3FF) as i64;
                    let at_edge = if dp > 0 { f + 1 == side } else { f == 0 };
                    if at_edge {
                        continue;
                    }
                    let ni = (i as i64 + di) as usize;
                    let w = if aligned {
                        !self.config.is_open_idx(ni) as u32
                    } else {
                        let nb = s.add(FACE_DIRS[d]);
                        if !self.membership.contains(nb) {
                            continue;
                        }
                        !self.config.is_open_idx((ci + csteps[d]) as usize) as u32
                    };
                    let nd = cost + w;
                    if nd < self.dist[ni] {
                        self.dist[ni] = nd;
                        if record {
                            self.pred[ni] = d as u8;
                        }
                        let ne = (ni as u64) << 32 | (p as i64 + dp) as u64 & 0xFFFF_FFFF;
                        if w == 0 {
                            self.cur.push_back(ne);
                        } else {
                            self.nxt.push_back(ne);
                        }
                    }
                }
            }
            // Plateau exhausted: every site of cost `cost` is final.
            if found.is_some() {
                return found;
            }
            if self.nxt.is_empty() {
                return None;
            }
            std::mem::swap(&mut self.cur, &mut self.nxt);
            cost += 1;
        }
    }

    /// Preloads the search with a whole open cluster at distance 0 and its
    /// closed neighbour ring at distance 1, replacing the zero-cost expansion
    /// from the source. Final distances and stop costs are unchanged: plateau
    /// membership does not depend on the order a plateau is expanded in, and
    /// the ring is exactly what expanding the cluster would enqueue.
    ///
    /// Only valid for full-box searches from a source inside the cluster,
    /// without predecessor records.
    fn seed_cluster(&mut self, labels: &[u32], label: u32) {
        debug_assert!(matches!(self.membership, Membership::FullBox(_)));
        debug_assert!(self.pred.is_empty());
        self.cur.clear();
        let side = self.grid.side as usize;
        let s2 = side * side;
        let mut i = 0usize;
        for z in 0..side {
            for y in 0..side {
                for x in 0..side {
                    if labels[i] == label {
                        self.dist[i] = 0;
                    } else if !self.config.is_open_idx(i) {
                        let ring = (x + 1 < side && labels[i + 1] == label)
                            || (x > 0 && labels[i - 1] == label)
                            || (y + 1 < side && labels[i + side] == label)
                            || (y > 0 && labels[i - side] == label)
                            || (z + 1 < side && labels[i + s2] == label)
                            || (z > 0 && labels[i - s2] == label);
                        if ring {
                            self.dist[i] = 1;
                            let p = x as u32 | (y as u32) << 10 | (z as u32) << 20;
                            self.cur.push_back((i as u64) << 32 | p as u64);
                        }
                    }
                    i += 1;
                }
            }
        }
    }
}

fn walk_predecessors(grid: &Grid, pred: &[u8], source: Site, target: Site) -> Vec<Site> {
    let mut path = vec![target];
    let mut s = target;
    while s != source {
        let i = grid.index_checked(s).expect("path stays inside the grid");
        let d = pred[i];
        debug_assert!(d < 6, "predecessor chain broken");
        s = s.sub(FACE_DIRS[d as usize]);
        path.push(s);
    }
    path.reverse();
    path
}
