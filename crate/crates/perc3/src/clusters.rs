//! Open clusters and onion-layer growth.
//!
//! For an open site `x`, the sets `C_k(x)` grow outward like onion shells:
//! `C_0` is the open cluster of `x`, and each step absorbs the closed crust
//! around the current set together with every open cluster hanging off it:
//!
//! `C_{k+1} = C_k ∪ ∂ᵒᵘᵗC_k ∪ (open clusters met by ∂ᵒᵘᵗ(∂ᵒᵘᵗC_k))`.
//!
//! The defining property, verified in the test suites, is that `C_k` equals
//! the travel-time sublevel set `{ y : T(x, y) ≤ k }` within the region.

use thiserror::Error;

use crate::lattice::{BoxSpec, Configuration, Region, Site};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClusterError {
    #[error("origin site ({0}, {1}, {2}) lies outside the region")]
    OriginOutsideRegion(i32, i32, i32),
    #[error("origin site ({0}, {1}, {2}) is closed; onion layers start from an open site")]
    OriginClosed(i32, i32, i32),
}

/// The nested sets `C_0 ⊆ C_1 ⊆ …`, each sorted by site index.
#[derive(Debug, Clone)]
pub struct OnionLayers {
    /// `layers[k]` is the full set `C_k`. Growth stops early once the set
    /// stabilizes, so the vector may be shorter than requested.
    pub layers: Vec<Vec<Site>>,
    /// True when the final set touches the inner boundary of the region, so
    /// further growth would be clipped by the region edge.
    pub truncated: bool,
}

/// Working view of `region ∩ configuration box` with flat indexing.
struct Ambient<'a> {
    config: &'a Configuration,
    region: &'a Region,
    bbox: BoxSpec,
}

impl<'a> Ambient<'a> {
    fn new(config: &'a Configuration, region: &'a Region) -> Self {
        Ambient { config, region, bbox: region.bounding_box() }
    }

    fn contains(&self, s: Site) -> bool {
        self.config.contains(s) && self.region.contains(s)
    }

    fn idx(&self, s: Site) -> usize {
        self.bbox.index_of(s)
    }
}

/// The open cluster of `x` inside `region ∩ box`, sorted by site index;
/// empty when `x` is closed or outside.
pub fn open_cluster(config: &Configuration, region: &Region, x: Site) -> Vec<Site> {
    let amb = Ambient::new(config, region);
    if !amb.contains(x) || !config.is_open(x) {
        return Vec::new();
    }
    let mut in_set = vec![false; amb.bbox.site_count()];
    let mut members = Vec::new();
    in_set[amb.idx(x)] = true;
    flood_open(&amb, &[x], &mut in_set, &mut members);
    let mut cluster = vec![x];
    cluster.append(&mut members);
    cluster.sort_unstable();
    cluster
}

/// Whether the open cluster of `x` meets the inner boundary of
/// `region ∩ box`. False when `x` is closed or outside.
pub fn reaches_boundary(config: &Configuration, region: &Region, x: Site) -> bool {
    let amb = Ambient::new(config, region);
    if !amb.contains(x) || !config.is_open(x) {
        return false;
    }
    let mut in_set = vec![false; amb.bbox.site_count()];
    in_set[amb.idx(x)] = true;
    let mut stack = vec![x];
    while let Some(s) = stack.pop() {
        let mut edge = false;
        for nb in s.neighbors() {
            if !amb.contains(nb) {
                edge = true;
            } else if config.is_open(nb) && !in_set[amb.idx(nb)] {
                in_set[amb.idx(nb)] = true;
                stack.push(nb);
            }
        }
        if edge {
            return true;
        }
    }
    false
}

/// Grows the onion sets `C_0 … C_k` from the open site `x`, stopping early
/// once the set stabilizes inside the region.
pub fn onion_layers(
    config: &Configuration,
    region: &Region,
    x: Site,
    max_layer: usize,
) -> Result<OnionLayers, ClusterError> {
    let amb = Ambient::new(config, region);
    if !amb.contains(x) {
        return Err(ClusterError::OriginOutsideRegion(x.x, x.y, x.z));
    }
    if !config.is_open(x) {
        return Err(ClusterError::OriginClosed(x.x, x.y, x.z));
    }

    let mut in_set = vec![false; amb.bbox.site_count()];
    let mut members = vec![x];
    in_set[amb.idx(x)] = true;
    let seeds = members.clone();
    flood_open(&amb, &seeds, &mut in_set, &mut members);

    let mut layers = vec![sorted(&members)];
    for _ in 0..max_layer {
        // Closed crust ∂ᵒᵘᵗC_k: every site there is closed, because an open
        // neighbour of C_k would already belong to C_k.
        let crust = outer_boundary_of(&amb, &members, &in_set);
        if crust.is_empty() {
            break; // stabilized: C_{k+1} = C_k from here on
        }
        let mut added = crust.clone();
        for s in &added {
            in_set[amb.idx(*s)] = true;
        }
        // Open clusters hanging off the crust: seeds are the open members of
        // ∂ᵒᵘᵗ(∂ᵒᵘᵗC_k) not yet absorbed.
        let rim = outer_boundary_of(&amb, &crust, &in_set);
        let open_seeds: Vec<Site> =
            rim.into_iter().filter(|s| amb.config.is_open(*s)).collect();
        for s in &open_seeds {
            in_set[amb.idx(*s)] = true;
        }
        added.extend_from_slice(&open_seeds);
        flood_open(&amb, &open_seeds, &mut in_set, &mut added);
        members.append(&mut added);
        layers.push(sorted(&members));
    }

    let truncated = members.iter().any(|s| on_region_edge(&amb, *s));
    Ok(OnionLayers { layers, truncated })
}

/// Flood-fills open sites reachable from `seeds` (already marked), appending
/// new members to `out`.
fn flood_open(amb: &Ambient<'_>, seeds: &[Site], in_set: &mut [bool], out: &mut Vec<Site>) {
    let mut stack: Vec<Site> = seeds.to_vec();
    while let Some(s) = stack.pop() {
        for nb in s.neighbors() {
            if amb.contains(nb) && amb.config.is_open(nb) && !in_set[amb.idx(nb)] {
                in_set[amb.idx(nb)] = true;
                out.push(nb);
                stack.push(nb);
            }
        }
    }
}

/// Sites of the ambient region adjacent to `set` but not marked in `in_set`,
/// deduplicated.
fn outer_boundary_of(amb: &Ambient<'_>, set: &[Site], in_set: &[bool]) -> Vec<Site> {
    let mut mark = vec![false; amb.bbox.site_count()];
    let mut out = Vec::new();
    for s in set {
        for nb in s.neighbors() {
            if amb.contains(nb) && !in_set[amb.idx(nb)] && !mark[amb.idx(nb)] {
                mark[amb.idx(nb)] = true;
                out.push(nb);
            }
        }
    }
    out
}

fn on_region_edge(amb: &Ambient<'_>, s: Site) -> bool {
    s.neighbors().iter().any(|nb| !amb.contains(*nb))
}

fn sorted(v: &[Site]) -> Vec<Site> {
    let mut out = v.to_vec();
    out.sort_unstable();
    out
}
