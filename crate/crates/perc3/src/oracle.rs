//! Slow, obviously-correct reference implementations.
//!
//! These exist purely to cross-check the production code in test suites:
//! an exhaustive minimization over self-avoiding paths, a binary-heap
//! Dijkstra for node weights, and union-find open-cluster labelling. They
//! share no traversal code with the fast implementations.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::lattice::{Configuration, Region, Site};
use crate::traveltime::UNREACHABLE;

/// Sites of `region` that lie inside the configuration box, in index order.
fn effective_sites(config: &Configuration, region: &Region) -> Vec<Site> {
    region.sites().filter(|s| config.contains(*s)).collect()
}

/// Minimum number of closed sites over *all* self-avoiding paths from
/// `source`, by brute-force enumeration. Only usable on regions of at most
/// 64 sites. Returns `(site, cost)` pairs in site-index order with
/// [`UNREACHABLE`] for sites no path reaches.
pub fn simple_path_min_costs(
    config: &Configuration,
    region: &Region,
    source: Site,
) -> Vec<(Site, u32)> {
    let sites = effective_sites(config, region);
    assert!(sites.len() <= 64, "exhaustive path search supports at most 64 sites");
    let index: HashMap<Site, usize> = sites.iter().copied().zip(0..).collect();
    let weight: Vec<u32> = sites.iter().map(|s| !config.is_open(*s) as u32).collect();
    let adj: Vec<Vec<usize>> = sites
        .iter()
        .map(|s| s.neighbors().iter().filter_map(|nb| index.get(nb).copied()).collect())
        .collect();
    // Heap-search distances are realized by shortest-path-tree paths, which
    // are simple, so they bound every answer from above. Costs only grow
    // along a path, so any prefix already above the largest finite bound
    // cannot lead to an improvement anywhere and is abandoned; within that
    // ceiling the enumeration is still exhaustive.
    let ceiling = dijkstra_field(config, region, source)
        .into_iter()
        .map(|(_, c)| c)
        .filter(|&c| c != UNREACHABLE)
        .max()
        .unwrap_or(0);
    let mut best = vec![UNREACHABLE; sites.len()];

    fn dfs(
        adj: &[Vec<usize>],
        weight: &[u32],
        u: usize,
        mask: u64,
        cost: u32,
        ceiling: u32,
        best: &mut [u32],
    ) {
        if cost < best[u] {
            best[u] = cost;
        }
        for &v in &adj[u] {
            let extended = cost + weight[v];
            if mask & (1 << v) == 0 && extended <= ceiling {
                dfs(adj, weight, v, mask | (1 << v), extended, ceiling, best);
            }
        }
    }

    if let Some(&s) = index.get(&source) {
        dfs(&adj, &weight, s, 1 << s, weight[s], ceiling, &mut best);
    }
    sites.into_iter().zip(best).collect()
}

/// Node-weighted Dijkstra with a binary heap, structured independently of
/// the bucket-queue search. Returns `(site, cost)` pairs in site-index order.
pub fn dijkstra_field(config: &Configuration, region: &Region, source: Site) -> Vec<(Site, u32)> {
    let sites = effective_sites(config, region);
    let index: HashMap<Site, usize> = sites.iter().copied().zip(0..).collect();
    let mut dist = vec![UNREACHABLE; sites.len()];
    let mut heap = BinaryHeap::new();
    if let Some(&s) = index.get(&source) {
        dist[s] = !config.is_open(source) as u32;
        heap.push(Reverse((dist[s], s)));
    }
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for nb in sites[u].neighbors() {
            if let Some(&v) = index.get(&nb) {
                let nd = d + !config.is_open(nb) as u32;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
    }
    sites.into_iter().zip(dist).collect()
}

/// Open clusters of `region` by union-find: maps every open site to the
/// smallest-index site of its cluster (adjacency restricted to the region).
pub fn union_find_clusters(config: &Configuration, region: &Region) -> HashMap<Site, Site> {
    let sites: Vec<Site> =
        effective_sites(config, region).into_iter().filter(|s| config.is_open(*s)).collect();
    let index: HashMap<Site, usize> = sites.iter().copied().zip(0..).collect();
    let mut parent: Vec<usize> = (0..sites.len()).collect();

    fn find(parent: &mut [usize], mut u: usize) -> usize {
        while parent[u] != u {
            parent[u] = parent[parent[u]];
            u = parent[u];
        }
        u
    }

    for (u, s) in sites.iter().enumerate() {
        for nb in s.neighbors() {
            if let Some(&v) = index.get(&nb) {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru.max(rv)] = ru.min(rv);
                }
            }
        }
    }
    // Roots are minimal indices of their class because unions keep the
    // smaller index as parent and `sites` is sorted.
    let mut out = HashMap::new();
    for u in 0..sites.len() {
        let r = find(&mut parent, u);
        out.insert(sites[u], sites[r]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traveltime::travel_field;

    #[test]
    fn oracles_agree_with_each_other() {
        for seed in 0..5u64 {
            for p in [0.2, 0.5, 0.8] {
                let c = Configuration::sample(1, p, seed);
                let r = Region::lambda(1);
                let a = simple_path_min_costs(&c, &r, Site::new(-1, -1, -1));
                let b = dijkstra_field(&c, &r, Site::new(-1, -1, -1));
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn dijkstra_agrees_with_bucket_search() {
        for seed in 0..5u64 {
            let c = Configuration::sample(3, 0.55, seed);
            let r = Region::lambda(3);
            let f = travel_field(&c, &r, Site::new(2, 0, -1)).unwrap();
            for (s, d) in dijkstra_field(&c, &r, Site::new(2, 0, -1)) {
                assert_eq!(f.dist(s), d, "at {s:?}");
            }
        }
    }

    #[test]
    fn union_find_roots_are_cluster_minima() {
        let c = Configuration::sample(2, 0.6, 9);
        let r = Region::lambda(2);
        let roots = union_find_clusters(&c, &r);
        for (s, root) in &roots {
            assert!(c.is_open(*s));
            assert!(root <= s);
            assert_eq!(roots[root], *root);
        }
    }
}
