//! Exact maximal pairwise squared distance over a finite site set.
//!
//! Thickened triangle sets at radius 600+ hold hundreds of thousands of
//! sites, so the all-pairs scan is replaced by a bucketed branch-and-bound:
//! sites are binned into axis-aligned cells, cell pairs are screened by an
//! upper bound on their best achievable distance, and only the surviving
//! pairs are scanned exactly. A support-point warm start (extreme sites in
//! the 26 axis/diagonal directions) makes the screening bite immediately.

use std::collections::HashMap;

use crate::lattice::Site;

#[derive(Clone)]
struct Bucket {
    sites: Vec<Site>,
    lo: [i64; 3],
    hi: [i64; 3],
}

impl Bucket {
    fn new(s: Site) -> Self {
        let c = [s.x as i64, s.y as i64, s.z as i64];
        Bucket { sites: vec![s], lo: c, hi: c }
    }

    fn push(&mut self, s: Site) {
        let c = [s.x as i64, s.y as i64, s.z as i64];
        for a in 0..3 {
            self.lo[a] = self.lo[a].min(c[a]);
            self.hi[a] = self.hi[a].max(c[a]);
        }
        self.sites.push(s);
    }

    /// Largest squared distance achievable between this box and `other`.
    fn upper_bound(&self, other: &Bucket) -> i64 {
        (0..3)
            .map(|a| {
                let d = (self.hi[a] - other.lo[a]).max(other.hi[a] - self.lo[a]);
                d * d
            })
            .sum()
    }
}

fn dist_sq(a: Site, b: Site) -> i64 {
    a.sub(b).norm_sq()
}

/// Exact `max ‖a − b‖²` over all pairs of the given sites (0 when fewer than
/// two sites are supplied).
pub fn max_pair_distance_sq(sites: &[Site]) -> i64 {
    if sites.len() < 2 {
        return 0;
    }
    // Warm start: extreme sites along the 26 nonzero {−1,0,1}³ directions.
    let mut supports: Vec<Site> = Vec::with_capacity(26);
    for dx in -1i64..=1 {
        for dy in -1i64..=1 {
            for dz in -1i64..=1 {
                if (dx, dy, dz) == (0, 0, 0) {
                    continue;
                }
                let s = *sites
                    .iter()
                    .max_by_key(|s| (dx * s.x as i64 + dy * s.y as i64 + dz * s.z as i64, **s))
                    .unwrap();
                if !supports.contains(&s) {
                    supports.push(s);
                }
            }
        }
    }
    let mut best = 0i64;
    for i in 0..supports.len() {
        for j in i + 1..supports.len() {
            best = best.max(dist_sq(supports[i], supports[j]));
        }
    }

    // Bucket sites into cells of roughly 1/24 of the largest extent.
    let mut lo = [i64::MAX; 3];
    let mut hi = [i64::MIN; 3];
    for s in sites {
        let c = [s.x as i64, s.y as i64, s.z as i64];
        for a in 0..3 {
            lo[a] = lo[a].min(c[a]);
            hi[a] = hi[a].max(c[a]);
        }
    }
    let extent = (0..3).map(|a| hi[a] - lo[a]).max().unwrap();
    let cell = (extent / 24).max(1);
    let mut cells: HashMap<[i64; 3], Bucket> = HashMap::new();
    for &s in sites {
        let key = [
            (s.x as i64 - lo[0]) / cell,
            (s.y as i64 - lo[1]) / cell,
            (s.z as i64 - lo[2]) / cell,
        ];
        cells
            .entry(key)
            .and_modify(|b| b.push(s))
            .or_insert_with(|| Bucket::new(s));
    }
    let buckets: Vec<Bucket> = cells.into_values().collect();

    // Screen cell pairs by upper bound, strongest first.
    let mut pairs: Vec<(i64, usize, usize)> = Vec::new();
    for i in 0..buckets.len() {
        for j in i..buckets.len() {
            let ub = buckets[i].upper_bound(&buckets[j]);
            if ub > best {
                pairs.push((ub, i, j));
            }
        }
    }
    pairs.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    for (ub, i, j) in pairs {
        if ub <= best {
            break;
        }
        let (bi, bj) = (&buckets[i], &buckets[j]);
        if i == j {
            for a in 0..bi.sites.len() {
                for b in a + 1..bi.sites.len() {
                    best = best.max(dist_sq(bi.sites[a], bi.sites[b]));
                }
            }
        } else {
            for &a in &bi.sites {
                for &b in &bj.sites {
                    best = best.max(dist_sq(a, b));
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{thickened_triangle, TriangleIndex};
    use crate::lattice::rng::SplitMix64;

    fn brute(sites: &[Site]) -> i64 {
        let mut best = 0;
        for i in 0..sites.len() {
            for j in i + 1..sites.len() {
                best = best.max(dist_sq(sites[i], sites[j]));
            }
        }
        best
    }

    #[test]
    fn trivial_inputs() {
        assert_eq!(max_pair_distance_sq(&[]), 0);
        assert_eq!(max_pair_distance_sq(&[Site::new(5, 5, 5)]), 0);
        assert_eq!(
            max_pair_distance_sq(&[Site::new(0, 0, 0), Site::new(3, 4, 0)]),
            25
        );
    }

    #[test]
    fn matches_brute_force_on_random_sets() {
        let mut rng = SplitMix64::new(77);
        for _ in 0..20 {
            let count = 2 + (rng.next_below(300)) as usize;
            let sites: Vec<Site> = (0..count)
                .map(|_| {
                    Site::new(
                        rng.next_range_i64(-40, 40) as i32,
                        rng.next_range_i64(-40, 40) as i32,
                        rng.next_range_i64(-40, 40) as i32,
                    )
                })
                .collect();
            assert_eq!(max_pair_distance_sq(&sites), brute(&sites));
        }
    }

    #[test]
    fn matches_brute_force_on_a_shell_patch() {
        let ts = thickened_triangle(Site::ORIGIN, 625, TriangleIndex::identity(), 3.0);
        assert_eq!(max_pair_distance_sq(&ts.sites), brute(&ts.sites));
        // Diameter bound for thickness 3: ‖y−z‖ ≤ 6 + 0.96r.
        let d = (max_pair_distance_sq(&ts.sites) as f64).sqrt();
        assert!(d <= 6.0 + 0.96 * 25.0);
    }

    #[test]
    fn collinear_and_duplicate_sites() {
        let sites = vec![
            Site::new(0, 0, 0),
            Site::new(0, 0, 0),
            Site::new(0, 0, 7),
            Site::new(0, 0, 3),
        ];
        assert_eq!(max_pair_distance_sq(&sites), 49);
    }
}
