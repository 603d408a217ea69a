//! Sampled site configurations on `Λ(n)`.

use std::collections::VecDeque;
use std::sync::OnceLock;

use super::bits::BitSet;
use super::rng::{stream_at, to_unit};
use super::{BoxSpec, Site};

/// Label value for closed sites in [`Configuration::cluster_labels`].
pub(crate) const NO_CLUSTER: u32 = u32::MAX;

/// A site configuration on the box `Λ(n)`: every site is open or closed.
///
/// Site `i` (linear box index) is open iff the unit uniform built from stream
/// value `i` of the SplitMix64 stream rooted at `seed` is `< p`. The draw is
/// position addressed, so configurations at the same `(n, seed)` and growing
/// `p` are monotonically coupled: a site open at `p` stays open at `p' ≥ p`.
pub struct Configuration {
    box_spec: BoxSpec,
    p: f64,
    seed: u64,
    states: BitSet,
    labels: OnceLock<(Vec<u32>, Vec<u32>)>,
}

impl Configuration {
    /// Samples `Λ(n)` with open probability `p` from `seed`; bit-identical
    /// for identical inputs.
    pub fn sample(n: i32, p: f64, seed: u64) -> Self {
        assert!(n >= 0, "box half-side must be non-negative");
        assert!((0.0..=1.0).contains(&p), "open probability must lie in [0,1]");
        let box_spec = BoxSpec::lambda(n);
        let count = box_spec.site_count();
        let mut states = BitSet::zeros(count);
        for i in 0..count {
            if to_unit(stream_at(seed, i as u64)) < p {
                states.set(i, true);
            }
        }
        Configuration { box_spec, p, seed, states, labels: OnceLock::new() }
    }

    /// Rebuilds a configuration from stored parts (file loading); `states`
    /// must have one bit per site of `Λ(n)`.
    pub(crate) fn from_parts(n: i32, p: f64, seed: u64, states: BitSet) -> Self {
        let box_spec = BoxSpec::lambda(n);
        assert_eq!(states.len(), box_spec.site_count());
        Configuration { box_spec, p, seed, states, labels: OnceLock::new() }
    }

    /// Hand-crafted configuration with exactly the given sites open; for
    /// deterministic unit-test scenarios.
    #[cfg(test)]
    pub(crate) fn from_open_sites(n: i32, open: &[Site]) -> Self {
        let box_spec = BoxSpec::lambda(n);
        let mut states = BitSet::zeros(box_spec.site_count());
        for s in open {
            states.set(box_spec.index_of(*s), true);
        }
        let p = open.len() as f64 / box_spec.site_count() as f64;
        Configuration { box_spec, p, seed: 0, states, labels: OnceLock::new() }
    }

    pub fn n(&self) -> i32 {
        self.box_spec.half_side
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn box_spec(&self) -> BoxSpec {
        self.box_spec
    }

    pub fn site_count(&self) -> usize {
        self.box_spec.site_count()
    }

    #[inline]
    pub fn contains(&self, s: Site) -> bool {
        self.box_spec.contains(s)
    }

    /// Whether `s` (inside the box) is open.
    #[inline]
    pub fn is_open(&self, s: Site) -> bool {
        debug_assert!(self.contains(s));
        self.states.get(self.box_spec.index_of(s))
    }

    #[inline]
    pub fn is_open_idx(&self, idx: usize) -> bool {
        self.states.get(idx)
    }

    pub fn open_count(&self) -> usize {
        self.states.count_ones()
    }

    pub(crate) fn states(&self) -> &BitSet {
        &self.states
    }

    /// Open-cluster labels over the full box, computed once on first use.
    ///
    /// Closed sites carry [`NO_CLUSTER`]; open sites carry the id of their
    /// open cluster, ids assigned in order of each cluster's smallest site
    /// index, so the labelling is deterministic.
    pub(crate) fn cluster_labels(&self) -> &[u32] {
        &self.label_cache().0
    }

    /// Per-cluster site counts, indexed by cluster id from
    /// [`Configuration::cluster_labels`].
    pub(crate) fn cluster_sizes(&self) -> &[u32] {
        &self.label_cache().1
    }

    fn label_cache(&self) -> &(Vec<u32>, Vec<u32>) {
        self.labels.get_or_init(|| {
            let count = self.site_count();
            let side = self.box_spec.side() as usize;
            let mut labels = vec![NO_CLUSTER; count];
            let mut sizes = Vec::new();
            let mut queue = VecDeque::new();
            for start in 0..count {
                if !self.states.get(start) || labels[start] != NO_CLUSTER {
                    continue;
                }
                let id = sizes.len() as u32;
                sizes.push(1);
                labels[start] = id;
                queue.push_back(start);
                while let Some(i) = queue.pop_front() {
                    let s = self.box_spec.site_at(i);
                    let n = self.box_spec.half_side;
                    // Unrolled neighbour walk in index space; bounds by coordinate.
                    let candidates = [
                        (s.x < n, i + 1),
                        (s.x > -n, i.wrapping_sub(1)),
                        (s.y < n, i + side),
                        (s.y > -n, i.wrapping_sub(side)),
                        (s.z < n, i + side * side),
                        (s.z > -n, i.wrapping_sub(side * side)),
                    ];
                    for (ok, j) in candidates {
                        if ok && self.states.get(j) && labels[j] == NO_CLUSTER {
                            labels[j] = id;
                            sizes[id as usize] += 1;
                            queue.push_back(j);
                        }
                    }
                }
            }
            (labels, sizes)
        })
    }
}

impl Clone for Configuration {
    fn clone(&self) -> Self {
        Configuration {
            box_spec: self.box_spec,
            p: self.p,
            seed: self.seed,
            states: self.states.clone(),
            labels: OnceLock::new(),
        }
    }
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        self.box_spec == other.box_spec
            && self.p == other.p
            && self.seed == other.seed
            && self.states == other.states
    }
}

impl std::fmt::Debug for Configuration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Configuration")
            .field("n", &self.n())
            .field("p", &self.p)
            .field("seed", &self.seed)
            .field("open", &self.open_count())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_p() {
        let all = Configuration::sample(2, 1.0, 7);
        assert_eq!(all.open_count(), 125);
        let none = Configuration::sample(2, 0.0, 7);
        assert_eq!(none.open_count(), 0);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let a = Configuration::sample(3, 0.5, 11);
        let b = Configuration::sample(3, 0.5, 11);
        let c = Configuration::sample(3, 0.5, 12);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn monotone_coupling_in_p() {
        let lo = Configuration::sample(4, 0.3, 5);
        let hi = Configuration::sample(4, 0.8, 5);
        for s in BoxSpec::lambda(4).sites() {
            if lo.is_open(s) {
                assert!(hi.is_open(s), "site open at p=0.3 but closed at p=0.8");
            }
        }
    }

    #[test]
    fn open_fraction_within_four_sigma() {
        // Statistical smoke test on a box with ≥ 10³ sites, a few fixed seeds.
        let n = 6; // (2·6+1)³ = 2197 sites
        let p = 0.4;
        let count = BoxSpec::lambda(n).site_count() as f64;
        let sigma = (count * p * (1.0 - p)).sqrt();
        for seed in [1u64, 2, 3, 4, 5] {
            let c = Configuration::sample(n, p, seed);
            let dev = (c.open_count() as f64 - p * count).abs();
            assert!(dev <= 4.0 * sigma, "seed {seed}: deviation {dev} > 4σ = {}", 4.0 * sigma);
        }
    }

    #[test]
    fn cluster_labels_partition_open_sites() {
        let c = Configuration::sample(4, 0.55, 9);
        let labels = c.cluster_labels();
        let b = c.box_spec();
        for (i, &l) in labels.iter().enumerate() {
            let s = b.site_at(i);
            assert_eq!(l != NO_CLUSTER, c.is_open(s));
            // Neighbouring open sites share a label.
            if l != NO_CLUSTER {
                for nb in s.neighbors() {
                    if b.contains(nb) && c.is_open(nb) {
                        assert_eq!(labels[b.index_of(nb)], l);
                    }
                }
            }
        }
    }
}
