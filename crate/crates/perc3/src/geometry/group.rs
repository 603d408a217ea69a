//! The order-48 group of signed coordinate permutations (the full octahedral
//! reflection group) and the canonical decomposition of directions.
//!
//! Element `g = (σ, ε)` acts by `g(v)_a = ε_a · v_{σ(a)}`. Elements are
//! numbered `8·σ_index + ε_index` where the six permutations are listed in
//! lexicographic order and sign pattern bit `a` set means axis `a` is
//! negated; index 0 is the identity. "Lexicographically smallest element"
//! below always refers to this numbering.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::Site;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("the zero vector has no direction to canonicalize")]
    ZeroVector,
}

const PERMS: [[usize; 3]; 6] =
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// One of the 48 spherical triangles, identified with the group element
/// mapping the fundamental triangle onto it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct TriangleIndex(u8);

impl TriangleIndex {
    pub const COUNT: usize = 48;

    pub fn from_index(i: usize) -> TriangleIndex {
        assert!(i < Self::COUNT, "triangle index out of range: {i}");
        TriangleIndex(i as u8)
    }

    pub fn identity() -> TriangleIndex {
        TriangleIndex(0)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = TriangleIndex> {
        (0..Self::COUNT).map(TriangleIndex::from_index)
    }

    fn perm(self) -> [usize; 3] {
        PERMS[self.0 as usize / 8]
    }

    /// `true` at position `a` means the output component `a` is negated.
    fn neg(self) -> [bool; 3] {
        let bits = self.0 % 8;
        [bits & 1 != 0, bits & 2 != 0, bits & 4 != 0]
    }

    pub fn apply(self, v: [f64; 3]) -> [f64; 3] {
        let (p, n) = (self.perm(), self.neg());
        let mut out = [0.0; 3];
        for a in 0..3 {
            out[a] = if n[a] { -v[p[a]] } else { v[p[a]] };
        }
        out
    }

    pub fn apply_inverse(self, v: [f64; 3]) -> [f64; 3] {
        let (p, n) = (self.perm(), self.neg());
        let mut out = [0.0; 3];
        for a in 0..3 {
            out[p[a]] = if n[a] { -v[a] } else { v[a] };
        }
        out
    }

    pub fn apply_site(self, v: Site) -> Site {
        let (p, n) = (self.perm(), self.neg());
        let c = [v.x, v.y, v.z];
        let pick = |a: usize| if n[a] { -c[p[a]] } else { c[p[a]] };
        Site::new(pick(0), pick(1), pick(2))
    }

    pub fn apply_inverse_site(self, v: Site) -> Site {
        let (p, n) = (self.perm(), self.neg());
        let c = [v.x, v.y, v.z];
        let mut out = [0; 3];
        for a in 0..3 {
            out[p[a]] = if n[a] { -c[a] } else { c[a] };
        }
        Site::new(out[0], out[1], out[2])
    }
}

/// Splits a nonzero direction into the lexicographically smallest group
/// element `g` and the canonical vector `w` (absolute components sorted
/// descending) with `g(w) = v` exactly; `g` maps the fundamental triangle
/// onto the one containing `v`.
pub fn canonicalize_direction(v: [f64; 3]) -> Result<(TriangleIndex, [f64; 3]), GeometryError> {
    if v == [0.0; 3] {
        return Err(GeometryError::ZeroVector);
    }
    let mut w = [v[0].abs(), v[1].abs(), v[2].abs()];
    w.sort_by(|a, b| b.partial_cmp(a).expect("no NaN components"));
    for g in TriangleIndex::all() {
        if g.apply(w) == v {
            return Ok((g, w));
        }
    }
    unreachable!("some signed permutation sorts the components")
}

/// Exact integer version of [`canonicalize_direction`] for lattice vectors.
pub fn canonicalize_site(v: Site) -> Result<(TriangleIndex, Site), GeometryError> {
    if v == Site::ORIGIN {
        return Err(GeometryError::ZeroVector);
    }
    let mut w = [v.x.abs(), v.y.abs(), v.z.abs()];
    w.sort_unstable_by(|a, b| b.cmp(a));
    let w = Site::new(w[0], w[1], w[2]);
    for g in TriangleIndex::all() {
        if g.apply_site(w) == v {
            return Ok((g, w));
        }
    }
    unreachable!("some signed permutation sorts the components")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rng::SplitMix64;

    #[test]
    fn forty_eight_distinct_elements() {
        let mut images = std::collections::HashSet::new();
        for g in TriangleIndex::all() {
            images.insert(g.apply_site(Site::new(3, 2, 1)));
        }
        // (3,2,1) has trivial stabilizer, so all images are distinct.
        assert_eq!(images.len(), 48);
    }

    #[test]
    fn inverse_round_trips() {
        let v = [0.3, -1.7, 0.9];
        let s = Site::new(-4, 7, 2);
        for g in TriangleIndex::all() {
            assert_eq!(g.apply_inverse(g.apply(v)), v);
            assert_eq!(g.apply(g.apply_inverse(v)), v);
            assert_eq!(g.apply_inverse_site(g.apply_site(s)), s);
        }
    }

    #[test]
    fn identity_is_element_zero() {
        let v = [1.0, 2.0, 3.0];
        assert_eq!(TriangleIndex::identity().apply(v), v);
    }

    #[test]
    fn canonicalize_axis_vector() {
        let (g, w) = canonicalize_direction([1.0, 0.0, 0.0]).unwrap();
        assert_eq!(g, TriangleIndex::identity());
        assert_eq!(w, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn canonicalize_documented_example() {
        let (g, w) = canonicalize_direction([-3.0, 1.0, 2.0]).unwrap();
        assert_eq!(w, [3.0, 2.0, 1.0]);
        assert_eq!(g.apply(w), [-3.0, 1.0, 2.0]);
        let (gs, ws) = canonicalize_site(Site::new(-3, 1, 2)).unwrap();
        assert_eq!(gs.index(), g.index());
        assert_eq!(ws, Site::new(3, 2, 1));
    }

    #[test]
    fn degenerate_all_ones_uses_smallest_element() {
        let (g, w) = canonicalize_direction([1.0, 1.0, 1.0]).unwrap();
        assert_eq!(g, TriangleIndex::identity());
        assert_eq!(w, [1.0, 1.0, 1.0]);
    }

    #[test]
    fn random_vectors_round_trip_exactly() {
        let mut rng = SplitMix64::new(0xC0FFEE);
        for _ in 0..2000 {
            let v = [
                rng.next_unit() * 2.0 - 1.0,
                rng.next_unit() * 2.0 - 1.0,
                rng.next_unit() * 2.0 - 1.0,
            ];
            if v == [0.0; 3] {
                continue;
            }
            let (g, w) = canonicalize_direction(v).unwrap();
            assert!(w[0] >= w[1] && w[1] >= w[2] && w[2] >= 0.0);
            assert_eq!(g.apply(w), v);
        }
    }

    #[test]
    fn canonical_sites_round_trip_exactly() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..2000 {
            let v = Site::new(
                rng.next_range_i64(-50, 51) as i32,
                rng.next_range_i64(-50, 51) as i32,
                rng.next_range_i64(-50, 51) as i32,
            );
            if v == Site::ORIGIN {
                continue;
            }
            let (g, w) = canonicalize_site(v).unwrap();
            assert!(w.x >= w.y && w.y >= w.z && w.z >= 0);
            assert_eq!(g.apply_site(w), v);
        }
    }
}
