//! Quarter squares: the 24 closed quadrants of the six faces of a box.
//!
//! Each face of a box is split by its two medians into four closed quadrants
//! that pairwise share the median sites. For a box of half-side `m` every
//! quadrant holds `(m+1)²` sites and the union of all 24 quadrants is the
//! inner boundary of the box.

use crate::lattice::{BoxSpec, Site, FACE_DIRS};

/// One quadrant of one face of a box.
///
/// Faces are numbered 1..=6 in the direction order `+x,−x,+y,−y,+z,−z`.
/// Quadrants are numbered 1..=4: writing `j − 1` in binary, bit 0 set means
/// the first tangential axis (in coordinate order) spans the non-negative
/// side `[0, m]` of the face, otherwise `[−m, 0]`; bit 1 covers the second
/// tangential axis the same way. All offsets are relative to the box center.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct QuarterSquare {
    pub bx: BoxSpec,
    pub face: u8,
    pub quadrant: u8,
}

impl QuarterSquare {
    pub fn new(bx: BoxSpec, face: u8, quadrant: u8) -> Self {
        assert!((1..=6).contains(&face), "face must be in 1..=6");
        assert!((1..=4).contains(&quadrant), "quadrant must be in 1..=4");
        QuarterSquare { bx, face, quadrant }
    }

    /// Axis normal to the face: 0, 1 or 2.
    fn normal_axis(&self) -> usize {
        (self.face as usize - 1) / 2
    }

    /// The two in-face axes, in coordinate order.
    fn tangential_axes(&self) -> (usize, usize) {
        match self.normal_axis() {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        }
    }

    /// Offset range of tangential axis slot `slot` (0 or 1) relative to the
    /// box center.
    fn range(&self, slot: u8) -> (i32, i32) {
        let m = self.bx.half_side;
        if (self.quadrant - 1) >> slot & 1 == 1 {
            (0, m)
        } else {
            (-m, 0)
        }
    }

    /// Offset of the face plane along the normal axis.
    fn normal_offset(&self) -> i32 {
        let dir = FACE_DIRS[self.face as usize - 1];
        self.bx.half_side * dir.component(self.normal_axis())
    }

    fn site_from_offsets(&self, o1: i32, o2: i32) -> Site {
        let (t1, t2) = self.tangential_axes();
        let mut v = [0i32; 3];
        v[self.normal_axis()] = self.normal_offset();
        v[t1] = o1;
        v[t2] = o2;
        Site::new(v[0], v[1], v[2]).add(self.bx.center)
    }

    /// All `(m+1)²` sites, in ascending `Site` order.
    pub fn sites(&self) -> Vec<Site> {
        let (lo1, hi1) = self.range(0);
        let (lo2, hi2) = self.range(1);
        let mut out = Vec::with_capacity(((hi1 - lo1 + 1) * (hi2 - lo2 + 1)) as usize);
        for o2 in lo2..=hi2 {
            for o1 in lo1..=hi1 {
                out.push(self.site_from_offsets(o1, o2));
            }
        }
        out
    }

    /// The four corner sites of the quadrant rectangle.
    pub fn corners(&self) -> [Site; 4] {
        let (lo1, hi1) = self.range(0);
        let (lo2, hi2) = self.range(1);
        [
            self.site_from_offsets(lo1, lo2),
            self.site_from_offsets(hi1, lo2),
            self.site_from_offsets(lo1, hi2),
            self.site_from_offsets(hi1, hi2),
        ]
    }

    pub fn contains(&self, s: Site) -> bool {
        let d = s.sub(self.bx.center);
        if d.component(self.normal_axis()) != self.normal_offset() {
            return false;
        }
        let (t1, t2) = self.tangential_axes();
        let (lo1, hi1) = self.range(0);
        let (lo2, hi2) = self.range(1);
        (lo1..=hi1).contains(&d.component(t1)) && (lo2..=hi2).contains(&d.component(t2))
    }

    /// Smallest distance from the quadrant to the faces of an enclosing box.
    /// The minimum over the rectangle is attained at a corner because the
    /// distance to the nearest face is a minimum of linear functions.
    pub fn min_depth(&self, ambient: &BoxSpec) -> i32 {
        self.corners()
            .iter()
            .map(|&c| ambient.min_face_distance(c))
            .min()
            .unwrap()
    }
}

/// The 24 quarter squares of a box: faces 1..=6 outer, quadrants 1..=4 inner,
/// so the square for face `i` quadrant `j` sits at index `4(i−1) + (j−1)`.
pub fn quarter_squares(bx: BoxSpec) -> Vec<QuarterSquare> {
    let mut out = Vec::with_capacity(24);
    for face in 1..=6 {
        for quadrant in 1..=4 {
            out.push(QuarterSquare::new(bx, face, quadrant));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TriangleIndex;
    use crate::lattice::{inner_boundary, Region};
    use std::collections::BTreeSet;

    #[test]
    fn counts_on_lambda_two() {
        let bx = BoxSpec::lambda(2);
        let q = QuarterSquare::new(bx, 1, 1);
        assert_eq!(q.sites().len(), 9);
        // Whole face = union of its four quadrants = 25 sites.
        let face: BTreeSet<Site> = (1..=4)
            .flat_map(|j| QuarterSquare::new(bx, 1, j).sites())
            .collect();
        assert_eq!(face.len(), 25);
        assert!(face.iter().all(|s| s.x == 2));
    }

    #[test]
    fn quadrant_one_is_the_doubly_negative_corner() {
        let bx = BoxSpec::lambda(2);
        let q = QuarterSquare::new(bx, 1, 1);
        let expect: Vec<Site> = (-2..=0)
            .flat_map(|z| (-2..=0).map(move |y| Site::new(2, y, z)))
            .collect();
        let mut sorted = expect.clone();
        sorted.sort();
        assert_eq!(q.sites(), sorted);
        // Quadrant 2 flips the first tangential axis (y here) to [0, m].
        let q2 = QuarterSquare::new(bx, 1, 2);
        assert!(q2.sites().iter().all(|s| s.y >= 0 && s.z <= 0));
        // Quadrant 3 flips the second tangential axis (z).
        let q3 = QuarterSquare::new(bx, 1, 3);
        assert!(q3.sites().iter().all(|s| s.y <= 0 && s.z >= 0));
    }

    #[test]
    fn sites_are_sorted_and_match_contains() {
        let bx = BoxSpec::new(Site::new(3, -1, 2), 3);
        for q in quarter_squares(bx) {
            let sites = q.sites();
            assert_eq!(sites.len(), 16);
            let mut sorted = sites.clone();
            sorted.sort();
            assert_eq!(sites, sorted);
            assert!(sites.iter().all(|&s| q.contains(s)));
            for c in q.corners() {
                assert!(sites.contains(&c));
            }
        }
    }

    #[test]
    fn union_is_inner_boundary() {
        let bx = BoxSpec::lambda(3);
        let union: BTreeSet<Site> = quarter_squares(bx).iter().flat_map(|q| q.sites()).collect();
        let boundary: BTreeSet<Site> = inner_boundary(&Region::lambda(3)).into_iter().collect();
        assert_eq!(union, boundary);
    }

    #[test]
    fn symmetry_permutes_quarter_squares() {
        let bx = BoxSpec::lambda(2);
        let all: Vec<BTreeSet<Site>> = quarter_squares(bx)
            .iter()
            .map(|q| q.sites().into_iter().collect())
            .collect();
        for g in TriangleIndex::all() {
            for set in &all {
                let image: BTreeSet<Site> = set.iter().map(|&s| g.apply_site(s)).collect();
                assert!(all.contains(&image), "group image must be another quarter square");
            }
        }
    }

    #[test]
    fn min_depth_is_exact() {
        let ambient = BoxSpec::lambda(10);
        let bx = BoxSpec::new(Site::new(4, -2, 7), 2);
        for q in quarter_squares(bx) {
            let brute = q
                .sites()
                .iter()
                .map(|&s| ambient.min_face_distance(s))
                .min()
                .unwrap();
            assert_eq!(q.min_depth(&ambient), brute);
        }
    }
}
