//! Sites, regions and random configurations on the cubic lattice.
//!
//! The working region is the box `Λ(n) = {-n..n}³`. Sites inside a box of
//! half-side `n` are linearly indexed by
//! `index = (x+n) + (2n+1)·((y+n) + (2n+1)·(z+n))`, so `x` varies fastest.
//! All deterministic tie-breaks in this crate ("smallest site index") refer to
//! this order, which coincides with the lexicographic order on `(z, y, x)`.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

pub mod bits;
mod config;
mod io;
pub mod rng;

pub use config::Configuration;
pub use io::{load_perc, read_perc, save_perc, write_perc, PercFileError};

/// Lattice site (also used as an integer displacement vector).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Site {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

/// The six axis directions; face `f` of a box (1-based) points along
/// `FACE_DIRS[f-1]`. Nearest-neighbour offsets use the same order.
pub const FACE_DIRS: [Site; 6] = [
    Site { x: 1, y: 0, z: 0 },
    Site { x: -1, y: 0, z: 0 },
    Site { x: 0, y: 1, z: 0 },
    Site { x: 0, y: -1, z: 0 },
    Site { x: 0, y: 0, z: 1 },
    Site { x: 0, y: 0, z: -1 },
];

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0, z: 0 };

    pub fn new(x: i32, y: i32, z: i32) -> Self {
        Site { x, y, z }
    }

    pub fn add(self, o: Site) -> Site {
        Site::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn sub(self, o: Site) -> Site {
        Site::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    /// Squared Euclidean norm.
    pub fn norm_sq(self) -> i64 {
        let (x, y, z) = (self.x as i64, self.y as i64, self.z as i64);
        x * x + y * y + z * z
    }

    pub fn norm(self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn l1(self) -> i64 {
        self.x.unsigned_abs() as i64 + self.y.unsigned_abs() as i64 + self.z.unsigned_abs() as i64
    }

    pub fn chebyshev(self) -> i32 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn to_f64(self) -> [f64; 3] {
        [self.x as f64, self.y as f64, self.z as f64]
    }

    /// The six nearest neighbours, in `FACE_DIRS` order.
    pub fn neighbors(self) -> [Site; 6] {
        let mut out = [self; 6];
        for (o, d) in out.iter_mut().zip(FACE_DIRS) {
            *o = o.add(d);
        }
        out
    }

    pub fn component(self, axis: usize) -> i32 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }
}

// Order must agree with the linear site index inside any box: z, then y, then x.
impl Ord for Site {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.z, self.y, self.x).cmp(&(other.z, other.y, other.x))
    }
}

impl PartialOrd for Site {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Axis-aligned cube of sites `{center + v : |v|_∞ ≤ half_side}`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BoxSpec {
    pub center: Site,
    pub half_side: i32,
}

impl BoxSpec {
    pub fn new(center: Site, half_side: i32) -> Self {
        assert!(half_side >= 0, "box half-side must be non-negative");
        BoxSpec { center, half_side }
    }

    /// The centred box `Λ(n)`.
    pub fn lambda(n: i32) -> Self {
        BoxSpec::new(Site::ORIGIN, n)
    }

    pub fn side(&self) -> i64 {
        2 * self.half_side as i64 + 1
    }

    pub fn site_count(&self) -> usize {
        let s = self.side() as usize;
        s * s * s
    }

    pub fn contains(&self, s: Site) -> bool {
        s.sub(self.center).chebyshev() <= self.half_side
    }

    /// Linear index of `s` (must lie inside), `x` fastest.
    #[inline]
    pub fn index_of(&self, s: Site) -> usize {
        let side = self.side();
        let d = s.sub(self.center);
        let n = self.half_side as i64;
        ((d.x as i64 + n) + side * ((d.y as i64 + n) + side * (d.z as i64 + n))) as usize
    }

    /// Inverse of [`BoxSpec::index_of`].
    pub fn site_at(&self, index: usize) -> Site {
        let side = self.side();
        let n = self.half_side;
        let i = index as i64;
        let x = (i % side) as i32 - n;
        let y = ((i / side) % side) as i32 - n;
        let z = (i / (side * side)) as i32 - n;
        Site::new(x, y, z).add(self.center)
    }

    /// Coordinate distance from `s` to face `face` (1-based, see [`FACE_DIRS`]).
    /// Zero exactly on the face; negative outside the slab.
    pub fn face_distance(&self, s: Site, face: u8) -> i32 {
        let dir = FACE_DIRS[face as usize - 1];
        let d = s.sub(self.center);
        self.half_side - (d.x * dir.x + d.y * dir.y + d.z * dir.z)
    }

    /// Distance to the nearest face, i.e. to the inner boundary for interior sites.
    pub fn min_face_distance(&self, s: Site) -> i32 {
        self.half_side - s.sub(self.center).chebyshev()
    }

    /// Smallest face index attaining [`BoxSpec::min_face_distance`].
    pub fn nearest_face(&self, s: Site) -> u8 {
        (1..=6u8)
            .min_by_key(|&f| (self.face_distance(s, f), f))
            .unwrap()
    }

    /// Grows the box by `delta` on all sides.
    pub fn grow(&self, delta: i32) -> BoxSpec {
        BoxSpec::new(self.center, self.half_side + delta)
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + 'static {
        let n = self.half_side;
        let c = self.center;
        (-n..=n).flat_map(move |z| {
            (-n..=n).flat_map(move |y| (-n..=n).map(move |x| Site::new(x, y, z).add(c)))
        })
    }
}

/// Lattice ball `{center + v : |v|² ≤ r_squared}` with an integer squared radius.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BallSpec {
    pub center: Site,
    pub r_squared: i64,
}

impl BallSpec {
    pub fn new(center: Site, r_squared: i64) -> Self {
        assert!(r_squared >= 0, "squared radius must be non-negative");
        BallSpec { center, r_squared }
    }

    pub fn radius(&self) -> f64 {
        (self.r_squared as f64).sqrt()
    }

    pub fn contains(&self, s: Site) -> bool {
        s.sub(self.center).norm_sq() <= self.r_squared
    }

    /// True when some lattice vector attains `r_squared` exactly, so the
    /// sphere of radius `r` meets the lattice.
    pub fn is_admissible(&self) -> bool {
        is_sum_of_three_squares(self.r_squared)
    }

    pub fn bounding_box(&self) -> BoxSpec {
        BoxSpec::new(self.center, self.radius().floor() as i32)
    }
}

/// A finite set of sites with a total membership test.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Region {
    Box(BoxSpec),
    Ball(BallSpec),
    /// Explicit site list, kept sorted in site-index order.
    Sites(Vec<Site>),
}

impl Region {
    pub fn lambda(n: i32) -> Region {
        Region::Box(BoxSpec::lambda(n))
    }

    pub fn from_sites(mut sites: Vec<Site>) -> Region {
        sites.sort_unstable();
        sites.dedup();
        Region::Sites(sites)
    }

    pub fn contains(&self, s: Site) -> bool {
        match self {
            Region::Box(b) => b.contains(s),
            Region::Ball(b) => b.contains(s),
            Region::Sites(v) => v.binary_search(&s).is_ok(),
        }
    }

    /// Smallest axis-aligned box containing the region.
    pub fn bounding_box(&self) -> BoxSpec {
        match self {
            Region::Box(b) => *b,
            Region::Ball(b) => b.bounding_box(),
            Region::Sites(v) => {
                assert!(!v.is_empty(), "empty explicit region has no bounding box");
                let mut lo = [i32::MAX; 3];
                let mut hi = [i32::MIN; 3];
                for s in v {
                    for a in 0..3 {
                        lo[a] = lo[a].min(s.component(a));
                        hi[a] = hi[a].max(s.component(a));
                    }
                }
                // Round up to a centred cube: boxes here are always odd-sided.
                let cx = (lo[0] + hi[0]).div_euclid(2);
                let cy = (lo[1] + hi[1]).div_euclid(2);
                let cz = (lo[2] + hi[2]).div_euclid(2);
                let c = Site::new(cx, cy, cz);
                let mut h = 0;
                for s in v {
                    h = h.max(s.sub(c).chebyshev());
                }
                BoxSpec::new(c, h)
            }
        }
    }

    /// All sites in index order (of the bounding box).
    pub fn sites(&self) -> Box<dyn Iterator<Item = Site> + '_> {
        match self {
            Region::Box(b) => Box::new(b.sites()),
            Region::Ball(b) => Box::new(b.bounding_box().sites().filter(move |s| b.contains(*s))),
            Region::Sites(v) => Box::new(v.iter().copied()),
        }
    }

    pub fn site_count(&self) -> usize {
        match self {
            Region::Box(b) => b.site_count(),
            Region::Ball(_) => self.sites().count(),
            Region::Sites(v) => v.len(),
        }
    }
}

/// Sites of `region` having a nearest neighbour outside it, in index order.
pub fn inner_boundary(region: &Region) -> Vec<Site> {
    region
        .sites()
        .filter(|s| s.neighbors().iter().any(|nb| !region.contains(*nb)))
        .collect()
}

/// Sites outside `region` adjacent to it, in index order.
pub fn outer_boundary(region: &Region) -> Vec<Site> {
    let bb = region.bounding_box().grow(1);
    bb.sites()
        .filter(|s| !region.contains(*s) && s.neighbors().iter().any(|nb| region.contains(*nb)))
        .collect()
}

/// Legendre's three-square criterion: `m ≥ 0` is a sum of three integer
/// squares iff it is not of the form `4^a (8b+7)`.
pub fn is_sum_of_three_squares(m: i64) -> bool {
    if m < 0 {
        return false;
    }
    let mut m = m;
    while m % 4 == 0 && m > 0 {
        m /= 4;
    }
    m % 8 != 7
}

/// Brute-force witness `(a,b,c)` with `a²+b²+c² = m`, `a ≥ b ≥ c ≥ 0`.
pub fn three_square_witness(m: i64) -> Option<(i64, i64, i64)> {
    let r = (m as f64).sqrt() as i64 + 1;
    for a in (0..=r).rev() {
        let ra = m - a * a;
        if ra < 0 {
            continue;
        }
        for b in 0..=a {
            let rb = ra - b * b;
            if rb < 0 {
                break;
            }
            let c = (rb as f64).sqrt() as i64;
            for cc in [c - 1, c, c + 1] {
                if cc >= 0 && cc <= b && cc * cc == rb {
                    return Some((a, b, cc));
                }
            }
        }
    }
    None
}

/// Exhaustive ascending list of admissible squared radii `r²` such that the
/// Euclidean ball of radius `r` around `x` fits inside `bounding`: every
/// `r² ≤ dmin²` attained by a lattice vector, where `dmin` is the distance
/// from `x` to the nearest face. Empty when even `r² = 1` does not fit.
pub fn admissible_radii(x: Site, bounding: &BoxSpec) -> Vec<i64> {
    assert!(bounding.contains(x), "center must lie inside the bounding box");
    let dmin = bounding.min_face_distance(x) as i64;
    (1..=dmin * dmin).filter(|&m| is_sum_of_three_squares(m)).collect()
}
