//! Thickened spherical-triangle target sets and the boundary coverage check.
//!
//! For a triangle `T` of the octahedral tiling and an admissible squared
//! radius `r²`, the thickened set collects the lattice sites of the ball
//! `center + B_r` lying within Euclidean distance `t` of the scaled patch
//! `r·T`. These are the waypoint target sets of the sphere walk; the
//! coverage check certifies that the 48 of them jointly contain the whole
//! inner boundary of the ball.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::group::TriangleIndex;
use super::isqrt;
use super::triangle::distance_to_scaled;
use crate::lattice::Site;

/// Lattice sites of `center + B_r` within distance `t` of the scaled
/// triangle `r·T`. Sites are stored absolute and sorted.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ThickSet {
    pub center: Site,
    pub r_squared: i64,
    pub triangle: TriangleIndex,
    pub thickness: f64,
    pub sites: Vec<Site>,
}

impl ThickSet {
    pub fn contains(&self, s: Site) -> bool {
        self.sites.binary_search(&s).is_ok()
    }
}

/// Membership test for the canonical (fundamental) triangle, relative to the
/// ball center.
fn canonical_member(v: Site, r_squared: i64, r: f64, t: f64) -> bool {
    v.norm_sq() <= r_squared && distance_to_scaled(TriangleIndex::identity(), v.to_f64(), r) <= t
}

/// Enumerates the thick set of the fundamental triangle around the origin.
///
/// Candidate generation walks the spherical shell `r−t ≤ ‖v‖ ≤ r` column by
/// column, restricted to a wedge that provably contains the set: any `v`
/// within `t` of a patch point `p` (which has `p_x ≥ p_y ≥ p_z ≥ 0`,
/// `p_x ≥ r/√3`, `‖p‖ = r`) satisfies `v_x ≥ r/√3 − t`, `v_y, v_z ≥ −t`,
/// `v_y ≤ v_x + 2t` and `v_z ≤ v_y + 2t`. Every candidate is then tested
/// exactly.
fn canonical_sites(r_squared: i64, t: f64) -> Vec<Site> {
    let r = (r_squared as f64).sqrt();
    let inner = (r - t).max(0.0);
    let inner_sq = (inner * inner).floor() as i64;
    let x_lo = ((r / 3.0_f64.sqrt()) - t).floor() as i64;
    let x_hi = (r + t).ceil() as i64;
    let t_floor = (-t).floor() as i64;
    let mut out = Vec::new();
    for x in x_lo.max(t_floor)..=x_hi {
        let y_hi = ((x as f64) + 2.0 * t).floor() as i64;
        for y in t_floor..=y_hi {
            let cols = r_squared - x * x - y * y;
            if cols < 0 {
                continue;
            }
            let zh = isqrt(cols);
            let z_cap = ((y as f64) + 2.0 * t).floor() as i64;
            // Shell constraint: |z| ≥ zs where zs is the inner-radius height.
            let shell = inner_sq - x * x - y * y;
            let zs = if shell > 0 { isqrt(shell - 1) + 1 } else { 0 };
            let mut push = |z: i64| {
                let s = Site::new(x as i32, y as i32, z as i32);
                if canonical_member(s, r_squared, r, t) {
                    out.push(s);
                }
            };
            if zs == 0 {
                for z in (-zh).max(t_floor)..=zh.min(z_cap) {
                    push(z);
                }
            } else {
                for z in zs..=zh.min(z_cap) {
                    push(z);
                }
                for z in (-zh).max(t_floor)..=-zs {
                    push(z);
                }
            }
        }
    }
    out.sort();
    out
}

/// The thickened set for one triangle, built by mapping the fundamental
/// enumeration through the exact group action.
pub fn thickened_triangle(center: Site, r_squared: i64, tri: TriangleIndex, t: f64) -> ThickSet {
    assert!(r_squared >= 1, "radius must be positive");
    assert!(t >= 0.0, "thickness must be non-negative");
    let mut sites: Vec<Site> = canonical_sites(r_squared, t)
        .into_iter()
        .map(|v| tri.apply_site(v).add(center))
        .collect();
    sites.sort();
    ThickSet { center, r_squared, triangle: tri, thickness: t, sites }
}

/// All 48 thickened sets, sharing one fundamental enumeration.
pub fn thickened_all(center: Site, r_squared: i64, t: f64) -> Vec<ThickSet> {
    assert!(r_squared >= 1, "radius must be positive");
    assert!(t >= 0.0, "thickness must be non-negative");
    let canonical = canonical_sites(r_squared, t);
    TriangleIndex::all()
        .map(|tri| {
            let mut sites: Vec<Site> =
                canonical.iter().map(|&v| tri.apply_site(v).add(center)).collect();
            sites.sort();
            ThickSet { center, r_squared, triangle: tri, thickness: t, sites }
        })
        .collect()
}

/// Result of checking that the 48 thickened sets cover the inner boundary of
/// the ball.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct CoverageReport {
    pub r_squared: i64,
    pub thickness: f64,
    pub holds: bool,
    pub boundary_sites: u64,
    /// Largest distance from a boundary site to its nearest scaled triangle.
    pub max_distance: f64,
    pub worst_site: Site,
}

/// Distance from a site to the nearest of the 48 scaled triangles. The
/// canonical triangle of the site's own direction attains the minimum; the
/// remaining 47 are consulted only when the canonical value exceeds the
/// threshold, so a borderline site is never declared uncovered on the
/// strength of a single evaluation.
fn nearest_triangle_distance(s: Site, r: f64, t: f64) -> f64 {
    let mut w = [s.x.abs() as f64, s.y.abs() as f64, s.z.abs() as f64];
    w.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let d = distance_to_scaled(TriangleIndex::identity(), w, r);
    if d <= t {
        return d;
    }
    let q = s.to_f64();
    TriangleIndex::all()
        .map(|tri| distance_to_scaled(tri, q, r))
        .fold(d, f64::min)
}

/// Per-column boundary heights: a site `(x, y, z)` of the ball is on the
/// inner boundary iff `|z|` equals the column height `h` (its vertical
/// neighbor leaves the ball) or `|z|` exceeds the smallest height `hn` of
/// the four lateral neighbor columns (a lateral neighbor leaves the ball).
fn column_heights(r_squared: i64, x: i64, y: i64) -> Option<(i64, i64)> {
    let rem = r_squared - x * x - y * y;
    if rem < 0 {
        return None;
    }
    let h = isqrt(rem);
    let hn = [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)]
        .into_iter()
        .map(|(nx, ny)| {
            let rem = r_squared - nx * nx - ny * ny;
            if rem < 0 {
                -1
            } else {
                isqrt(rem)
            }
        })
        .min()
        .unwrap();
    Some((h, hn))
}

struct SliceStat {
    count: u64,
    max_distance: f64,
    worst: Site,
}

fn scan_slice(r_squared: i64, t: f64, x: i64) -> SliceStat {
    let r = (r_squared as f64).sqrt();
    let mut stat = SliceStat { count: 0, max_distance: f64::NEG_INFINITY, worst: Site::ORIGIN };
    let y_lim = isqrt(r_squared - x * x);
    for y in -y_lim..=y_lim {
        let Some((h, hn)) = column_heights(r_squared, x, y) else {
            continue;
        };
        let mut visit = |z: i64| {
            let s = Site::new(x as i32, y as i32, z as i32);
            let d = nearest_triangle_distance(s, r, t);
            stat.count += 1;
            if d > stat.max_distance || (d == stat.max_distance && s < stat.worst) {
                stat.max_distance = d;
                stat.worst = s;
            }
        };
        if hn >= h {
            visit(h);
            if h > 0 {
                visit(-h);
            }
        } else {
            for z in (hn + 1).max(0)..=h {
                visit(z);
            }
            for z in -h..=-(hn + 1).max(1) {
                visit(z);
            }
        }
    }
    stat
}

/// Checks that every site of the inner boundary of `B_r` lies in at least
/// one of the 48 thickened sets of thickness `t`.
pub fn coverage_check(r_squared: i64, t: f64) -> CoverageReport {
    assert!(r_squared >= 1, "radius must be positive");
    assert!(t >= 0.0, "thickness must be non-negative");
    let r_lim = isqrt(r_squared);
    let slices: Vec<SliceStat> = (-r_lim..=r_lim)
        .into_par_iter()
        .map(|x| scan_slice(r_squared, t, x))
        .collect();
    let mut total = 0u64;
    let mut max_distance = f64::NEG_INFINITY;
    let mut worst = Site::ORIGIN;
    for s in slices {
        total += s.count;
        if s.count > 0 && (s.max_distance > max_distance
            || (s.max_distance == max_distance && s.worst < worst))
        {
            max_distance = s.max_distance;
            worst = s.worst;
        }
    }
    CoverageReport {
        r_squared,
        thickness: t,
        holds: max_distance <= t,
        boundary_sites: total,
        max_distance,
        worst_site: worst,
    }
}
