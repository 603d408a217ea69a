//! Sphere and box target geometry.
//!
//! Two families of target sets steer the constructive walks:
//!
//! * the 24 quarter squares on the faces of a cubic box ([`quarter_squares`]),
//! * the 48 spherical triangles tiling the unit sphere under the octahedral
//!   reflection group, together with their thickened lattice versions at
//!   radius `r` ([`thickened_triangle`]).
//!
//! All group bookkeeping is exact integer arithmetic on signed coordinate
//! permutations; only point-to-arc distances use floating point, with closed
//! forms (no iterative solvers).

mod diameter;
mod group;
mod quarter;
mod thick;
mod triangle;

pub use diameter::max_pair_distance_sq;
pub use group::{canonicalize_direction, canonicalize_site, GeometryError, TriangleIndex};
pub use quarter::{quarter_squares, QuarterSquare};
pub use thick::{coverage_check, thickened_all, thickened_triangle, CoverageReport, ThickSet};
pub use triangle::{
    distance_to_scaled, fundamental_arc_lengths, fundamental_vertices, max_dot_fundamental,
    max_dot_over_triangle,
};

/// Radius above which the thickened-triangle hop is guaranteed to contract
/// distances by the factor `lambda`: `r_min = 2t / (lambda - 0.96)`.
///
/// The chord diameter of a scaled triangle is below `0.92 r`, and a hop lands
/// within `t` of the scaled triangle, so the distance to the far endpoint
/// after a hop is at most `0.96 r + 2t`; this is `≤ lambda·r` from `r_min` on.
pub fn r_min(thickness: f64, lambda: f64) -> f64 {
    assert!(
        lambda > 0.96 && lambda < 1.0,
        "contraction factor must lie in (0.96, 1), got {lambda}"
    );
    assert!(thickness >= 0.0);
    2.0 * thickness / (lambda - 0.96)
}

/// Integer square root: largest `s ≥ 0` with `s² ≤ n`.
pub(crate) fn isqrt(n: i64) -> i64 {
    assert!(n >= 0);
    let mut s = (n as f64).sqrt() as i64;
    while s > 0 && s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isqrt_exact() {
        for n in 0..5000i64 {
            let s = isqrt(n);
            assert!(s * s <= n && (s + 1) * (s + 1) > n, "n={n}");
        }
        assert_eq!(isqrt(360000), 600);
        assert_eq!(isqrt(359999), 599);
    }

    #[test]
    fn r_min_paper_constants() {
        assert!((r_min(3.0, 0.97) - 600.0).abs() < 1e-9);
        assert!((r_min(0.25, 0.98) - 25.0).abs() < 1e-9);
    }
}
