//! The fundamental spherical triangle and closed-form support values.
//!
//! The fundamental triangle is the unit-sphere patch cut out by the cone
//! `x ≥ y ≥ z ≥ 0`; its vertices are `(1,0,0)`, `(1,1,1)/√3` and
//! `(1,1,0)/√2`. The key quantity is the support value
//! `maxdot(T, q) = max { q·u : u ∈ T }`, from which the Euclidean distance
//! of a point to the radius-`r` scaling of a triangle follows as
//! `d(q, rT)² = ‖q‖² + r² − 2r·maxdot(T, q)`.

use super::group::TriangleIndex;

/// Vertices of the fundamental triangle, unit length.
pub fn fundamental_vertices() -> [[f64; 3]; 3] {
    let s3 = 3.0_f64.sqrt();
    let s2 = 2.0_f64.sqrt();
    [[1.0, 0.0, 0.0], [1.0 / s3, 1.0 / s3, 1.0 / s3], [1.0 / s2, 1.0 / s2, 0.0]]
}

/// Arc lengths of the three sides, for vertex pairs (0,1), (0,2), (1,2).
/// The longest is `arccos(1/√3) ≈ 0.9553`, strictly below 0.96.
pub fn fundamental_arc_lengths() -> [f64; 3] {
    let v = fundamental_vertices();
    [arc(v[0], v[1]), arc(v[0], v[2]), arc(v[1], v[2])]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn arc(a: [f64; 3], b: [f64; 3]) -> f64 {
    dot(a, b).clamp(-1.0, 1.0).acos()
}

/// `max { q·u : u in the fundamental triangle }`.
///
/// If the direction of `q` lies in the cone `x ≥ y ≥ z ≥ 0` the maximum is
/// `‖q‖` (attained at `q/‖q‖`); otherwise it is attained on one of the three
/// boundary arcs, each maximized in closed form: on the arc from `a` to `b`
/// the value `q·u(s)` is `P·cos s + Q·sin s`, compared at both endpoints and
/// at the interior stationary angle when it falls inside the arc.
pub fn max_dot_fundamental(q: [f64; 3]) -> f64 {
    if q[0] >= q[1] && q[1] >= q[2] && q[2] >= 0.0 {
        return norm(q);
    }
    let v = fundamental_vertices();
    let mut best = f64::NEG_INFINITY;
    for (a, b) in [(v[0], v[1]), (v[0], v[2]), (v[1], v[2])] {
        best = best.max(max_dot_on_arc(q, a, b));
    }
    best
}

fn max_dot_on_arc(q: [f64; 3], a: [f64; 3], b: [f64; 3]) -> f64 {
    let cphi = dot(a, b).clamp(-1.0, 1.0);
    let phi = cphi.acos();
    let sphi = phi.sin();
    let qa = dot(q, a);
    let qb = dot(q, b);
    let mut best = qa.max(qb);
    if sphi > 0.0 {
        // u(s) = (sin(φ−s)·a + sin(s)·b) / sin φ for s ∈ [0, φ].
        let p = qa;
        let w = (qb - qa * cphi) / sphi;
        let s = w.atan2(p);
        if s > 0.0 && s < phi {
            best = best.max((p * p + w * w).sqrt());
        }
    }
    best
}

/// Support value over an arbitrary triangle, reduced to the fundamental one
/// through the exact group action (so equivariance is bitwise).
pub fn max_dot_over_triangle(tri: TriangleIndex, q: [f64; 3]) -> f64 {
    max_dot_fundamental(tri.apply_inverse(q))
}

/// Euclidean distance from `q` to the radius-`r` scaling of a triangle.
pub fn distance_to_scaled(tri: TriangleIndex, q: [f64; 3], r: f64) -> f64 {
    let m = max_dot_over_triangle(tri, q);
    (dot(q, q) + r * r - 2.0 * r * m).max(0.0).sqrt()
}
