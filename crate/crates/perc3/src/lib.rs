//! Travel times in supercritical site percolation on the 3D cubic lattice.
//!
//! A site configuration on the box `Λ(n) = [-n,n]³` declares each site open or
//! closed. The travel time `T(x,y)` is the least number of closed sites on a
//! nearest-neighbour path from `x` to `y`, both endpoints included. This crate
//! provides the machinery to study `T` constructively at desk scale:
//!
//! * [`lattice`] — sites, boxes, balls, boundaries, seeded configurations and
//!   their binary file format;
//! * [`traveltime`] — node-weighted 0–1 BFS distance fields and point-to-set
//!   queries with path witnesses;
//! * [`clusters`] — open clusters, onion-layer growth and boundary reach;
//! * [`geometry`] — quarter squares on box faces and the 48-triangle
//!   octahedral tiling of the sphere with thickened target sets;
//! * [`events`] — box/ball reachability events behind the walk constructions;
//! * [`walks`] — the cube waypoint walk, the shrinking-sphere walk and their
//!   composition into an end-to-end path;
//! * [`montecarlo`] — seeded, thread-count-independent experiments producing
//!   CSV/JSON reports;
//! * [`oracle`] — slow reference implementations used to cross-check the
//!   fast ones in test suites.

pub mod clusters;
pub mod events;
pub mod geometry;
pub mod lattice;
pub mod montecarlo;
pub mod oracle;
pub mod traveltime;
pub mod walks;

pub use lattice::{BallSpec, BoxSpec, Configuration, Region, Site};
pub use montecarlo::ExperimentReport;
pub use traveltime::{DistanceField, PathWitness, UNREACHABLE};
pub use walks::{WalkBudget, WalkError, WalkOutcome, WalkTrace};
