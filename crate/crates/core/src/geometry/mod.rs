//! Small-dimension convex geometry: polytopes given by generators, polyhedra given by
//! inequalities, and the mixed strict/non-strict LP used to decide open conditions.

mod lp;
mod polyhedron;
mod polytope;

pub use lp::{strict_lp_feasible, LinearRow, MixedSystem, RowKind, StrictFeasibility};
pub use polyhedron::{
    lineality_space, project_onto_polyhedron, recession_nontrivial, vertex_enumeration, Halfspace,
    Hyperplane, Polyhedron, Projection, Projector, Recession,
};
pub(crate) use polyhedron::{recession_box_vertices, vertices_uncapped};
pub use polytope::{
    boundary_distance, boundary_nearest, distance_to_polytope, facet_enumeration, min_norm_point,
    Facet, FacetList, MinNormPoint, Polytope,
};
