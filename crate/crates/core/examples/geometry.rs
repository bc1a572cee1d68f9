//! The geometric kernels: nearest point of a polytope to the origin, its facets and
//! boundary, and projection onto a polyhedron.
//!
//! `cargo run --example geometry`

use ebound::geometry::{
    boundary_nearest, facet_enumeration, min_norm_point, project_onto_polyhedron,
    vertex_enumeration,
};
use ebound::{Polyhedron, Polytope, Settings};

fn main() -> ebound::Result<()> {
    let cfg = Settings::default();

    let tri = Polytope::new(2, vec![vec![1.0, -1.0], vec![1.0, 2.0], vec![3.0, 0.5]])?;
    let m = min_norm_point(&tri, &cfg)?;
    println!("min-norm point {:?} at distance {:.6}", m.point, m.dist);
    println!("  weights {:?}", m.weights);

    for facet in facet_enumeration(&tri, &cfg)?.facets {
        println!("facet <{:?}, y> <= {:.4}", facet.normal, facet.offset);
    }

    // the origin lies inside this square, so the boundary is what matters
    let square = Polytope::new(
        2,
        vec![
            vec![-1.0, -0.5],
            vec![2.0, -0.5],
            vec![2.0, 1.0],
            vec![-1.0, 1.0],
        ],
    )?;
    let b = boundary_nearest(&square, &[0.0, 0.0], &cfg)?;
    println!("nearest boundary point {:?}, distance {}", b.point, b.dist);

    // {x + y <= 1, x >= 0, y >= 0}
    let q = Polyhedron::whole_space(2)
        .with_halfspace(&[1.0, 1.0], 1.0)
        .with_halfspace(&[-1.0, 0.0], 0.0)
        .with_halfspace(&[0.0, -1.0], 0.0);
    let p = project_onto_polyhedron(&q, &[2.0, 0.5], &cfg)?;
    println!(
        "projection of (2, 0.5): {:?} at distance {:.6}",
        p.point.unwrap(),
        p.dist
    );
    println!("vertices {:?}", vertex_enumeration(&q, &cfg)?);
    Ok(())
}
