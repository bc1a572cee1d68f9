//! Rigidity: small strong perturbations that can only shift `f` by a constant.
//!
//! `cargo run --example rigidity`

use ebound::perturb::rigidity_check;
use ebound::slopes::global_boundary_slope;
use ebound::{PolyhedralFunction, Settings};

fn main() -> ebound::Result<()> {
    let cfg = Settings::default();
    let cases = [
        (
            "max{x, -1}",
            PolyhedralFunction::from_rows(1, &[(&[1.0], 0.0), (&[0.0], 1.0)])?,
        ),
        (
            "|x|",
            PolyhedralFunction::from_rows(1, &[(&[1.0], 0.0), (&[-1.0], 0.0)])?,
        ),
        (
            "max{-2x + 2, -x + 1, 2x - 5}",
            PolyhedralFunction::from_rows(1, &[(&[-2.0], -2.0), (&[-1.0], -1.0), (&[2.0], 5.0)])?,
        ),
    ];
    for (name, f) in &cases {
        let bd = global_boundary_slope(f, &cfg)?;
        for eps in [0.0, 0.5 * bd.value()] {
            let r = rigidity_check(f, eps, &cfg)?;
            match r.witness_cell {
                Some(cell) => println!("{name:<28} eps = {eps:<5} rigid, cell {cell}"),
                None => println!("{name:<28} eps = {eps:<5} not rigid"),
            }
        }
    }
    Ok(())
}
