//! Error bound moduli of `max{-2x + 2, -x + 1, 2x - 5}` on the real line.
//!
//! `cargo run --example slopes`

use ebound::slopes::{full_report, global_boundary_slope, global_outer_slope};
use ebound::{PolyhedralFunction, Region, Settings};

fn main() -> ebound::Result<()> {
    let f = PolyhedralFunction::from_rows(1, &[(&[-2.0], -2.0), (&[-1.0], -1.0), (&[2.0], 5.0)])?;
    let cfg = Settings::default();

    // S_f = [1, 2.5]; both endpoints are on the zero level
    for x in [1.0, 2.5] {
        let r = full_report(&f, Some(&[x]), &cfg)?;
        println!(
            "x = {x}: Er f = {}, |df|_bd = {}",
            r.er_local.unwrap(),
            r.boundary_local.unwrap()
        );
    }

    println!("outer slope    {}", global_outer_slope(&f, &cfg)?);
    println!("boundary slope {}", global_boundary_slope(&f, &cfg)?);

    for pat in f.occurring_patterns(Region::Positive, &cfg)? {
        println!(
            "active set {} occurs with f > 0 at {:?}",
            pat.set, pat.point
        );
    }
    Ok(())
}
