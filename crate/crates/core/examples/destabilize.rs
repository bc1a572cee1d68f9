//! A linear perturbation just above the stability radius that destroys the error bound.
//!
//! `cargo run --example destabilize -- 1.2`

use ebound::perturb::{local_radius, synthesize_destabilizer};
use ebound::slopes::local_error_bound_modulus;
use ebound::{PolyhedralFunction, Settings};

fn main() -> ebound::Result<()> {
    let eps: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("eps must be a number"))
        .unwrap_or(1.2);
    let f = PolyhedralFunction::from_rows(1, &[(&[-2.0], -2.0), (&[-1.0], -1.0), (&[2.0], 5.0)])?;
    let cfg = Settings::default();
    let x = [1.0];

    let radius = local_radius(&f, &x, &cfg)?;
    println!("radius of error bound stability at x = 1: {radius}");
    if eps <= radius.value() {
        println!("eps = {eps} is within the radius, every small perturbation keeps a bound");
        return Ok(());
    }

    let d = synthesize_destabilizer(&f, &x, eps, None, &cfg)?;
    println!(
        "perturbation slope {:?} (size below {eps})",
        d.perturbation.slope
    );
    println!(
        "xi = {}, claimed Er g <= {}",
        d.certificate.xi, d.certificate.claimed_er_bound
    );
    println!("verified Er g = {}", d.certificate.verified_er);
    println!(
        "recomputed     {}",
        local_error_bound_modulus(&d.g, &x, &cfg)?
    );
    for (i, p) in d.g.pieces().iter().enumerate() {
        println!("  g_{i}(x) = {} x {:+}", p.gradient[0], -p.offset);
    }
    Ok(())
}
