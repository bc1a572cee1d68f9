//! The localized slope `tau(f, x, eps, delta)` over a small grid of `eps` and `delta`.
//!
//! `cargo run --example tau_table`

use ebound::slopes::TauProfile;
use ebound::{PolyhedralFunction, Settings};

fn main() -> ebound::Result<()> {
    let cfg = Settings::default();
    // max{-2x + 2, -x + 1, 2x - 5} at the right end of S_f = [1, 2.5]
    let f = PolyhedralFunction::from_rows(1, &[(&[-2.0], -2.0), (&[-1.0], -1.0), (&[2.0], 5.0)])?;
    let profile = TauProfile::new(&f, &[2.5], &cfg)?;
    println!("interior branch: {}", profile.is_interior_branch());

    let deltas = [0.0, 0.5, 1.0, 2.0];
    print!("{:>8}", "eps");
    for d in deltas {
        print!("{:>12}", format!("delta={d}"));
    }
    println!();
    for eps in [0.0, 0.5, 1.0, 1.5, 2.5] {
        print!("{eps:>8}");
        for d in deltas {
            print!("{:>12.6}", profile.eval(eps, d)?.value());
        }
        println!();
    }
    Ok(())
}
