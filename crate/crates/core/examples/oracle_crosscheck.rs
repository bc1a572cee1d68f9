//! Exact moduli against the Monte-Carlo ratio estimates on random instances.
//!
//! `cargo run --release --example oracle_crosscheck`

use ebound::oracle::{estimate_er_global, estimate_er_local, McConfig};
use ebound::slopes::{global_outer_slope, local_error_bound_modulus};
use ebound::{AffinePiece, PolyhedralFunction, Region, Settings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> ebound::Result<()> {
    let cfg = Settings::default();
    let mc = McConfig {
        samples: 40_000,
        ..McConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut shown = 0;
    while shown < 6 {
        let pieces = (0..rng.gen_range(2..=5))
            .map(|_| {
                let a = vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
                AffinePiece::new(a, rng.gen_range(-2.0..2.0))
            })
            .collect();
        let f = PolyhedralFunction::new(2, pieces)?;
        let Some(pat) = f
            .occurring_patterns(Region::ZeroLevel, &cfg)?
            .into_iter()
            .next()
        else {
            continue;
        };
        shown += 1;
        let exact = local_error_bound_modulus(&f, &pat.point, &cfg)?.value();
        let est = estimate_er_local(&f, &pat.point, &mc, &cfg)?.value;
        let g_exact = global_outer_slope(&f, &cfg)?.value();
        let g_est = estimate_er_global(&f, &mc, &cfg)?.value;
        println!(
            "{} pieces: local {exact:.5} ~ {est:.5}   global {g_exact:.5} ~ {g_est:.5}",
            f.num_pieces()
        );
    }
    Ok(())
}
