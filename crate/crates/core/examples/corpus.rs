//! Runs the built-in instance corpus through every known-value and oracle check.
//!
//! `cargo run --release --example corpus`

use ebound::cli::{verify_corpus, INSTANCES};
use ebound::oracle::McConfig;
use ebound::Settings;

fn main() {
    println!("{} instances", INSTANCES.len());
    let mc = McConfig {
        samples: 20_000,
        ..McConfig::default()
    };
    let checks = verify_corpus(&mc, &Settings::default());
    for c in &checks {
        let mark = if c.pass { "ok  " } else { "FAIL" };
        println!(
            "{mark} {:<12} {:<28} {} vs {}",
            c.instance, c.quantity, c.expected, c.observed
        );
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("{} checks, {failed} failed", checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
