//! Which perturbations of `max{x, -1}` belong to the global perturbation families.
//!
//! `cargo run --example global_membership`

use ebound::perturb::{
    global_radius_bounds, is_global_member, Candidate, GlobalFamily, LinearPerturbation,
};
use ebound::{PolyhedralFunction, Settings};

fn main() -> ebound::Result<()> {
    let cfg = Settings::default();
    let f = PolyhedralFunction::from_rows(1, &[(&[1.0], 0.0), (&[0.0], 1.0)])?;
    let (lo, hi) = global_radius_bounds(&f, &cfg)?;
    println!("radius between {lo} and {hi}");

    let candidates = [
        ("shift by 0.5", Candidate::Constant(0.5)),
        (
            "slope 0.5 at 0",
            Candidate::Linear(LinearPerturbation::new(vec![0.0], vec![0.5])),
        ),
        (
            "slope -0.2 at 0",
            Candidate::Linear(LinearPerturbation::new(vec![0.0], vec![-0.2])),
        ),
    ];
    let families = [
        GlobalFamily::Strong,
        GlobalFamily::Weak,
        GlobalFamily::StrongLinear,
        GlobalFamily::WeakLinear,
    ];
    for (label, cand) in &candidates {
        for fam in families {
            let m = is_global_member(&f, cand, 0.6, fam, &cfg)?;
            let why = match (&m.witness, &m.reason) {
                (Some(w), _) => format!("witness x = {:?}, xi = {}", w.x, w.xi),
                (None, Some(r)) => r.clone(),
                _ => String::new(),
            };
            println!(
                "{label:<16} {:<14} {:<5} {why}",
                format!("{fam:?}"),
                m.member
            );
        }
    }
    Ok(())
}
