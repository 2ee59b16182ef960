//! The one-parameter H-type family: soliton constant c(a), the certified
//! derivation, and the scale-invariant functional F.
//!
//! Run with `cargo run --example htype_solitons`.

use g2flow::catalog;
use g2flow::soliton::{detect, verify_selfsimilar};
use g2flow::Tolerances;

fn main() -> g2flow::Result<()> {
    println!(
        "{:>6} {:>10} {:>10} {:>11} {:>12}  diag D",
        "a", "F", "c", "kind", "self-sim"
    );
    for a in [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0] {
        let s = catalog::htype_family(a)?.structure;
        let t = s.torsion()?;
        let cert = detect(&s, &t, &Tolerances::default())?;
        let check = verify_selfsimilar(&s, &t, &cert);
        let d: Vec<String> = (0..7).map(|i| format!("{:.3}", cert.d[(i, i)])).collect();
        println!(
            "{a:>6} {:>10.6} {:>10.6} {:>11} {:>12.1e}  [{}]",
            t.f.unwrap_or(f64::NAN),
            cert.c,
            cert.kind.as_str(),
            check.residual,
            d.join(", ")
        );
    }
    Ok(())
}
