//! Almost-abelian Lie algebras R⋉_A R⁶: the closed structure ω∧e7 + ρ⁺ for
//! the two families of traceless A, their functional F and soliton type.
//!
//! Run with `cargo run --example almost_abelian`.

use g2flow::catalog;
use g2flow::soliton::detect;
use g2flow::Tolerances;

fn main() -> g2flow::Result<()> {
    let tol = Tolerances::default();
    for (label, rec) in [
        ("mu-a", catalog::mu_a(0.0)?),
        ("mu-a", catalog::mu_a(0.5)?),
        ("mu-a", catalog::mu_a(1.0)?),
        ("mu-a", catalog::mu_a(2.0)?),
        ("mu-b", catalog::mu_b(0.5)?),
        ("mu-b", catalog::mu_b(2.0)?),
    ] {
        let s = &rec.structure;
        let t = s.torsion()?;
        let cert = detect(s, &t, &tol)?;
        println!(
            "{label:<5} {:<14} |τ|² = {:>8.4}  F = {:>8.6}  {}",
            rec.name,
            t.tau_norm2,
            t.f.unwrap_or(f64::NAN),
            cert.kind.as_str()
        );
    }
    Ok(())
}
