//! Bryant's homogeneous example on a coframe that is not a Lie algebra
//! basis, and its solvable realisation: torsion, Ricci, and the
//! extremally Ricci-pinched check.
//!
//! Run with `cargo run --example bryant`.

use g2flow::catalog;
use g2flow::Tolerances;

fn main() -> g2flow::Result<()> {
    for rec in [catalog::bryant_homogeneous()?, catalog::bryant_solvable()?] {
        let s = &rec.structure;
        let t = s.torsion()?;
        let report = s.classify(&t, &Tolerances::default());
        println!("== {}", rec.name);
        println!("τ        = {}", t.tau);
        println!("|τ|²     = {}", t.tau_norm2);
        println!("Δφ       = {}", t.dtau);
        println!("∗(τ∧τ)   = {}", t.star_tau_tau);
        println!("Ric eig  = {:?}", report.ricci_eigenvalues);
        println!("R = {}, F = {:?}, ERP = {}", t.scalar, t.f, report.erp);
        for check in rec.verify(&Tolerances::default())? {
            println!("  {:<16} deviation {:.1e}", check.quantity, check.deviation);
        }
    }
    Ok(())
}
