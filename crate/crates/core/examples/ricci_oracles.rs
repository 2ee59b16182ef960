//! Four independent Ricci computations on a random closed structure in a
//! non-orthonormal basis: the torsion formula, the j- and Q-operator
//! formulas, and the Koszul formula for the left-invariant metric.
//!
//! Run with `cargo run --example ricci_oracles`.

use g2flow::catalog;
use g2flow::forms::{phi_canonical, Matrix7};
use g2flow::liecoframe::ricci_koszul;
use g2flow::G2Structure;

fn main() -> g2flow::Result<()> {
    let lie = catalog::triple_lie(1.3, 0.4, -0.9);
    // a fixed, well-conditioned basis change
    let p = Matrix7::from_fn(|i, j| {
        if i == j {
            1.0
        } else {
            0.1 * ((3 * i + 5 * j) % 7) as f64 - 0.3
        }
    });
    let lie = lie.change_basis(&p)?;
    let s = G2Structure::from_lie(&lie, phi_canonical().pullback(&p))?;
    let t = s.torsion()?;

    let koszul = ricci_koszul(&lie, s.metric());
    let diffs = [
        ("j-formula", (s.ricci_via_j(&t)? - t.ricci).amax()),
        ("Q-formula", (s.ricci_via_q(&t) - t.ricci).amax()),
        ("Koszul", (koszul.operator - t.ricci).amax()),
    ];
    println!("Ric eigenvalues {:?}", s.self_adjoint_eigenvalues(&t.ricci));
    println!(
        "R = {:.12}, -|τ|²/2 = {:.12}, Koszul R = {:.12}",
        t.scalar,
        -t.tau_norm2 / 2.0,
        koszul.scalar
    );
    for (name, d) in diffs {
        println!("max |Ric_torsion - Ric_{name}| = {d:.2e}");
    }
    Ok(())
}
