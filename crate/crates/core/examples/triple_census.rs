//! Soliton census of the three-parameter family on the normalized sphere
//! a²+b²+c² = 3, a ≥ b ≥ c ≥ 0: the detector flags exactly three points.
//!
//! Run with `cargo run --release --example triple_census`.

use g2flow::catalog;
use g2flow::soliton::detect;
use g2flow::Tolerances;

fn main() -> g2flow::Result<()> {
    let tol = Tolerances::default();
    let n = 12;
    let mut found = Vec::new();
    let mut scanned = 0;
    // integer lattice a ≥ b ≥ c ≥ 0 projected to the sphere, so the rays
    // through (1,1,1), (1,1,0) and (1,0,0) are on the grid
    for i in 1..=n {
        for j in 0..=i {
            for k in 0..=j {
                let (a, b, c) = catalog::normalize_triple(i as f64, j as f64, k as f64);
                let s = catalog::triple_family(a, b, c)?.structure;
                let cert = detect(&s, &s.torsion()?, &tol)?;
                scanned += 1;
                let key = format!("({a:.4}, {b:.4}, {c:.4})");
                if cert.kind.is_soliton() && !found.iter().any(|(k, _, _)| *k == key) {
                    found.push((key, cert.kind, cert.c));
                }
            }
        }
    }
    println!("scanned {scanned} lattice points; distinct solitons:");
    for (p, kind, c) in &found {
        println!("  {p}  {:<9}  c = {c:.6}", kind.as_str());
    }
    Ok(())
}
