//! The (a,b,c) bracket-flow ODE: convergence to the soliton of each
//! stratum and monotonicity of F = f/g. Writes the first trajectory as
//! CSV to stdout when called with `--csv`.
//!
//! Run with `cargo run --example bracket_flow`.

use g2flow::flow::{bracket_flow_abc, f_monotonicity_probe, BracketPoint};

fn main() -> g2flow::Result<()> {
    let starts = [
        BracketPoint::new(2.0, 1.0, 0.5),
        BracketPoint::new(2.0, 1.0, 0.0),
        BracketPoint::new(2.0, 0.0, 0.0),
    ];
    if std::env::args().any(|a| a == "--csv") {
        let traj = bracket_flow_abc(starts[0], 5.0, 1e-3, 100)?;
        traj.write_csv(std::io::stdout().lock())
            .map_err(|e| g2flow::Error::Invalid(e.to_string()))?;
        return Ok(());
    }
    for p0 in starts {
        let traj = bracket_flow_abc(p0, 50.0, 1e-3, 1000)?;
        let mono = f_monotonicity_probe(&traj);
        let end = traj.last().point.normalized();
        println!(
            "start {:?}\n  μ/|μ| -> ({:.6}, {:.6}, {:.6})\n  F: {:.6} -> {:.6}, non-decreasing {}",
            (p0.a, p0.b, p0.c),
            end.a,
            end.b,
            end.c,
            mono.first,
            mono.last,
            mono.non_decreasing
        );
    }
    Ok(())
}
