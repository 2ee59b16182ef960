//! RK4 Laplacian flow on Bryant's example and on the shrinking H-type
//! soliton, compared with the closed-form self-similar solutions.
//!
//! Run with `cargo run --release --example laplacian_flow`.

use g2flow::catalog;
use g2flow::flow::{
    laplacian_flow, laplacian_flow_with, singularity_time, soliton_solution, FlowOptions,
};
use g2flow::forms::KForm;
use g2flow::soliton::detect;
use g2flow::Tolerances;

fn main() -> g2flow::Result<()> {
    let s = catalog::bryant_homogeneous()?.structure;
    let traj = laplacian_flow_with(
        &s,
        FlowOptions {
            t_end: 0.1,
            dt: 1e-4,
            sample_every: 200,
        },
    )?;
    println!("Bryant: φ(t) = e^(12t)φ + (1 - e^(12t))e123");
    for smp in &traj.samples {
        let e = (12.0 * smp.t).exp();
        let exact = catalog::bryant_phi().scaled(e) + KForm::parse("e123")?.scaled(1.0 - e);
        println!(
            "  t = {:.3}  |τ|² = {:>10.4}  F = {:.6}  error {:.1e}",
            smp.t,
            smp.tau_norm2,
            smp.f.unwrap_or(f64::NAN),
            smp.phi.dist(&exact)
        );
    }

    let s = catalog::htype_family(0.25)?.structure;
    let cert = detect(&s, &s.torsion()?, &Tolerances::default())?;
    let big_t = singularity_time(cert.c).expect("shrinking");
    println!(
        "H-type a = 1/4: shrinking with c = {}, singular at T = {big_t:.6}",
        cert.c
    );
    let traj = laplacian_flow_with(
        &s,
        FlowOptions {
            t_end: 0.33,
            dt: 1e-4,
            sample_every: 300,
        },
    )?;
    for smp in &traj.samples {
        let exact = soliton_solution(&s, &cert, smp.t)?;
        println!(
            "  t = {:.3}  |τ|² = {:>12.4}  error {:.1e}",
            smp.t,
            smp.tau_norm2,
            smp.phi.dist(&exact)
        );
    }
    let past = laplacian_flow(&s, 0.4, 1e-3)?;
    println!("  integrating past T stops at t = {:?}", past.singular_at);
    Ok(())
}
