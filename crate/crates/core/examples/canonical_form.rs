//! The canonical 3-form on R⁷: its induced metric, volume form, dual
//! 4-form and the G2 decomposition of gl(7).
//!
//! Run with `cargo run --example canonical_form`.

use g2flow::forms::phi_canonical;
use g2flow::g2::{g2_stabilizer, induce_metric};

fn main() -> g2flow::Result<()> {
    let phi = phi_canonical();
    let (metric, vol) = induce_metric(&phi)?;
    println!("φ   = {phi}");
    println!("∗φ  = {}", metric.star(&phi));
    println!("vol = {vol}");
    println!("g   = {}", metric.matrix());

    let st = g2_stabilizer(&phi, &metric)?;
    println!("dim g2 = {}", st.g2.len());
    println!(
        "q splits as {:?}, θ(q)φ has rank {}",
        st.q_dims, st.theta_q_rank
    );
    Ok(())
}
