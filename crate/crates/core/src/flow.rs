//! Laplacian flow `∂φ/∂t = Δφ = dτ` on a fixed coframe, the closed-form
//! soliton solutions, and the `(a,b,c)` bracket-flow ODE.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{KForm, Matrix7};
use crate::g2::{induce_metric, G2Structure};
use crate::liecoframe::CoframeAlgebra;
use crate::soliton::SolitonCertificate;

/// `|τ|²` beyond which the flow is reported singular.
pub const BLOWUP_TAU_NORM2: f64 = 1e12;

#[derive(Clone, Debug, Serialize)]
pub struct FlowSample {
    pub t: f64,
    pub phi: KForm,
    pub tau_norm2: f64,
    /// Scalar curvature from the trace of the Ricci operator.
    pub scalar: f64,
    pub f: Option<f64>,
    pub closed_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowTrajectory {
    pub samples: Vec<FlowSample>,
    /// Time at which the metric degenerated or `|τ|²` blew up.
    pub singular_at: Option<f64>,
}

impl FlowTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &FlowSample {
        self.samples
            .last()
            .expect("trajectory starts with the initial sample")
    }

    /// CSV with columns `t`, the 35 coefficients of `φ`, `tau_norm2`, `R`,
    /// `F`, `closed_residual`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend(crate::forms::MultiIndex::all(3).map(|i| i.to_string()));
        header.extend(["tau_norm2", "R", "F", "closed_residual"].map(String::from));
        writeln!(w, "{}", header.join(","))?;
        for s in &self.samples {
            let mut row = vec![fmt_f(s.t)];
            row.extend(s.phi.coeffs().iter().map(|&c| fmt_f(c)));
            row.push(fmt_f(s.tau_norm2));
            row.push(fmt_f(s.scalar));
            row.push(s.f.map_or_else(|| "nan".into(), fmt_f));
            row.push(fmt_f(s.closed_residual));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Seventeen significant digits: enough to round-trip every `f64`.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Copy, Debug)]
pub struct FlowOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Record every n-th step (the final step is always recorded).
    pub sample_every: usize,
}

impl FlowOptions {
    pub fn new(t_end: f64, dt: f64) -> Self {
        FlowOptions {
            t_end,
            dt,
            sample_every: 1,
        }
    }
}

/// `Δφ` for an arbitrary positive 3-form on the coframe, together with `|τ|²`.
fn laplacian_of(cf: &CoframeAlgebra, phi: &KForm) -> Result<(KForm, f64)> {
    let (metric, _) = induce_metric(phi)?;
    let psi = metric.star(phi);
    let tau = -metric.star(&cf.d(&psi)?);
    let norm2 = metric.inner(&tau, &tau)?;
    if !norm2.is_finite() || norm2 > BLOWUP_TAU_NORM2 {
        return Err(Error::BlowUp(norm2));
    }
    Ok((cf.d(&tau)?, norm2))
}

fn sample(cf: &CoframeAlgebra, t: f64, phi: &KForm) -> Result<FlowSample> {
    let s = G2Structure::new(cf.clone(), phi.clone())?;
    let closed_residual = s.closed_residual();
    let tp = s.torsion()?;
    Ok(FlowSample {
        t,
        phi: phi.clone(),
        tau_norm2: tp.tau_norm2,
        scalar: tp.scalar,
        f: tp.f,
        closed_residual,
    })
}

/// Classical RK4 on the coefficients of `φ`, recomputing the metric and
/// torsion at every stage.
pub fn laplacian_flow(s: &G2Structure, t_end: f64, dt: f64) -> Result<FlowTrajectory> {
    laplacian_flow_with(s, FlowOptions::new(t_end, dt))
}

pub fn laplacian_flow_with(s: &G2Structure, opts: FlowOptions) -> Result<FlowTrajectory> {
    if opts.dt.is_nan() || opts.dt <= 0.0 || opts.t_end.is_nan() || opts.t_end < 0.0 {
        return Err(Error::Invalid(format!(
            "need dt > 0 and t_end >= 0, got dt={} t_end={}",
            opts.dt, opts.t_end
        )));
    }
    let closed = s.closed_residual();
    if closed > 1e-9 * s.phi().max_abs().max(1.0) {
        return Err(Error::NotClosed(closed));
    }
    let cf = s.coframe();
    let steps = (opts.t_end / opts.dt).round() as usize;
    let every = opts.sample_every.max(1);
    let mut phi = s.phi().clone();
    let mut samples = vec![sample(cf, 0.0, &phi)?];
    let mut singular_at = None;
    for n in 0..steps {
        let t = n as f64 * opts.dt;
        match rk4_step(cf, &phi, opts.dt) {
            Ok(next) => phi = next,
            Err(Error::NonPositiveForm | Error::BlowUp(_)) => {
                singular_at = Some(t);
                break;
            }
            Err(e) => return Err(e),
        }
        if (n + 1) % every == 0 || n + 1 == steps {
            match sample(cf, (n + 1) as f64 * opts.dt, &phi) {
                Ok(smp) => samples.push(smp),
                Err(Error::NonPositiveForm | Error::SingularSolve | Error::BlowUp(_)) => {
                    singular_at = Some((n + 1) as f64 * opts.dt);
                    break;
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(FlowTrajectory {
        samples,
        singular_at,
    })
}

fn rk4_step(cf: &CoframeAlgebra, phi: &KForm, dt: f64) -> Result<KForm> {
    let (k1, _) = laplacian_of(cf, phi)?;
    let (k2, _) = laplacian_of(cf, &phi.axpy(0.5 * dt, &k1))?;
    let (k3, _) = laplacian_of(cf, &phi.axpy(0.5 * dt, &k2))?;
    let (k4, _) = laplacian_of(cf, &phi.axpy(dt, &k3))?;
    let incr = k1 + k2.scaled(2.0) + k3.scaled(2.0) + k4;
    Ok(phi.axpy(dt / 6.0, &incr))
}

/// `T = 1/(2c)` for shrinking solitons, `None` otherwise.
pub fn singularity_time(c: f64) -> Option<f64> {
    (c > 0.0).then(|| 1.0 / (2.0 * c))
}

/// Reparametrisation `s(t) = -ln(1-2ct)/(2c)`, `s(t) = t` when `c = 0`.
fn soliton_time(c: f64, t: f64) -> f64 {
    if c.abs() < 1e-14 {
        t
    } else {
        -(1.0 - 2.0 * c * t).ln() / (2.0 * c)
    }
}

/// `φ(t) = (1-2ct)^{3/2} e^{s(t)D}·φ` for a soliton certificate, where
/// `e^{sD}·φ = exp(sθ(D))φ` is the pullback along `e^{-sD}`.
pub fn soliton_solution(s: &G2Structure, cert: &SolitonCertificate, t: f64) -> Result<KForm> {
    let c = cert.c;
    if let Some(big_t) = singularity_time(c) {
        if t >= big_t {
            return Err(Error::PastSingularity(big_t));
        }
    }
    let d = s.metric().symmetric_part(&cert.d);
    let st = soliton_time(c, t);
    let m: Matrix7 = (d * -st).exp();
    Ok(s.phi().pullback(&m).scaled((1.0 - 2.0 * c * t).powf(1.5)))
}

/// Exponent `n` with `φ(t)_I = (1-2ct)^n φ_I` for the monomial `e^I`, valid
/// when the symmetric part of `D` is diagonal: `n = 3/2 + Σ_{i∈I} D_ii/(2c)`.
pub fn decay_exponent(cert: &SolitonCertificate, indices: &[usize]) -> Result<f64> {
    if cert.c == 0.0 {
        return Err(Error::Invalid("decay exponents need c != 0".into()));
    }
    let sum: f64 = indices.iter().map(|&i| cert.d[(i - 1, i - 1)]).sum();
    Ok(1.5 + sum / (2.0 * cert.c))
}

/// Closed-form leading exponent `3a/(2(1+2a))` of the shrinking H-type family.
pub fn htype_leading_exponent(a: f64) -> f64 {
    3.0 * a / (2.0 * (1.0 + 2.0 * a))
}

/// Point of the `(a,b,c)` family of brackets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BracketPoint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl BracketPoint {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        BracketPoint { a, b, c }
    }

    pub fn s(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c
    }

    /// `f = (a²+b²+c²)²`.
    pub fn f(&self) -> f64 {
        self.s() * self.s()
    }

    /// `a⁴+b⁴+c⁴`.
    pub fn func_g(&self) -> f64 {
        self.a.powi(4) + self.b.powi(4) + self.c.powi(4)
    }

    /// `H = f/3 - funcG`; the ODE is its gradient flow.
    pub fn h(&self) -> f64 {
        self.f() / 3.0 - self.func_g()
    }

    /// `F = f/funcG`, undefined at the origin.
    pub fn big_f(&self) -> Option<f64> {
        let g = self.func_g();
        (g > 0.0).then(|| self.f() / g)
    }

    /// `|μ(a,b,c)|² = 8(a²+b²+c²)`, the sum of squared structure constants.
    pub fn mu_norm(&self) -> f64 {
        (8.0 * self.s()).sqrt()
    }

    /// `μ/|μ|` in `(a,b,c)` coordinates.
    pub fn normalized(&self) -> BracketPoint {
        let n = self.mu_norm();
        BracketPoint::new(self.a / n, self.b / n, self.c / n)
    }

    /// `(x' , y', z')` with `x' = (-4x² + (4/3)(a²+b²+c²)) x`.
    pub fn velocity(&self) -> BracketPoint {
        let s43 = 4.0 / 3.0 * self.s();
        let v = |x: f64| (-4.0 * x * x + s43) * x;
        BracketPoint::new(v(self.a), v(self.b), v(self.c))
    }

    fn axpy(&self, h: f64, v: &BracketPoint) -> BracketPoint {
        BracketPoint::new(self.a + h * v.a, self.b + h * v.b, self.c + h * v.c)
    }

    pub fn dist(&self, o: &BracketPoint) -> f64 {
        (self.a - o.a)
            .abs()
            .max((self.b - o.b).abs())
            .max((self.c - o.c).abs())
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BracketSample {
    pub t: f64,
    pub point: BracketPoint,
    pub f: f64,
    pub func_g: f64,
    pub h: f64,
    pub big_f: Option<f64>,
}

impl BracketSample {
    fn at(t: f64, p: BracketPoint) -> Self {
        BracketSample {
            t,
            point: p,
            f: p.f(),
            func_g: p.func_g(),
            h: p.h(),
            big_f: p.big_f(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BracketTrajectory {
    pub samples: Vec<BracketSample>,
}

impl BracketTrajectory {
    pub fn last(&self) -> &BracketSample {
        self.samples.last().expect("non-empty")
    }

    /// CSV with columns `t, a, b, c, f, funcG, H, F`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,a,b,c,f,funcG,H,F")?;
        for s in &self.samples {
            let p = s.point;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                fmt_f(s.t),
                fmt_f(p.a),
                fmt_f(p.b),
                fmt_f(p.c),
                fmt_f(s.f),
                fmt_f(s.func_g),
                fmt_f(s.h),
                s.big_f.map_or_else(|| "nan".into(), fmt_f)
            )?;
        }
        Ok(())
    }
}

/// RK4 on the `(a,b,c)` ODE, recording every `sample_every`-th step.
pub fn bracket_flow_abc(
    p0: BracketPoint,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<BracketTrajectory> {
    if p0.a < 0.0 || p0.b < 0.0 || p0.c < 0.0 {
        return Err(Error::Invalid("bracket flow needs a, b, c >= 0".into()));
    }
    if dt.is_nan() || dt <= 0.0 || t_end.is_nan() || t_end < 0.0 {
        return Err(Error::Invalid("need dt > 0 and t_end >= 0".into()));
    }
    let steps = (t_end / dt).round() as usize;
    let every = sample_every.max(1);
    let mut p = p0;
    let mut samples = vec![BracketSample::at(0.0, p)];
    for n in 0..steps {
        let k1 = p.velocity();
        let k2 = p.axpy(0.5 * dt, &k1).velocity();
        let k3 = p.axpy(0.5 * dt, &k2).velocity();
        let k4 = p.axpy(dt, &k3).velocity();
        p = BracketPoint::new(
            p.a + dt / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a),
            p.b + dt / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b),
            p.c + dt / 6.0 * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c),
        );
        if (n + 1) % every == 0 || n + 1 == steps {
            samples.push(BracketSample::at((n + 1) as f64 * dt, p));
        }
    }
    Ok(BracketTrajectory { samples })
}

/// Monotonicity of a sampled sequence, up to a relative slack.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Monotonicity {
    pub non_decreasing: bool,
    pub strictly_increasing: bool,
    pub non_increasing: bool,
    pub strictly_decreasing: bool,
    pub first: f64,
    pub last: f64,
}

pub fn monotonicity(values: &[f64], slack: f64) -> Monotonicity {
    let mut m = Monotonicity {
        non_decreasing: true,
        strictly_increasing: true,
        non_increasing: true,
        strictly_decreasing: true,
        first: values.first().copied().unwrap_or(f64::NAN),
        last: values.last().copied().unwrap_or(f64::NAN),
    };
    for w in values.windows(2) {
        let eps = slack * w[0].abs().max(1.0);
        let diff = w[1] - w[0];
        m.non_decreasing &= diff >= -eps;
        m.non_increasing &= diff <= eps;
        m.strictly_increasing &= diff > 0.0;
        m.strictly_decreasing &= diff < 0.0;
    }
    m
}

/// Monotonicity of `F` along a bracket-flow trajectory.
pub fn f_monotonicity_probe(traj: &BracketTrajectory) -> Monotonicity {
    let values: Vec<f64> = traj.samples.iter().filter_map(|s| s.big_f).collect();
    monotonicity(&values, 1e-12)
}
