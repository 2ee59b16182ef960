//! The explicit example structures, each with the values published for it.
//!
//! Every record carries an [`Expected`] block; [`ExampleRecord::verify`]
//! recomputes all of it from scratch.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{phi_canonical, KForm, Matrix7, Vector7};
use crate::g2::{G2Structure, Tolerances};
use crate::liecoframe::{CoframeAlgebra, LieAlgebra7};
use crate::soliton::{self, SolitonKind};

/// Published values for an example; `None` means "not asserted".
#[derive(Clone, Debug, Default)]
pub struct Expected {
    pub tau: Option<KForm>,
    pub tau_norm2: Option<f64>,
    pub dtau: Option<KForm>,
    pub star_tau_tau: Option<KForm>,
    pub tau_squared_diag: Option<[f64; 7]>,
    pub ricci_diag: Option<[f64; 7]>,
    pub scalar: Option<f64>,
    pub q_dtau_diag: Option<[f64; 7]>,
    pub f: Option<f64>,
    pub soliton: Option<(SolitonKind, f64)>,
    pub erp: Option<bool>,
    pub parallel: Option<bool>,
}

/// A named example structure with its expected values.
#[derive(Clone, Debug)]
pub struct ExampleRecord {
    pub name: String,
    pub structure: G2Structure,
    pub expected: Expected,
}

/// One recomputed quantity: `deviation` is the max-entry error, or 0/1 for flags.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub quantity: &'static str,
    pub deviation: f64,
}

fn diag_dev(m: &Matrix7, d: &[f64; 7]) -> f64 {
    (m - Matrix7::from_diagonal(&Vector7::from_column_slice(d))).amax()
}

fn flag_dev(a: bool, b: bool) -> f64 {
    if a == b {
        0.0
    } else {
        1.0
    }
}

impl ExampleRecord {
    /// Recompute every expected quantity and report deviations.
    pub fn verify(&self, tol: &Tolerances) -> Result<Vec<Check>> {
        let s = &self.structure;
        let t = s.torsion()?;
        let e = &self.expected;
        let report = s.classify(&t, tol);
        let mut out = Vec::new();
        let mut push = |quantity, deviation| {
            out.push(Check {
                quantity,
                deviation,
            })
        };
        if let Some(v) = &e.tau {
            push("tau", t.tau.dist(v));
        }
        if let Some(v) = e.tau_norm2 {
            push("tau_norm2", (t.tau_norm2 - v).abs());
        }
        if let Some(v) = &e.dtau {
            push("dtau", t.dtau.dist(v));
        }
        if let Some(v) = &e.star_tau_tau {
            push("star_tau_tau", t.star_tau_tau.dist(v));
        }
        if let Some(v) = &e.tau_squared_diag {
            push("tau_squared", diag_dev(&t.tau_squared(), v));
        }
        if let Some(v) = &e.ricci_diag {
            push("ricci", diag_dev(&t.ricci, v));
        }
        if let Some(v) = e.scalar {
            push("scalar", (t.scalar - v).abs());
        }
        if let Some(v) = &e.q_dtau_diag {
            push("q_dtau", diag_dev(&t.q_dtau, v));
        }
        if let Some(v) = e.f {
            push("F", t.f.map_or(f64::INFINITY, |f| (f - v).abs()));
        }
        if let Some(v) = e.erp {
            push("erp", flag_dev(report.erp, v));
        }
        if let Some(v) = e.parallel {
            push("parallel", flag_dev(report.parallel, v));
        }
        if let Some((kind, c)) = e.soliton {
            let cert = soliton::detect(s, &t, tol)?;
            push("soliton_kind", flag_dev(cert.kind == kind, true));
            push("soliton_c", (cert.c - c).abs());
        }
        Ok(out)
    }
}

/// `φ = ω∧e^7 + ρ⁺` on the given Lie algebra.
fn canonical_on(lie: &LieAlgebra7) -> Result<G2Structure> {
    G2Structure::from_lie(lie, phi_canonical())
}

pub fn flat() -> Result<ExampleRecord> {
    Ok(ExampleRecord {
        name: "flat".into(),
        structure: canonical_on(&LieAlgebra7::abelian())?,
        expected: Expected {
            tau: Some(KForm::zero(2)),
            parallel: Some(true),
            ..Default::default()
        },
    })
}

/// Coframe of the homogeneous space `Sl_2(C)⋉C²/SU(2)` with its invariant
/// ERP structure.
pub fn bryant_coframe() -> CoframeAlgebra {
    let de = [
        "0e12",
        "0e12",
        "0e12",
        "-e14 - e27 - e36",
        "-e15 - e26 + e37",
        "e16 - e25 - e34",
        "e17 - e24 + e35",
    ]
    .iter()
    .map(|s| KForm::parse(s).expect("literal"))
    .collect();
    CoframeAlgebra::from_differentials(de).expect("seven 2-forms")
}

pub fn bryant_phi() -> KForm {
    KForm::parse("e123 + e145 + e167 + e246 - e257 - e347 - e356").expect("literal")
}

pub fn bryant_homogeneous() -> Result<ExampleRecord> {
    let phi = bryant_phi();
    let structure = G2Structure::new(bryant_coframe(), phi.clone())?;
    Ok(ExampleRecord {
        name: "bryant-homogeneous".into(),
        structure,
        expected: Expected {
            tau: Some(KForm::parse("6e45 - 6e67")?),
            tau_norm2: Some(72.0),
            dtau: Some(phi.scaled(12.0) - KForm::parse("12e123")?),
            star_tau_tau: Some(KForm::parse("-72e123")?),
            tau_squared_diag: Some([0.0, 0.0, 0.0, -36.0, -36.0, -36.0, -36.0]),
            ricci_diag: Some([-12.0, -12.0, -12.0, 0.0, 0.0, 0.0, 0.0]),
            scalar: Some(-36.0),
            q_dtau_diag: Some([0.0, 0.0, 0.0, -6.0, -6.0, -6.0, -6.0]),
            f: Some(3.0),
            erp: Some(true),
            parallel: Some(false),
            ..Default::default()
        },
    })
}

/// Lie algebra with abelian ideal `⟨e3..e6⟩` and
/// `ad e7 = Diag(a,a,-a,-a)`, `ad e1 = Diag(b,-b,b,-b)`, `ad e2 = Diag(c,-c,-c,c)` on it.
pub fn triple_lie(a: f64, b: f64, c: f64) -> LieAlgebra7 {
    let mut g = LieAlgebra7::abelian();
    for (x, weights) in [
        (7, [a, a, -a, -a]),
        (1, [b, -b, b, -b]),
        (2, [c, -c, -c, c]),
    ] {
        for (off, w) in weights.into_iter().enumerate() {
            if w != 0.0 {
                g.add_bracket(x, 3 + off, 3 + off, w);
            }
        }
    }
    g
}

/// Scale `(a,b,c)` onto `a²+b²+c² = 3` and sort it decreasingly.
pub fn normalize_triple(a: f64, b: f64, c: f64) -> (f64, f64, f64) {
    let mut v = [a.abs(), b.abs(), c.abs()];
    v.sort_by(|x, y| y.total_cmp(x));
    let s = (3.0 / (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])).sqrt();
    (v[0] * s, v[1] * s, v[2] * s)
}

pub fn triple_family(a: f64, b: f64, c: f64) -> Result<ExampleRecord> {
    let structure = canonical_on(&triple_lie(a, b, c))?;
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let s = a2 + b2 + c2;
    let tau = KForm::monomial(&[3, 4], -2.0 * a)?
        + KForm::monomial(&[3, 5], -2.0 * b)?
        + KForm::monomial(&[3, 6], 2.0 * c)?
        + KForm::monomial(&[4, 5], -2.0 * c)?
        + KForm::monomial(&[4, 6], -2.0 * b)?
        + KForm::monomial(&[5, 6], 2.0 * a)?;
    let dtau = KForm::parse("e347 + e567 + e135 - e146 - e236 - e245")?;
    let dtau = KForm::from_coeffs(
        3,
        dtau.coeffs()
            .iter()
            .zip(crate::forms::MultiIndex::all(3))
            .map(|(&x, idx)| {
                let w = match idx.indices().as_slice() {
                    [3, 4, 7] | [5, 6, 7] => a2,
                    [1, 3, 5] | [1, 4, 6] => b2,
                    _ => c2,
                };
                4.0 * x * w
            })
            .collect(),
    )?;
    let nonflat = s > 0.0;
    let soliton = {
        let (na, nb, nc) = if nonflat {
            normalize_triple(a, b, c)
        } else {
            (0.0, 0.0, 0.0)
        };
        let r = s / 3.0;
        let close = |x: f64, y: f64| (x - y).abs() < 1e-12;
        let h = (1.5f64).sqrt();
        if !nonflat {
            None
        } else if close(na, 1.0) && close(nb, 1.0) && close(nc, 1.0) {
            Some((SolitonKind::Steady, 0.0))
        } else if close(na, h) && close(nb, h) && close(nc, 0.0) {
            Some((SolitonKind::Expanding, -2.0 * r))
        } else if close(na, 3f64.sqrt()) && close(nb, 0.0) && close(nc, 0.0) {
            Some((SolitonKind::Expanding, -8.0 * r))
        } else {
            None
        }
    };
    Ok(ExampleRecord {
        name: format!("triple(a={a}, b={b}, c={c})"),
        structure,
        expected: Expected {
            tau: Some(tau),
            tau_norm2: Some(8.0 * s),
            dtau: Some(dtau),
            star_tau_tau: Some(KForm::parse("e127")?.scaled(-8.0 * s)),
            tau_squared_diag: Some([0.0, 0.0, -4.0 * s, -4.0 * s, -4.0 * s, -4.0 * s, 0.0]),
            ricci_diag: Some([-4.0 * b2, -4.0 * c2, 0.0, 0.0, 0.0, 0.0, -4.0 * a2]),
            scalar: Some(-4.0 * s),
            q_dtau_diag: Some([
                -4.0 * b2 + 4.0 * s / 3.0,
                -4.0 * c2 + 4.0 * s / 3.0,
                -2.0 * s / 3.0,
                -2.0 * s / 3.0,
                -2.0 * s / 3.0,
                -2.0 * s / 3.0,
                -4.0 * a2 + 4.0 * s / 3.0,
            ]),
            f: nonflat.then(|| s * s / (a2 * a2 + b2 * b2 + c2 * c2)),
            soliton,
            erp: nonflat.then(|| (a2 - b2).abs() < 1e-12 && (b2 - c2).abs() < 1e-12),
            parallel: Some(!nonflat),
        },
    })
}

/// Two-step nilpotent ideal `⟨e1..e6⟩` extended by
/// `ad e7 = Diag(a, a, ½-a, ½-a, ½, ½)`.
pub fn htype_lie(a: f64) -> LieAlgebra7 {
    let mut g = LieAlgebra7::abelian();
    g.add_bracket(1, 4, 5, -1.0);
    g.add_bracket(1, 3, 6, -1.0);
    g.add_bracket(2, 3, 5, -1.0);
    g.add_bracket(2, 4, 6, 1.0);
    for (i, w) in [a, a, 0.5 - a, 0.5 - a, 0.5, 0.5].into_iter().enumerate() {
        if w != 0.0 {
            g.add_bracket(7, i + 1, i + 1, w);
        }
    }
    g
}

/// `c(a) = 4/3 + 4a/3 - 8a²/3`.
pub fn htype_c(a: f64) -> f64 {
    4.0 / 3.0 + 4.0 * a / 3.0 - 8.0 * a * a / 3.0
}

/// Diagonal derivation `D(a)` with `Q_{dτ} = c(a) I + D(a)`.
pub fn htype_derivation(a: f64) -> [f64; 7] {
    let x = -2.0 + 2.0 * a * a;
    let y = -1.5 - 2.0 * a + 2.0 * a * a;
    let z = -3.5 - 2.0 * a + 4.0 * a * a;
    [x, x, y, y, z, z, 0.0]
}

/// `F(a) = (-4a²+2a-7)² / (16a⁴-16a³+28a²-12a+11)`.
pub fn htype_f(a: f64) -> f64 {
    let r = -4.0 * a * a + 2.0 * a - 7.0;
    r * r / (16.0 * a.powi(4) - 16.0 * a.powi(3) + 28.0 * a * a - 12.0 * a + 11.0)
}

pub fn htype_family(a: f64) -> Result<ExampleRecord> {
    let structure = canonical_on(&htype_lie(a))?;
    let a2 = a * a;
    let q1 = -2.0 / 3.0 + 4.0 * a / 3.0 - 2.0 * a2 / 3.0;
    let q2 = -1.0 / 6.0 - 2.0 * a / 3.0 - 2.0 * a2 / 3.0;
    let q3 = -13.0 / 6.0 - 2.0 * a / 3.0 + 4.0 * a2 / 3.0;
    let q4 = 4.0 / 3.0 + 4.0 * a / 3.0 - 8.0 * a2 / 3.0;
    let c = htype_c(a);
    let kind = if c.abs() < 1e-12 {
        SolitonKind::Steady
    } else if c > 0.0 {
        SolitonKind::Shrinking
    } else {
        SolitonKind::Expanding
    };
    let mut tau = KForm::zero(2);
    tau += &KForm::monomial(&[1, 2], 2.0 * (1.0 - a))?;
    tau += &KForm::monomial(&[3, 4], 1.0 + 2.0 * a)?;
    tau += &KForm::monomial(&[5, 6], -3.0)?;
    let rho = crate::forms::rho_plus();
    let dtau = KForm::monomial(&[1, 2, 7], -4.0 * a * (1.0 - a))?
        + KForm::monomial(&[3, 4, 7], -1.0 + 4.0 * a2)?
        + KForm::monomial(&[5, 6, 7], 3.0)?
        + rho.scaled(3.0);
    let star_tt = KForm::monomial(&[1, 2, 7], -6.0 * (1.0 + 2.0 * a))?
        + KForm::monomial(&[3, 4, 7], -12.0 * (1.0 - a))?
        + KForm::monomial(&[5, 6, 7], 4.0 * (1.0 - a) * (1.0 + 2.0 * a))?;
    let t1 = -4.0 * (1.0 - a).powi(2);
    let t2 = -(1.0 + 2.0 * a).powi(2);
    Ok(ExampleRecord {
        name: format!("htype(a={a})"),
        structure,
        expected: Expected {
            tau: Some(tau),
            tau_norm2: Some(14.0 - 4.0 * a + 8.0 * a2),
            dtau: Some(dtau),
            star_tau_tau: Some(star_tt),
            tau_squared_diag: Some([t1, t1, t2, t2, -9.0, -9.0, 0.0]),
            ricci_diag: Some([
                -1.0 - 2.0 * a,
                -1.0 - 2.0 * a,
                -2.0 + 2.0 * a,
                -2.0 + 2.0 * a,
                0.0,
                0.0,
                -1.0 + 2.0 * a - 4.0 * a2,
            ]),
            scalar: Some(-7.0 + 2.0 * a - 4.0 * a2),
            q_dtau_diag: Some([q1, q1, q2, q2, q3, q3, q4]),
            f: Some(htype_f(a)),
            soliton: Some((kind, c)),
            // at a = -1/2 the e34 part of τ vanishes and dτ = 3(e127 + e567 + ρ⁺)
            // is again of extremally Ricci-pinched form
            erp: Some((a - 1.0).abs() < 1e-12 || (a + 0.5).abs() < 1e-12),
            parallel: Some(false),
        },
    })
}

/// The solvable algebra acting simply transitively on Bryant's homogeneous
/// space, in the basis `(f1, f2, f3, e4, e5, e6, e7)`.
pub fn bryant_solvable_lie() -> LieAlgebra7 {
    let mut g = LieAlgebra7::abelian();
    for (j, w) in [
        (2, -2.0),
        (3, -2.0),
        (4, -1.0),
        (5, -1.0),
        (6, 1.0),
        (7, 1.0),
    ] {
        g.add_bracket(1, j, j, w);
    }
    g.add_bracket(2, 6, 5, 1.0);
    g.add_bracket(2, 7, 4, 1.0);
    g.add_bracket(3, 6, 4, 1.0);
    g.add_bracket(3, 7, 5, -1.0);
    g
}

/// Bryant's `φ` pulled back along `s → p`, `f1 ↦ e1`, `f2 ↦ -½e2`,
/// `f3 ↦ -½e3`, `e_k ↦ e_k`.
pub fn bryant_solvable() -> Result<ExampleRecord> {
    let m = Matrix7::from_diagonal(&Vector7::from_column_slice(&[
        1.0, -0.5, -0.5, 1.0, 1.0, 1.0, 1.0,
    ]));
    let psi = bryant_phi().pullback(&m);
    let structure = G2Structure::from_lie(&bryant_solvable_lie(), psi)?;
    Ok(ExampleRecord {
        name: "bryant-solvable".into(),
        structure,
        expected: Expected {
            tau_norm2: Some(72.0),
            scalar: Some(-36.0),
            f: Some(3.0),
            soliton: Some((SolitonKind::Steady, 0.0)),
            erp: Some(true),
            parallel: Some(false),
            ..Default::default()
        },
    })
}

pub fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

pub fn almost_abelian_lie(a: &[[f64; 6]; 6], perm: &[usize]) -> LieAlgebra7 {
    let mut g = LieAlgebra7::abelian();
    for j in 0..6 {
        let mut out = Vector7::zeros();
        for i in 0..6 {
            out[perm[i]] = a[i][j];
        }
        if out.amax() > 0.0 {
            g.set_bracket(7, perm[j] + 1, &out);
        }
    }
    g
}

/// Almost abelian algebra: abelian ideal `⟨e1..e6⟩` with `ad e7 = A`.
///
/// If `φ = ω∧e^7 + ρ⁺` is not closed with the given ordering, the basis of
/// the ideal is relabelled by the first permutation (lexicographic order)
/// for which it is.
pub fn almost_abelian(a: &[[f64; 6]; 6]) -> Result<ExampleRecord> {
    let mut perm: Vec<usize> = (0..6).collect();
    loop {
        let lie = almost_abelian_lie(a, &perm);
        let s = canonical_on(&lie)?;
        if s.closed_residual() < 1e-12 {
            return Ok(ExampleRecord {
                name: format!("almost-abelian(perm={perm:?})"),
                structure: s,
                expected: Expected::default(),
            });
        }
        if !next_permutation(&mut perm) {
            return Err(Error::ConventionMismatch);
        }
    }
}

pub fn block_diag(b: [[f64; 3]; 3]) -> [[f64; 6]; 6] {
    let mut a = [[0.0; 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = b[i][j];
            a[i + 3][j + 3] = b[i][j];
        }
    }
    a
}

/// `A = Diag(B, B)`, `B = [[a,-1,0],[1,-a,0],[0,0,0]]`.
pub fn mu_a(a: f64) -> Result<ExampleRecord> {
    let b = [[a, -1.0, 0.0], [1.0, -a, 0.0], [0.0, 0.0, 0.0]];
    let mut rec = almost_abelian(&block_diag(b))?;
    rec.name = format!("mu-a(a={a})");
    let flat = a == 0.0;
    rec.expected = Expected {
        f: (!flat).then(|| a.powi(4) / (a.powi(4) + 2.0 * a * a)),
        parallel: Some(flat),
        ..Default::default()
    };
    Ok(rec)
}

/// `A = Diag(B, B)`, `B = [[b,-1,0],[1,b,0],[0,0,-2b]]`.
pub fn mu_b(b: f64) -> Result<ExampleRecord> {
    let m = [[b, -1.0, 0.0], [1.0, b, 0.0], [0.0, 0.0, -2.0 * b]];
    let mut rec = almost_abelian(&block_diag(m))?;
    rec.name = format!("mu-b(b={b})");
    let flat = b == 0.0;
    rec.expected = Expected {
        f: (!flat).then_some(1.0),
        parallel: Some(flat),
        ..Default::default()
    };
    if !flat {
        // the soliton constant is not published; only the type is asserted
        rec.expected.erp = None;
    }
    Ok(rec)
}

/// Catalog names with their parameters, for listing.
pub const ENTRIES: &[(&str, &str)] = &[
    ("flat", "no parameters"),
    ("bryant-homogeneous", "no parameters"),
    ("bryant-solvable", "no parameters"),
    (
        "triple",
        "a, b, c (any reals; a²+b²+c²=3, a≥b≥c≥0 is the normalized range)",
    ),
    ("htype", "a ≥ 1/4"),
    ("mu-a", "a (any real)"),
    ("mu-b", "b ≥ 0"),
];

/// Build a catalog entry from its name and `name=value` parameters.
pub fn by_name(name: &str, params: &[(String, f64)]) -> Result<ExampleRecord> {
    let get = |key: &str, default: Option<f64>| -> Result<f64> {
        params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
            .or(default)
            .ok_or_else(|| Error::Invalid(format!("catalog '{name}' needs parameter '{key}'")))
    };
    match name {
        "flat" => flat(),
        "bryant-homogeneous" => bryant_homogeneous(),
        "bryant-solvable" => bryant_solvable(),
        "triple" => triple_family(
            get("a", Some(1.0))?,
            get("b", Some(1.0))?,
            get("c", Some(1.0))?,
        ),
        "htype" => htype_family(get("a", None)?),
        "mu-a" => mu_a(get("a", None)?),
        "mu-b" => mu_b(get("b", None)?),
        other => Err(Error::Invalid(format!("unknown catalog entry '{other}'"))),
    }
}

/// Every fixed example plus representative members of each family.
pub fn all_examples() -> Result<Vec<ExampleRecord>> {
    let h = (1.5f64).sqrt();
    let mut out = vec![flat()?, bryant_homogeneous()?, bryant_solvable()?];
    for (a, b, c) in [(1.0, 1.0, 1.0), (h, h, 0.0), (3f64.sqrt(), 0.0, 0.0)] {
        out.push(triple_family(a, b, c)?);
    }
    let (a, b, c) = normalize_triple(1.2, 1.0, 0.8);
    out.push(triple_family(a, b, c)?);
    for a in [0.25, 0.5, 1.0, 2.0] {
        out.push(htype_family(a)?);
    }
    for a in [0.0, 0.5, 1.0, 2.0] {
        out.push(mu_a(a)?);
    }
    for b in [0.5, 1.0, 2.0] {
        out.push(mu_b(b)?);
    }
    Ok(out)
}
