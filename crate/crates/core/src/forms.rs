//! Exterior algebra over a fixed 7-dimensional space with basis `e_1..e_7`
//! and dual basis `e^1..e^7`.
//!
//! Multi-indices are stored as 7-bit masks; coefficient vectors of a
//! `k`-form are indexed by the lexicographic enumeration of the `C(7,k)`
//! strictly increasing index tuples.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::OnceLock;

use nalgebra::{DMatrix, SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DIM: usize = 7;

pub type Matrix7 = SMatrix<f64, 7, 7>;
pub type Vector7 = SVector<f64, 7>;

struct Tables {
    masks: Vec<Vec<u8>>,
    position: [usize; 128],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut masks = vec![Vec::new(); DIM + 1];
        fn rec(start: usize, k: usize, cur: u8, out: &mut Vec<u8>) {
            if k == 0 {
                out.push(cur);
                return;
            }
            for i in start..DIM {
                rec(i + 1, k - 1, cur | (1 << i), out);
            }
        }
        for (k, m) in masks.iter_mut().enumerate() {
            rec(0, k, 0, m);
        }
        let mut position = [0; 128];
        for m in &masks {
            for (p, &mask) in m.iter().enumerate() {
                position[mask as usize] = p;
            }
        }
        Tables { masks, position }
    })
}

/// Number of basis `k`-forms, `C(7,k)`.
pub fn dim_forms(k: usize) -> usize {
    tables().masks[k].len()
}

/// Sign of `e^a ∧ e^b` relative to `e^{a ∪ b}` for disjoint masks.
pub(crate) fn wedge_sign(a: u8, b: u8) -> f64 {
    let mut inversions = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Strictly increasing tuple of indices in `1..=7`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(u8);

impl MultiIndex {
    /// Build from 1-based, strictly increasing indices.
    pub fn new(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u8;
        let mut last = 0;
        for &i in indices {
            if i == 0 || i > DIM || i <= last {
                return Err(Error::Invalid(format!(
                    "multi-index {indices:?} must be strictly increasing in 1..=7"
                )));
            }
            mask |= 1 << (i - 1);
            last = i;
        }
        Ok(MultiIndex(mask))
    }

    pub(crate) fn from_mask(mask: u8) -> Self {
        MultiIndex(mask & 0x7f)
    }

    pub(crate) fn mask(self) -> u8 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    /// 1-based indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..DIM)
            .filter(|i| self.0 & (1 << i) != 0)
            .map(|i| i + 1)
            .collect()
    }

    /// Position in the lexicographic enumeration of its degree.
    pub fn position(self) -> usize {
        tables().position[self.0 as usize]
    }

    pub fn complement(self) -> Self {
        MultiIndex(!self.0 & 0x7f)
    }

    /// All multi-indices of degree `k` in enumeration order.
    pub fn all(k: usize) -> impl Iterator<Item = MultiIndex> {
        tables().masks[k].iter().map(|&m| MultiIndex(m))
    }

    /// The `p`-th multi-index of degree `k`.
    pub fn nth(k: usize, p: usize) -> MultiIndex {
        MultiIndex(tables().masks[k][p])
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e")?;
        for i in self.indices() {
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// Alternating `k`-form on the 7-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct KForm {
    degree: usize,
    coeffs: Vec<f64>,
}

impl KForm {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= DIM, "form degree {degree} exceeds 7");
        KForm {
            degree,
            coeffs: vec![0.0; dim_forms(degree)],
        }
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if degree > DIM {
            return Err(Error::DegreeOverflow(degree));
        }
        if coeffs.len() != dim_forms(degree) {
            return Err(Error::Invalid(format!(
                "{} coefficients for a {degree}-form, expected {}",
                coeffs.len(),
                dim_forms(degree)
            )));
        }
        Ok(KForm { degree, coeffs })
    }

    /// `coeff · e^{i1 i2 ...}` with 1-based indices.
    pub fn monomial(indices: &[usize], coeff: f64) -> Result<Self> {
        let idx = MultiIndex::new(indices)?;
        let mut f = KForm::zero(idx.degree());
        f.coeffs[idx.position()] = coeff;
        Ok(f)
    }

    /// Shorthand for the basis form `e^{i1 i2 ...}`.
    ///
    /// Panics on an invalid index list; meant for literals.
    pub fn e(indices: &[usize]) -> Self {
        KForm::monomial(indices, 1.0).expect("valid literal multi-index")
    }

    /// The constant 0-form.
    pub fn constant(c: f64) -> Self {
        KForm {
            degree: 0,
            coeffs: vec![c],
        }
    }

    /// Parse expressions such as `"e127 + e347 - 2e146"` or `"6e45-6e67"`.
    /// Each index is a single digit 1..7.
    pub fn parse(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Invalid("empty form expression".into()));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for i in 1..bytes.len() {
            // a sign starts a new term unless it belongs to an exponent
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'E') {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);

        let mut result: Option<KForm> = None;
        for term in terms {
            let pos = term
                .rfind('e')
                .ok_or_else(|| Error::Invalid(format!("term '{term}' has no basis monomial")))?;
            let (coef_str, idx_str) = term.split_at(pos);
            let coef = match coef_str {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => {
                    let c = c.trim_end_matches('*');
                    c.parse::<f64>()
                        .map_err(|_| Error::Invalid(format!("bad coefficient '{c}'")))?
                }
            };
            let indices: Vec<usize> = idx_str[1..]
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Invalid(format!("bad index in '{term}'")))
                })
                .collect::<Result<_>>()?;
            let mono = KForm::monomial(&indices, coef)?;
            result = Some(match result {
                None => mono,
                Some(acc) => {
                    if acc.degree != mono.degree {
                        return Err(Error::DegreeMismatch(acc.degree, mono.degree));
                    }
                    acc + mono
                }
            });
        }
        Ok(result.expect("at least one term"))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, idx: MultiIndex) -> f64 {
        if idx.degree() != self.degree {
            return 0.0;
        }
        self.coeffs[idx.position()]
    }

    /// Coefficient of `e^{indices}`; zero for indices of another degree.
    pub fn get(&self, indices: &[usize]) -> f64 {
        MultiIndex::new(indices)
            .map(|i| self.coeff(i))
            .unwrap_or(0.0)
    }

    /// Nonzero terms in enumeration order.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(move |(p, &c)| (MultiIndex::nth(self.degree, p), c))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Max-norm distance; infinite for different degrees.
    pub fn dist(&self, other: &KForm) -> f64 {
        if self.degree != other.degree {
            return f64::INFINITY;
        }
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    pub fn wedge(&self, other: &KForm) -> Result<KForm> {
        let deg = self.degree + other.degree;
        if deg > DIM {
            return Err(Error::DegreeOverflow(deg));
        }
        let mut out = KForm::zero(deg);
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                if i.mask() & j.mask() != 0 {
                    continue;
                }
                let m = MultiIndex::from_mask(i.mask() | j.mask());
                out.coeffs[m.position()] += wedge_sign(i.mask(), j.mask()) * a * b;
            }
        }
        Ok(out)
    }

    /// Contraction with the basis vector `e_i` (1-based).
    pub fn interior_basis(&self, i: usize) -> Result<KForm> {
        let mut v = Vector7::zeros();
        v[i - 1] = 1.0;
        self.interior(&v)
    }

    /// Contraction `i_v` in the first slot.
    pub fn interior(&self, v: &Vector7) -> Result<KForm> {
        if self.degree == 0 {
            return Err(Error::InteriorOfFunction);
        }
        let mut out = KForm::zero(self.degree - 1);
        for (idx, c) in self.terms() {
            let mask = idx.mask();
            for m in 0..DIM {
                let bit = 1u8 << m;
                if mask & bit == 0 || v[m] == 0.0 {
                    continue;
                }
                let before = (mask & (bit - 1)).count_ones();
                let sign = if before.is_multiple_of(2) { 1.0 } else { -1.0 };
                let rest = MultiIndex::from_mask(mask & !bit);
                out.coeffs[rest.position()] += sign * v[m] * c;
            }
        }
        Ok(out)
    }

    /// Pullback under the linear map `m` of the underlying vector space:
    /// `(m^* a)(X, ...) = a(mX, ...)`, so `e^i ↦ Σ_j m[i][j] e^j`.
    pub fn pullback(&self, m: &Matrix7) -> KForm {
        let mut out = KForm::zero(self.degree);
        for (idx, c) in self.terms() {
            for (p, target) in MultiIndex::all(self.degree).enumerate() {
                out.coeffs[p] += c * minor_det(m, idx.mask(), target.mask());
            }
        }
        out
    }

    /// Scale every coefficient.
    pub fn scaled(&self, s: f64) -> KForm {
        KForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `self + s·other`, degrees must match.
    pub fn axpy(&self, s: f64, other: &KForm) -> KForm {
        assert_eq!(self.degree, other.degree, "degree mismatch in axpy");
        KForm {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    /// Serializable sparse term list, zero terms omitted.
    pub fn to_terms(&self) -> Vec<Term> {
        self.terms()
            .map(|(idx, coeff)| Term {
                indices: idx.indices(),
                coeff,
            })
            .collect()
    }

    /// Inverse of [`KForm::to_terms`]; an empty list needs an explicit degree.
    pub fn from_terms(degree: usize, terms: &[Term]) -> Result<KForm> {
        if degree > DIM {
            return Err(Error::DegreeOverflow(degree));
        }
        let mut out = KForm::zero(degree);
        for t in terms {
            let idx = MultiIndex::new(&t.indices)?;
            if idx.degree() != degree {
                return Err(Error::DegreeMismatch(degree, idx.degree()));
            }
            out.coeffs[idx.position()] += t.coeff;
        }
        Ok(out)
    }
}

/// One entry of the sparse serialization of a form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub indices: Vec<usize>,
    pub coeff: f64,
}

/// Serialized as `{"degree": k, "terms": [{indices, coeff}, ...]}`.
impl Serialize for KForm {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Json {
            degree: usize,
            terms: Vec<Term>,
        }
        Json {
            degree: self.degree,
            terms: self.to_terms(),
        }
        .serialize(serializer)
    }
}

impl fmt::Display for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, c) in self.terms() {
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else if c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if (c.abs() - 1.0).abs() > 1e-15 {
                write!(f, "{}", c.abs())?;
            }
            if self.degree == 0 {
                if (c.abs() - 1.0).abs() <= 1e-15 {
                    write!(f, "1")?;
                }
            } else {
                write!(f, "{idx}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for KForm {
    type Output = KForm;
    fn add(self, rhs: KForm) -> KForm {
        self.axpy(1.0, &rhs)
    }
}

impl Add<&KForm> for &KForm {
    type Output = KForm;
    fn add(self, rhs: &KForm) -> KForm {
        self.axpy(1.0, rhs)
    }
}

impl AddAssign<&KForm> for KForm {
    fn add_assign(&mut self, rhs: &KForm) {
        assert_eq!(self.degree, rhs.degree, "degree mismatch in +=");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub for KForm {
    type Output = KForm;
    fn sub(self, rhs: KForm) -> KForm {
        self.axpy(-1.0, &rhs)
    }
}

impl Sub<&KForm> for &KForm {
    type Output = KForm;
    fn sub(self, rhs: &KForm) -> KForm {
        self.axpy(-1.0, rhs)
    }
}

impl Neg for KForm {
    type Output = KForm;
    fn neg(self) -> KForm {
        self.scaled(-1.0)
    }
}

impl Mul<KForm> for f64 {
    type Output = KForm;
    fn mul(self, rhs: KForm) -> KForm {
        rhs.scaled(self)
    }
}

impl Mul<&KForm> for f64 {
    type Output = KForm;
    fn mul(self, rhs: &KForm) -> KForm {
        rhs.scaled(self)
    }
}

/// Determinant of the square submatrix of `m` on the given row/column masks.
pub(crate) fn minor_det(m: &Matrix7, rows: u8, cols: u8) -> f64 {
    let k = rows.count_ones() as usize;
    debug_assert_eq!(k, cols.count_ones() as usize);
    if k == 0 {
        return 1.0;
    }
    let mut a = [[0.0f64; DIM]; DIM];
    let ri: Vec<usize> = (0..DIM).filter(|i| rows & (1 << i) != 0).collect();
    let ci: Vec<usize> = (0..DIM).filter(|i| cols & (1 << i) != 0).collect();
    for (r, &i) in ri.iter().enumerate() {
        for (c, &j) in ci.iter().enumerate() {
            a[r][c] = m[(i, j)];
        }
    }
    let mut det = 1.0;
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        let (top, below) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in below.iter_mut().take(k - col - 1) {
            let f = row[col] / pivot_row[col];
            if f != 0.0 {
                for (x, p) in row[col..k].iter_mut().zip(&pivot_row[col..k]) {
                    *x -= f * p;
                }
            }
        }
    }
    det
}

/// Riemannian metric on the 7-dimensional space together with an orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric7 {
    g: Matrix7,
    inverse: Matrix7,
    sqrt_det: f64,
    orientation: f64,
}

impl Metric7 {
    pub fn new(g: Matrix7, orientation_sign: f64) -> Result<Self> {
        let scale = g.amax().max(1.0);
        if (g - g.transpose()).amax() > 1e-12 * scale {
            return Err(Error::NotPositiveDefinite);
        }
        let g = (g + g.transpose()) * 0.5;
        let chol = g.cholesky().ok_or(Error::NotPositiveDefinite)?;
        let l = chol.l();
        let det: f64 = (0..DIM).map(|i| l[(i, i)]).product::<f64>().powi(2);
        if !det.is_finite() || det <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Metric7 {
            g,
            inverse: chol.inverse(),
            sqrt_det: det.sqrt(),
            orientation: if orientation_sign < 0.0 { -1.0 } else { 1.0 },
        })
    }

    pub fn identity() -> Self {
        Metric7::new(Matrix7::identity(), 1.0).expect("identity is SPD")
    }

    pub fn matrix(&self) -> &Matrix7 {
        &self.g
    }

    pub fn inverse(&self) -> &Matrix7 {
        &self.inverse
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn sqrt_det(&self) -> f64 {
        self.sqrt_det
    }

    /// Riemannian volume form `±√det(g) e^{1234567}`.
    pub fn volume_form(&self) -> KForm {
        let mut v = KForm::zero(DIM);
        v.coeffs[0] = self.orientation * self.sqrt_det;
        v
    }

    /// Gram matrix of the induced inner product on `k`-forms.
    pub fn gram(&self, k: usize) -> DMatrix<f64> {
        let n = dim_forms(k);
        DMatrix::from_fn(n, n, |p, q| {
            minor_det(
                &self.inverse,
                MultiIndex::nth(k, p).mask(),
                MultiIndex::nth(k, q).mask(),
            )
        })
    }

    pub fn inner(&self, a: &KForm, b: &KForm) -> Result<f64> {
        if a.degree != b.degree {
            return Err(Error::DegreeMismatch(a.degree, b.degree));
        }
        let gram = self.gram(a.degree);
        let va = nalgebra::DVector::from_column_slice(&a.coeffs);
        let vb = nalgebra::DVector::from_column_slice(&b.coeffs);
        Ok(va.dot(&(gram * vb)))
    }

    /// Matrix of the Hodge star `Λ^k → Λ^{7-k}` in the enumeration bases,
    /// fixed by `a ∧ ∗b = ⟨a,b⟩ vol`.
    pub fn star_matrix(&self, k: usize) -> DMatrix<f64> {
        let gram = self.gram(k);
        let n = dim_forms(k);
        let mut s = DMatrix::zeros(dim_forms(DIM - k), n);
        let vol = self.orientation * self.sqrt_det;
        for p in 0..n {
            let idx = MultiIndex::nth(k, p);
            let comp = idx.complement();
            let sign = wedge_sign(idx.mask(), comp.mask());
            for q in 0..n {
                s[(comp.position(), q)] += vol * sign * gram[(p, q)];
            }
        }
        s
    }

    pub fn star(&self, a: &KForm) -> KForm {
        apply(&self.star_matrix(a.degree), a, DIM - a.degree)
    }

    /// Adjoint of an endomorphism with respect to the metric, `g⁻¹ Aᵀ g`.
    pub fn adjoint(&self, a: &Matrix7) -> Matrix7 {
        self.inverse * a.transpose() * self.g
    }

    /// `tr(A B^t)` with `B^t` the metric adjoint.
    pub fn frobenius(&self, a: &Matrix7, b: &Matrix7) -> f64 {
        (a * self.adjoint(b)).trace()
    }

    pub fn symmetric_part(&self, a: &Matrix7) -> Matrix7 {
        (a + self.adjoint(a)) * 0.5
    }

    pub fn skew_part(&self, a: &Matrix7) -> Matrix7 {
        (a - self.adjoint(a)) * 0.5
    }
}

/// Apply a dense coefficient matrix to a form, producing a form of `degree`.
pub(crate) fn apply(m: &DMatrix<f64>, a: &KForm, degree: usize) -> KForm {
    let v = nalgebra::DVector::from_column_slice(&a.coeffs);
    let out = m * v;
    KForm {
        degree,
        coeffs: out.as_slice().to_vec(),
    }
}

pub fn wedge(a: &KForm, b: &KForm) -> Result<KForm> {
    a.wedge(b)
}

pub fn interior(v: &Vector7, a: &KForm) -> Result<KForm> {
    a.interior(v)
}

pub fn hodge_star(a: &KForm, m: &Metric7) -> KForm {
    m.star(a)
}

pub fn form_inner(a: &KForm, b: &KForm, m: &Metric7) -> Result<f64> {
    m.inner(a, b)
}

/// The model positive 3-form `ω∧e^7 + ρ⁺`.
pub fn phi_canonical() -> KForm {
    KForm::parse("e127 + e347 + e567 + e135 - e146 - e236 - e245").expect("literal")
}

/// `ω = e^{12} + e^{34} + e^{56}`.
pub fn omega() -> KForm {
    KForm::parse("e12 + e34 + e56").expect("literal")
}

/// `ρ⁺ = e^{135} - e^{146} - e^{236} - e^{245}`.
pub fn rho_plus() -> KForm {
    KForm::parse("e135 - e146 - e236 - e245").expect("literal")
}
