//! Dense univariate polynomials with arbitrary-precision integer
//! coefficients, tagged with one of the three bases `L`, `T = L - 1`,
//! `S = T - 1`.
//!
//! Every Grothendieck class in this crate is such a polynomial. Arithmetic
//! is exact; coefficients routinely exceed 64 bits (the valence-10 family
//! produces coefficients around 2.5e18 with much larger intermediates), so
//! everything is `BigInt` underneath.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// The variable a polynomial is expressed in.
///
/// `L` is the class of the affine line, `T = L - 1` the torus class and
/// `S = T - 1` the class of a projective line minus three points.
/// Re-expanding in another basis substitutes the variable (`L -> T + 1`,
/// `T -> S + 1`) and is always an exact, invertible operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    L,
    T,
    S,
}

impl Basis {
    /// Offset of the basis variable below `L`: `L = var + offset`.
    fn offset(self) -> i64 {
        match self {
            Basis::L => 0,
            Basis::T => 1,
            Basis::S => 2,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Basis::L => 'L',
            Basis::T => 'T',
            Basis::S => 'S',
        }
    }

    pub fn parse(s: &str) -> Option<Basis> {
        match s {
            "L" | "l" => Some(Basis::L),
            "T" | "t" => Some(Basis::T),
            "S" | "s" => Some(Basis::S),
            _ => None,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("basis mismatch: {0} vs {1} (convert explicitly)")]
    BasisMismatch(Basis, Basis),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("inexact division: remainder is nonzero")]
    InexactDivision,
    #[error("invalid integer literal {0:?} in polynomial")]
    BadCoefficient(String),
}

/// Dense integer polynomial in a tagged basis.
///
/// `coeffs[i]` is the coefficient of `var^i`; trailing zeros are trimmed, so
/// the zero polynomial stores no coefficients and the last stored
/// coefficient is otherwise nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    basis: Basis,
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(basis: Basis, mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { basis, coeffs }
    }

    pub fn zero(basis: Basis) -> Self {
        IntPoly {
            basis,
            coeffs: Vec::new(),
        }
    }

    pub fn one(basis: Basis) -> Self {
        Self::constant(basis, BigInt::one())
    }

    pub fn constant(basis: Basis, c: impl Into<BigInt>) -> Self {
        Self::new(basis, vec![c.into()])
    }

    /// The bare variable of the basis.
    pub fn variable(basis: Basis) -> Self {
        Self::new(basis, vec![BigInt::zero(), BigInt::one()])
    }

    /// `var + c`, e.g. `linear(T, 1)` is `T + 1`.
    pub fn linear(basis: Basis, c: i64) -> Self {
        Self::new(basis, vec![BigInt::from(c), BigInt::one()])
    }

    /// `c * var^k`.
    pub fn monomial(basis: Basis, c: impl Into<BigInt>, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c.into();
        Self::new(basis, coeffs)
    }

    pub fn from_i64(basis: Basis, coeffs: &[i64]) -> Self {
        Self::new(basis, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `var^i` (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, or `None` for the zero polynomial ("minus infinity").
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    fn check_basis(&self, other: &Self) -> Result<(), PolyError> {
        if self.basis == other.basis {
            Ok(())
        } else {
            Err(PolyError::BasisMismatch(self.basis, other.basis))
        }
    }

    /// Coefficientwise sum. Errors on basis mismatch.
    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_basis(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) + other.coeff(i));
        }
        Ok(Self::new(self.basis, coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        IntPoly {
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Exact convolution product. Errors on basis mismatch.
    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_basis(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.basis));
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Ok(Self::new(self.basis, coeffs))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        IntPoly {
            basis: self.basis,
            coeffs: if c.is_zero() {
                Vec::new()
            } else {
                self.coeffs.iter().map(|a| a * c).collect()
            },
        }
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.basis);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).expect("same basis");
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base).expect("same basis");
            }
        }
        acc
    }

    /// Quotient `q` with `q * b == a` exactly.
    ///
    /// A nonzero remainder is an error: in this crate that always signals a
    /// wrong input class or a falsified divisibility claim, never a case to
    /// round away.
    pub fn exact_div(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_basis(other)?;
        if other.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.basis));
        }
        if self.coeffs.len() < other.coeffs.len() {
            return Err(PolyError::InexactDivision);
        }
        let mut rem = self.coeffs.clone();
        let db = other.coeffs.len() - 1;
        let lead = other.coeffs.last().unwrap();
        let mut quot = vec![BigInt::zero(); rem.len() - db];
        for k in (0..quot.len()).rev() {
            let top = rem[k + db].clone();
            if top.is_zero() {
                continue;
            }
            let r = &top % lead;
            if !r.is_zero() {
                return Err(PolyError::InexactDivision);
            }
            let q = top / lead;
            for (i, b) in other.coeffs.iter().enumerate() {
                let t = &q * b;
                rem[k + i] -= t;
            }
            quot[k] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(PolyError::InexactDivision);
        }
        Ok(Self::new(self.basis, quot))
    }

    /// Substitute `var -> var + shift` and re-expand.
    ///
    /// Horner form: `q := 0`, then for each coefficient from the top,
    /// `q := q*(var+shift) + c`.
    fn shift_var(&self, shift: i64, target: Basis) -> Self {
        let s = BigInt::from(shift);
        let mut q: Vec<BigInt> = Vec::new();
        for c in self.coeffs.iter().rev() {
            let mut next = vec![BigInt::zero(); q.len() + 1];
            for (i, a) in q.iter().enumerate() {
                next[i + 1] += a;
                next[i] += a * &s;
            }
            if next.is_empty() {
                next.push(c.clone());
            } else {
                next[0] += c;
            }
            q = next;
        }
        Self::new(target, q)
    }

    /// Re-expand the same polynomial function in another basis.
    ///
    /// Round trips are exact identities.
    pub fn change_basis(&self, target: Basis) -> Self {
        if target == self.basis {
            return self.clone();
        }
        // var_target = var_source - (offset_target - offset_source), so the
        // substitution is var -> var + (offset_target - offset_source).
        let shift = target.offset() - self.basis.offset();
        self.shift_var(shift, target)
    }

    /// Exact Horner evaluation at an integer point.
    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Evaluate the polynomial as a function of `L` at `L = x`, regardless
    /// of the stored basis.
    pub fn eval_at_l(&self, x: &BigInt) -> BigInt {
        self.eval_int(&(x - BigInt::from(self.basis.offset())))
    }

    /// True iff every stored coefficient is >= 0.
    pub fn is_nonneg_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// Log-concavity of the full coefficient sequence `a_0..a_deg`,
    /// interior zeros included: `a_{i-1} a_{i+1} <= a_i^2` for `0 < i < deg`.
    pub fn is_log_concave(&self) -> bool {
        for i in 1..self.coeffs.len().saturating_sub(1) {
            if &self.coeffs[i - 1] * &self.coeffs[i + 1] > &self.coeffs[i] * &self.coeffs[i] {
                return false;
            }
        }
        true
    }

    /// Topological Euler characteristic of the class: evaluation at `L = 1`.
    pub fn euler_characteristic(&self) -> BigInt {
        self.eval_at_l(&BigInt::one())
    }

    /// Hodge-Deligne polynomial of the class: `L -> uv`.
    ///
    /// The polynomial is re-expanded in `L` first; since it is univariate
    /// the result only involves the product `uv`, and the monomial `L^k` is
    /// rendered as `u^k v^k`.
    pub fn specialize_hodge_deligne(&self) -> HodgeDeligne {
        HodgeDeligne {
            poly: self.change_basis(Basis::L),
        }
    }

    /// Deterministic ordering key: by degree, then by coefficients from the
    /// top down. Only comparable within one basis.
    pub fn cmp_within_basis(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.basis, other.basis);
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }

    /// Expanded descending-degree rendering, e.g. `T^3+5T^2+4T-2`.
    pub fn render_expanded(&self) -> String {
        self.render(false)
    }

    /// LaTeX flavor of the expanded rendering (`T^{12}` braces).
    pub fn render_latex(&self) -> String {
        self.render(true)
    }

    fn render(&self, latex: bool) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let var = self.basis.letter();
        let mut out = String::new();
        for i in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push('-');
            } else {
                out.push('+');
            }
            let mag = c.magnitude();
            if !mag.is_one() || i == 0 {
                out.push_str(&mag.to_string());
            }
            if i >= 1 {
                out.push(var);
                if i >= 2 {
                    if latex {
                        out.push_str(&format!("^{{{i}}}"));
                    } else {
                        out.push_str(&format!("^{i}"));
                    }
                }
            }
        }
        out
    }

    /// Best-effort factored rendering for display: pulls out powers of the
    /// variable, `var+1`, `var+2` and monic quadratics with small
    /// coefficients; whatever is left is printed expanded.
    pub fn render_factored(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let basis = self.basis;
        let mut rem = self.clone();
        let mut factors: Vec<(IntPoly, u32)> = Vec::new();
        let mut candidates: Vec<IntPoly> = vec![
            IntPoly::variable(basis),
            IntPoly::linear(basis, 1),
            IntPoly::linear(basis, 2),
        ];
        for a in 0..=9i64 {
            for b in -9..=9i64 {
                if b == 0 {
                    continue;
                }
                candidates.push(IntPoly::new(
                    basis,
                    vec![BigInt::from(b), BigInt::from(a), BigInt::one()],
                ));
            }
        }
        for cand in candidates {
            let mut mult = 0u32;
            while let Ok(q) = rem.exact_div(&cand) {
                rem = q;
                mult += 1;
            }
            if mult > 0 {
                factors.push((cand, mult));
            }
        }
        let mut out = String::new();
        if rem.degree() == Some(0) {
            let c = rem.coeff(0);
            if !c.is_one() || factors.is_empty() {
                out.push_str(&c.to_string());
            }
            rem = IntPoly::one(basis);
        }
        for (f, mult) in &factors {
            let inner = f.render_expanded();
            let piece = if f.degree() == Some(1) && f.coeff(0).is_zero() {
                // bare variable: no parens
                inner
            } else {
                format!("({inner})")
            };
            out.push_str(&piece);
            if *mult > 1 {
                out.push_str(&format!("^{mult}"));
            }
        }
        if !rem.is_one() {
            out.push_str(&format!("({})", rem.render_expanded()));
        }
        if out.is_empty() {
            out.push('1');
        }
        out
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_expanded())
    }
}

impl PartialOrd for IntPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IntPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.basis
            .cmp(&other.basis)
            .then_with(|| self.cmp_within_basis(other))
    }
}

// Operator sugar for same-basis arithmetic; the checked methods are the
// public contract, these panic on basis mismatch.
impl std::ops::Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        IntPoly::add(self, rhs).expect("basis mismatch in +")
    }
}

impl std::ops::Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        IntPoly::sub(self, rhs).expect("basis mismatch in -")
    }
}

impl std::ops::Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        IntPoly::mul(self, rhs).expect("basis mismatch in *")
    }
}

/// Hodge-Deligne polynomial of a class: a polynomial in the product `uv`,
/// printed with `L^k` rendered as `u^k v^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HodgeDeligne {
    poly: IntPoly,
}

impl HodgeDeligne {
    pub fn as_poly_in_l(&self) -> &IntPoly {
        &self.poly
    }
}

impl fmt::Display for HodgeDeligne {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs = self.poly.coeffs();
        if coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (0..coeffs.len()).rev() {
            let c = &coeffs[k];
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            let mag = c.magnitude();
            if !mag.is_one() || k == 0 {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "uv")?,
                _ => write!(f, "u^{k}v^{k}")?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    basis: String,
    coeffs: Vec<String>,
}

impl Serialize for IntPoly {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        PolyJson {
            basis: self.basis.letter().to_string(),
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = PolyJson::deserialize(deserializer)?;
        let basis = Basis::parse(&raw.basis)
            .ok_or_else(|| D::Error::custom(format!("unknown basis {:?}", raw.basis)))?;
        let mut coeffs = Vec::with_capacity(raw.coeffs.len());
        for s in &raw.coeffs {
            let c: BigInt = s
                .parse()
                .map_err(|_| D::Error::custom(format!("bad coefficient {s:?}")))?;
            coeffs.push(c);
        }
        Ok(IntPoly::new(basis, coeffs))
    }
}
