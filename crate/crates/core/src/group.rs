//! Exact arithmetic on the Vilenkin group `G` and its dual `G*`.
//!
//! Elements of both groups are two-sided digit sequences over `{0, .., p-1}`
//! that vanish below some index. Only finitely supported sequences are
//! representable. Addition is digitwise modulo `p` with no carries, and the
//! dilations `A` (on `G`) and `B` (on `G*`) shift indices by one.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest supported modulus.
pub const MAX_P: u8 = 31;

/// Which group a sequence belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// An element of `G`.
    Primal,
    /// An element of the dual group `G*`.
    Dual,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Primal => "primal",
            Side::Dual => "dual",
        }
    }
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primal" => Ok(Side::Primal),
            "dual" => Ok(Side::Dual),
            other => Err(Error::InvalidInput(format!("unknown side `{other}`"))),
        }
    }
}

pub fn is_prime(p: u8) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Checks that `p` is a prime in `2..=31`.
pub fn check_modulus(p: u8) -> Result<()> {
    if p > MAX_P || !is_prime(p) {
        return Err(Error::InvalidOperand(format!(
            "modulus {p} must be a prime no larger than {MAX_P}"
        )));
    }
    Ok(())
}

/// `exp(2 pi i k / p)`.
pub fn root_of_unity(p: u8, k: u32) -> Complex64 {
    let k = k % p as u32;
    Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / p as f64)
}

/// All `p`-th roots of unity, indexed by exponent.
pub fn roots_of_unity(p: u8) -> Vec<Complex64> {
    (0..p as u32).map(|k| root_of_unity(p, k)).collect()
}

/// A finitely supported digit sequence in canonical form.
///
/// `digits[k]` is the digit at index `lo + k`. The first and last stored
/// digits are nonzero; the identity `θ` has no stored digits and `lo = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitSequence {
    p: u8,
    side: Side,
    lo: i64,
    digits: Vec<u8>,
}

impl DigitSequence {
    pub fn new(p: u8, side: Side, lo: i64, digits: Vec<u8>) -> Result<Self> {
        check_modulus(p)?;
        if let Some(d) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::InvalidOperand(format!("digit {d} out of range for p = {p}")));
        }
        Ok(Self::canonical(p, side, lo, digits))
    }

    fn canonical(p: u8, side: Side, mut lo: i64, mut digits: Vec<u8>) -> Self {
        while digits.last() == Some(&0) {
            digits.pop();
        }
        let lead = digits.iter().take_while(|&&d| d == 0).count();
        if lead == digits.len() {
            return Self { p, side, lo: 0, digits: Vec::new() };
        }
        digits.drain(..lead);
        lo += lead as i64;
        Self { p, side, lo, digits }
    }

    /// Builds a sequence from `(index, digit)` pairs; later pairs overwrite earlier ones.
    pub fn from_pairs(p: u8, side: Side, pairs: &[(i64, u8)]) -> Result<Self> {
        if pairs.is_empty() {
            return Self::new(p, side, 0, Vec::new());
        }
        let lo = pairs.iter().map(|&(j, _)| j).min().unwrap();
        let hi = pairs.iter().map(|&(j, _)| j).max().unwrap();
        let mut digits = vec![0u8; (hi - lo + 1) as usize];
        for &(j, d) in pairs {
            digits[(j - lo) as usize] = d;
        }
        Self::new(p, side, lo, digits)
    }

    /// The identity element `θ`.
    pub fn zero(p: u8, side: Side) -> Self {
        Self { p, side, lo: 0, digits: Vec::new() }
    }

    /// `h_[α]` (primal) or `ω_[α]` (dual): base-`p` digits of `alpha` at
    /// indices `0, -1, -2, ...`.
    pub fn from_integer(p: u8, alpha: u64, side: Side) -> Result<Self> {
        check_modulus(p)?;
        let mut digits = Vec::new();
        let mut a = alpha;
        while a > 0 {
            digits.push((a % p as u64) as u8);
            a /= p as u64;
        }
        // digit t sits at index -t, so the lowest index carries the last digit
        digits.reverse();
        let lo = 1 - digits.len() as i64;
        Ok(Self::canonical(p, side, lo, digits))
    }

    /// `δ_l`: the dual sequence with the single digit `l` at index 1.
    pub fn delta(p: u8, l: u8) -> Result<Self> {
        Self::from_pairs(p, Side::Dual, &[(1, l % p)])
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Largest index with a stored digit, `None` for `θ`.
    pub fn hi(&self) -> Option<i64> {
        (!self.digits.is_empty()).then(|| self.lo + self.digits.len() as i64 - 1)
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// Digit at index `j` (zero outside the stored range).
    pub fn digit(&self, j: i64) -> u8 {
        if j < self.lo {
            return 0;
        }
        self.digits.get((j - self.lo) as usize).copied().unwrap_or(0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::InvalidOperand(format!(
                "modulus mismatch: {} vs {}",
                self.p, other.p
            )));
        }
        if self.side != other.side {
            return Err(Error::InvalidOperand("cannot combine primal and dual sequences".into()));
        }
        Ok(())
    }

    /// `x ⊕ y`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.combine(other, |a, b| a + b))
    }

    /// `x ⊖ y`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let p = self.p;
        Ok(self.combine(other, |a, b| a + p - b))
    }

    fn combine(&self, other: &Self, f: impl Fn(u8, u8) -> u8) -> Self {
        if self.is_zero() && other.is_zero() {
            return self.clone();
        }
        let lo = match (self.is_zero(), other.is_zero()) {
            (true, _) => other.lo,
            (_, true) => self.lo,
            _ => self.lo.min(other.lo),
        };
        let hi = self.hi().into_iter().chain(other.hi()).max().unwrap();
        let digits = (lo..=hi)
            .map(|j| f(self.digit(j), other.digit(j)) % self.p)
            .collect();
        Self::canonical(self.p, self.side, lo, digits)
    }

    pub fn negate(&self) -> Self {
        let p = self.p;
        let digits = self.digits.iter().map(|&d| (p - d) % p).collect();
        Self::canonical(p, self.side, self.lo, digits)
    }

    /// Applies `A^k` (primal) or `B^k` (dual): the digit at index `j` of the
    /// result is the digit at index `j + k` of `self`.
    pub fn dilate(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self { lo: self.lo - k, ..self.clone() }
    }

    /// `λ(x) = Σ x_j p^{-j}` as an exact rational.
    pub fn lambda_value(&self) -> ExactRational {
        let Some(hi) = self.hi() else {
            return ExactRational::zero(self.p);
        };
        let exp = hi.max(0);
        let p = BigUint::from(self.p);
        let mut num = BigUint::zero();
        // Horner over descending powers: index lo has weight p^{exp - lo}
        for j in self.lo.min(0)..=exp {
            num = num * &p + BigUint::from(self.digit(j));
        }
        ExactRational::new(self.p, num, exp as u32)
    }
}

/// Exact pairing sum `Σ_j x_j ω_{1-j} mod p`.
pub fn pairing(x: &DigitSequence, w: &DigitSequence) -> Result<u32> {
    if x.p != w.p {
        return Err(Error::InvalidOperand(format!(
            "modulus mismatch: {} vs {}",
            x.p, w.p
        )));
    }
    if x.side != Side::Primal || w.side != Side::Dual {
        return Err(Error::InvalidOperand(
            "character expects a primal point and a dual point".into(),
        ));
    }
    let p = x.p as u32;
    let s = x
        .digits
        .iter()
        .enumerate()
        .map(|(k, &d)| d as u32 * w.digit(1 - (x.lo + k as i64)) as u32 % p)
        .sum::<u32>();
    Ok(s % p)
}

/// `χ(x, ω) = exp(2πi/p · Σ x_j ω_{1-j})`.
pub fn character(x: &DigitSequence, w: &DigitSequence) -> Result<Complex64> {
    Ok(root_of_unity(x.p, pairing(x, w)?))
}

impl fmt::Display for DigitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        write!(
            f,
            "p={} side={} lo={} digits={}",
            self.p,
            self.side.as_str(),
            self.lo,
            digits.join(",")
        )
    }
}

impl FromStr for DigitSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = None;
        let mut side = None;
        let mut lo = None;
        let mut digits = None;
        for field in s.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("malformed field `{field}`")))?;
            let bad = |_| Error::InvalidInput(format!("bad value in `{field}`"));
            match key {
                "p" => p = Some(value.parse::<u8>().map_err(bad)?),
                "side" => side = Some(value.parse::<Side>()?),
                "lo" => lo = Some(value.parse::<i64>().map_err(bad)?),
                "digits" => {
                    let ds = if value.is_empty() {
                        Vec::new()
                    } else {
                        value
                            .split(',')
                            .map(|d| d.parse::<u8>())
                            .collect::<std::result::Result<Vec<_>, _>>()
                            .map_err(bad)?
                    };
                    digits = Some(ds);
                }
                _ => return Err(Error::InvalidInput(format!("unknown field `{key}`"))),
            }
        }
        let missing = |name: &str| Error::InvalidInput(format!("missing field `{name}`"));
        Self::new(
            p.ok_or_else(|| missing("p"))?,
            side.ok_or_else(|| missing("side"))?,
            lo.ok_or_else(|| missing("lo"))?,
            digits.unwrap_or_default(),
        )
    }
}

/// A nonnegative rational `numerator / p^exponent` in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactRational {
    p: u8,
    numerator: BigUint,
    exponent: u32,
}

impl ExactRational {
    pub fn new(p: u8, mut numerator: BigUint, mut exponent: u32) -> Self {
        let pb = BigUint::from(p);
        if numerator.is_zero() {
            exponent = 0;
        }
        while exponent > 0 && (&numerator % &pb).is_zero() {
            numerator /= &pb;
            exponent -= 1;
        }
        Self { p, numerator, exponent }
    }

    pub fn zero(p: u8) -> Self {
        Self { p, numerator: BigUint::zero(), exponent: 0 }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn denominator(&self) -> BigUint {
        num_traits::pow(BigUint::from(self.p), self.exponent as usize)
    }

    pub fn is_integer(&self) -> bool {
        self.exponent == 0
    }

    pub fn to_u64(&self) -> Option<u64> {
        if self.is_integer() {
            self.numerator.to_u64()
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator.to_f64().unwrap_or(f64::INFINITY) / (self.p as f64).powi(self.exponent as i32)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator().is_one() {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, self.denominator())
        }
    }
}
