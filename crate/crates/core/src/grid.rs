//! Finite-resolution models of functions on `G*` and `G`.
//!
//! A [`Window`] is a range of digit positions `[lo, hi]`. A cell of the
//! window fixes the digits at those positions; digits below `lo` are zero and
//! digits above `hi` are ignored. Cells are indexed by
//! `Σ_pos digit(pos) · p^(pos - lo)`, so the lowest position is the least
//! significant digit.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{DigitSequence, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub p: u8,
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(p: u8, lo: i64, hi: i64) -> Result<Self> {
        crate::group::check_modulus(p)?;
        if hi < lo {
            return Err(Error::Resolution(format!("empty window [{lo}..{hi}]")));
        }
        let w = Self { p, lo, hi };
        if (w.width() as f64) * (p as f64).log2() > 40.0 {
            return Err(Error::Resolution(format!(
                "window [{lo}..{hi}] has too many cells for p = {p}"
            )));
        }
        Ok(w)
    }

    pub fn width(&self) -> u32 {
        (self.hi - self.lo + 1) as u32
    }

    pub fn len(&self) -> usize {
        (self.p as usize).pow(self.width())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains_position(&self, pos: i64) -> bool {
        (self.lo..=self.hi).contains(&pos)
    }

    /// Weight `p^(pos - lo)` of a position inside the window.
    pub fn weight(&self, pos: i64) -> usize {
        (self.p as usize).pow((pos - self.lo) as u32)
    }

    pub fn digit(&self, idx: usize, pos: i64) -> u8 {
        if !self.contains_position(pos) {
            return 0;
        }
        ((idx / self.weight(pos)) % self.p as usize) as u8
    }

    /// Digits of a cell, ordered from position `lo` to `hi`.
    pub fn tuple(&self, idx: usize) -> Vec<u8> {
        let p = self.p as usize;
        let mut rest = idx;
        (0..self.width())
            .map(|_| {
                let d = (rest % p) as u8;
                rest /= p;
                d
            })
            .collect()
    }

    pub fn index_of_tuple(&self, tuple: &[u8]) -> usize {
        tuple.iter().rev().fold(0, |acc, &d| acc * self.p as usize + d as usize)
    }

    /// Cell containing `x`, or `None` when `x` has a nonzero digit below `lo`.
    pub fn index_of(&self, x: &DigitSequence) -> Option<usize> {
        if !x.is_zero() && x.lo() < self.lo {
            return None;
        }
        Some((self.lo..=self.hi).rev().fold(0, |acc, pos| acc * self.p as usize + x.digit(pos) as usize))
    }

    /// Representative of a cell: digits outside the window are zero.
    pub fn representative(&self, idx: usize, side: Side) -> DigitSequence {
        DigitSequence::new(self.p, side, self.lo, self.tuple(idx)).expect("digits in range")
    }

    /// Cell of `Bx` (or `Ax`), defined when the digit at `lo` is zero.
    pub fn dilate_index(&self, idx: usize) -> Option<usize> {
        (idx % self.p as usize == 0).then(|| idx / self.p as usize)
    }

    /// Cell of `B^{-1}x`; the digit leaving the top of the window is dropped.
    pub fn contract_index(&self, idx: usize) -> usize {
        (idx * self.p as usize) % self.len()
    }

    /// Index of the coset tuple on positions `1..=r` (which must lie in the window).
    pub fn table_index(&self, idx: usize, r: u32) -> usize {
        (idx / self.weight(1)) % (self.p as usize).pow(r)
    }

    /// Human-readable tuple, digits from position `hi` down to `lo`, so that
    /// index order is lexicographic order of the printed strings.
    pub fn tuple_label(&self, idx: usize) -> String {
        self.tuple(idx).iter().rev().map(|d| char::from_digit(*d as u32, 36).unwrap()).collect()
    }
}

/// Index of the resolution-`r` coset `(ω_1, .., ω_r)` containing `w`.
pub fn coset_index(w: &DigitSequence, r: u32) -> usize {
    (1..=r as i64).rev().fold(0, |acc, pos| acc * w.p() as usize + w.digit(pos) as usize)
}

/// Value of an `H^⊥`-periodic coset table at a point of `G*`.
pub fn table_value(table: &[Complex64], r: u32, w: &DigitSequence) -> Complex64 {
    table[coset_index(w, r)]
}

/// `∏_{j≥1} table(B^{-j} w)` for a finitely supported `w`, assuming the
/// table equals one at the zero coset (every factor past the last one read
/// here lands on the zero coset).
pub fn contracted_product(table: &[Complex64], r: u32, w: &DigitSequence) -> Complex64 {
    if w.is_zero() {
        return Complex64::new(1.0, 0.0);
    }
    let last = r as i64 - w.lo();
    (1..=last).fold(Complex64::new(1.0, 0.0), |acc, j| {
        acc * table_value(table, r, &w.dilate(-j))
    })
}

/// A complex-valued function on `G*` sampled on the cells of a window.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    window: Window,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(window: Window, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::InvalidInput(format!(
                "grid of width {} needs {} values, got {}",
                window.width(),
                window.len(),
                values.len()
            )));
        }
        Ok(Self { window, values })
    }

    pub fn from_fn(window: Window, f: impl FnMut(usize) -> Complex64) -> Self {
        Self { window, values: (0..window.len()).map(f).collect() }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn p(&self) -> u8 {
        self.window.p
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, idx: usize) -> Complex64 {
        self.values[idx]
    }

    /// Value at a point; zero when the point lies outside the window's support.
    pub fn value_at(&self, w: &DigitSequence) -> Complex64 {
        self.window.index_of(w).map_or(Complex64::new(0.0, 0.0), |i| self.values[i])
    }

    pub fn energy(&self) -> f64 {
        let cell = (self.p() as f64).powi(-(self.window.hi as i32));
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * cell
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { window: self.window, values: self.values.iter().map(|z| z * c).collect() }
    }

    /// CSV with columns `tuple_digits,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tuple_digits,re,im\n");
        for (i, z) in self.values.iter().enumerate() {
            writeln!(out, "{},{:.16e},{:.16e}", self.window.tuple_label(i), z.re, z.im).unwrap();
        }
        out
    }
}

/// A complex-valued function on `G` constant on the cells of a window.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    window: Window,
    values: Vec<Complex64>,
}

impl StepFunction {
    pub fn new(window: Window, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::InvalidInput(format!(
                "step function needs {} values, got {}",
                window.len(),
                values.len()
            )));
        }
        Ok(Self { window, values })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn cell_measure(&self) -> f64 {
        (self.window.p as f64).powi(-(self.window.hi as i32))
    }

    pub fn value_at(&self, x: &DigitSequence) -> Complex64 {
        self.window.index_of(x).map_or(Complex64::new(0.0, 0.0), |i| self.values[i])
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell_measure()).sqrt()
    }

    /// Synthesizes `f(x) = ∫ f̂(ω) χ(x, ω) dω` from spectrum samples.
    ///
    /// The spectrum window `[lo, hi]` maps to primal positions
    /// `[1 - hi, 1 - lo]`; the result is evaluated at cell representatives of
    /// `target`, which must lie inside `U_{-hi}`.
    pub fn synthesize(spectrum: &GridFunction, target: Window) -> Result<Self> {
        let sw = spectrum.window();
        if target.lo < 1 - sw.hi {
            return Err(Error::Resolution(format!(
                "target window starts at {} but the spectrum only resolves from {}",
                target.lo,
                1 - sw.hi
            )));
        }
        let p = sw.p;
        let roots = crate::group::roots_of_unity(p);
        let tuples: Vec<(Vec<u8>, Complex64)> = (0..sw.len())
            .filter(|&i| spectrum.get(i) != Complex64::new(0.0, 0.0))
            .map(|i| (sw.tuple(i), spectrum.get(i)))
            .collect();
        let measure = (p as f64).powi(-(sw.hi as i32));
        let values = (0..target.len())
            .map(|cell| {
                let sum = tuples.iter().fold(Complex64::new(0.0, 0.0), |acc, (t, v)| {
                    // x at position j pairs with ω at 1 - j
                    let s: u32 = t
                        .iter()
                        .enumerate()
                        .map(|(k, &d)| {
                            let j = 1 - (sw.lo + k as i64);
                            d as u32 * target.digit(cell, j) as u32
                        })
                        .sum();
                    acc + v * roots[(s % p as u32) as usize]
                });
                sum * measure
            })
            .collect();
        Self::new(target, values)
    }

    /// CSV with columns `tuple_digits,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tuple_digits,re,im\n");
        for (i, z) in self.values.iter().enumerate() {
            writeln!(out, "{},{:.16e},{:.16e}", self.window.tuple_label(i), z.re, z.im).unwrap();
        }
        out
    }
}

/// A coset of `G*` fixed by digits on a run of consecutive positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CosetIndex {
    pub p: u8,
    pub first: i64,
    pub tuple: Vec<u8>,
}

impl CosetIndex {
    /// The resolution-`r` coset `U*_{r,s}`: positions `1..=r`, digits of `s` in base `p`.
    pub fn from_index(p: u8, r: u32, s: usize) -> Self {
        let w = Window { p, lo: 1, hi: r as i64 };
        let tuple = if r == 0 { Vec::new() } else { w.tuple(s) };
        Self { p, first: 1, tuple }
    }

    pub fn index(&self) -> usize {
        self.tuple.iter().rev().fold(0, |acc, &d| acc * self.p as usize + d as usize)
    }

    pub fn positions(&self) -> std::ops::Range<i64> {
        self.first..self.first + self.tuple.len() as i64
    }

    pub fn contains(&self, w: &DigitSequence) -> bool {
        self.positions().zip(&self.tuple).all(|(pos, &d)| w.digit(pos) == d)
    }
}
