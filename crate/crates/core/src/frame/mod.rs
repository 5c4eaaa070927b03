//! Generalized filters, pseudo-scaling functions and Parseval frame
//! multiwavelets built from them.
//!
//! Every filter is a table over the resolution-`R` cosets `(ω_1, .., ω_R)`,
//! so all infinite products over dilates terminate and can be evaluated
//! exactly at points with finitely many digits.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, Window};
use crate::group::{check_modulus, root_of_unity, DigitSequence, Side};
use crate::mask::contracted_grid;

mod oracle;

pub use oracle::{frame_oracle, MaterializedSystem, OracleReport};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Sign convention for the cross condition on the filter family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterMode {
    /// `m_0(ω) conj(m_0(ω⊕β)) = Σ_{i≥1} m_i(ω) conj(m_i(ω⊕β))`.
    Paper,
    /// `Σ_{i≥0} m_i(ω) conj(m_i(ω⊕β)) = 0`.
    Classical,
}

impl FilterMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterMode::Paper => "paper",
            FilterMode::Classical => "classical",
        }
    }
}

impl std::str::FromStr for FilterMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(FilterMode::Paper),
            "classical" => Ok(FilterMode::Classical),
            _ => Err(Error::InvalidInput(format!("unknown filter mode {s:?}"))),
        }
    }
}

/// Whether the wavelet spectra use `m_i(ω)` or `conj(m_i(ω))`.
///
/// Only [`HighPassForm::Filter`] yields a Parseval frame for filters with
/// complex values; for real filters both agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HighPassForm {
    #[default]
    Filter,
    ConjugateFilter,
}

/// The family `m_0, .., m_{p-1}` as tables on resolution-`R` cosets.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedFilter {
    p: u8,
    r: u32,
    tables: Vec<Vec<Complex64>>,
}

impl GeneralizedFilter {
    pub fn new(p: u8, r: u32, tables: Vec<Vec<Complex64>>) -> Result<Self> {
        check_modulus(p)?;
        if r == 0 {
            return Err(Error::InvalidInput("filter resolution must be at least 1".into()));
        }
        if tables.len() != p as usize {
            return Err(Error::InvalidInput(format!(
                "expected {p} filter tables, got {}",
                tables.len()
            )));
        }
        let len = (p as usize).pow(r);
        if let Some((i, t)) = tables.iter().enumerate().find(|(_, t)| t.len() != len) {
            return Err(Error::InvalidInput(format!(
                "filter {i} has {} values, expected {len}",
                t.len()
            )));
        }
        Ok(Self { p, r, tables })
    }

    /// `m_i` is the indicator of `ω_1 = i`.
    pub fn haar(p: u8) -> Result<Self> {
        let pu = p as usize;
        let tables = (0..pu)
            .map(|i| (0..pu).map(|l| if l == i { ONE } else { ZERO }).collect())
            .collect();
        Self::new(p, 1, tables)
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn resolution(&self) -> u32 {
        self.r
    }

    pub fn tables(&self) -> &[Vec<Complex64>] {
        &self.tables
    }

    pub fn table(&self, i: usize) -> &[Complex64] {
        &self.tables[i]
    }

    /// Index of the coset `ω ⊕ δ_l` given the index of `ω`.
    fn shift_first(&self, s: usize, l: usize) -> usize {
        let p = self.p as usize;
        s - s % p + (s % p + l) % p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterValidationReport {
    pub mode: FilterMode,
    pub tol: f64,
    pub sum_residual: f64,
    pub cross_residual_paper: f64,
    pub cross_residual_classical: f64,
    pub theta_modulus: f64,
}

impl FilterValidationReport {
    pub fn cross_residual(&self) -> f64 {
        match self.mode {
            FilterMode::Paper => self.cross_residual_paper,
            FilterMode::Classical => self.cross_residual_classical,
        }
    }

    pub fn passed(&self) -> bool {
        self.sum_residual <= self.tol && self.cross_residual() <= self.tol
    }
}

impl fmt::Display for FilterValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode={}", self.mode.as_str())?;
        writeln!(f, "sum_residual={:e}", self.sum_residual)?;
        writeln!(f, "cross_residual_paper={:e}", self.cross_residual_paper)?;
        writeln!(f, "cross_residual_classical={:e}", self.cross_residual_classical)?;
        writeln!(f, "theta_modulus={}", self.theta_modulus)?;
        writeln!(f, "valid={}", self.passed())
    }
}

/// Checks `Σ_i |m_i|² = 1` and the cross condition for every coset and every
/// shift `δ_l`, `l ≠ 0`. Shifts by `β = B^{-1}γ`, `γ ∈ H^⊥ \ BH^⊥`, reduce to
/// these by periodicity.
pub fn validate_filter(f: &GeneralizedFilter, mode: FilterMode, tol: f64) -> FilterValidationReport {
    let p = f.p as usize;
    let len = f.tables[0].len();
    let mut sum_residual: f64 = 0.0;
    let mut paper: f64 = 0.0;
    let mut classical: f64 = 0.0;
    for s in 0..len {
        let total: f64 = f.tables.iter().map(|t| t[s].norm_sqr()).sum();
        sum_residual = sum_residual.max((total - 1.0).abs());
        for l in 1..p {
            let q = f.shift_first(s, l);
            let terms: Vec<Complex64> = f.tables.iter().map(|t| t[s] * t[q].conj()).collect();
            let high: Complex64 = terms[1..].iter().sum();
            paper = paper.max((terms[0] - high).norm());
            classical = classical.max((terms[0] + high).norm());
        }
    }
    FilterValidationReport {
        mode,
        tol,
        sum_residual,
        cross_residual_paper: paper,
        cross_residual_classical: classical,
        theta_modulus: f.tables[0][0].norm(),
    }
}

fn spectral_window(p: u8, k: u32, r: u32) -> Result<Window> {
    Window::new(p, 1 - k as i64, r as i64)
}

/// `φ̂_{|m_0|}(ω) = ∏_{j≥1} |m_0|(B^{-j}ω)` on the window `[1-K, R]`.
pub fn pseudo_spectrum(f: &GeneralizedFilter, k: u32) -> Result<GridFunction> {
    let modulus = modulus_table(f);
    if (modulus[0].re - 1.0).abs() > 1e-12 {
        return Err(Error::DegenerateFilter(format!(
            "|m0| at the zero coset is {}, so the product tends to zero",
            modulus[0].re
        )));
    }
    Ok(contracted_grid(&modulus, f.r, spectral_window(f.p, k, f.r)?))
}

fn modulus_table(f: &GeneralizedFilter) -> Vec<Complex64> {
    f.tables[0].iter().map(|z| Complex64::new(z.norm(), 0.0)).collect()
}

/// `μ = m_0 / |m_0|`, with `μ = 1` where `m_0` vanishes.
pub fn signum(f: &GeneralizedFilter) -> Vec<Complex64> {
    f.tables[0].iter().map(|&z| if z == ZERO { ONE } else { z / z.norm() }).collect()
}

/// A unimodular `v` with `μ(ω) = v(Bω) conj(v(ω))`, sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CocycleSolution {
    pub v: GridFunction,
    /// Largest `|μ(ω) - v(Bω) conj(v(ω))|` over cells where `Bω` is resolved.
    pub residual: f64,
}

/// Solves the cocycle equation by `v(ω) = ∏_{j≥1} μ(B^{-j}ω)` on `[1-K, R]`.
pub fn solve_v(p: u8, r: u32, mu: &[Complex64], k: u32) -> Result<CocycleSolution> {
    check_modulus(p)?;
    if mu.len() != (p as usize).pow(r) {
        return Err(Error::InvalidInput(format!("signum table needs {} values", (p as usize).pow(r))));
    }
    if (mu[0] - 1.0).norm() > 1e-12 {
        return Err(Error::DegenerateFilter(format!(
            "signum at the zero coset is {}, not 1; no terminating solution",
            mu[0]
        )));
    }
    let window = spectral_window(p, k, r)?;
    let v = contracted_grid(mu, r, window);
    let residual = (0..window.len())
        .filter_map(|idx| {
            let b = window.dilate_index(idx)?;
            let m = mu[window.table_index(idx, r)];
            Some((m - v.get(b) * v.get(idx).conj()).norm())
        })
        .fold(0.0, f64::max);
    Ok(CocycleSolution { v, residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowPassReport {
    pub tol: f64,
    pub theta_modulus: f64,
    pub window: Window,
    /// `lim_j φ̂_{|m_0|}(B^{-j}ω)` per cell of `window`.
    pub limits: Vec<f64>,
}

impl LowPassReport {
    pub fn passed(&self) -> bool {
        (self.theta_modulus - 1.0).abs() <= self.tol
    }
}

impl fmt::Display for LowPassReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.limits.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.limits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        writeln!(f, "theta_modulus={}", self.theta_modulus)?;
        writeln!(f, "limit_min={lo}")?;
        writeln!(f, "limit_max={hi}")?;
        writeln!(f, "criterion=theta_modulus_is_one")?;
        writeln!(f, "low_pass={}", self.passed())
    }
}

/// Generalized low-pass test. At finite resolution every dilate `B^{-j}ω`
/// eventually lies in the zero coset, so the tail limit is `|m_0(θ)|^∞` for
/// every cell and the set where it vanishes is null iff `|m_0(θ)| = 1`.
pub fn low_pass_check(f: &GeneralizedFilter, k: u32, tol: f64) -> Result<LowPassReport> {
    let window = spectral_window(f.p, k, f.r)?;
    let theta_modulus = f.tables[0][0].norm();
    let limit = if (theta_modulus - 1.0).abs() <= tol {
        1.0
    } else if theta_modulus < 1.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(LowPassReport { tol, theta_modulus, window, limits: vec![limit; window.len()] })
}

/// Digits of a finitely supported dual point, read along its `B`-orbit.
struct Orbit<'a> {
    w: &'a DigitSequence,
}

impl Orbit<'_> {
    /// Index of the digits `(ω_{1+s}, .., ω_{r+s})`, i.e. the coset of `B^s ω`.
    fn coset(&self, p: usize, r: u32, s: i64) -> usize {
        (0..r as i64).rev().fold(0, |acc, t| acc * p + self.w.digit(1 + s + t) as usize)
    }

    /// First `s` for which the coset of `B^s ω` can be nonzero.
    fn start(&self, r: u32) -> i64 {
        if self.w.is_zero() {
            i64::MAX
        } else {
            self.w.lo() - r as i64
        }
    }
}

/// The pseudo-scaling function `φ̂ = v · φ̂_{|m_0|}` of a generalized filter.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoScaling {
    p: u8,
    r: u32,
    k: u32,
    mu: Vec<Complex64>,
    modulus: Vec<Complex64>,
    scale: Complex64,
    grid: GridFunction,
    v: CocycleSolution,
    refinement_residual: f64,
}

/// Builds `φ̂(ω) = v(ω) φ̂_{|m_0|}(ω)` and checks `φ̂(Bω) = m_0(ω) φ̂(ω)` on the
/// grid `[1-K, R]`.
pub fn build_pseudo_scaling(f: &GeneralizedFilter, k: u32) -> Result<PseudoScaling> {
    let abs_part = pseudo_spectrum(f, k)?;
    let mu = signum(f);
    let v = solve_v(f.p, f.r, &mu, k)?;
    let window = abs_part.window();
    let grid = GridFunction::from_fn(window, |i| v.v.get(i) * abs_part.get(i));
    let m0 = &f.tables[0];
    let refinement_residual = (0..window.len())
        .filter_map(|idx| {
            let b = window.dilate_index(idx)?;
            Some((grid.get(b) - m0[window.table_index(idx, f.r)] * grid.get(idx)).norm())
        })
        .fold(0.0, f64::max);
    Ok(PseudoScaling {
        p: f.p,
        r: f.r,
        k,
        mu,
        modulus: modulus_table(f),
        scale: ONE,
        grid,
        v,
        refinement_residual,
    })
}

impl PseudoScaling {
    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn depth(&self) -> u32 {
        self.k
    }

    pub fn grid(&self) -> &GridFunction {
        &self.grid
    }

    pub fn cocycle(&self) -> &CocycleSolution {
        &self.v
    }

    pub fn signum(&self) -> &[Complex64] {
        &self.mu
    }

    /// Largest `|φ̂(Bω) - m_0(ω) φ̂(ω)|` on the grid.
    pub fn refinement_residual(&self) -> f64 {
        self.refinement_residual
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.scale *= c;
        out.grid = self.grid.scaled(c);
        out.refinement_residual *= c.norm();
        out
    }

    /// `φ̂(B^s ω)` for `s` in `s_lo..=s_hi`.
    fn along_orbit(&self, orbit: &Orbit, s_lo: i64, s_hi: i64) -> Vec<Complex64> {
        let p = self.p as usize;
        let start = orbit.start(self.r);
        let mut v = ONE;
        let mut a = ONE;
        let mut u = start.min(s_lo);
        while u < s_lo {
            let c = orbit.coset(p, self.r, u);
            v *= self.mu[c];
            a *= self.modulus[c];
            u += 1;
        }
        let mut out = Vec::with_capacity((s_hi - s_lo + 1) as usize);
        for s in s_lo..=s_hi {
            out.push(self.scale * v * a);
            if s >= start {
                let c = orbit.coset(p, self.r, s);
                v *= self.mu[c];
                a *= self.modulus[c];
            }
        }
        out
    }

    /// `φ̂(ω)` at a point with finitely many digits.
    pub fn eval(&self, w: &DigitSequence) -> Complex64 {
        self.along_orbit(&Orbit { w }, 0, 0)[0]
    }
}

/// Unimodular `H^⊥`-periodic tables `s_1, .., s_{p-1}` on resolution-`r` cosets.
#[derive(Debug, Clone, PartialEq)]
pub struct Modulators {
    r: u32,
    tables: Vec<Vec<Complex64>>,
}

impl Modulators {
    /// `s_i ≡ 1`.
    pub fn identity(p: u8) -> Self {
        Self { r: 1, tables: vec![vec![ONE; p as usize]; p as usize - 1] }
    }

    pub fn new(p: u8, r: u32, tables: Vec<Vec<Complex64>>) -> Result<Self> {
        check_modulus(p)?;
        let len = (p as usize).pow(r);
        if r == 0 || tables.len() != p as usize - 1 || tables.iter().any(|t| t.len() != len) {
            return Err(Error::InvalidInput(format!(
                "need {} modulator tables of length {len}",
                p - 1
            )));
        }
        if tables.iter().flatten().any(|z| (z.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidInput("modulator values must have modulus 1".into()));
        }
        Ok(Self { r, tables })
    }

    pub fn resolution(&self) -> u32 {
        self.r
    }
}

/// The spectra `ψ̂_1, .., ψ̂_{p-1}` of an MRA Parseval frame multiwavelet,
/// defined by `ψ̂_i(Bω) = W*_α(ω) s_i(Bω) m_i(ω) φ̂(ω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiwaveletSpectrum {
    filter: GeneralizedFilter,
    phi: PseudoScaling,
    alpha_digits: Vec<u32>,
    alpha: u64,
    modulators: Modulators,
    form: HighPassForm,
    gain: Complex64,
    spectra: Vec<GridFunction>,
}

/// Samples the wavelet spectra on `[-K, max(R, r_s)]`, where `K` is the
/// depth of `phi`.
pub fn pfmw_build(
    f: &GeneralizedFilter,
    phi: &PseudoScaling,
    alpha: u64,
    s: &Modulators,
    form: HighPassForm,
) -> Result<MultiwaveletSpectrum> {
    if phi.p != f.p || phi.r != f.r {
        return Err(Error::InvalidInput("pseudo-scaling function was built from another filter".into()));
    }
    if s.tables.len() != f.p as usize - 1 {
        return Err(Error::InvalidInput(format!("need {} modulator tables", f.p - 1)));
    }
    let window = Window::new(f.p, -(phi.k as i64), f.r.max(s.r) as i64)?;
    let p = f.p as u64;
    let mut alpha_digits = Vec::new();
    let mut a = alpha;
    while a > 0 {
        alpha_digits.push((a % p) as u32);
        a /= p;
    }
    let mut out = MultiwaveletSpectrum {
        filter: f.clone(),
        phi: phi.clone(),
        alpha_digits,
        alpha,
        modulators: s.clone(),
        form,
        gain: ONE,
        spectra: Vec::new(),
    };
    out.spectra = out.sample(window);
    Ok(out)
}

impl MultiwaveletSpectrum {
    pub fn p(&self) -> u8 {
        self.filter.p
    }

    pub fn window(&self) -> Window {
        self.spectra[0].window()
    }

    pub fn spectra(&self) -> &[GridFunction] {
        &self.spectra
    }

    pub fn filter(&self) -> &GeneralizedFilter {
        &self.filter
    }

    pub fn pseudo_scaling(&self) -> &PseudoScaling {
        &self.phi
    }

    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    pub fn form(&self) -> HighPassForm {
        self.form
    }

    /// The same system with every `ψ_i` multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.gain *= c;
        out.spectra = self.spectra.iter().map(|g| g.scaled(c)).collect();
        out
    }

    fn sample(&self, window: Window) -> Vec<GridFunction> {
        let n = self.p() as usize - 1;
        let cells: Vec<Vec<Complex64>> = (0..window.len())
            .map(|idx| self.along_orbit(&window.representative(idx, Side::Dual), 0, 0))
            .collect();
        (0..n)
            .map(|i| GridFunction::from_fn(window, |idx| cells[idx][i]))
            .collect()
    }

    /// `ψ̂_i(ξ)` for `i` in `1..p`.
    pub fn eval(&self, i: usize, xi: &DigitSequence) -> Complex64 {
        self.along_orbit(xi, 0, 0)[i - 1]
    }

    /// `ψ̂_i(B^j ω)` for `j` in `j_lo..=j_hi`, flattened as `[(j - j_lo)(p-1) + i - 1]`.
    fn along_orbit(&self, w: &DigitSequence, j_lo: i64, j_hi: i64) -> Vec<Complex64> {
        let p = self.p() as usize;
        let orbit = Orbit { w };
        let phis = self.phi.along_orbit(&orbit, j_lo - 1, j_hi - 1);
        let mut out = Vec::with_capacity((j_hi - j_lo + 1) as usize * (p - 1));
        for (k, j) in (j_lo..=j_hi).enumerate() {
            // W*_α(B^{j-1}ω) pairs α_t with ω_{t+j}
            let e: u32 = self
                .alpha_digits
                .iter()
                .enumerate()
                .map(|(t, &a)| a * w.digit(t as i64 + j) as u32)
                .sum();
            let walsh = root_of_unity(self.p(), e % p as u32);
            let common = self.gain * walsh * phis[k];
            let cm = orbit.coset(p, self.filter.r, j - 1);
            let cs = orbit.coset(p, self.modulators.r, j);
            for i in 1..p {
                let m = self.filter.tables[i][cm];
                let m = match self.form {
                    HighPassForm::Filter => m,
                    HighPassForm::ConjugateFilter => m.conj(),
                };
                out.push(common * self.modulators.tables[i - 1][cs] * m);
            }
        }
        out
    }

    /// CSV with columns `filter_index,tuple_digits,re,im`.
    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("filter_index,tuple_digits,re,im\n");
        for (i, g) in self.spectra.iter().enumerate() {
            let w = g.window();
            for (idx, z) in g.values().iter().enumerate() {
                writeln!(out, "{},{},{:.16e},{:.16e}", i + 1, w.tuple_label(idx), z.re, z.im).unwrap();
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsevalReport {
    pub tol: f64,
    pub j: u32,
    pub a_max: u64,
    /// Number of nonzero points tested.
    pub points: usize,
    /// `max |Σ_i Σ_{|j|≤J} |ψ̂_i(B^j ω)|² - 1|`.
    pub cond1_residual: f64,
    /// `max |Σ_i Σ_{0≤j≤J} ψ̂_i(B^j ω) conj(ψ̂_i(B^j(ω⊕γ)))|` over sampled `γ`.
    pub cond2_residual: f64,
    /// Every term just outside the truncated sums is exactly zero, and the
    /// filter vanishes exactly where the tails need it to.
    pub tail_certified: bool,
}

impl ParsevalReport {
    pub fn passed(&self) -> bool {
        self.tail_certified && self.cond1_residual <= self.tol && self.cond2_residual <= self.tol
    }
}

impl fmt::Display for ParsevalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "points={}", self.points)?;
        writeln!(f, "J={}", self.j)?;
        writeln!(f, "A_max={}", self.a_max)?;
        writeln!(f, "cond1_residual={:e}", self.cond1_residual)?;
        writeln!(f, "cond2_residual={:e}", self.cond2_residual)?;
        writeln!(f, "tail_certified={}", self.tail_certified)?;
        writeln!(f, "parseval={}", self.passed())
    }
}

/// Evaluates both Parseval-frame conditions exactly at the cell
/// representatives of the spectrum window, for `γ = ω_[α]` with
/// `1 ≤ α ≤ A_max`, `α ≢ 0 (mod p)`.
///
/// The sums over `j` stop at `±J`; `J` must reach past every scale on which
/// a tested point can have a nonzero term.
pub fn parseval_check(psi: &MultiwaveletSpectrum, a_max: u64, j: u32, tol: f64) -> Result<ParsevalReport> {
    let window = psi.window();
    let r = psi.filter.r as i64;
    let jj = j as i64;
    let need = window.hi.max(r - 1 - window.lo);
    if jj < need {
        return Err(Error::Resolution(format!(
            "J = {j} is too small for the window [{}..{}]; need J >= {need}",
            window.lo, window.hi
        )));
    }
    let p = psi.p();
    let n = p as usize - 1;
    let gammas: Vec<DigitSequence> = (1..=a_max)
        .filter(|a| a % p as u64 != 0)
        .map(|a| DigitSequence::from_integer(p, a, Side::Dual))
        .collect::<Result<_>>()?;

    let m0 = &psi.filter.tables[0];
    let filter_tails = psi.filter.tables[1..].iter().all(|t| t[0] == ZERO)
        && (1..p as usize).all(|l| m0[l] == ZERO);

    let per_point: Vec<(f64, f64, bool)> = (1..window.len())
        .into_par_iter()
        .map(|idx| {
            let w = window.representative(idx, Side::Dual);
            let vals = psi.along_orbit(&w, -jj - 1, jj + 1);
            let inner = &vals[n..vals.len() - n];
            let s1: f64 = inner.iter().map(|z| z.norm_sqr()).sum();
            let mut tails = vals[..n].iter().chain(&vals[vals.len() - n..]).all(|z| *z == ZERO);
            let mut c2: f64 = 0.0;
            for g in &gammas {
                let wg = w.add(g).expect("same modulus");
                let other = psi.along_orbit(&wg, 0, jj + 1);
                tails &= other[other.len() - n..].iter().all(|z| *z == ZERO);
                let s: Complex64 = vals[(jj + 1) as usize * n..]
                    .iter()
                    .zip(&other)
                    .take((jj + 1) as usize * n)
                    .map(|(a, b)| a * b.conj())
                    .sum();
                c2 = c2.max(s.norm());
            }
            ((s1 - 1.0).abs(), c2, tails)
        })
        .collect();

    let (c1, c2, tails) = per_point
        .iter()
        .fold((0.0f64, 0.0f64, true), |(a, b, t), &(x, y, z)| (a.max(x), b.max(y), t && z));
    Ok(ParsevalReport {
        tol,
        j,
        a_max,
        points: window.len() - 1,
        cond1_residual: c1,
        cond2_residual: c2,
        tail_certified: tails && filter_tails,
    })
}

/// Largest residual of the telescoping identity
/// `Σ_{|j|≤N} (1 - |m_0(B^{j-1}ω)|²) |φ̂(B^{j-1}ω)|² = |φ̂(B^{-N-1}ω)|² - |φ̂(B^N ω)|²`
/// over the cells of the pseudo-scaling grid.
pub fn telescoping_check(f: &GeneralizedFilter, phi: &PseudoScaling, n: u32) -> f64 {
    let window = phi.grid.window();
    let p = f.p as usize;
    let nn = n as i64;
    (0..window.len())
        .into_par_iter()
        .map(|idx| {
            let w = window.representative(idx, Side::Dual);
            let orbit = Orbit { w: &w };
            let phis = phi.along_orbit(&orbit, -nn - 1, nn);
            let lhs: f64 = (-nn..=nn)
                .map(|j| {
                    let m = f.tables[0][orbit.coset(p, f.r, j - 1)];
                    (1.0 - m.norm_sqr()) * phis[(j + nn) as usize].norm_sqr()
                })
                .sum();
            let rhs = phis[0].norm_sqr() - phis[phis.len() - 1].norm_sqr();
            (lhs - rhs).abs()
        })
        .reduce(|| 0.0, f64::max)
}

/// A generalized filter with random unitary structure: for each orbit
/// `{(l, ω_2, .., ω_R) : l < p}` a random `p × p` unitary `U` supplies
/// `m_i(l, ..) = U[i][l]`. The zero orbit gets the identity.
pub fn random_filter(p: u8, r: u32, seed: u64) -> Result<GeneralizedFilter> {
    check_modulus(p)?;
    if r == 0 {
        return Err(Error::InvalidInput("filter resolution must be at least 1".into()));
    }
    let pu = p as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tables = vec![vec![ZERO; pu.pow(r)]; pu];
    for i in 0..pu {
        tables[i][i] = ONE;
    }
    for orbit in 1..pu.pow(r - 1) {
        let u = random_unitary(pu, &mut rng);
        for (i, row) in u.iter().enumerate() {
            for (l, &z) in row.iter().enumerate() {
                tables[i][orbit * pu + l] = z;
            }
        }
    }
    GeneralizedFilter::new(p, r, tables)
}

/// Gram–Schmidt on the rows of a complex Gaussian matrix.
fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while rows.len() < n {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        for q in &rows {
            let c: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(q).for_each(|(x, a)| *x -= c * a);
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            rows.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    rows
}
