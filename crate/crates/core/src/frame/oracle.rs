//! Brute-force check of the Parseval property in the time domain.
//!
//! The wavelets are synthesized from their spectra, trimmed to their
//! support, and the affine system `p^{j/2} ψ_l(A^j x ⊖ h)` is materialized
//! on the cells of a window `[a - J, D]` for `|j| ≤ J`. Every member either
//! lives inside that window's support region or is disjoint from it, so the
//! frame sums for test functions supported there are finite.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::MultiwaveletSpectrum;
use crate::error::{Error, Result};
use crate::grid::{StepFunction, Window};

/// One member `ψ_{l,j,h}`, stored on its support: cells whose index is
/// `offset (mod stride)`.
#[derive(Debug, Clone, PartialEq)]
struct Member {
    l: usize,
    j: i64,
    h: u64,
    offset: usize,
    stride: usize,
    values: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterializedSystem {
    window: Window,
    j_inner: i64,
    /// Trimmed wavelets on `[a, b]`.
    wavelets: Vec<StepFunction>,
    members: Vec<Member>,
    degenerate: bool,
}

impl MaterializedSystem {
    /// Materializes all members with `|j| ≤ j_inner` meeting the region
    /// `[a - j_inner, d]`, where `[a, b]` is the trimmed support window of the
    /// wavelets. Requires `d ≥ b + j_inner`.
    pub fn new(psi: &MultiwaveletSpectrum, d: i64, j_inner: u32) -> Result<Self> {
        let sw = psi.window();
        let target = Window::new(sw.p, 1 - sw.hi, 1 - sw.lo)?;
        let synthesized: Vec<StepFunction> = psi
            .spectra()
            .iter()
            .map(|g| StepFunction::synthesize(g, target))
            .collect::<Result<_>>()?;
        let peak = synthesized
            .iter()
            .flat_map(|s| s.values().iter().map(|z| z.norm()))
            .fold(0.0, f64::max);
        let degenerate = peak == 0.0;
        let thr = 1e-12 * peak;

        let (mut a, mut b) = (target.lo, target.hi);
        let negligible = |idx: usize| synthesized.iter().all(|s| s.values()[idx].norm() <= thr);
        while a < b && (0..target.len()).all(|idx| target.digit(idx, a) == 0 || negligible(idx)) {
            a += 1;
        }
        while b > a
            && (0..target.len()).all(|idx| {
                let base = idx - target.digit(idx, b) as usize * target.weight(b);
                synthesized.iter().all(|s| (s.values()[idx] - s.values()[base]).norm() <= thr)
            })
        {
            b -= 1;
        }
        let trimmed_window = Window::new(sw.p, a, b)?;
        let wavelets: Vec<StepFunction> = synthesized
            .iter()
            .map(|s| {
                let values = (0..trimmed_window.len())
                    .map(|t| s.values()[t * target.weight(a)])
                    .collect();
                StepFunction::new(trimmed_window, values)
            })
            .collect::<Result<_>>()?;

        let jj = j_inner as i64;
        if d < b + jj {
            return Err(Error::Resolution(format!(
                "resolution D = {d} cannot hold the scale-{jj} members; need D >= {}",
                b + jj
            )));
        }
        let window = Window::new(sw.p, a - jj, d)?;
        let members = wavelets
            .iter()
            .enumerate()
            .flat_map(|(l, w)| (-jj..=jj).flat_map(move |j| scale_members(l, w, j, window, jj)))
            .collect();
        Ok(Self { window, j_inner: jj, wavelets, members, degenerate })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Trimmed time-domain wavelets.
    pub fn wavelets(&self) -> &[StepFunction] {
        &self.wavelets
    }

    pub fn member_count(&self) -> usize {
        self.members.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// `ψ_{l,j,h}` on the oracle window, with `l` counted from 1 and the
    /// translate `h = h_[β]`, if that member was materialized.
    pub fn member(&self, l: usize, j: i64, beta: u64) -> Option<StepFunction> {
        let m = self.members.iter().find(|m| m.l + 1 == l && m.j == j && m.h == beta)?;
        let mut values = vec![Complex64::new(0.0, 0.0); self.window.len()];
        for (k, v) in m.values.iter().enumerate() {
            values[m.offset + k * m.stride] = *v;
        }
        StepFunction::new(self.window, values).ok()
    }

    /// `Σ |⟨f, ψ_{l,j,h}⟩|² / ‖f‖²` over the materialized members.
    pub fn frame_ratio(&self, f: &StepFunction) -> Result<f64> {
        if f.window() != self.window {
            return Err(Error::InvalidInput("test function lives on another window".into()));
        }
        let cell = f.cell_measure();
        let fv = f.values();
        let total: f64 = self
            .members
            .iter()
            .map(|m| {
                let ip: Complex64 = m
                    .values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| fv[m.offset + k * m.stride] * v.conj())
                    .sum();
                (ip * cell).norm_sqr()
            })
            .sum();
        let norm = f.l2_norm();
        if norm == 0.0 {
            return Err(Error::InvalidInput("test function is zero".into()));
        }
        Ok(total / (norm * norm))
    }

    /// A random combination of the members with `|j| < J`.
    fn random_test_function(&self, rng: &mut ChaCha8Rng) -> StepFunction {
        let mut values = vec![Complex64::new(0.0, 0.0); self.window.len()];
        if self.degenerate {
            for v in values.iter_mut() {
                *v = gaussian(rng);
            }
        } else {
            for m in self.members.iter().filter(|m| m.j.abs() < self.j_inner.max(1)) {
                let c = gaussian(rng);
                for (k, v) in m.values.iter().enumerate() {
                    values[m.offset + k * m.stride] += c * v;
                }
            }
        }
        StepFunction::new(self.window, values).expect("window-sized")
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// All translates of `ψ_l` at scale `j` that meet the window's support.
fn scale_members(l: usize, psi: &StepFunction, j: i64, window: Window, jj: i64) -> Vec<Member> {
    let p = window.p as usize;
    let pw = psi.window();
    let (a, b) = (pw.lo, pw.hi);
    // h has digits at positions [a - J - j, 0]; the ones below a fix the
    // low digits of the support, the rest are subtracted inside ψ.
    let h_lo = a - jj - j;
    let h_digits = (1 - h_lo).max(0) as u32;
    let fixed = (jj + j) as u32;
    let stride = p.pow(fixed);
    let free = window.len() / stride;
    let gain = (p as f64).powf(j as f64 / 2.0);
    (0..p.pow(h_digits) as u64)
        .map(|h| {
            let h_digit = |pos: i64| -> usize {
                if pos > 0 || pos < h_lo {
                    0
                } else {
                    ((h / (p as u64).pow((pos - h_lo) as u32)) % p as u64) as usize
                }
            };
            let offset = (h_lo..a)
                .map(|i| h_digit(i) * window.weight(i + j))
                .sum::<usize>();
            let values = (0..free)
                .map(|k| {
                    let idx = offset + k * stride;
                    let t = (a..=b).rev().fold(0, |acc, i| {
                        let x = window.digit(idx, i + j) as usize;
                        acc * p + (x + p - h_digit(i)) % p
                    });
                    psi.values()[t] * gain
                })
                .collect();
            // β with h_[β] = h: digit at position -t is β_t
            let beta = (0..h_digits as i64).rev().fold(0u64, |acc, t| acc * p as u64 + h_digit(-t) as u64);
            Member { l, j, h: beta, offset, stride, values }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub statistic: f64,
    pub degenerate: bool,
    pub members: usize,
    pub trials: usize,
}

impl std::fmt::Display for OracleReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "oracle_members={}", self.members)?;
        writeln!(f, "oracle_trials={}", self.trials)?;
        writeln!(f, "oracle_statistic={:e}", self.statistic)?;
        writeln!(f, "oracle_degenerate={}", self.degenerate)
    }
}

/// Largest `|Σ |⟨f, ψ_{l,j,h}⟩|² / ‖f‖² - 1|` over `trials` random test
/// functions. Trial `t` draws from stream `t` of a generator seeded with
/// `seed`, so the result does not depend on the thread count.
pub fn frame_oracle(
    psi: &MultiwaveletSpectrum,
    d: i64,
    j_inner: u32,
    trials: usize,
    seed: u64,
) -> Result<OracleReport> {
    let system = MaterializedSystem::new(psi, d, j_inner)?;
    let deviations: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let f = system.random_test_function(&mut rng);
            system.frame_ratio(&f).map(|r| (r - 1.0).abs())
        })
        .collect::<Result<_>>()?;
    Ok(OracleReport {
        statistic: deviations.into_iter().fold(0.0, f64::max),
        degenerate: system.degenerate,
        members: system.member_count(),
        trials,
    })
}
