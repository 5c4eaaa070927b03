//! Refinement masks and the refinable functions they generate.
//!
//! A mask of order `n` is a Walsh polynomial `m(ω) = Σ_{α<p^n} a_α conj(W*_α(ω))`.
//! It depends only on the digits `ω_1, .., ω_n`, so it is stored both as
//! coefficients and as a table of values on the resolution-`n` cosets.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{coset_index, GridFunction, StepFunction, Window};
use crate::group::{check_modulus, DigitSequence, Side};
use crate::walsh::{chrestenson, log_p, Algorithm, Direction};

/// How a mask was specified; the other representation is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskMode {
    Coeffs,
    Values,
}

impl MaskMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MaskMode::Coeffs => "coeffs",
            MaskMode::Values => "values",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    p: u8,
    n: u32,
    coeffs: Vec<Complex64>,
    values: Vec<Complex64>,
    mode: MaskMode,
}

impl Mask {
    fn check_shape(p: u8, n: u32, len: usize) -> Result<()> {
        check_modulus(p)?;
        if n == 0 {
            return Err(Error::InvalidMask("mask order must be at least 1".into()));
        }
        let expected = (p as usize).pow(n);
        if len != expected || log_p(len, p).is_err() {
            return Err(Error::InvalidMask(format!(
                "order {n} mask over p = {p} needs {expected} entries, got {len}"
            )));
        }
        Ok(())
    }

    /// Mask from its refinement coefficients `(a_α)_{α<p^n}`.
    pub fn from_coeffs(p: u8, n: u32, coeffs: Vec<Complex64>) -> Result<Self> {
        Self::check_shape(p, n, coeffs.len())?;
        let values = chrestenson(p, &coeffs, Direction::Forward, Algorithm::Fast)?;
        Ok(Self { p, n, coeffs, values, mode: MaskMode::Coeffs })
    }

    /// Mask from its value table on the resolution-`n` cosets.
    pub fn from_values(p: u8, n: u32, values: Vec<Complex64>) -> Result<Self> {
        Self::check_shape(p, n, values.len())?;
        let coeffs = chrestenson(p, &values, Direction::Inverse, Algorithm::Fast)?;
        Ok(Self { p, n, coeffs, values, mode: MaskMode::Values })
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn mode(&self) -> MaskMode {
        self.mode
    }

    pub fn coeff_sum(&self) -> Complex64 {
        self.coeffs.iter().sum()
    }

    /// `m(ω)`, read from the value table at `(ω_1, .., ω_n)`.
    pub fn eval(&self, w: &DigitSequence) -> Complex64 {
        self.values[coset_index(w, self.n)]
    }

    pub fn theta_value(&self) -> Complex64 {
        self.values[0]
    }

    pub fn diagnostics(&self) -> MaskDiagnostics {
        let p = self.p as usize;
        let qmf_residual = (0..self.values.len() / p)
            .map(|rest| {
                let s: f64 = (0..p).map(|l| self.values[rest * p + l].norm_sqr()).sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max);
        MaskDiagnostics {
            coeff_sum: self.coeff_sum(),
            theta_value: self.theta_value(),
            qmf_residual,
        }
    }

    /// Samples `φ̂(ω) = ∏_{j≥1} m(B^{-j}ω)` on the window `[1-K, n]`.
    ///
    /// Factor `j` reads the digits `ω_{1-j}, .., ω_{n-j}`, which all vanish
    /// once `j ≥ n + K`, so the product over `j ≤ n + K - 1` is exact.
    pub fn refinable_spectrum(&self, k: u32) -> Result<GridFunction> {
        if (self.theta_value() - 1.0).norm() > 1e-12 {
            return Err(Error::NonconvergentProduct(format!("{}", self.theta_value())));
        }
        let window = Window::new(self.p, 1 - k as i64, self.n as i64)?;
        Ok(contracted_grid(&self.values, self.n, window))
    }

    /// Runs the cascade iteration `φ_{k+1}(x) = p Σ_α a_α φ_k(Ax ⊖ h_[α])`
    /// from `φ_0 = 1_U` on the cells of resolution `d` inside `U_{1-n}`.
    ///
    /// When an iterate is finer than resolution `d`, each cell receives its
    /// average over the `p` subcells.
    pub fn cascade(&self, d: i64, options: CascadeOptions) -> Result<Cascade> {
        if d < self.n as i64 {
            return Err(Error::Resolution(format!(
                "cascade resolution {d} is below the mask order {}",
                self.n
            )));
        }
        let p = self.p as usize;
        let n = self.n as usize;
        let window = Window::new(self.p, 2 - n as i64, d)?;
        let len = window.len();
        let top = len / p;
        let low_mod = p.pow(n as u32 - 1);
        let measure = (self.p as f64).powi(-(d as i32));

        // For each α: its leading digit α_{n-1} and the digits it subtracts at
        // positions 2-n..0 (lowest position first).
        let shifts: Vec<(usize, Vec<usize>)> = (0..self.coeffs.len())
            .map(|alpha| {
                let digits: Vec<usize> = (0..n).map(|t| (alpha / p.pow(t as u32)) % p).collect();
                let low = (0..n - 1).map(|k| digits[n - 2 - k]).collect();
                (digits[n - 1], low)
            })
            .collect();

        let mut phi: Vec<Complex64> = (0..len)
            .map(|i| if i % low_mod == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
            .collect();
        let mut avg = vec![Complex64::new(0.0, 0.0); top];
        let mut last_change = f64::INFINITY;
        let mut iterations = 0;
        let mut converged = false;
        while iterations < options.max_iters {
            for (q, a) in avg.iter_mut().enumerate() {
                *a = (0..p).map(|dd| phi[q + dd * top]).sum::<Complex64>() / p as f64;
            }
            let next: Vec<Complex64> = (0..len)
                .map(|idx| {
                    let lead = idx % p;
                    let xs = idx / p;
                    let low = xs % low_mod;
                    let high = xs - low;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (alpha, (a_lead, hs)) in shifts.iter().enumerate() {
                        if *a_lead != lead {
                            continue;
                        }
                        let mut q = 0;
                        let mut w = 1;
                        for (k, h) in hs.iter().enumerate() {
                            let xk = (low / p.pow(k as u32)) % p;
                            q += ((xk + p - h) % p) * w;
                            w *= p;
                        }
                        acc += self.coeffs[alpha] * avg[high + q];
                    }
                    acc * p as f64
                })
                .collect();
            iterations += 1;
            let change: f64 =
                (phi.iter().zip(&next).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() * measure).sqrt();
            let norm = (next.iter().map(|z| z.norm_sqr()).sum::<f64>() * measure).sqrt();
            phi = next;
            last_change = change;
            if !norm.is_finite() || norm > 1e6 {
                return Err(Error::CascadeDivergence { iterations, norm });
            }
            if change <= options.tol {
                converged = true;
                break;
            }
        }
        Ok(Cascade { phi: StepFunction::new(window, phi)?, iterations, converged, last_change })
    }

    /// Two-scale, Strang–Fix, partition-of-unity and translate-orthonormality
    /// residuals of the refinable function, using a spectral grid of depth `k`
    /// and a cascade at resolution `n + k`.
    pub fn scaling_checks(&self, k: u32) -> Result<ScalingReport> {
        if k + 1 < self.n {
            return Err(Error::Resolution(format!(
                "depth {k} is too small: translate sums need depth at least {} (window [{}..{}])",
                self.n - 1,
                2 - self.n as i64,
                self.n
            )));
        }
        let phi_hat = self.refinable_spectrum(k)?;
        let window = phi_hat.window();
        let p = self.p as usize;

        let strang_fix_residual = (1..p.pow(k) as u64)
            .map(|alpha| {
                let w = DigitSequence::from_integer(self.p, alpha, Side::Dual).expect("valid modulus");
                phi_hat.value_at(&w).norm()
            })
            .fold(0.0, f64::max);

        let two_scale_residual = (0..window.len())
            .filter_map(|idx| {
                let b = window.dilate_index(idx)?;
                let m = self.values[window.table_index(idx, self.n)];
                Some((phi_hat.get(b) - m * phi_hat.get(idx)).norm())
            })
            .fold(0.0, f64::max);

        // positions 1-K..0 are the low K digits; positions 1..n the coset tuple
        let low = p.pow(k);
        let ortho_residual = (0..p.pow(self.n))
            .map(|top| {
                let s: f64 = (0..low).map(|h| phi_hat.get(top * low + h).norm_sqr()).sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max);

        // every factor past the window reads the zero coset, i.e. m(θ)
        let tail_at_theta = (0..window.len()).all(|idx| {
            let mut i = idx;
            for _ in 0..window.width() {
                i = window.contract_index(i);
            }
            window.table_index(i, self.n) == 0
        });
        let lowpass_limit_ok = tail_at_theta && (self.theta_value() - 1.0).norm() <= 1e-12;

        let cascade = self.cascade(self.n as i64 + k as i64, CascadeOptions::default())?;
        let cells = cascade.phi.values();
        let low_mod = p.pow(self.n - 1);
        let partition_residual = (0..cells.len())
            .step_by(low_mod)
            .map(|base| {
                let s: Complex64 = cells[base..base + low_mod].iter().sum();
                (s - 1.0).norm()
            })
            .fold(0.0, f64::max);

        Ok(ScalingReport {
            strang_fix_residual,
            partition_residual,
            two_scale_residual,
            ortho_residual,
            lowpass_limit_ok,
            cascade_iterations: cascade.iterations,
            cascade_converged: cascade.converged,
        })
    }
}

/// Samples `∏_{j≥1} table(B^{-j}ω)` on `window`, whose top position is `r`.
pub(crate) fn contracted_grid(table: &[Complex64], r: u32, window: Window) -> GridFunction {
    let factors = window.width() as usize - 1;
    GridFunction::from_fn(window, |idx| {
        let mut i = idx;
        let mut prod = Complex64::new(1.0, 0.0);
        for _ in 0..factors {
            i = window.contract_index(i);
            prod *= table[window.table_index(i, r)];
        }
        debug_assert_eq!(window.contract_index(i), 0);
        prod
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskDiagnostics {
    pub coeff_sum: Complex64,
    pub theta_value: Complex64,
    pub qmf_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeOptions {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for CascadeOptions {
    fn default() -> Self {
        Self { max_iters: 64, tol: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cascade {
    pub phi: StepFunction,
    pub iterations: usize,
    pub converged: bool,
    pub last_change: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingReport {
    pub strang_fix_residual: f64,
    pub partition_residual: f64,
    pub two_scale_residual: f64,
    pub ortho_residual: f64,
    pub lowpass_limit_ok: bool,
    pub cascade_iterations: usize,
    pub cascade_converged: bool,
}
