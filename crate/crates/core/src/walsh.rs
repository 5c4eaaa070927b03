//! Generalized Walsh functions and the radix-`p` Chrestenson transform.
//!
//! Index conventions: a coefficient index `α = Σ α_t p^t` pairs its digit
//! `α_t` with the dual digit `ω_{t+1}`, and an output slot `s` is read as the
//! coset tuple `(ω_1, .., ω_n)` with `ω_{t+1}` the coefficient of `p^t`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{character, roots_of_unity, DigitSequence, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Unnormalized: `out[s] = Σ_α v[α] conj(ε^{<α,s>})`.
    Forward,
    /// Conjugate kernel scaled by `1/N`.
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// O(N²) double loop.
    Naive,
    /// Radix-`p` butterflies, O(N·n·p).
    Fast,
}

/// Returns `n` with `len = p^n`, or an invalid-length error.
pub fn log_p(len: usize, p: u8) -> Result<u32> {
    let mut n = 0;
    let mut m = 1usize;
    while m < len {
        m *= p as usize;
        n += 1;
    }
    if m != len || len == 0 {
        return Err(Error::InvalidLength { len, p });
    }
    Ok(n)
}

/// `W_α(x)` for a primal point, `W*_α(ω)` for a dual point.
pub fn walsh_eval(alpha: u64, point: &DigitSequence) -> Result<Complex64> {
    let p = point.p();
    match point.side() {
        Side::Primal => {
            let w = DigitSequence::from_integer(p, alpha, Side::Dual)?;
            character(point, &w)
        }
        Side::Dual => {
            let h = DigitSequence::from_integer(p, alpha, Side::Primal)?;
            character(&h, point)
        }
    }
}

/// Forward or inverse Chrestenson transform of a length-`p^n` vector.
pub fn chrestenson(
    p: u8,
    v: &[Complex64],
    direction: Direction,
    algorithm: Algorithm,
) -> Result<Vec<Complex64>> {
    crate::group::check_modulus(p)?;
    let n = log_p(v.len(), p)?;
    let mut out = match algorithm {
        Algorithm::Naive => naive(p, n, v, direction),
        Algorithm::Fast => {
            let mut data = v.to_vec();
            fast_in_place(p, &mut data, direction);
            data
        }
    };
    if direction == Direction::Inverse {
        let scale = 1.0 / v.len() as f64;
        out.iter_mut().for_each(|z| *z *= scale);
    }
    Ok(out)
}

fn kernel_roots(p: u8, direction: Direction) -> Vec<Complex64> {
    let roots = roots_of_unity(p);
    match direction {
        Direction::Forward => roots.iter().map(|z| z.conj()).collect(),
        Direction::Inverse => roots,
    }
}

fn naive(p: u8, n: u32, v: &[Complex64], direction: Direction) -> Vec<Complex64> {
    let roots = kernel_roots(p, direction);
    let len = v.len();
    let digits: Vec<Vec<u32>> = (0..len)
        .map(|mut a| {
            (0..n)
                .map(|_| {
                    let d = (a % p as usize) as u32;
                    a /= p as usize;
                    d
                })
                .collect()
        })
        .collect();
    (0..len)
        .map(|s| {
            let ds = &digits[s];
            v.iter().zip(&digits).fold(Complex64::new(0.0, 0.0), |acc, (x, da)| {
                let k: u32 = da.iter().zip(ds).map(|(a, b)| a * b).sum();
                acc + x * roots[(k % p as u32) as usize]
            })
        })
        .collect()
}

/// Unnormalized radix-`p` butterflies, one pass per digit position.
fn fast_in_place(p: u8, data: &mut [Complex64], direction: Direction) {
    let p = p as usize;
    let roots = kernel_roots(p as u8, direction);
    let len = data.len();
    let mut scratch = vec![Complex64::new(0.0, 0.0); p];
    let mut stride = 1;
    while stride < len {
        let block = stride * p;
        for base in (0..len).step_by(block) {
            for offset in base..base + stride {
                if p == 2 {
                    let a = data[offset];
                    let b = data[offset + stride];
                    data[offset] = a + b;
                    data[offset + stride] = a - b;
                    continue;
                }
                for (l, out) in scratch.iter_mut().enumerate() {
                    *out = (0..p).fold(Complex64::new(0.0, 0.0), |acc, k| {
                        acc + data[offset + k * stride] * roots[(k * l) % p]
                    });
                }
                for (l, &value) in scratch.iter().enumerate() {
                    data[offset + l * stride] = value;
                }
            }
        }
        stride = block;
    }
}
