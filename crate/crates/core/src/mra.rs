//! Blocked sets of a mask and the MRA verdict built on them.
//!
//! Cosets of resolution `r` are the sets `{ω ∈ U* : (ω_1, .., ω_r) = c}`,
//! indexed by `Σ c_{t+1} p^t` as in [`crate::grid::coset_index`].

use std::fmt;

use crate::error::{Error, Result};
use crate::mask::Mask;

/// A set of resolution-`r` cosets of `U*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetSet {
    p: u8,
    r: u32,
    members: Vec<bool>,
}

impl CosetSet {
    pub fn empty(p: u8, r: u32) -> Self {
        Self { p, r, members: vec![false; (p as usize).pow(r)] }
    }

    pub fn from_indices(p: u8, r: u32, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(p, r);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn resolution(&self) -> u32 {
        self.r
    }

    /// Number of cosets at this resolution (members or not).
    pub fn capacity(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.members[idx]
    }

    pub fn insert(&mut self, idx: usize) {
        self.members[idx] = true;
    }

    pub fn remove(&mut self, idx: usize) {
        self.members[idx] = false;
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.contains(&true)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.indices().all(|i| other.contains(i))
    }

    /// Digits `(ω_1, .., ω_r)` of coset `idx`.
    pub fn tuple(&self, idx: usize) -> Vec<u8> {
        let p = self.p as usize;
        (0..self.r).map(|t| ((idx / p.pow(t)) % p) as u8).collect()
    }
}

/// Written as `{(1),(0,1)}`, each tuple listing `ω_1` first.
impl fmt::Display for CosetSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, idx) in self.indices().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            let digits: Vec<String> = self.tuple(idx).iter().map(|d| d.to_string()).collect();
            write!(f, "({})", digits.join(","))?;
        }
        f.write_str("}")
    }
}

/// `1e-12` times the largest modulus in the mask's value table.
pub fn default_zero_tol(m: &Mask) -> f64 {
    1e-12 * m.values().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Resolution-`n` cosets on which `|m| ≤ tol`.
pub fn zero_cosets(m: &Mask, tol: f64) -> CosetSet {
    let zeros = m.values().iter().enumerate().filter(|(_, z)| z.norm() <= tol).map(|(i, _)| i);
    CosetSet::from_indices(m.p(), m.n(), zeros)
}

/// The `p` cosets `(l, c_1, .., c_r)` obtained by prepending a digit to `c`.
pub fn t_p_children(p: u8, c: &[u8]) -> Vec<Vec<u8>> {
    (0..p)
        .map(|l| {
            let mut child = Vec::with_capacity(c.len() + 1);
            child.push(l);
            child.extend_from_slice(c);
            child
        })
        .collect()
}

/// Checks the blocked-set definition clause by clause for a set of
/// resolution-`(n-1)` cosets.
pub fn is_blocked(m: &Mask, set: &CosetSet, tol: f64) -> bool {
    let p = m.p() as usize;
    let n = m.n();
    if n < 2 || set.p() != m.p() || set.resolution() != n - 1 {
        return false;
    }
    if set.is_empty() || set.contains(0) {
        return false;
    }
    let prefix_mod = p.pow(n - 1);
    set.indices().all(|c| {
        (0..p).all(|l| {
            let child = l + p * c;
            m.values()[child].norm() <= tol || set.contains(child % prefix_mod)
        })
    })
}

/// Largest blocked set of `m`, or `None` when `m` has no blocked set.
///
/// Every blocked set is contained in the returned one.
pub fn blocked_set(m: &Mask, tol: f64) -> Option<CosetSet> {
    let n = m.n();
    if n < 2 {
        return None;
    }
    let p = m.p() as usize;
    let prefix_mod = p.pow(n - 1);
    let mut set = CosetSet::from_indices(m.p(), n - 1, 1..prefix_mod);
    loop {
        let doomed: Vec<usize> = set
            .indices()
            .filter(|&c| {
                (0..p).any(|l| {
                    let child = l + p * c;
                    m.values()[child].norm() > tol && !set.contains(child % prefix_mod)
                })
            })
            .collect();
        if doomed.is_empty() {
            break;
        }
        for c in doomed {
            set.remove(c);
        }
    }
    if set.is_empty() {
        return None;
    }
    assert!(is_blocked(m, &set, tol), "pruning produced a set that is not blocked");
    Some(set)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MraReport {
    pub is_mra: bool,
    pub blocked: Option<CosetSet>,
    pub zero_cosets: CosetSet,
    pub zero_tol: f64,
    pub ortho_residual: f64,
    /// True when the blocked-set verdict and the orthonormality residual
    /// (against `10·tol`) disagree.
    pub inconsistent: bool,
}

impl MraReport {
    pub fn verdict_str(&self) -> &'static str {
        if self.is_mra {
            "MRA"
        } else {
            "not-MRA"
        }
    }
}

/// Key-value lines; the first line carries both the verdict and the blocked set.
impl fmt::Display for MraReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.blocked {
            Some(set) => writeln!(f, "verdict={} blocked={}", self.verdict_str(), set)?,
            None => writeln!(f, "verdict={} blocked=none", self.verdict_str())?,
        }
        writeln!(f, "zero_cosets={}", self.zero_cosets)?;
        writeln!(f, "zero_tol={:e}", self.zero_tol)?;
        writeln!(f, "ortho_residual={:e}", self.ortho_residual)?;
        writeln!(
            f,
            "cross_check={}",
            if self.inconsistent { "inconsistent" } else { "consistent" }
        )
    }
}

/// Decides whether the refinable function of `m` generates an MRA, using the
/// absence of blocked sets, and cross-checks against translate orthonormality
/// on a spectral grid of depth `k`.
pub fn mra_verdict(m: &Mask, k: u32, tol: f64) -> Result<MraReport> {
    let d = m.diagnostics();
    if (d.theta_value - 1.0).norm() > tol {
        return Err(Error::NotApplicable(format!("m(theta) = {} is not 1", d.theta_value)));
    }
    if d.qmf_residual > tol {
        return Err(Error::NotApplicable(format!(
            "QMF condition fails (residual {:e})",
            d.qmf_residual
        )));
    }
    let zero_tol = default_zero_tol(m);
    let blocked = blocked_set(m, zero_tol);
    let ortho_residual = m.scaling_checks(k)?.ortho_residual;
    let inconsistent = blocked.is_none() != (ortho_residual <= 10.0 * tol);
    Ok(MraReport {
        is_mra: blocked.is_none(),
        blocked,
        zero_cosets: zero_cosets(m, zero_tol),
        zero_tol,
        ortho_residual,
        inconsistent,
    })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;

    fn mask(p: u8, n: u32, values: &[f64]) -> Mask {
        Mask::from_values(p, n, values.iter().map(|&v| Complex64::new(v, 0.0)).collect()).unwrap()
    }

    #[test]
    fn zero_coset_examples() {
        assert_eq!(zero_cosets(&mask(2, 1, &[1.0, 0.0]), 1e-12).to_string(), "{(1)}");
        let z = zero_cosets(&mask(2, 2, &[1.0, 0.0, 0.0, 1.0]), 1e-12);
        assert_eq!(z.indices().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(z.to_string(), "{(1,0),(0,1)}");
        assert!(zero_cosets(&mask(2, 1, &[1.0, 0.5]), 1e-12).is_empty());
    }

    #[test]
    fn children_examples() {
        assert_eq!(t_p_children(2, &[1]), vec![vec![0, 1], vec![1, 1]]);
        assert_eq!(t_p_children(3, &[0]), vec![vec![0, 0], vec![1, 0], vec![2, 0]]);
        assert_eq!(t_p_children(2, &[0, 1]), vec![vec![0, 0, 1], vec![1, 0, 1]]);
    }

    #[test]
    fn blocked_set_examples() {
        assert_eq!(blocked_set(&mask(2, 2, &[1.0, 0.0, 1.0, 0.0]), 1e-12), None);
        let b = blocked_set(&mask(2, 2, &[1.0, 0.0, 0.0, 1.0]), 1e-12).unwrap();
        assert_eq!(b.to_string(), "{(1)}");
        assert_eq!(blocked_set(&mask(2, 2, &[1.0, 0.5, 0.3, 0.2]), 1e-12), None);
        assert_eq!(blocked_set(&mask(2, 1, &[1.0, 0.0]), 1e-12), None);
    }

    #[test]
    fn is_blocked_rejects_zero_coset() {
        let m = mask(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert!(!is_blocked(&m, &CosetSet::from_indices(2, 1, [0, 1]), 1e-12));
        assert!(!is_blocked(&m, &CosetSet::empty(2, 1), 1e-12));
        assert!(is_blocked(&m, &CosetSet::from_indices(2, 1, [1]), 1e-12));
    }

    #[test]
    fn verdict_examples() {
        for p in [2u8, 3] {
            let mut v = vec![0.0; p as usize];
            v[0] = 1.0;
            let r = mra_verdict(&mask(p, 1, &v), 4, 1e-12).unwrap();
            assert!(r.is_mra && !r.inconsistent);
            assert!(r.to_string().starts_with("verdict=MRA blocked=none\n"));
        }
        let r = mra_verdict(&mask(2, 2, &[1.0, 0.0, 0.0, 1.0]), 4, 1e-12).unwrap();
        assert!(!r.is_mra && !r.inconsistent);
        assert!(r.ortho_residual > 0.4);
        assert!(r.to_string().starts_with("verdict=not-MRA blocked={(1)}\n"));
    }

    #[test]
    fn verdict_requires_hypotheses() {
        let r = mra_verdict(&mask(2, 1, &[1.0, 0.5]), 4, 1e-12);
        assert!(matches!(r, Err(Error::NotApplicable(msg)) if msg.contains("QMF")));
        let r = mra_verdict(&mask(2, 1, &[0.0, 1.0]), 4, 1e-12);
        assert!(matches!(r, Err(Error::NotApplicable(msg)) if msg.contains("theta")));
    }
}
