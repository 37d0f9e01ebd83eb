use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{CoreError, Result};

/// Values of `(ξ_j, η_j)` on a contiguous window of modes `lo..=hi`.
///
/// Modes outside the window read as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    lo: i64,
    xi: Vec<Complex64>,
    eta: Vec<Complex64>,
}

impl ModeSpectrum {
    pub fn zeros(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(CoreError::InvalidArgument("empty mode window"));
        }
        let len = (hi - lo + 1) as usize;
        Ok(Self { lo, xi: vec![Complex64::new(0.0, 0.0); len], eta: vec![Complex64::new(0.0, 0.0); len] })
    }

    /// Symmetric window `-bound..=bound`.
    pub fn symmetric(bound: i64) -> Self {
        Self::zeros(-bound, bound.max(0)).expect("nonempty window")
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.xi.len() as i64 - 1
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> + '_ {
        self.lo..=self.hi()
    }

    fn slot(&self, j: i64) -> Option<usize> {
        (j >= self.lo && j <= self.hi()).then(|| (j - self.lo) as usize)
    }

    pub fn xi(&self, j: i64) -> Complex64 {
        self.slot(j).map_or(Complex64::new(0.0, 0.0), |i| self.xi[i])
    }

    pub fn eta(&self, j: i64) -> Complex64 {
        self.slot(j).map_or(Complex64::new(0.0, 0.0), |i| self.eta[i])
    }

    /// Sets an independent pair `(ξ_j, η_j)`.
    pub fn set_pair(&mut self, j: i64, xi: Complex64, eta: Complex64) -> Result<()> {
        let i = self.slot(j).ok_or(CoreError::InvalidArgument("mode outside the window"))?;
        self.xi[i] = xi;
        self.eta[i] = eta;
        Ok(())
    }

    /// Sets a physical mode `ξ_j = z`, `η_j = conj(z)`.
    pub fn set_physical(&mut self, j: i64, z: Complex64) -> Result<()> {
        self.set_pair(j, z, z.conj())
    }

    /// Sets a physical mode from polar data `ξ_j = √I e^{iθ}`.
    pub fn set_polar(&mut self, j: i64, action: f64, angle: f64) -> Result<()> {
        if action < 0.0 {
            return Err(CoreError::InvalidArgument("negative action"));
        }
        self.set_physical(j, Complex64::from_polar(action.sqrt(), angle))
    }

    /// `I_j = ξ_j η_j`; real and nonnegative on physical states.
    pub fn action(&self, j: i64) -> Complex64 {
        self.xi(j) * self.eta(j)
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.xi.iter().zip(&self.eta).all(|(x, e)| (x.conj() - e).norm() <= tol)
    }
}

/// `Σ_j e^{ρ|j|} (|ξ_j| + |η_j|)` over the window.
pub fn norm_rho(s: &ModeSpectrum, rho: f64) -> f64 {
    s.modes()
        .map(|j| Float::exp(rho * j.abs() as f64) * (s.xi(j).norm() + s.eta(j).norm()))
        .sum()
}
