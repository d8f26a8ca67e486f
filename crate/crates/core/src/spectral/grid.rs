use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Integer wavevector. Only the first `dim` entries are meaningful; the rest are zero.
pub type Wavevector = [i64; 2];

/// Uniform grid on the torus `[0, 2π)^dim` with `n` nodes per axis.
///
/// Wavevectors live on the integer lattice `{-n/2+1, ..., n/2}^dim`, and mode
/// `k = 0` is the mean. The dealiasing cutoff keeps modes with
/// `|k|_∞ <= dealias_num / dealias_den * n / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
    dealias_num: u32,
    dealias_den: u32,
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        Self::with_dealias(dim, n, 2, 3)
    }

    pub fn with_dealias(dim: usize, n: usize, num: u32, den: u32) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "resolution must be even and >= 8, got {n}"
            )));
        }
        if den == 0 || num == 0 || num > den {
            return Err(Error::InvalidGrid(format!(
                "dealias fraction {num}/{den} not in (0, 1]"
            )));
        }
        Ok(Self {
            dim,
            n,
            dealias_num: num,
            dealias_den: den,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nodes per axis.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of nodes, `n^dim`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dealias_fraction(&self) -> (u32, u32) {
        (self.dealias_num, self.dealias_den)
    }

    /// Grid spacing `2π / n`.
    pub fn dx(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Volume of the torus, `(2π)^dim`.
    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(self.dim as i32)
    }

    /// Quadrature weight of a single node.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    #[inline]
    fn axis_wavenumber(&self, j: usize) -> i64 {
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Wavevector of the flat (row-major) index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> Wavevector {
        match self.dim {
            1 => [self.axis_wavenumber(idx), 0],
            _ => [
                self.axis_wavenumber(idx / self.n),
                self.axis_wavenumber(idx % self.n),
            ],
        }
    }

    /// Flat index of wavevector `k`, if it lies on the lattice.
    pub fn index_of(&self, k: Wavevector) -> Option<usize> {
        let half = (self.n / 2) as i64;
        let axis = |c: i64| -> Option<usize> {
            if c <= -half || c > half {
                None
            } else if c >= 0 {
                Some(c as usize)
            } else {
                Some((c + self.n as i64) as usize)
            }
        };
        match self.dim {
            1 => {
                if k[1] != 0 {
                    return None;
                }
                axis(k[0])
            }
            _ => Some(axis(k[0])? * self.n + axis(k[1])?),
        }
    }

    /// Physical coordinates of node `idx`.
    pub fn coords(&self, idx: usize) -> [f64; 2] {
        let h = self.dx();
        match self.dim {
            1 => [idx as f64 * h, 0.0],
            _ => [(idx / self.n) as f64 * h, (idx % self.n) as f64 * h],
        }
    }

    /// True when some component of `k` sits on the Nyquist frequency `n/2`.
    #[inline]
    pub fn is_nyquist(&self, k: Wavevector) -> bool {
        let half = (self.n / 2) as i64;
        k[..self.dim].iter().any(|&c| c == half)
    }

    /// Largest retained `|k|_∞` under the dealiasing rule.
    pub fn band_limit(&self) -> i64 {
        // floor(num/den * n/2) with integer arithmetic
        ((self.dealias_num as usize * self.n) / (2 * self.dealias_den as usize)) as i64
    }

    /// True when `k` survives dealiasing (and is not a Nyquist mode).
    #[inline]
    pub fn in_band(&self, k: Wavevector) -> bool {
        let lim = self.band_limit();
        !self.is_nyquist(k) && k[..self.dim].iter().all(|c| c.abs() <= lim)
    }

    pub fn norm_sq(k: Wavevector) -> i64 {
        k[0] * k[0] + k[1] * k[1]
    }

    pub fn check_same(&self, other: &TorusGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "(dim {}, n {}) vs (dim {}, n {})",
                self.dim, self.n, other.dim, other.n
            )));
        }
        Ok(())
    }
}
