//! 2×2 complex unitaries acting across the two rails of a dual-rail qubit.
//!
//! Matrices are written in the logical basis `(|0̄⟩, |1̄⟩)`; column `j` is the
//! image of `|j̄⟩`. Every beam splitter, phase plate and rotation in the
//! circuits reduces to one of these.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Result, SimError};

/// Rejection threshold for [`OneQubitUnitary::new`].
pub const UNITARITY_TOLERANCE: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneQubitUnitary {
    m: [[Complex64; 2]; 2],
}

impl OneQubitUnitary {
    /// Validated constructor; fails when `U†U` deviates from the identity by
    /// more than [`UNITARITY_TOLERANCE`] in any entry.
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let u = Self { m };
        let deviation = u.unitarity_deviation();
        if deviation > UNITARITY_TOLERANCE || !deviation.is_finite() {
            return Err(SimError::NotUnitary { deviation });
        }
        Ok(u)
    }

    pub(crate) const fn from_matrix_unchecked(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Result<Self> {
        Self::new([
            [Complex64::from(m[0][0]), Complex64::from(m[0][1])],
            [Complex64::from(m[1][0]), Complex64::from(m[1][1])],
        ])
    }

    pub const fn identity() -> Self {
        Self::from_matrix_unchecked([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn hadamard() -> Self {
        let h = Complex64::from(FRAC_1_SQRT_2);
        Self::from_matrix_unchecked([[h, h], [h, -h]])
    }

    /// The interferometer beam splitter: `|0̄⟩ → cos θ|0̄⟩ + sin θ|1̄⟩`,
    /// `|1̄⟩ → −sin θ|0̄⟩ + cos θ|1̄⟩`.
    pub fn beam_splitter(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_matrix_unchecked([
            [Complex64::from(c), Complex64::from(-s)],
            [Complex64::from(s), Complex64::from(c)],
        ])
    }

    pub const fn pauli(axis: Axis) -> Self {
        let m = match axis {
            Axis::X => [[ZERO, ONE], [ONE, ZERO]],
            Axis::Y => [[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]],
            Axis::Z => [[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]],
        };
        Self::from_matrix_unchecked(m)
    }

    /// `exp(−i θ/2 σ_axis) = cos(θ/2) I − i sin(θ/2) σ_axis`.
    pub fn rotation(axis: Axis, theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let sigma = Self::pauli(axis).m;
        let mut m = [[ZERO; 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (col, entry) in row.iter_mut().enumerate() {
                let id = if r == col { c } else { 0.0 };
                *entry = Complex64::from(id) - I * s * sigma[r][col];
            }
        }
        Self::from_matrix_unchecked(m)
    }

    pub fn scaled(&self, phase: Complex64) -> Self {
        let mut m = self.m;
        m.iter_mut().flatten().for_each(|e| *e *= phase);
        Self::from_matrix_unchecked(m)
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn dagger(&self) -> Self {
        let m = self.m;
        Self::from_matrix_unchecked([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    /// Largest entry-wise modulus of `U†U − I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.dagger() * *self;
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                let id = if r == c { ONE } else { ZERO };
                worst = worst.max((p.m[r][c] - id).norm());
            }
        }
        worst
    }

    /// Maximum entry-wise distance to `other`.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        worst
    }
}

impl Mul for OneQubitUnitary {
    type Output = OneQubitUnitary;

    /// Matrix product; `a * b` applies `b` first.
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.m, rhs.m);
        let mut m = [[ZERO; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Self::from_matrix_unchecked(m)
    }
}
