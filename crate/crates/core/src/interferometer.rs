//! Transfer-matrix analysis of the N-splitter Zeno interferometer with an
//! imperfect absorber.
//!
//! With `θ = π/2N`, the beam splitter is the rotation
//! `B = [[cos θ, −sin θ], [sin θ, cos θ]]` and one encounter with the absorber
//! is `A = diag(1, √η)` in the `(|0̄⟩, |1̄⟩)` basis. A particle entering the
//! lower port leaves the lower port with amplitude `⟨0̄|(BA)^{N−1}B|0̄⟩`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Result, SimError};

/// Upper bound on `N²·|P_exact − P_approx|` over `η ∈ [0, 0.2]`,
/// `N ∈ [50, 1000]`. Fitted, not derived; the largest observed value is
/// about 10.3 (η = 0.2).
pub const APPROX_ERROR_CONSTANT: f64 = 12.0;

type Mat2 = [[f64; 2]; 2];

fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eta) {
        return Err(SimError::EtaOutOfRange(eta));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeParams {
    n_splitters: u64,
    eta: f64,
}

impl CascadeParams {
    pub fn new(n_splitters: u64, eta: f64) -> Result<Self> {
        if n_splitters == 0 {
            return Err(SimError::TooFewSplitters { min: 1, got: 0 });
        }
        check_eta(eta)?;
        Ok(Self { n_splitters, eta })
    }

    pub fn n_splitters(&self) -> u64 {
        self.n_splitters
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `π/2N`, so that `N` splitters rotate by exactly a quarter turn.
    pub fn theta(&self) -> f64 {
        PI / (2.0 * self.n_splitters as f64)
    }

    pub fn matrices(&self) -> TransferMatrices {
        let (s, c) = self.theta().sin_cos();
        TransferMatrices {
            splitter: [[c, -s], [s, c]],
            absorber: [[1.0, 0.0], [0.0, self.eta.sqrt()]],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrices {
    pub splitter: [[f64; 2]; 2],
    pub absorber: [[f64; 2]; 2],
}

/// `⟨0̄|(BA)^{N−1}B|0̄⟩`, by left-folding 2×2 products.
pub fn transfer_amplitude_exact(params: &CascadeParams) -> f64 {
    let TransferMatrices { splitter, absorber } = params.matrices();
    let step = matmul(&splitter, &absorber);
    let mut m = splitter;
    for _ in 1..params.n_splitters {
        m = matmul(&step, &m);
    }
    m[0][0]
}

pub fn success_probability_exact(params: &CascadeParams) -> f64 {
    transfer_amplitude_exact(params).powi(2)
}

/// Leading-order (`O(1/N)`) expansion of the transfer amplitude, squared.
///
/// With `s = √η`:
/// `1 − (π/2)²/N · [1/2 + s(1 − s^{N−1})/(1 − s)
///   − (1/N)·s(1 − N s^{N−1} + (N−1) s^N)/(1 − s)²]`.
/// At `η = 0` both sums vanish and the bracket is `1/2`.
pub fn success_probability_approx(params: &CascadeParams) -> Result<f64> {
    Ok(transfer_amplitude_approx(params)?.powi(2))
}

pub fn transfer_amplitude_approx(params: &CascadeParams) -> Result<f64> {
    let n = params.n_splitters;
    if n < 2 {
        return Err(SimError::TooFewSplitters { min: 2, got: n });
    }
    let nf = n as f64;
    let s = params.eta.sqrt();
    let bracket = if s == 0.0 {
        0.5
    } else {
        let geometric = s * (1.0 - s.powf(nf - 1.0)) / (1.0 - s);
        let weighted =
            s * (1.0 - nf * s.powf(nf - 1.0) + (nf - 1.0) * s.powf(nf)) / (1.0 - s).powi(2);
        0.5 + geometric - weighted / nf
    };
    Ok(1.0 - (PI / 2.0).powi(2) / nf * bracket)
}

/// Real-valued estimate `(π/2)² · 1/(1−P) · (1+√η)/(1−√η)` of the number of
/// splitters needed to reach success probability `target_p`. Only
/// meaningful when `target_p` is close to one.
pub fn required_splitters_estimate(target_p: f64, eta: f64) -> Result<f64> {
    if !(target_p > 0.0 && target_p < 1.0) {
        return Err(SimError::TargetOutOfRange(target_p));
    }
    check_eta(eta)?;
    let s = eta.sqrt();
    Ok((PI / 2.0).powi(2) / (1.0 - target_p) * (1.0 + s) / (1.0 - s))
}

/// Ceiling of [`required_splitters_estimate`].
pub fn required_splitters(target_p: f64, eta: f64) -> Result<u64> {
    Ok(required_splitters_estimate(target_p, eta)?.ceil() as u64)
}

/// Smallest `N ≤ max_n` whose exact success probability reaches `target_p`.
pub fn smallest_n_reaching(target_p: f64, eta: f64, max_n: u64) -> Result<Option<u64>> {
    if !(target_p > 0.0 && target_p < 1.0) {
        return Err(SimError::TargetOutOfRange(target_p));
    }
    check_eta(eta)?;
    for n in 1..=max_n {
        if success_probability_exact(&CascadeParams::new(n, eta)?) >= target_p {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n_splitters: u64,
    pub eta: f64,
    pub p_exact: f64,
    pub p_approx: f64,
}

/// Exact and approximate success probability on the grid `eta_values ×
/// n_values`, η-major (one contiguous curve per η).
pub fn sweep(n_values: &[u64], eta_values: &[f64]) -> Result<Vec<SweepRow>> {
    for &n in n_values {
        if n < 2 {
            return Err(SimError::TooFewSplitters { min: 2, got: n });
        }
    }
    for &eta in eta_values {
        check_eta(eta)?;
    }
    let cells: Vec<(f64, u64)> = eta_values
        .iter()
        .flat_map(|&eta| n_values.iter().map(move |&n| (eta, n)))
        .collect();
    cells
        .into_par_iter()
        .map(|(eta, n)| {
            let params = CascadeParams::new(n, eta)?;
            Ok(SweepRow {
                n_splitters: n,
                eta,
                p_exact: success_probability_exact(&params),
                p_approx: success_probability_approx(&params)?,
            })
        })
        .collect()
}
