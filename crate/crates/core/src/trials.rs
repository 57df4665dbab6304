//! Seeded Monte Carlo batches of the measurement protocols.
//!
//! Trial `i` of a batch draws from its own ChaCha stream keyed by
//! `(seed, i)`, so results do not depend on how rayon schedules the work and
//! come back in trial order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuits::{
    bell_measure, gc_cnot, ideal_cnot, permuted_label, photon_pair_bell, BellLabel,
};
use crate::error::{Result, SimError};
use crate::ifm_gate::IfmGateConfig;
use crate::state::{LogicalBasisState, QubitDescriptor, StateVector};

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn run_batch<T, F>(trials: u64, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> Result<T> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| f(i, &mut trial_rng(seed, i)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellMeasureTrial {
    pub trial: u64,
    pub true_label: BellLabel,
    pub permutation: u8,
    /// The state the measurement circuit actually saw, after the permutation.
    pub measured_label: BellLabel,
    pub reported_label: BellLabel,
    pub guessed: bool,
    pub correct: bool,
}

/// Uniform Bell input, uniform permutation `1..=6`, one measurement.
pub fn bell_measure_trials(
    config: &IfmGateConfig,
    trials: u64,
    seed: u64,
) -> Result<Vec<BellMeasureTrial>> {
    run_batch(trials, seed, |trial, rng| {
        let truth = BellLabel::ALL[rng.gen_range(0..4)];
        let k = rng.gen_range(1..=6u8);
        let input = truth.state(
            QubitDescriptor::positron("positron"),
            QubitDescriptor::electron("electron"),
        )?;
        let out = bell_measure(&input, 0, 1, config, rng, Some(k))?;
        let r = out.bell_results[0];
        debug_assert_eq!(r.truth, truth);
        Ok(BellMeasureTrial {
            trial,
            true_label: truth,
            permutation: k,
            measured_label: permuted_label(k, truth)?,
            reported_label: r.reported,
            guessed: r.guessed,
            correct: r.correct(),
        })
    })
}

/// Random normalized (positron, electron) input with Gaussian amplitudes.
pub fn random_pair_input<R: Rng + ?Sized>(rng: &mut R) -> Result<StateVector> {
    let mut amps = [Complex64::default(); 4];
    for a in &mut amps {
        // Box-Muller
        let (u1, u2): (f64, f64) = (1.0 - rng.gen::<f64>(), rng.gen());
        let r = (-2.0 * u1.ln()).sqrt();
        let phi = std::f64::consts::TAU * u2;
        *a = Complex64::new(r * phi.cos(), r * phi.sin());
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(SimError::NotNormalized(0.0));
    }
    let entries = (0..4u64).map(|i| {
        (
            LogicalBasisState::from_bits(&[(i & 1) as u8, (i >> 1) as u8]).expect("two bits"),
            amps[i as usize] / norm,
        )
    });
    StateVector::from_amplitudes(
        vec![
            QubitDescriptor::positron("control"),
            QubitDescriptor::electron("target"),
        ],
        entries,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnotTrial {
    pub trial: u64,
    /// Reported results of the two Bell measurements; `None` when the
    /// measured pair had already been absorbed.
    pub b1: Option<BellLabel>,
    pub b2: Option<BellLabel>,
    pub success: bool,
    /// Fidelity with the ideal CNOT output, on success.
    pub fidelity: Option<f64>,
}

/// GC-CNOT on random superposition inputs.
pub fn cnot_trials(config: &IfmGateConfig, trials: u64, seed: u64) -> Result<Vec<CnotTrial>> {
    run_batch(trials, seed, |trial, rng| {
        let input = random_pair_input(rng)?;
        let (out, outcome) = gc_cnot(&input, config, rng)?;
        let success = outcome.success == Some(true);
        let fidelity = if success {
            Some(out.fidelity(&ideal_cnot(&input)?)?)
        } else {
            None
        };
        let reported = |i: usize| outcome.bell_results.get(i).map(|r| r.reported);
        Ok(CnotTrial {
            trial,
            b1: reported(0),
            b2: reported(1),
            success,
            fidelity,
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonBellTrial {
    pub trial: u64,
    pub label: Option<BellLabel>,
    /// Fidelity of the heralded two-photon state with `label`.
    pub fidelity: Option<f64>,
}

pub fn photon_bell_trials(
    config: &IfmGateConfig,
    trials: u64,
    seed: u64,
) -> Result<Vec<PhotonBellTrial>> {
    run_batch(trials, seed, |trial, rng| {
        let r = photon_pair_bell(config, rng)?;
        let fidelity = match (r.label, r.photons) {
            (Some(label), Some(mut photons)) => {
                photons.renormalize()?;
                let reference = label.state(
                    QubitDescriptor::photon("photon1"),
                    QubitDescriptor::photon("photon2"),
                )?;
                Some(photons.fidelity(&reference)?)
            }
            _ => None,
        };
        Ok(PhotonBellTrial {
            trial,
            label: r.label,
            fidelity,
        })
    })
}
