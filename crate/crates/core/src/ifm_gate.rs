//! The interaction-free two-qubit gate.
//!
//! The target's rails are the two arms `(b, a)` of the Zeno interferometer
//! (`|0̄⟩` = particle on `b`, `|1̄⟩` = particle on `a`); the control's `|1̄⟩`
//! rail runs through the object position on every `a` segment. Per basis
//! branch of the control:
//!
//! * control `|0̄⟩`: the target only sees the splitters, `B^N` = a quarter
//!   turn, so `|0̄⟩ → |1̄⟩` and `|1̄⟩ → −|0̄⟩`;
//! * control `|1̄⟩`: every `a` segment is blocked. In finite mode the
//!   target evolves through `A, (B, A) × N`; ideally `|0̄⟩` stays put and a
//!   particle injected on `a` is absorbed at once.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::interferometer::CascadeParams;
use crate::state::{AbsorptionTag, LogicalBasisState, QubitDescriptor, StateVector};
use crate::unitary::OneQubitUnitary;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IfmMode {
    /// `N → ∞` with a perfect absorber.
    Ideal,
    Finite {
        n_splitters: u64,
        eta: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IfmGateConfig {
    mode: IfmMode,
}

impl IfmGateConfig {
    pub const fn ideal() -> Self {
        Self {
            mode: IfmMode::Ideal,
        }
    }

    pub fn finite(n_splitters: u64, eta: f64) -> Result<Self> {
        CascadeParams::new(n_splitters, eta)?;
        Ok(Self {
            mode: IfmMode::Finite { n_splitters, eta },
        })
    }

    pub fn mode(&self) -> IfmMode {
        self.mode
    }
}

impl Default for IfmGateConfig {
    fn default() -> Self {
        Self::ideal()
    }
}

fn validate(state: &StateVector, control: usize, target: usize) -> Result<AbsorptionTag> {
    state.check_index(control)?;
    state.check_index(target)?;
    if control == target {
        return Err(SimError::SameQubit(control));
    }
    let c = state.descriptor(control)?.species();
    let t = state.descriptor(target)?.species();
    if !c.absorbs(t) {
        return Err(SimError::SpeciesMismatch {
            control: c,
            target: t,
        });
    }
    Ok(c.absorption_tag())
}

/// Applies the gate in place. Absorbed probability from this application is
/// booked as a single ledger record.
pub fn apply_ifm(
    state: &mut StateVector,
    control: usize,
    target: usize,
    config: &IfmGateConfig,
) -> Result<()> {
    let tag = validate(state, control, target)?;
    let event = state.allocate_event();
    match config.mode {
        IfmMode::Ideal => apply_ideal(state, control, target, event, tag),
        IfmMode::Finite { n_splitters, eta } => {
            apply_finite(state, control, target, n_splitters, eta, event, tag)
        }
    }
    Ok(())
}

fn apply_ideal(
    state: &mut StateVector,
    control: usize,
    target: usize,
    event: crate::state::EventId,
    tag: AbsorptionTag,
) {
    let cmask = 1u64 << control;
    let tmask = 1u64 << target;
    let mut next: BTreeMap<u64, Complex64> = BTreeMap::new();
    let mut lost = 0.0;
    for (&k, &amp) in state.amplitude_map() {
        match (k & cmask != 0, k & tmask != 0) {
            (false, false) => *next.entry(k | tmask).or_default() += amp,
            (false, true) => *next.entry(k & !tmask).or_default() -= amp,
            (true, false) => *next.entry(k).or_default() += amp,
            (true, true) => lost += amp.norm_sqr(),
        }
    }
    state.replace_amplitudes(next);
    state.record_loss(lost, event, tag);
}

fn apply_finite(
    state: &mut StateVector,
    control: usize,
    target: usize,
    n_splitters: u64,
    eta: f64,
    event: crate::state::EventId,
    tag: AbsorptionTag,
) {
    let cmask = 1u64 << control;
    let tmask = 1u64 << target;
    let survival = eta.sqrt();
    let blocked = |k: u64| k & cmask != 0 && k & tmask != 0;
    let splitter =
        OneQubitUnitary::beam_splitter(std::f64::consts::PI / (2.0 * n_splitters as f64));

    let mut lost = state.scale_where(blocked, survival);
    for _ in 0..n_splitters {
        state.apply_matrix(target, &splitter);
        lost += state.scale_where(blocked, survival);
    }
    state.record_loss(lost, event, tag);
}

/// One row of the gate's action on a basis input, with the control as a
/// positron and the target as an electron.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthRow {
    pub control_in: u8,
    pub target_in: u8,
    /// Amplitudes of the output on `(control_in, 0̄)` and `(control_in, 1̄)`.
    pub target_out: [Complex64; 2],
    pub absorbed_mass: f64,
}

/// Path occupations `x y a b` for the control `(x, y)` and target `(a, b)`
/// rails, with `γ` when the pair annihilated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathRow {
    Occupied { x: u8, y: u8, a: u8, b: u8 },
    Annihilated { y: u8, a: u8, b: u8 },
}

impl TruthRow {
    pub fn p_target(&self, bit: usize) -> f64 {
        self.target_out[bit].norm_sqr()
    }

    /// Input occupations `(x, y, a, b)`.
    pub fn input_paths(&self) -> [u8; 4] {
        rails(self.control_in, self.target_in)
    }

    /// Output occupations, when the row is deterministic (ideal mode);
    /// `None` when the output is a superposition or a partial loss.
    pub fn output_paths(&self) -> Option<PathRow> {
        const EPS: f64 = 1e-12;
        if (self.absorbed_mass - 1.0).abs() < EPS {
            // Both particles are gone; the control's idle rail stays empty.
            return Some(PathRow::Annihilated { y: 0, a: 0, b: 0 });
        }
        let hit = (0..2).find(|&b| (self.p_target(b) - 1.0).abs() < EPS)?;
        let [x, y, a, b] = rails(self.control_in, hit as u8);
        Some(PathRow::Occupied { x, y, a, b })
    }
}

fn rails(control: u8, target: u8) -> [u8; 4] {
    // |0̄⟩₊ = |0⟩x|1⟩y, |1̄⟩₊ = |1⟩x|0⟩y; |0̄⟩₋ = |0⟩a|1⟩b, |1̄⟩₋ = |1⟩a|0⟩b.
    [control, 1 - control, target, 1 - target]
}

/// Runs the gate on each of the four two-qubit basis inputs.
pub fn truth_table(config: &IfmGateConfig) -> Result<Vec<TruthRow>> {
    let register = vec![
        QubitDescriptor::positron("control"),
        QubitDescriptor::electron("target"),
    ];
    let mut rows = Vec::with_capacity(4);
    for control_in in 0..2u8 {
        for target_in in 0..2u8 {
            let input = LogicalBasisState::from_bits(&[control_in, target_in])?;
            let mut s = StateVector::new(register.clone(), &input)?;
            apply_ifm(&mut s, 0, 1, config)?;
            let out =
                |t| s.amplitude(&LogicalBasisState::from_bits(&[control_in, t]).expect("bits"));
            rows.push(TruthRow {
                control_in,
                target_in,
                target_out: [out(0), out(1)],
                absorbed_mass: s.absorbed_mass(),
            });
        }
    }
    Ok(rows)
}
