//! Protocols assembled from one-qubit beam splitters and the IFM gate.
//!
//! Preparation circuits that want the gate to behave like a CNOT on a
//! `|0̄⟩` target (Bell, GHZ and χ preparation) cross the target's output
//! rails after the interferometer, which relabels `|0̄⟩ ↔ |1̄⟩`. The photon
//! pair circuit and the Bell measurement read the interferometer ports
//! directly.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, SimError};
use crate::ifm_gate::{apply_ifm, IfmGateConfig};
use crate::state::{
    AbsorptionTag, EventId, LogicalBasisState, Outcome, QubitDescriptor, Species, StateVector,
};
use crate::unitary::{Axis, OneQubitUnitary};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];

    fn index(self) -> usize {
        self as usize
    }

    /// Classical bits `(x, z)` of a teleportation outcome: the Pauli
    /// correction is `σ_x^x σ_z^z`.
    pub fn bits(self) -> (u8, u8) {
        match self {
            BellLabel::PhiPlus => (0, 0),
            BellLabel::PhiMinus => (0, 1),
            BellLabel::PsiPlus => (1, 0),
            BellLabel::PsiMinus => (1, 1),
        }
    }

    /// Amplitudes `ket[a][b]` of `|ā b̄⟩`.
    pub fn ket(self) -> [[Complex64; 2]; 2] {
        let h = Complex64::from(FRAC_1_SQRT_2);
        match self {
            BellLabel::PhiPlus => [[h, ZERO], [ZERO, h]],
            BellLabel::PhiMinus => [[h, ZERO], [ZERO, -h]],
            BellLabel::PsiPlus => [[ZERO, h], [h, ZERO]],
            BellLabel::PsiMinus => [[ZERO, h], [-h, ZERO]],
        }
    }

    pub fn state(self, first: QubitDescriptor, second: QubitDescriptor) -> Result<StateVector> {
        let ket = self.ket();
        let mut entries = Vec::with_capacity(2);
        for a in 0..2u8 {
            for b in 0..2u8 {
                let amp = ket[a as usize][b as usize];
                if amp != ZERO {
                    entries.push((LogicalBasisState::from_bits(&[a, b])?, amp));
                }
            }
        }
        StateVector::from_amplitudes(vec![first, second], entries)
    }

    pub fn is_phi(self) -> bool {
        matches!(self, BellLabel::PhiPlus | BellLabel::PhiMinus)
    }

    pub fn name(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "PhiPlus",
            BellLabel::PhiMinus => "PhiMinus",
            BellLabel::PsiPlus => "PsiPlus",
            BellLabel::PsiMinus => "PsiMinus",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BellLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        BellLabel::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown Bell label {s:?}"))
    }
}

/// A product operator `first ⊗ second` on a (positron, electron) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalPair {
    pub first: OneQubitUnitary,
    pub second: OneQubitUnitary,
}

impl LocalPair {
    /// `self ∘ other`: `other` acts first.
    fn after(self, other: LocalPair) -> LocalPair {
        LocalPair {
            first: self.first * other.first,
            second: self.second * other.second,
        }
    }

    pub fn apply(&self, state: &mut StateVector, first: usize, second: usize) -> Result<()> {
        state.apply_unitary(first, &self.first)?;
        state.apply_unitary(second, &self.second)
    }

    /// Dense 4×4 matrix over `|ā b̄⟩`, row/column index `2a + b`.
    pub fn matrix(&self) -> [[Complex64; 4]; 4] {
        let mut m = [[ZERO; 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = self.first.entry(r >> 1, c >> 1) * self.second.entry(r & 1, c & 1);
            }
        }
        m
    }
}

/// Images of `(Φ⁺, Φ⁻, Ψ⁺, Ψ⁻)` under the six Bell-basis permutations,
/// phases dropped.
const PERMUTATION_TABLE: [[BellLabel; 4]; 6] = {
    use BellLabel::*;
    [
        [PhiPlus, PhiMinus, PsiPlus, PsiMinus],
        [PsiMinus, PsiPlus, PhiMinus, PhiPlus],
        [PhiPlus, PsiPlus, PhiMinus, PsiMinus],
        [PsiPlus, PhiMinus, PhiPlus, PsiMinus],
        [PsiMinus, PhiMinus, PsiPlus, PhiPlus],
        [PsiMinus, PhiPlus, PhiMinus, PsiPlus],
    ]
};

fn check_permutation(k: u8) -> Result<()> {
    if !(1..=6).contains(&k) {
        return Err(SimError::PermutationOutOfRange(k));
    }
    Ok(())
}

/// Operator `k ∈ 1..=6`: `I⊗I`, `A`, `B`, `C`, `BA`, `CA` with
/// `A = R_y(π)⊗I`, `B = R_y(π/2)⊗R_y(π/2)`, `C = R_x(π/2)⊗R_x(π/2)`.
pub fn bell_permutation_operator(k: u8) -> Result<LocalPair> {
    use std::f64::consts::{FRAC_PI_2, PI};
    check_permutation(k)?;
    let id = OneQubitUnitary::identity();
    let a = LocalPair {
        first: OneQubitUnitary::rotation(Axis::Y, PI),
        second: id,
    };
    let b = LocalPair {
        first: OneQubitUnitary::rotation(Axis::Y, FRAC_PI_2),
        second: OneQubitUnitary::rotation(Axis::Y, FRAC_PI_2),
    };
    let c = LocalPair {
        first: OneQubitUnitary::rotation(Axis::X, FRAC_PI_2),
        second: OneQubitUnitary::rotation(Axis::X, FRAC_PI_2),
    };
    Ok(match k {
        1 => LocalPair {
            first: id,
            second: id,
        },
        2 => a,
        3 => b,
        4 => c,
        5 => b.after(a),
        _ => c.after(a),
    })
}

/// Label that operator `k` maps `label` to.
pub fn permuted_label(k: u8, label: BellLabel) -> Result<BellLabel> {
    check_permutation(k)?;
    Ok(PERMUTATION_TABLE[k as usize - 1][label.index()])
}

/// Inverse of [`permuted_label`]: which input label operator `k` sends to
/// `image`.
pub fn unpermuted_label(k: u8, image: BellLabel) -> Result<BellLabel> {
    check_permutation(k)?;
    let row = &PERMUTATION_TABLE[k as usize - 1];
    Ok(BellLabel::ALL
        .into_iter()
        .find(|l| row[l.index()] == image)
        .expect("each row is a permutation"))
}

/// The gate followed by a crossing of the target's two output rails.
fn ifm_crossed(
    state: &mut StateVector,
    control: usize,
    target: usize,
    config: &IfmGateConfig,
) -> Result<()> {
    apply_ifm(state, control, target, config)?;
    state.apply_unitary(target, &OneQubitUnitary::pauli(Axis::X))
}

fn basis(bits: &[u8]) -> LogicalBasisState {
    LogicalBasisState::from_bits(bits).expect("literal bits are 0/1")
}

/// Positron and electron from `|0̄⟩₊|0̄⟩₋` into `|Φ⁺⟩`.
pub fn bell_generation(config: &IfmGateConfig) -> Result<StateVector> {
    let mut s = StateVector::new(
        vec![
            QubitDescriptor::positron("positron"),
            QubitDescriptor::electron("electron"),
        ],
        &basis(&[0, 0]),
    )?;
    s.apply_unitary(0, &OneQubitUnitary::hadamard())?;
    ifm_crossed(&mut s, 0, 1, config)?;
    Ok(s)
}

/// [`bell_generation`] followed by the local operations that rotate `|Φ⁺⟩`
/// into `target`.
pub fn bell_state_generation(target: BellLabel, config: &IfmGateConfig) -> Result<StateVector> {
    let mut s = bell_generation(config)?;
    let (x, z) = target.bits();
    if x == 1 {
        s.apply_unitary(1, &OneQubitUnitary::pauli(Axis::X))?;
    }
    if z == 1 {
        s.apply_unitary(0, &OneQubitUnitary::pauli(Axis::Z))?;
    }
    Ok(s)
}

/// `(|0̄0̄0̄⟩ + |1̄1̄1̄⟩)/√2` on (positron, electron, positron).
///
/// The second gate uses the electron as the object for the second
/// positron; annihilation works either way round.
pub fn ghz_generation(config: &IfmGateConfig) -> Result<StateVector> {
    let mut s = StateVector::new(
        vec![
            QubitDescriptor::positron("positron1"),
            QubitDescriptor::electron("electron"),
            QubitDescriptor::positron("positron2"),
        ],
        &basis(&[0, 0, 0]),
    )?;
    s.apply_unitary(0, &OneQubitUnitary::hadamard())?;
    ifm_crossed(&mut s, 0, 1, config)?;
    ifm_crossed(&mut s, 1, 2, config)?;
    Ok(s)
}

pub fn ghz_reference() -> Result<StateVector> {
    let h = Complex64::from(FRAC_1_SQRT_2);
    StateVector::from_amplitudes(
        vec![
            QubitDescriptor::positron("positron1"),
            QubitDescriptor::electron("electron"),
            QubitDescriptor::positron("positron2"),
        ],
        [(basis(&[0, 0, 0]), h), (basis(&[1, 1, 1]), h)],
    )
}

fn chi_register() -> Vec<QubitDescriptor> {
    vec![
        QubitDescriptor::positron("chi1"),
        QubitDescriptor::electron("chi2"),
        QubitDescriptor::positron("chi3"),
        QubitDescriptor::electron("chi4"),
    ]
}

/// `|χ⟩ = ½[(|00⟩+|11⟩)|00⟩ + (|01⟩+|10⟩)|11⟩]` on (+, −, +, −).
pub fn chi_reference() -> Result<StateVector> {
    let q = Complex64::from(0.5);
    StateVector::from_amplitudes(
        chi_register(),
        [
            (basis(&[0, 0, 0, 0]), q),
            (basis(&[1, 1, 0, 0]), q),
            (basis(&[0, 1, 1, 1]), q),
            (basis(&[1, 0, 1, 1]), q),
        ],
    )
}

/// GHZ, a Hadamard on each of its qubits, then a fresh electron entangled
/// with the third qubit.
pub fn chi_preparation(config: &IfmGateConfig) -> Result<StateVector> {
    let mut ghz = ghz_generation(config)?;
    for q in 0..3 {
        ghz.apply_unitary(q, &OneQubitUnitary::hadamard())?;
    }
    let fresh = StateVector::new(vec![QubitDescriptor::electron("chi4")], &basis(&[0]))?;
    let mut s = ghz.tensor(&fresh)?;
    ifm_crossed(&mut s, 2, 3, config)?;
    s.relabel(chi_register())?;
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonPairResult {
    /// `None` when the atom measurement landed in an absorbed branch.
    pub label: Option<BellLabel>,
    pub atom_outcome: Outcome,
    /// Two-photon state after the atom is measured out.
    pub photons: Option<StateVector>,
}

/// Atom `(|0⟩ = e₁, |1⟩ = g₀)` and two photons. The atom is put into a
/// superposition, gates both photons, is rotated back and measured; the
/// outcome heralds which Bell state the photons were projected onto.
pub fn photon_pair_bell<R: Rng + ?Sized>(
    config: &IfmGateConfig,
    rng: &mut R,
) -> Result<PhotonPairResult> {
    let mut s = StateVector::new(
        vec![
            QubitDescriptor::atom("atom"),
            QubitDescriptor::photon("photon1"),
            QubitDescriptor::photon("photon2"),
        ],
        &basis(&[0, 0, 0]),
    )?;
    // The Rabi-pulse Hadamard on the atom has the same matrix as H.
    let h_prime = OneQubitUnitary::hadamard();
    s.apply_unitary(0, &h_prime)?;
    apply_ifm(&mut s, 0, 1, config)?;
    apply_ifm(&mut s, 0, 2, config)?;
    s.apply_unitary(0, &h_prime)?;
    let outcome = s.measure(0, rng)?;
    let label = match outcome {
        Outcome::Zero => Some(BellLabel::PhiPlus),
        Outcome::One => Some(BellLabel::PhiMinus),
        Outcome::Absorbed(_) => None,
    };
    let photons = match outcome.bit() {
        Some(bit) => Some(s.project_qubit(0, bit)?),
        None => None,
    };
    Ok(PhotonPairResult {
        label,
        atom_outcome: outcome,
        photons,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Herald {
    /// The measured pair annihilated (or the photon was absorbed) inside
    /// the measurement's interferometer.
    Annihilation { event: EventId, tag: AbsorptionTag },
    /// The reported Bell label of measurement `measurement` is a coin flip.
    Guessed { measurement: usize },
    /// The input already sat in an absorbed branch when it was measured.
    PriorAbsorption { event: EventId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BellResult {
    /// Which Bell state the pair was in, known only to the simulator.
    pub truth: BellLabel,
    pub reported: BellLabel,
    pub guessed: bool,
    pub permutation: u8,
}

impl BellResult {
    pub fn correct(&self) -> bool {
        self.truth == self.reported
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Correction {
    pub qubit: usize,
    pub pauli: Axis,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProtocolOutcome {
    /// `(x, z)` per reported Bell result, flattened.
    pub classical_bits: Vec<u8>,
    pub heralds: Vec<Herald>,
    pub corrections: Vec<Correction>,
    pub bell_results: Vec<BellResult>,
    pub success: Option<bool>,
}

impl ProtocolOutcome {
    pub fn guessed(&self) -> bool {
        self.bell_results.iter().any(|r| r.guessed)
    }
}

struct PairMeasurement {
    result: Option<BellResult>,
    heralds: Vec<Herald>,
    /// Remaining qubits, normalized, in their original order.
    rest: Option<StateVector>,
}

/// Core of the Bell measurement.
///
/// The simulator first draws which Bell state the pair is in (with Born
/// probabilities, in the permuted frame) and conditions the other qubits on
/// it; this is the ground truth a guessed result is scored against. That
/// Bell state is then sent through the physical circuit: the gate with the
/// positron as object, a detector on the electron's `b′` port, and if the
/// electron arrived there, a Hadamard and a path measurement on the
/// positron.
fn measure_bell_pair<R: Rng + ?Sized>(
    state: &StateVector,
    positron: usize,
    electron: usize,
    config: &IfmGateConfig,
    rng: &mut R,
    permutation: Option<u8>,
    index: usize,
) -> Result<PairMeasurement> {
    state.check_index(positron)?;
    state.check_index(electron)?;
    if positron == electron {
        return Err(SimError::SameQubit(positron));
    }
    let pd = state.descriptor(positron)?.clone();
    let ed = state.descriptor(electron)?.clone();
    if !pd.species().absorbs(ed.species()) {
        return Err(SimError::SpeciesMismatch {
            control: pd.species(),
            target: ed.species(),
        });
    }
    let k = permutation.unwrap_or(1);
    check_permutation(k)?;

    let mut work = state.clone();
    bell_permutation_operator(k)?.apply(&mut work, positron, electron)?;

    let branches = BellLabel::ALL
        .into_iter()
        .map(|l| Ok((l, work.project_pair(positron, electron, &l.ket())?)))
        .collect::<Result<Vec<_>>>()?;
    let weights: Vec<f64> = branches
        .iter()
        .map(|(_, r)| r.coherent_probability())
        .collect();
    let coherent: f64 = weights.iter().sum();
    if coherent <= 0.0 {
        return Err(SimError::FullyAbsorbed);
    }
    let total = coherent + work.absorbed_mass();
    let mut u = rng.gen::<f64>() * total;

    let mut chosen = None;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            chosen = Some(i);
            break;
        }
        u -= w;
    }
    let chosen = match chosen {
        Some(i) => i,
        None => {
            let mut picked = None;
            for record in work.absorbed() {
                if u < record.mass() {
                    picked = Some(record.event());
                    break;
                }
                u -= record.mass();
            }
            match picked.or_else(|| work.absorbed().last().map(|r| r.event())) {
                Some(event) => {
                    return Ok(PairMeasurement {
                        result: None,
                        heralds: vec![Herald::PriorAbsorption { event }],
                        rest: None,
                    })
                }
                // Rounding pushed u past the last coherent branch.
                None => weights
                    .iter()
                    .rposition(|&w| w > 0.0)
                    .expect("coherent weight is positive"),
            }
        }
    };
    let (truth_permuted, rest) = &branches[chosen];
    let mut rest = rest.clone();
    rest.renormalize()?;

    let mut heralds = Vec::new();
    let tag = pd.species().absorption_tag();
    let mut pair = truth_permuted.state(pd, ed)?;
    apply_ifm(&mut pair, 0, 1, config)?;
    let reported_permuted = match pair.measure(1, rng)? {
        // Electron detected at b′: the pair was in the Ψ sector.
        Outcome::Zero => {
            pair.apply_unitary(0, &OneQubitUnitary::hadamard())?;
            // |0̄1̄⟩ leaves the interferometer as −|0̄0̄⟩, so Ψ⁺ ends on |1̄⟩₊.
            match pair.measure(0, rng)? {
                Outcome::Zero => Some(BellLabel::PsiMinus),
                Outcome::One => Some(BellLabel::PsiPlus),
                Outcome::Absorbed(_) => None,
            }
        }
        Outcome::Absorbed(event) => {
            heralds.push(Herald::Annihilation {
                event,
                tag: AbsorptionTag::Gamma,
            });
            None
        }
        Outcome::One => None,
    };
    let (reported_permuted, guessed) = match reported_permuted {
        Some(l) => (l, false),
        None => {
            heralds.push(Herald::Guessed { measurement: index });
            let coin = if rng.gen::<bool>() {
                BellLabel::PhiPlus
            } else {
                BellLabel::PhiMinus
            };
            (coin, true)
        }
    };
    if let Some(Herald::Annihilation { tag: t, .. }) = heralds.first_mut() {
        *t = tag;
    }

    Ok(PairMeasurement {
        result: Some(BellResult {
            truth: unpermuted_label(k, *truth_permuted)?,
            reported: unpermuted_label(k, reported_permuted)?,
            guessed,
            permutation: k,
        }),
        heralds,
        rest: Some(rest),
    })
}

/// Bell measurement of `(positron, electron)` with an optional
/// Bell-basis permutation `1..=6` applied first. The Ψ sector is resolved
/// exactly; a Φ result is a flagged coin flip.
pub fn bell_measure<R: Rng + ?Sized>(
    state: &StateVector,
    positron: usize,
    electron: usize,
    config: &IfmGateConfig,
    rng: &mut R,
    permutation: Option<u8>,
) -> Result<ProtocolOutcome> {
    let m = measure_bell_pair(state, positron, electron, config, rng, permutation, 0)?;
    let mut out = ProtocolOutcome {
        heralds: m.heralds,
        ..ProtocolOutcome::default()
    };
    match m.result {
        Some(r) => {
            let (x, z) = r.reported.bits();
            out.classical_bits = vec![x, z];
            out.success = Some(r.correct());
            out.bell_results.push(r);
        }
        None => out.success = Some(false),
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermutationPolicy {
    Identity,
    /// Uniform over `1..=6`, drawn from the protocol's RNG.
    Uniform,
    Fixed(u8),
}

impl PermutationPolicy {
    fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> Result<u8> {
        match self {
            PermutationPolicy::Identity => Ok(1),
            PermutationPolicy::Uniform => Ok(rng.gen_range(1..=6)),
            PermutationPolicy::Fixed(k) => {
                check_permutation(k)?;
                Ok(k)
            }
        }
    }
}

/// Textbook CNOT (qubit 0 controls qubit 1) on a pure two-qubit state.
pub fn ideal_cnot(input: &StateVector) -> Result<StateVector> {
    if input.num_qubits() != 2 {
        return Err(SimError::RegisterMismatch(format!(
            "CNOT acts on 2 qubits, got {}",
            input.num_qubits()
        )));
    }
    let entries: Vec<_> = input
        .amplitudes()
        .map(|(b, a)| {
            let (c, t) = (b.bit(0), b.bit(1));
            (basis(&[c, t ^ c]), a)
        })
        .collect();
    StateVector::from_amplitudes(input.register().to_vec(), entries)
}

/// Teleportation-based CNOT with uniformly drawn Bell-basis permutations.
pub fn gc_cnot<R: Rng + ?Sized>(
    input: &StateVector,
    config: &IfmGateConfig,
    rng: &mut R,
) -> Result<(StateVector, ProtocolOutcome)> {
    gc_cnot_with_policy(input, config, rng, PermutationPolicy::Uniform)
}

/// CNOT (qubit 0 controls qubit 1) on a (positron, electron) input through
/// the four-qubit resource `|χ⟩` and two Bell measurements.
///
/// The control is teleported through the `(χ₄ → χ₃)` pair and the target
/// through `(χ₁ → χ₂)`; the CNOT sits inside `|χ⟩` between `χ₃` and `χ₂`.
/// Pauli byproducts are propagated through that CNOT before correcting.
pub fn gc_cnot_with_policy<R: Rng + ?Sized>(
    input: &StateVector,
    config: &IfmGateConfig,
    rng: &mut R,
    policy: PermutationPolicy,
) -> Result<(StateVector, ProtocolOutcome)> {
    let species: Vec<Species> = input.register().iter().map(|d| d.species()).collect();
    if species != [Species::Positron, Species::Electron] {
        return Err(SimError::RegisterMismatch(format!(
            "CNOT input must be (positron, electron), got {species:?}"
        )));
    }
    let chi = chi_preparation(config)?;
    let output_register = vec![chi.register()[2].clone(), chi.register()[1].clone()];
    // [χ1, χ2, χ3, χ4, control, target]
    let full = chi.tensor(input)?;

    let mut outcome = ProtocolOutcome::default();
    let failed = |outcome: &mut ProtocolOutcome, heralds: Vec<Herald>| {
        let event = heralds
            .iter()
            .find_map(|h| match h {
                Herald::PriorAbsorption { event } | Herald::Annihilation { event, .. } => {
                    Some(*event)
                }
                Herald::Guessed { .. } => None,
            })
            .unwrap_or(EventId(0));
        outcome.heralds.extend(heralds);
        outcome.success = Some(false);
        (
            StateVector::fully_absorbed(output_register.clone(), event, AbsorptionTag::Gamma),
            std::mem::take(outcome),
        )
    };

    let k1 = policy.draw(rng)?;
    let b1 = measure_bell_pair(&full, 4, 3, config, rng, Some(k1), 0)?;
    let (Some(r1), Some(rest)) = (b1.result, b1.rest) else {
        return Ok(failed(&mut outcome, b1.heralds));
    };
    outcome.heralds.extend(b1.heralds);
    // rest: [χ1, χ2, χ3, target]
    let k2 = policy.draw(rng)?;
    let b2 = measure_bell_pair(&rest, 0, 3, config, rng, Some(k2), 1)?;
    let (Some(r2), Some(rest)) = (b2.result, b2.rest) else {
        outcome.bell_results.push(r1);
        return Ok(failed(&mut outcome, b2.heralds));
    };
    outcome.heralds.extend(b2.heralds);

    // rest: [χ2, χ3] → [control out, target out]
    let mut out = rest.reorder(&[1, 0])?;
    let (x1, z1) = r1.reported.bits();
    let (x2, z2) = r2.reported.bits();
    let plan = [
        (0, Axis::X, x1),
        (0, Axis::Z, z1 ^ z2),
        (1, Axis::X, x1 ^ x2),
        (1, Axis::Z, z2),
    ];
    for (qubit, pauli, on) in plan {
        if on == 1 {
            out.apply_unitary(qubit, &OneQubitUnitary::pauli(pauli))?;
            outcome.corrections.push(Correction { qubit, pauli });
        }
    }
    outcome.classical_bits = vec![x1, z1, x2, z2];
    outcome.success = Some(r1.correct() && r2.correct());
    outcome.bell_results = vec![r1, r2];
    Ok((out, outcome))
}
