//! Joint state of a register of dual-rail qubits.
//!
//! The coherent part is a sparse map from logical basis configurations to
//! complex amplitudes. Probability lost to absorption is kept as classical
//! mass in an append-only ledger, one record per absorbing gate
//! application, so `Σ|amplitude|² + Σ mass = 1` holds after every operation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, SimError};
use crate::unitary::{Axis, OneQubitUnitary, UNITARITY_TOLERANCE};

/// Amplitudes with squared modulus below this are dropped from the map.
const PRUNE_NORM_SQR: f64 = 1e-30;

/// Tolerance used when a caller hands in amplitudes that must be normalized.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Species {
    Positron,
    Electron,
    Photon,
    Atom,
}

impl Species {
    /// Whether a particle of this species, sitting on the object path of an
    /// interferometer, removes a `target` particle that reaches it.
    ///
    /// Electron-positron annihilation is mutual, so either can play the
    /// object. Photons are only absorbed by the atom.
    pub fn absorbs(self, target: Species) -> bool {
        matches!(
            (self, target),
            (Species::Positron, Species::Electron)
                | (Species::Electron, Species::Positron)
                | (Species::Atom, Species::Photon)
        )
    }

    pub(crate) fn absorption_tag(self) -> AbsorptionTag {
        match self {
            Species::Positron | Species::Electron => AbsorptionTag::Gamma,
            Species::Photon | Species::Atom => AbsorptionTag::PhotonAbsorbed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QubitDescriptor {
    species: Species,
    label: String,
}

impl QubitDescriptor {
    pub fn new(species: Species, label: impl Into<String>) -> Self {
        Self {
            species,
            label: label.into(),
        }
    }

    pub fn positron(label: impl Into<String>) -> Self {
        Self::new(Species::Positron, label)
    }

    pub fn electron(label: impl Into<String>) -> Self {
        Self::new(Species::Electron, label)
    }

    pub fn photon(label: impl Into<String>) -> Self {
        Self::new(Species::Photon, label)
    }

    pub fn atom(label: impl Into<String>) -> Self {
        Self::new(Species::Atom, label)
    }

    pub fn species(&self) -> Species {
        self.species
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// One logical configuration: bit `i` is the occupation of qubit `i`
/// (`0` for `|0̄⟩`, `1` for `|1̄⟩`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogicalBasisState {
    bits: u64,
    len: usize,
}

impl LogicalBasisState {
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.len() > MAX_QUBITS {
            return Err(SimError::RegisterTooLarge(bits.len()));
        }
        let mut packed = 0u64;
        for (position, &value) in bits.iter().enumerate() {
            match value {
                0 => {}
                1 => packed |= 1 << position,
                _ => return Err(SimError::InvalidBit { position, value }),
            }
        }
        Ok(Self {
            bits: packed,
            len: bits.len(),
        })
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: 0, len }
    }

    pub(crate) fn from_packed(bits: u64, len: usize) -> Self {
        Self { bits, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, qubit: usize) -> u8 {
        ((self.bits >> qubit) & 1) as u8
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|q| self.bit(q)).collect()
    }

    pub(crate) fn packed(&self) -> u64 {
        self.bits
    }
}

impl fmt::Display for LogicalBasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.len {
            write!(f, "{}", self.bit(q))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventId(pub u32);

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AbsorptionTag {
    /// Electron-positron pair annihilation.
    Gamma,
    PhotonAbsorbed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorbedRecord {
    mass: f64,
    event: EventId,
    tag: AbsorptionTag,
}

impl AbsorbedRecord {
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn event(&self) -> EventId {
        self.event
    }

    pub fn tag(&self) -> AbsorptionTag {
        self.tag
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Zero,
    One,
    /// The sampled branch is one in which the particle was already absorbed.
    Absorbed(EventId),
}

impl Outcome {
    pub fn bit(self) -> Option<u8> {
        match self {
            Outcome::Zero => Some(0),
            Outcome::One => Some(1),
            Outcome::Absorbed(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    register: Vec<QubitDescriptor>,
    amplitudes: BTreeMap<u64, Complex64>,
    absorbed: Vec<AbsorbedRecord>,
    next_event: u32,
}

impl StateVector {
    /// Single basis configuration with amplitude one.
    pub fn new(descriptors: Vec<QubitDescriptor>, bits: &LogicalBasisState) -> Result<Self> {
        Self::check_register(&descriptors)?;
        if bits.len() != descriptors.len() {
            return Err(SimError::LengthMismatch {
                bits: bits.len(),
                qubits: descriptors.len(),
            });
        }
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(bits.packed(), Complex64::new(1.0, 0.0));
        Ok(Self {
            register: descriptors,
            amplitudes,
            absorbed: Vec::new(),
            next_event: 0,
        })
    }

    /// Arbitrary normalized superposition. Repeated configurations add.
    pub fn from_amplitudes<I>(descriptors: Vec<QubitDescriptor>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (LogicalBasisState, Complex64)>,
    {
        Self::check_register(&descriptors)?;
        let mut amplitudes: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (basis, amp) in entries {
            if basis.len() != descriptors.len() {
                return Err(SimError::LengthMismatch {
                    bits: basis.len(),
                    qubits: descriptors.len(),
                });
            }
            *amplitudes.entry(basis.packed()).or_default() += amp;
        }
        amplitudes.retain(|_, a| a.norm_sqr() > PRUNE_NORM_SQR);
        let state = Self {
            register: descriptors,
            amplitudes,
            absorbed: Vec::new(),
            next_event: 0,
        };
        let norm = state.coherent_probability();
        if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(SimError::NotNormalized(norm));
        }
        Ok(state)
    }

    fn check_register(descriptors: &[QubitDescriptor]) -> Result<()> {
        if descriptors.is_empty() {
            return Err(SimError::EmptyRegister);
        }
        if descriptors.len() > MAX_QUBITS {
            return Err(SimError::RegisterTooLarge(descriptors.len()));
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.register.len()
    }

    pub fn register(&self) -> &[QubitDescriptor] {
        &self.register
    }

    pub fn descriptor(&self, qubit: usize) -> Result<&QubitDescriptor> {
        self.register.get(qubit).ok_or(SimError::QubitOutOfRange {
            index: qubit,
            len: self.register.len(),
        })
    }

    pub fn amplitude(&self, basis: &LogicalBasisState) -> Complex64 {
        self.amplitudes
            .get(&basis.packed())
            .copied()
            .unwrap_or_default()
    }

    /// Non-zero amplitudes in ascending configuration order.
    pub fn amplitudes(&self) -> impl Iterator<Item = (LogicalBasisState, Complex64)> + '_ {
        let len = self.register.len();
        self.amplitudes
            .iter()
            .map(move |(&k, &a)| (LogicalBasisState::from_packed(k, len), a))
    }

    pub fn absorbed(&self) -> &[AbsorbedRecord] {
        &self.absorbed
    }

    pub fn absorbed_mass(&self) -> f64 {
        self.absorbed.iter().fold(0.0, |acc, r| acc + r.mass)
    }

    pub fn coherent_probability(&self) -> f64 {
        self.amplitudes
            .values()
            .fold(0.0, |acc, a| acc + a.norm_sqr())
    }

    /// `Σ|amplitude|² + Σ absorbed mass`; one for every reachable state.
    pub fn total_probability(&self) -> f64 {
        self.coherent_probability() + self.absorbed_mass()
    }

    /// Coherent probability of finding `qubit` in `|bit̄⟩`.
    pub fn probability(&self, qubit: usize, bit: u8) -> Result<f64> {
        self.check_index(qubit)?;
        let mask = 1u64 << qubit;
        let want = if bit == 0 { 0 } else { mask };
        Ok(self
            .amplitudes
            .iter()
            .filter(|(&k, _)| k & mask == want)
            .fold(0.0, |acc, (_, a)| acc + a.norm_sqr()))
    }

    pub(crate) fn check_index(&self, qubit: usize) -> Result<()> {
        if qubit >= self.register.len() {
            return Err(SimError::QubitOutOfRange {
                index: qubit,
                len: self.register.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn allocate_event(&mut self) -> EventId {
        let id = EventId(self.next_event);
        self.next_event += 1;
        id
    }

    pub fn apply_unitary(&mut self, qubit: usize, u: &OneQubitUnitary) -> Result<()> {
        self.check_index(qubit)?;
        let deviation = u.unitarity_deviation();
        if deviation > UNITARITY_TOLERANCE || !deviation.is_finite() {
            return Err(SimError::NotUnitary { deviation });
        }
        self.apply_matrix(qubit, u);
        Ok(())
    }

    /// Applies `u` to one qubit without validating it. Also used for the
    /// non-unitary cascade steps, whose loss the caller books separately.
    pub(crate) fn apply_matrix(&mut self, qubit: usize, u: &OneQubitUnitary) {
        let mask = 1u64 << qubit;
        let bases: BTreeSet<u64> = self.amplitudes.keys().map(|k| k & !mask).collect();
        let mut next = BTreeMap::new();
        for base in bases {
            let a0 = self.amplitudes.get(&base).copied().unwrap_or_default();
            let a1 = self
                .amplitudes
                .get(&(base | mask))
                .copied()
                .unwrap_or_default();
            let n0 = u.entry(0, 0) * a0 + u.entry(0, 1) * a1;
            let n1 = u.entry(1, 0) * a0 + u.entry(1, 1) * a1;
            if n0.norm_sqr() > PRUNE_NORM_SQR {
                next.insert(base, n0);
            }
            if n1.norm_sqr() > PRUNE_NORM_SQR {
                next.insert(base | mask, n1);
            }
        }
        self.amplitudes = next;
    }

    pub fn apply_rotation(&mut self, qubit: usize, axis: Axis, theta: f64) -> Result<()> {
        if !(0.0..4.0 * std::f64::consts::PI).contains(&theta) {
            return Err(SimError::AngleOutOfRange(theta));
        }
        self.apply_unitary(qubit, &OneQubitUnitary::rotation(axis, theta))
    }

    /// Partial absorption of whatever occupies the `|1̄⟩` rail of `qubit`:
    /// those amplitudes are multiplied by `survival_amplitude` and the lost
    /// probability becomes one ledger record.
    pub fn absorb(
        &mut self,
        qubit: usize,
        survival_amplitude: f64,
        event: EventId,
        tag: AbsorptionTag,
    ) -> Result<()> {
        self.check_index(qubit)?;
        if !(0.0..=1.0).contains(&survival_amplitude) {
            return Err(SimError::SurvivalOutOfRange(survival_amplitude));
        }
        let mask = 1u64 << qubit;
        let lost = self.scale_where(|k| k & mask != 0, survival_amplitude);
        self.record_loss(lost, event, tag);
        Ok(())
    }

    /// Multiplies every amplitude whose configuration satisfies `pred` and
    /// returns the probability removed.
    pub(crate) fn scale_where(&mut self, pred: impl Fn(u64) -> bool, factor: f64) -> f64 {
        let mut lost = 0.0;
        self.amplitudes.retain(|&k, a| {
            if !pred(k) {
                return true;
            }
            let before = a.norm_sqr();
            *a *= factor;
            let after = a.norm_sqr();
            if after > PRUNE_NORM_SQR {
                lost += before - after;
                true
            } else {
                lost += before;
                false
            }
        });
        lost
    }

    pub(crate) fn record_loss(&mut self, mass: f64, event: EventId, tag: AbsorptionTag) {
        if mass > 0.0 {
            self.absorbed.push(AbsorbedRecord { mass, event, tag });
        }
    }

    /// Samples the occupation of `qubit`. Absorbed branches compete as
    /// outcomes with their ledger mass; the posterior is the selected branch,
    /// renormalized.
    pub fn measure<R: Rng + ?Sized>(&mut self, qubit: usize, rng: &mut R) -> Result<Outcome> {
        self.check_index(qubit)?;
        let p0 = self.probability(qubit, 0)?;
        let p1 = self.probability(qubit, 1)?;
        if p0 + p1 <= PRUNE_NORM_SQR {
            return Err(SimError::FullyAbsorbed);
        }
        let total = p0 + p1 + self.absorbed_mass();
        let u = rng.gen::<f64>() * total;

        let outcome = if u < p0 {
            Outcome::Zero
        } else if u < p0 + p1 || self.absorbed.is_empty() {
            if p1 > 0.0 {
                Outcome::One
            } else {
                Outcome::Zero
            }
        } else {
            let mut acc = p0 + p1;
            let mut chosen = *self.absorbed.last().expect("non-empty ledger");
            for record in &self.absorbed {
                acc += record.mass;
                if u < acc {
                    chosen = *record;
                    break;
                }
            }
            self.amplitudes.clear();
            self.absorbed = vec![AbsorbedRecord {
                mass: 1.0,
                ..chosen
            }];
            return Ok(Outcome::Absorbed(chosen.event));
        };

        let mask = 1u64 << qubit;
        let (want, p) = match outcome {
            Outcome::Zero => (0, p0),
            _ => (mask, p1),
        };
        let scale = 1.0 / p.sqrt();
        self.amplitudes.retain(|&k, _| k & mask == want);
        self.amplitudes.values_mut().for_each(|a| *a *= scale);
        self.absorbed.clear();
        Ok(outcome)
    }

    /// `|⟨reference|ψ_coherent⟩|²`. Absorbed mass counts as infidelity.
    pub fn fidelity(&self, reference: &StateVector) -> Result<f64> {
        self.check_same_register(reference)?;
        if reference.absorbed_mass() > 0.0 {
            return Err(SimError::ReferenceNotPure);
        }
        Ok(self.overlap(reference).norm_sqr().min(1.0))
    }

    /// `⟨reference|ψ_coherent⟩`, phase included.
    pub fn overlap(&self, reference: &StateVector) -> Complex64 {
        reference
            .amplitudes
            .iter()
            .filter_map(|(k, r)| self.amplitudes.get(k).map(|a| r.conj() * a))
            .sum()
    }

    fn check_same_register(&self, other: &StateVector) -> Result<()> {
        if self.register.len() != other.register.len() {
            return Err(SimError::RegisterMismatch(format!(
                "{} vs {} qubits",
                self.register.len(),
                other.register.len()
            )));
        }
        for (i, (a, b)) in self.register.iter().zip(&other.register).enumerate() {
            if a.species != b.species {
                return Err(SimError::RegisterMismatch(format!(
                    "qubit {i}: {:?} vs {:?}",
                    a.species, b.species
                )));
            }
        }
        Ok(())
    }

    /// `self ⊗ other`; the qubits of `other` follow those of `self`.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let len = self.register.len() + other.register.len();
        if len > MAX_QUBITS {
            return Err(SimError::RegisterTooLarge(len));
        }
        let shift = self.register.len();
        let mut amplitudes = BTreeMap::new();
        for (&ka, &a) in &self.amplitudes {
            for (&kb, &b) in &other.amplitudes {
                let amp = a * b;
                if amp.norm_sqr() > PRUNE_NORM_SQR {
                    amplitudes.insert(ka | (kb << shift), amp);
                }
            }
        }
        // Absorbed branches of either factor are absorbed branches of the
        // product, weighted by the other factor's total probability.
        let pb = other.total_probability();
        let mut absorbed: Vec<AbsorbedRecord> = self
            .absorbed
            .iter()
            .map(|r| AbsorbedRecord {
                mass: r.mass * pb,
                ..*r
            })
            .collect();
        let offset = self.next_event;
        let coherent_a = self.coherent_probability();
        absorbed.extend(other.absorbed.iter().map(|r| AbsorbedRecord {
            mass: r.mass * coherent_a,
            event: EventId(r.event.0 + offset),
            tag: r.tag,
        }));
        let mut register = self.register.clone();
        register.extend(other.register.iter().cloned());
        Ok(StateVector {
            register,
            amplitudes,
            absorbed,
            next_event: self.next_event + other.next_event,
        })
    }

    /// Contracts qubits `first` and `second` against the two-qubit ket
    /// `pair[a][b]` (amplitude of `|ā b̄⟩`), i.e. returns `⟨pair|ψ⟩` on the
    /// remaining qubits in their original order. The result is neither
    /// normalized nor carries the ledger.
    pub(crate) fn project_pair(
        &self,
        first: usize,
        second: usize,
        pair: &[[Complex64; 2]; 2],
    ) -> Result<StateVector> {
        self.check_index(first)?;
        self.check_index(second)?;
        if first == second {
            return Err(SimError::SameQubit(first));
        }
        let keep: Vec<usize> = (0..self.register.len())
            .filter(|&q| q != first && q != second)
            .collect();
        let mut amplitudes: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (&k, &amp) in &self.amplitudes {
            let a = ((k >> first) & 1) as usize;
            let b = ((k >> second) & 1) as usize;
            let coeff = pair[a][b].conj();
            if coeff == Complex64::default() {
                continue;
            }
            let rest = keep
                .iter()
                .enumerate()
                .fold(0u64, |acc, (new, &old)| acc | (((k >> old) & 1) << new));
            *amplitudes.entry(rest).or_default() += coeff * amp;
        }
        amplitudes.retain(|_, a| a.norm_sqr() > PRUNE_NORM_SQR);
        Ok(StateVector {
            register: keep.iter().map(|&q| self.register[q].clone()).collect(),
            amplitudes,
            absorbed: Vec::new(),
            next_event: self.next_event,
        })
    }

    /// `⟨bit̄|_qubit ψ⟩` on the remaining qubits, unnormalized, no ledger.
    pub(crate) fn project_qubit(&self, qubit: usize, bit: u8) -> Result<StateVector> {
        self.check_index(qubit)?;
        let low = (1u64 << qubit) - 1;
        let want = u64::from(bit & 1) << qubit;
        let amplitudes = self
            .amplitudes
            .iter()
            .filter(|(&k, _)| k & (1 << qubit) == want)
            .map(|(&k, &a)| ((k & low) | ((k >> (qubit + 1)) << qubit), a))
            .collect();
        let mut register = self.register.clone();
        register.remove(qubit);
        Ok(StateVector {
            register,
            amplitudes,
            absorbed: Vec::new(),
            next_event: self.next_event,
        })
    }

    /// Swaps in new descriptors with the same species, keeping everything else.
    pub(crate) fn relabel(&mut self, register: Vec<QubitDescriptor>) -> Result<()> {
        let same = register.len() == self.register.len()
            && register
                .iter()
                .zip(&self.register)
                .all(|(a, b)| a.species() == b.species());
        if !same {
            return Err(SimError::RegisterMismatch("relabel changes species".into()));
        }
        self.register = register;
        Ok(())
    }

    /// A register whose whole probability sits in one absorbed branch.
    pub(crate) fn fully_absorbed(
        register: Vec<QubitDescriptor>,
        event: EventId,
        tag: AbsorptionTag,
    ) -> Self {
        Self {
            register,
            amplitudes: BTreeMap::new(),
            absorbed: vec![AbsorbedRecord {
                mass: 1.0,
                event,
                tag,
            }],
            next_event: event.0 + 1,
        }
    }

    /// Rescales the coherent part to unit norm and drops the ledger.
    pub(crate) fn renormalize(&mut self) -> Result<()> {
        let p = self.coherent_probability();
        if p <= PRUNE_NORM_SQR {
            return Err(SimError::FullyAbsorbed);
        }
        let scale = 1.0 / p.sqrt();
        self.amplitudes.values_mut().for_each(|a| *a *= scale);
        self.absorbed.clear();
        Ok(())
    }

    /// New state whose qubit `i` is this state's qubit `order[i]`.
    pub fn reorder(&self, order: &[usize]) -> Result<StateVector> {
        let n = self.register.len();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(SimError::RegisterMismatch(format!(
                "reorder of {} qubits given {} indices",
                n,
                order.len()
            )));
        }
        for &q in order {
            self.check_index(q)?;
            if std::mem::replace(&mut seen[q], true) {
                return Err(SimError::RegisterMismatch(format!("qubit {q} repeated")));
            }
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(&k, &a)| {
                let moved = order
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (new, &old)| acc | (((k >> old) & 1) << new));
                (moved, a)
            })
            .collect();
        Ok(StateVector {
            register: order.iter().map(|&q| self.register[q].clone()).collect(),
            amplitudes,
            absorbed: self.absorbed.clone(),
            next_event: self.next_event,
        })
    }

    /// Raw access for gate implementations working per configuration.
    pub(crate) fn amplitude_map(&self) -> &BTreeMap<u64, Complex64> {
        &self.amplitudes
    }

    pub(crate) fn replace_amplitudes(&mut self, mut amplitudes: BTreeMap<u64, Complex64>) {
        amplitudes.retain(|_, a| a.norm_sqr() > PRUNE_NORM_SQR);
        self.amplitudes = amplitudes;
    }
}
