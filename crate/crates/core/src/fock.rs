//! Finite fermionic mode algebra over bit-packed occupation keys.
//!
//! A basis ket is labelled by an [`OccupationKey`] whose bit `k` is the
//! occupation of the mode at position `k` of a [`ModeOrdering`]. The ket
//! with occupied positions `k1 < k2 < ...` is defined as
//! `a†_{k1} a†_{k2} ... |0⟩`, so the same physical state has different
//! amplitudes under different orderings.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;

use crate::error::{FockError, Result};

/// Amplitudes with modulus below this are dropped from a [`SparseState`].
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Largest number of modes an ordering may hold (keys are `u32`).
pub const MAX_MODES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Species {
    Particle,
    Antiparticle,
}

/// Causal wedge of a Rindler mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    I,
    II,
}

/// Unruh sector a Rindler mode is grouped into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sector {
    Right,
    Left,
}

/// Identity of one fermionic mode.
///
/// Spin projections are stored doubled (`twice_sz = 2 σ`) so half-integers
/// stay exact; Grassmann modes carry no spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeId {
    /// The inertial observer's single mode.
    Alice,
    Rindler {
        species: Species,
        region: Region,
        twice_sz: Option<i8>,
    },
    /// Free-standing mode for small worked examples, labelled by a letter.
    Toy(char),
}

impl ModeId {
    pub fn rindler(species: Species, region: Region, twice_sz: Option<i8>) -> Self {
        ModeId::Rindler {
            species,
            region,
            twice_sz,
        }
    }

    pub fn region(&self) -> Option<Region> {
        match self {
            ModeId::Rindler { region, .. } => Some(*region),
            _ => None,
        }
    }

    /// Right sector holds particles in I and antiparticles in II; left the reverse.
    pub fn sector(&self) -> Option<Sector> {
        match self {
            ModeId::Rindler {
                species, region, ..
            } => Some(match (species, region) {
                (Species::Particle, Region::I) | (Species::Antiparticle, Region::II) => {
                    Sector::Right
                }
                _ => Sector::Left,
            }),
            _ => None,
        }
    }

    /// Human-readable label, e.g. `c†↑I`, `d†↓II`, `c†[+3/2]I`, `A`.
    pub fn label(&self) -> String {
        match self {
            ModeId::Alice => "A".to_string(),
            ModeId::Toy(ch) => format!("{ch}†"),
            ModeId::Rindler {
                species,
                region,
                twice_sz,
            } => {
                let op = match species {
                    Species::Particle => 'c',
                    Species::Antiparticle => 'd',
                };
                let spin = match twice_sz {
                    None => String::new(),
                    Some(1) => "↑".to_string(),
                    Some(-1) => "↓".to_string(),
                    Some(t) => format!("[{:+}/2]", t),
                };
                let reg = match region {
                    Region::I => "I",
                    Region::II => "II",
                };
                format!("{op}†{spin}{reg}")
            }
        }
    }

    /// Inverse of [`ModeId::label`]. Also accepts ASCII spellings: the dagger
    /// may be omitted or written `^`, and `up`/`dn` may stand for `↑`/`↓`.
    pub fn parse_label(text: &str) -> Result<Self> {
        let bad = || FockError::BadLabel(text.to_string());
        let s = text.trim();
        if s == "A" {
            return Ok(ModeId::Alice);
        }
        let mut rest = s;
        let species = match rest.chars().next() {
            Some('c') => Species::Particle,
            Some('d') => Species::Antiparticle,
            _ => return Err(bad()),
        };
        rest = &rest[1..];
        rest = rest
            .strip_prefix('†')
            .or_else(|| rest.strip_prefix('^'))
            .unwrap_or(rest);
        let (region, body) = if let Some(b) = rest.strip_suffix("II") {
            (Region::II, b)
        } else if let Some(b) = rest.strip_suffix('I') {
            (Region::I, b)
        } else {
            return Err(bad());
        };
        let twice_sz = match body {
            "" => None,
            "↑" | "up" => Some(1),
            "↓" | "dn" => Some(-1),
            _ => {
                let inner = body
                    .strip_prefix('[')
                    .and_then(|b| b.strip_suffix("/2]"))
                    .ok_or_else(bad)?;
                Some(inner.parse::<i8>().map_err(|_| bad())?)
            }
        };
        Ok(ModeId::rindler(species, region, twice_sz))
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Ordered list of modes fixing the sign convention of the Fock basis.
#[derive(Debug, Clone)]
pub struct ModeOrdering {
    modes: Vec<ModeId>,
    positions: HashMap<ModeId, usize>,
}

impl PartialEq for ModeOrdering {
    fn eq(&self, other: &Self) -> bool {
        self.modes == other.modes
    }
}

impl Eq for ModeOrdering {}

impl ModeOrdering {
    /// Rejects repeated modes, more than [`MAX_MODES`] modes, and an Alice
    /// mode anywhere but index 0.
    pub fn new(modes: Vec<ModeId>) -> Result<Self> {
        if modes.len() > MAX_MODES {
            return Err(FockError::InvalidOrdering(format!(
                "{} modes exceed the limit of {MAX_MODES}",
                modes.len()
            )));
        }
        let mut positions = HashMap::with_capacity(modes.len());
        for (k, m) in modes.iter().enumerate() {
            if positions.insert(*m, k).is_some() {
                return Err(FockError::InvalidOrdering(format!("mode {m} repeated")));
            }
            if *m == ModeId::Alice && k != 0 {
                return Err(FockError::InvalidOrdering(
                    "Alice's mode must sit at index 0".into(),
                ));
            }
        }
        Ok(ModeOrdering { modes, positions })
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn position(&self, mode: &ModeId) -> Option<usize> {
        self.positions.get(mode).copied()
    }

    pub fn position_of(&self, mode: &ModeId) -> Result<usize> {
        self.position(mode)
            .ok_or_else(|| FockError::UnknownMode(mode.label()))
    }

    pub fn contains(&self, mode: &ModeId) -> bool {
        self.positions.contains_key(mode)
    }

    /// True when both orderings hold the same set of modes.
    pub fn same_mode_set(&self, other: &ModeOrdering) -> bool {
        self.len() == other.len() && self.modes.iter().all(|m| other.contains(m))
    }

    /// Concatenation `self ++ other`; mode sets must be disjoint.
    pub fn concat(&self, other: &ModeOrdering) -> Result<ModeOrdering> {
        if let Some(m) = other.modes.iter().find(|m| self.contains(m)) {
            return Err(FockError::OverlappingModes(m.label()));
        }
        let mut modes = self.modes.clone();
        modes.extend_from_slice(&other.modes);
        ModeOrdering::new(modes)
    }

    /// Bit mask of the positions whose mode satisfies `pred`.
    pub fn mask_where(&self, pred: impl Fn(&ModeId) -> bool) -> u32 {
        self.modes
            .iter()
            .enumerate()
            .filter(|(_, m)| pred(m))
            .fold(0, |acc, (k, _)| acc | (1 << k))
    }

    pub fn labels(&self) -> Vec<String> {
        self.modes.iter().map(ModeId::label).collect()
    }
}

impl fmt::Display for ModeOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.labels().join(" "))
    }
}

/// Occupation bitstring; bit `k` is the occupation of ordering position `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct OccupationKey(pub u32);

impl OccupationKey {
    /// Parses a digit string whose first character is position 0,
    /// e.g. `"10"` is `a†|0⟩` under the ordering `[a, b]`.
    pub fn from_digits(digits: &str) -> Result<Self> {
        let mut bits = 0u32;
        for (k, ch) in digits.chars().enumerate() {
            match ch {
                '0' => {}
                '1' if k < MAX_MODES => bits |= 1 << k,
                _ => {
                    return Err(FockError::InvalidParameter(format!(
                        "bad occupation string `{digits}`"
                    )))
                }
            }
        }
        Ok(OccupationKey(bits))
    }

    pub fn to_digits(self, len: usize) -> String {
        (0..len)
            .map(|k| if self.is_set(k) { '1' } else { '0' })
            .collect()
    }

    #[inline]
    pub fn is_set(self, pos: usize) -> bool {
        self.0 >> pos & 1 == 1
    }

    /// Number of occupied positions strictly left of `pos`.
    #[inline]
    pub fn occupied_before(self, pos: usize) -> u32 {
        (self.0 & ((1u32 << pos) - 1)).count_ones()
    }
}

/// Position permutation between two orderings of the same mode set, with the
/// sign bookkeeping needed to carry amplitudes across.
#[derive(Debug, Clone)]
pub struct PositionMap {
    target_of: Vec<u8>,
}

impl PositionMap {
    pub fn between(source: &ModeOrdering, target: &ModeOrdering) -> Result<Self> {
        if !source.same_mode_set(target) {
            return Err(FockError::OrderingMismatch(format!(
                "[{source}] and [{target}] are not permutations of each other"
            )));
        }
        let target_of = source
            .modes()
            .iter()
            .map(|m| target.position(m).map(|p| p as u8))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| FockError::OrderingMismatch("mode sets differ".into()))?;
        Ok(PositionMap { target_of })
    }

    /// Builds a map directly from `target_of[source_position]`.
    pub fn from_targets(target_of: Vec<u8>) -> Self {
        PositionMap { target_of }
    }

    /// Re-labels `key` and returns whether the ket picks up a minus sign,
    /// i.e. the parity of the permutation restricted to occupied modes.
    #[inline]
    pub fn apply(&self, key: OccupationKey) -> (OccupationKey, bool) {
        let mut bits = key.0;
        let mut seen = 0u32;
        let mut inversions = 0u32;
        while bits != 0 {
            let p = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let t = self.target_of[p] as u32;
            inversions += (seen >> t).count_ones();
            seen |= 1 << t;
        }
        (OccupationKey(seen), inversions & 1 == 1)
    }
}

/// Single creation (`dagger = true`) or annihilation operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FermionOp {
    pub mode: ModeId,
    pub dagger: bool,
}

impl FermionOp {
    pub fn create(mode: ModeId) -> Self {
        FermionOp { mode, dagger: true }
    }

    pub fn annihilate(mode: ModeId) -> Self {
        FermionOp {
            mode,
            dagger: false,
        }
    }
}

/// Superposition of occupation kets in the basis of a fixed ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    ordering: ModeOrdering,
    terms: BTreeMap<OccupationKey, Complex64>,
}

impl SparseState {
    /// The zero vector.
    pub fn zero(ordering: ModeOrdering) -> Self {
        SparseState {
            ordering,
            terms: BTreeMap::new(),
        }
    }

    pub fn vacuum(ordering: ModeOrdering) -> Self {
        Self::basis(ordering, OccupationKey(0))
    }

    pub fn basis(ordering: ModeOrdering, key: OccupationKey) -> Self {
        let mut s = Self::zero(ordering);
        s.terms.insert(key, Complex64::new(1.0, 0.0));
        s
    }

    /// Sums repeated keys and prunes negligible amplitudes.
    pub fn from_terms(
        ordering: ModeOrdering,
        terms: impl IntoIterator<Item = (OccupationKey, Complex64)>,
    ) -> Result<Self> {
        let limit = if ordering.len() >= 32 {
            u32::MAX
        } else {
            (1u32 << ordering.len()) - 1
        };
        let mut s = Self::zero(ordering);
        for (k, amp) in terms {
            if k.0 & !limit != 0 {
                return Err(FockError::InvalidParameter(format!(
                    "key {:#b} exceeds {} modes",
                    k.0,
                    s.ordering.len()
                )));
            }
            s.accumulate(k, amp);
        }
        s.prune();
        Ok(s)
    }

    pub fn ordering(&self) -> &ModeOrdering {
        &self.ordering
    }

    pub fn terms(&self) -> impl Iterator<Item = (OccupationKey, Complex64)> + '_ {
        self.terms.iter().map(|(k, a)| (*k, *a))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn amplitude(&self, key: OccupationKey) -> Complex64 {
        self.terms.get(&key).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).fold(0.0, |acc, x| acc + x)
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if self.is_zero() || n == 0.0 {
            return Err(FockError::ZeroState);
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.ordering.clone());
        out.terms = self.terms.iter().map(|(k, a)| (*k, a * c)).collect();
        out.prune();
        out
    }

    /// `self + c · other`; both states must share an ordering.
    pub fn add_scaled(&self, other: &SparseState, c: Complex64) -> Result<Self> {
        self.check_same_ordering(other)?;
        let mut out = self.clone();
        for (k, a) in &other.terms {
            out.accumulate(*k, a * c);
        }
        out.prune();
        Ok(out)
    }

    /// Maximum amplitude difference over the union of keys.
    pub fn max_abs_diff(&self, other: &SparseState) -> Result<f64> {
        self.check_same_ordering(other)?;
        let keys = self.terms.keys().chain(other.terms.keys());
        Ok(keys
            .map(|k| (self.amplitude(*k) - other.amplitude(*k)).norm())
            .fold(0.0, f64::max))
    }

    pub fn apply_creation(&self, mode: &ModeId) -> Result<Self> {
        let pos = self.ordering.position_of(mode)?;
        let bit = 1u32 << pos;
        let mut out = Self::zero(self.ordering.clone());
        for (k, a) in &self.terms {
            if k.0 & bit != 0 {
                continue;
            }
            let amp = if k.occupied_before(pos) & 1 == 1 { -a } else { *a };
            out.terms.insert(OccupationKey(k.0 | bit), amp);
        }
        Ok(out)
    }

    pub fn apply_annihilation(&self, mode: &ModeId) -> Result<Self> {
        let pos = self.ordering.position_of(mode)?;
        let bit = 1u32 << pos;
        let mut out = Self::zero(self.ordering.clone());
        for (k, a) in &self.terms {
            if k.0 & bit == 0 {
                continue;
            }
            let amp = if k.occupied_before(pos) & 1 == 1 { -a } else { *a };
            out.terms.insert(OccupationKey(k.0 & !bit), amp);
        }
        Ok(out)
    }

    pub fn apply_op(&self, op: &FermionOp) -> Result<Self> {
        if op.dagger {
            self.apply_creation(&op.mode)
        } else {
            self.apply_annihilation(&op.mode)
        }
    }

    /// Applies the operator product `ops[0] ops[1] ... ops[n-1]`, rightmost first.
    pub fn apply_string(&self, ops: &[FermionOp]) -> Result<Self> {
        ops.iter()
            .rev()
            .try_fold(self.clone(), |psi, op| psi.apply_op(op))
    }

    /// Re-expresses the state in the basis defined by `target`.
    pub fn reorder_basis(&self, target: &ModeOrdering) -> Result<Self> {
        let map = PositionMap::between(&self.ordering, target)?;
        let mut out = Self::zero(target.clone());
        for (k, a) in &self.terms {
            let (nk, negative) = map.apply(*k);
            out.terms.insert(nk, if negative { -a } else { *a });
        }
        Ok(out)
    }

    fn check_same_ordering(&self, other: &SparseState) -> Result<()> {
        if self.ordering != other.ordering {
            return Err(FockError::OrderingMismatch(format!(
                "[{}] vs [{}]",
                self.ordering, other.ordering
            )));
        }
        Ok(())
    }

    fn accumulate(&mut self, key: OccupationKey, amp: Complex64) {
        *self.terms.entry(key).or_default() += amp;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
    }
}

/// `⟨phi|psi⟩`; the two states must use the same ordering.
pub fn inner_product(phi: &SparseState, psi: &SparseState) -> Result<Complex64> {
    phi.check_same_ordering(psi)?;
    let (small, large, conj_small) = if phi.len() <= psi.len() {
        (phi, psi, true)
    } else {
        (psi, phi, false)
    };
    Ok(small
        .terms
        .iter()
        .filter_map(|(k, a)| {
            large.terms.get(k).map(|b| {
                if conj_small {
                    a.conj() * b
                } else {
                    b.conj() * a
                }
            })
        })
        .sum())
}

/// `left ⊗ right` with the left modes placed before the right ones.
pub fn tensor_product(left: &SparseState, right: &SparseState) -> Result<SparseState> {
    let ordering = left.ordering.concat(&right.ordering)?;
    let shift = left.ordering.len();
    let mut out = SparseState::zero(ordering);
    for (kl, al) in &left.terms {
        for (kr, ar) in &right.terms {
            out.terms
                .insert(OccupationKey(kl.0 | (kr.0 << shift)), al * ar);
        }
    }
    out.prune();
    Ok(out)
}

/// `⟨psi| ops |psi⟩`.
pub fn expectation(psi: &SparseState, ops: &[FermionOp]) -> Result<Complex64> {
    inner_product(psi, &psi.apply_string(ops)?)
}
