//! Surveys over operator orderings: enumerate or sample orderings, evaluate
//! each ordering's negativity curve, and group orderings whose curves agree
//! into behaviour classes.
//!
//! Reordering the basis only flips the signs of the joint state's terms, and
//! the reduced state does not care which bit position a kept mode occupies.
//! A curve is therefore a function of the sign pattern over the canonical
//! terms, and two patterns that differ by a product of diagonal sign flips
//! on Alice, on region I and on region II give the same negativity. Patterns
//! are reduced to a canonical representative of that coset and each distinct
//! representative is evaluated once.

use std::cmp::Reverse;
use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::entanglement::{
    check_grid, NegativityCurve, NegativityKernel, PartitionSpec,
};
use crate::error::{FockError, Result};
use crate::fock::{ModeId, ModeOrdering, OccupationKey, PositionMap, Region};
use crate::rindler::{build_joint_state, FieldSpec, JointStateSpec, SqueezeParameter, UnruhWeights};

/// Largest number of Rindler modes for which full enumeration is allowed.
pub const MAX_ENUMERATED_MODES: usize = 12;
pub const DEFAULT_GRID_POINTS: usize = 33;
pub const DEFAULT_QUANTUM: f64 = 1e-9;
pub const DEFAULT_MC_SAMPLES: usize = 200_000;

/// Classification grid for large Monte Carlo histograms: `{π/8, π/4}`.
///
/// A spin-3/2 curve costs about 1 ms per grid point on one core and almost
/// every sampled ordering is its own class, so the full grid would take hours
/// at the default sample size. Two interior points already separate curves.
pub fn histogram_grid() -> Vec<f64> {
    vec![FRAC_PI_8, FRAC_PI_4]
}

/// Ordering of the `4n` Rindler modes; Alice stays in front.
///
/// `perm()[k]` is the index, within [`FieldSpec::rindler_modes`], of the mode
/// placed at Rindler position `k`. The identity is the canonical ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderingPermutation(Vec<u8>);

impl OrderingPermutation {
    pub fn new(perm: Vec<u8>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            let slot = seen
                .get_mut(p as usize)
                .ok_or_else(|| FockError::InvalidOrdering(format!("index {p} out of range")))?;
            if std::mem::replace(slot, true) {
                return Err(FockError::InvalidOrdering(format!("index {p} repeated")));
            }
        }
        Ok(OrderingPermutation(perm))
    }

    pub fn identity(len: usize) -> Self {
        OrderingPermutation((0..len as u8).collect())
    }

    pub fn perm(&self) -> &[u8] {
        &self.0
    }

    fn check_field(&self, field: &FieldSpec) -> Result<()> {
        if self.0.len() != field.rindler_mode_count() {
            return Err(FockError::InvalidOrdering(format!(
                "{} indices for a field with {} Rindler modes",
                self.0.len(),
                field.rindler_mode_count()
            )));
        }
        Ok(())
    }

    pub fn modes(&self, field: &FieldSpec) -> Result<Vec<ModeId>> {
        self.check_field(field)?;
        let canon = field.rindler_modes();
        Ok(self.0.iter().map(|&i| canon[i as usize]).collect())
    }

    /// Full ordering with Alice at index 0.
    pub fn to_ordering(&self, field: &FieldSpec) -> Result<ModeOrdering> {
        let mut modes = vec![ModeId::Alice];
        modes.extend(self.modes(field)?);
        ModeOrdering::new(modes)
    }

    /// Reads an ordering of Rindler modes (Alice may lead or be omitted).
    pub fn from_modes(field: &FieldSpec, modes: &[ModeId]) -> Result<Self> {
        let canon = field.rindler_modes();
        let modes = match modes.first() {
            Some(ModeId::Alice) => &modes[1..],
            _ => modes,
        };
        let perm = modes
            .iter()
            .map(|m| {
                canon
                    .iter()
                    .position(|c| c == m)
                    .map(|i| i as u8)
                    .ok_or_else(|| FockError::UnknownMode(m.label()))
            })
            .collect::<Result<Vec<_>>>()?;
        let out = OrderingPermutation::new(perm)?;
        out.check_field(field)?;
        Ok(out)
    }

    pub fn parse_labels(field: &FieldSpec, text: &str) -> Result<Self> {
        let modes = text
            .split(',')
            .map(ModeId::parse_label)
            .collect::<Result<Vec<_>>>()?;
        Self::from_modes(field, &modes)
    }

    pub fn labels(&self, field: &FieldSpec) -> Result<Vec<String>> {
        Ok(self.modes(field)?.iter().map(ModeId::label).collect())
    }

    /// All region-II modes stand to the right of every region-I mode.
    pub fn is_region_two_rightmost(&self, field: &FieldSpec) -> Result<bool> {
        let modes = self.modes(field)?;
        let first_two = modes.iter().position(|m| m.region() == Some(Region::II));
        Ok(match first_two {
            None => true,
            Some(k) => modes[k..].iter().all(|m| m.region() == Some(Region::II)),
        })
    }

    /// Region-I modes in canonical relative order, then region-II modes.
    pub fn physical(field: &FieldSpec) -> Self {
        let canon = field.rindler_modes();
        let (one, two): (Vec<u8>, Vec<u8>) = (0..canon.len() as u8)
            .partition(|&i| canon[i as usize].region() == Some(Region::I));
        OrderingPermutation(one.into_iter().chain(two).collect())
    }
}

/// Lexicographic iterator over all permutations of `0..len`.
#[derive(Debug, Clone)]
pub struct LexPermutations {
    next: Option<Vec<u8>>,
}

impl LexPermutations {
    pub fn new(len: usize) -> Self {
        LexPermutations {
            next: Some((0..len as u8).collect()),
        }
    }
}

impl Iterator for LexPermutations {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        let current = self.next.take()?;
        let mut p = current.clone();
        // standard next-permutation step
        if let Some(i) = (0..p.len().saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) {
            let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).unwrap();
            p.swap(i, j);
            p[i + 1..].reverse();
            self.next = Some(p);
        }
        Some(current)
    }
}

/// Every ordering of the field's Rindler modes, lexicographically.
pub fn enumerate_orderings(field: &FieldSpec) -> Result<impl Iterator<Item = OrderingPermutation>> {
    let modes = field.rindler_mode_count();
    if modes > MAX_ENUMERATED_MODES {
        return Err(FockError::EnumerationRefused { modes });
    }
    Ok(LexPermutations::new(modes).map(OrderingPermutation))
}

/// A curve rounded to integer multiples of a quantum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveFingerprint(pub Vec<i64>);

pub fn fingerprint_curve(curve: &NegativityCurve, quantum: f64) -> CurveFingerprint {
    debug_assert!(quantum > 0.0);
    CurveFingerprint(
        curve
            .values
            .iter()
            .map(|v| (v / quantum).round() as i64)
            .collect(),
    )
}

/// Orderings sharing one negativity curve.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorClass {
    pub fingerprint: CurveFingerprint,
    /// First examined ordering that produced this curve.
    pub representative: OrderingPermutation,
    pub population: u64,
    pub contains_physical: bool,
    pub curve: NegativityCurve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurveyMode {
    Full,
    MonteCarlo { samples: usize, seed: u64 },
    /// An explicit list of orderings supplied by the caller.
    Listed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurveyReport {
    pub field: FieldSpec,
    pub spec: JointStateSpec,
    pub weights: UnruhWeights,
    pub grid: Vec<f64>,
    pub quantum: f64,
    pub mode: SurveyMode,
    /// Sorted by descending population, ties by fingerprint.
    pub classes: Vec<BehaviorClass>,
    pub examined: u64,
    /// Number of distinct reduced sign patterns that were evaluated.
    pub distinct_patterns: usize,
    /// Curve of the region-II-rightmost ordering.
    pub physical_curve: NegativityCurve,
}

impl SurveyReport {
    pub fn population_total(&self) -> u64 {
        self.classes.iter().map(|c| c.population).sum()
    }
}

/// Sign bits over the canonical terms, one bit per term (set = minus sign).
type SignBits = Vec<u64>;

fn set_bit(bits: &mut [u64], t: usize) {
    bits[t / 64] |= 1 << (t % 64);
}

fn get_bit(bits: &[u64], t: usize) -> bool {
    bits[t / 64] >> (t % 64) & 1 == 1
}

/// Canonical coset representatives modulo local diagonal sign flips.
#[derive(Debug, Clone)]
struct SignReducer {
    /// Reduced row echelon rows with their pivot term index.
    rows: Vec<(usize, SignBits)>,
}

impl SignReducer {
    fn new(labels: &[[u32; 3]], words: usize) -> Self {
        // one generator per (subsystem, value): flip every term carrying that value
        let mut gens: BTreeMap<(usize, u32), SignBits> = BTreeMap::new();
        for (t, lab) in labels.iter().enumerate() {
            for (sub, v) in lab.iter().enumerate() {
                set_bit(gens.entry((sub, *v)).or_insert_with(|| vec![0; words]), t);
            }
        }
        Self::from_generators(gens.into_values(), labels.len())
    }

    fn from_generators(gens: impl IntoIterator<Item = SignBits>, terms: usize) -> Self {
        let mut rows: Vec<(usize, SignBits)> = Vec::new();
        for mut g in gens {
            for (p, row) in &rows {
                if get_bit(&g, *p) {
                    xor_into(&mut g, row);
                }
            }
            let Some(pivot) = (0..terms).find(|&t| get_bit(&g, t)) else {
                continue;
            };
            for (_, row) in rows.iter_mut() {
                if get_bit(row, pivot) {
                    xor_into(row, &g);
                }
            }
            rows.push((pivot, g));
        }
        SignReducer { rows }
    }

    fn reduce(&self, bits: &mut SignBits) {
        for (p, row) in &self.rows {
            if get_bit(bits, *p) {
                xor_into(bits, row);
            }
        }
    }
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// Canonical joint-state terms over a grid, with everything needed to
/// evaluate any ordering's curve from its sign pattern.
#[derive(Debug, Clone)]
pub struct SurveyTerms {
    field: FieldSpec,
    grid: Vec<f64>,
    keys: Vec<OccupationKey>,
    /// `amps[g][t]`: amplitude of term `t` at grid point `g`.
    amps: Vec<Vec<Complex64>>,
    blocks: Vec<BlockPart>,
    reducer: SignReducer,
    words: usize,
}

/// One block of `ρ^{T_A}` with a memo of its negativity curve per local sign pattern.
///
/// A block's spectrum depends only on the signs of the terms feeding it, and
/// local diagonal sign flips leave it unchanged, so the memo is keyed by the
/// locally reduced pattern.
#[derive(Debug)]
struct BlockPart {
    terms: Vec<usize>,
    /// Local term pair behind each kernel contribution.
    pairs: Vec<(usize, usize)>,
    kernel: NegativityKernel,
    reducer: SignReducer,
    memo: Mutex<HashMap<SignBits, Arc<[f64]>>>,
}

impl Clone for BlockPart {
    fn clone(&self) -> Self {
        BlockPart {
            terms: self.terms.clone(),
            pairs: self.pairs.clone(),
            kernel: self.kernel.clone(),
            reducer: self.reducer.clone(),
            memo: Mutex::new(self.memo.lock().expect("memo lock").clone()),
        }
    }
}

impl SurveyTerms {
    pub fn new(
        spec: &JointStateSpec,
        field: &FieldSpec,
        weights: UnruhWeights,
        grid: &[f64],
    ) -> Result<Self> {
        check_grid(grid)?;
        let states = grid
            .iter()
            .map(|&r| build_joint_state(spec, field, weights, SqueezeParameter::new(r)?))
            .collect::<Result<Vec<_>>>()?;
        let keys: Vec<OccupationKey> = states
            .iter()
            .flat_map(|s| s.terms().map(|(k, _)| k))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let amps = states
            .iter()
            .map(|s| keys.iter().map(|k| s.amplitude(*k)).collect())
            .collect();
        let part = PartitionSpec::alice_vs_region_one(&field.joint_ordering())?;
        let split: Vec<(u32, u32)> = keys.iter().map(|k| part.split(k.0)).collect();
        let labels: Vec<[u32; 3]> = split.iter().map(|(red, tr)| [red & 1, red >> 1, *tr]).collect();
        let words = keys.len().div_ceil(64).max(1);
        let blocks = NegativityKernel::new(&split)
            .into_blocks()
            .into_iter()
            .map(|(terms, kernel)| {
                // conjugating the block by a diagonal ±1 matrix keeps its spectrum:
                // row r's flip negates every contribution in row r or column r
                let entries: Vec<_> = kernel.contributions().collect();
                let dim = entries.iter().map(|e| e.0.max(e.1) + 1).max().unwrap_or(0);
                let w = entries.len().div_ceil(64).max(1);
                let mut gens = vec![vec![0u64; w]; dim];
                for (k, &(r, c, _, _)) in entries.iter().enumerate() {
                    if r != c {
                        set_bit(&mut gens[r], k);
                        set_bit(&mut gens[c], k);
                    }
                }
                BlockPart {
                    reducer: SignReducer::from_generators(gens, entries.len()),
                    pairs: entries.iter().map(|e| (e.2, e.3)).collect(),
                    terms,
                    kernel,
                    memo: Mutex::new(HashMap::new()),
                }
            })
            .collect();
        Ok(SurveyTerms {
            field: *field,
            grid: grid.to_vec(),
            keys,
            amps,
            blocks,
            reducer: SignReducer::new(&labels, words),
            words,
        })
    }

    pub fn term_count(&self) -> usize {
        self.keys.len()
    }

    fn position_map(&self, ordering: &OrderingPermutation) -> PositionMap {
        // canonical joint position 1 + i holds Rindler mode i
        let mut target_of = vec![0u8; ordering.perm().len() + 1];
        for (k, &i) in ordering.perm().iter().enumerate() {
            target_of[i as usize + 1] = k as u8 + 1;
        }
        PositionMap::from_targets(target_of)
    }

    /// Raw sign pattern of the canonical terms after reordering.
    fn raw_signs(&self, ordering: &OrderingPermutation) -> SignBits {
        let map = self.position_map(ordering);
        let mut bits = vec![0u64; self.words];
        for (t, k) in self.keys.iter().enumerate() {
            if map.apply(*k).1 {
                set_bit(&mut bits, t);
            }
        }
        bits
    }

    fn reduced_signs(&self, ordering: &OrderingPermutation) -> SignBits {
        let mut bits = self.raw_signs(ordering);
        self.reducer.reduce(&mut bits);
        bits
    }

    fn block_curve(&self, part: &BlockPart, bits: &[u64]) -> Arc<[f64]> {
        let mut local = vec![0u64; part.pairs.len().div_ceil(64).max(1)];
        for (k, &(i, j)) in part.pairs.iter().enumerate() {
            if get_bit(bits, part.terms[i]) != get_bit(bits, part.terms[j]) {
                set_bit(&mut local, k);
            }
        }
        part.reducer.reduce(&mut local);
        if let Some(hit) = part.memo.lock().expect("memo lock").get(&local) {
            return hit.clone();
        }
        let mut unsigned = vec![Complex64::new(0.0, 0.0); part.terms.len()];
        let values: Arc<[f64]> = self
            .amps
            .iter()
            .map(|amps| {
                for (l, &t) in part.terms.iter().enumerate() {
                    unsigned[l] = amps[t];
                }
                part.kernel.negativity_flipped(&unsigned, |k| get_bit(&local, k))
            })
            .collect();
        part.memo
            .lock()
            .expect("memo lock")
            .entry(local)
            .or_insert(values)
            .clone()
    }

    fn curve_for_signs(&self, bits: &[u64]) -> NegativityCurve {
        let mut values = vec![0.0; self.grid.len()];
        for part in &self.blocks {
            for (v, b) in values.iter_mut().zip(self.block_curve(part, bits).iter()) {
                *v += b;
            }
        }
        NegativityCurve {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Negativity curve of one ordering.
    pub fn curve(&self, ordering: &OrderingPermutation) -> Result<NegativityCurve> {
        ordering.check_field(&self.field)?;
        Ok(self.curve_for_signs(&self.raw_signs(ordering)))
    }
}

/// Classifies the given orderings by negativity curve.
///
/// Class aggregation is independent of how rayon splits the work, so the
/// report is identical for any thread count.
pub fn survey_orderings(
    spec: &JointStateSpec,
    field: &FieldSpec,
    weights: UnruhWeights,
    grid: &[f64],
    quantum: f64,
    orderings: &[OrderingPermutation],
    mode: SurveyMode,
) -> Result<SurveyReport> {
    if !(quantum > 0.0 && quantum.is_finite()) {
        return Err(FockError::InvalidParameter(format!("quantum {quantum}")));
    }
    for o in orderings {
        o.check_field(field)?;
    }
    let terms = SurveyTerms::new(spec, field, weights, grid)?;

    let patterns: Vec<SignBits> = orderings.par_iter().map(|o| terms.reduced_signs(o)).collect();
    let mut unique: HashMap<&SignBits, usize> = HashMap::new();
    let mut distinct: Vec<&SignBits> = Vec::new();
    let pattern_of: Vec<usize> = patterns
        .iter()
        .map(|p| {
            *unique.entry(p).or_insert_with(|| {
                distinct.push(p);
                distinct.len() - 1
            })
        })
        .collect();
    let curves: Vec<NegativityCurve> = distinct
        .par_iter()
        .map(|p| terms.curve_for_signs(p))
        .collect();
    let prints: Vec<CurveFingerprint> = curves.iter().map(|c| fingerprint_curve(c, quantum)).collect();

    let physical = OrderingPermutation::physical(field);
    let physical_curve = terms.curve_for_signs(&terms.reduced_signs(&physical));
    let physical_print = fingerprint_curve(&physical_curve, quantum);

    let mut classes: BTreeMap<&CurveFingerprint, BehaviorClass> = BTreeMap::new();
    for (o, &pi) in orderings.iter().zip(&pattern_of) {
        let fp = &prints[pi];
        classes
            .entry(fp)
            .or_insert_with(|| BehaviorClass {
                fingerprint: fp.clone(),
                representative: o.clone(),
                population: 0,
                contains_physical: *fp == physical_print,
                curve: curves[pi].clone(),
            })
            .population += 1;
    }
    let mut classes: Vec<BehaviorClass> = classes.into_values().collect();
    classes.sort_by(|a, b| {
        (Reverse(a.population), &a.fingerprint).cmp(&(Reverse(b.population), &b.fingerprint))
    });

    Ok(SurveyReport {
        field: *field,
        spec: spec.clone(),
        weights,
        grid: grid.to_vec(),
        quantum,
        mode,
        classes,
        examined: orderings.len() as u64,
        distinct_patterns: distinct.len(),
        physical_curve,
    })
}

/// Exhaustive survey over all `(4n)!` orderings.
pub fn survey_full(
    spec: &JointStateSpec,
    field: &FieldSpec,
    weights: UnruhWeights,
    grid: &[f64],
    quantum: f64,
) -> Result<SurveyReport> {
    let orderings: Vec<_> = enumerate_orderings(field)?.collect();
    survey_orderings(spec, field, weights, grid, quantum, &orderings, SurveyMode::Full)
}

/// Uniformly sampled orderings drawn from a seeded ChaCha8 stream.
pub fn sample_orderings(field: &FieldSpec, samples: usize, seed: u64) -> Vec<OrderingPermutation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = field.rindler_mode_count();
    (0..samples)
        .map(|_| {
            let mut p: Vec<u8> = (0..n as u8).collect();
            p.shuffle(&mut rng);
            OrderingPermutation(p)
        })
        .collect()
}

pub fn survey_monte_carlo(
    spec: &JointStateSpec,
    field: &FieldSpec,
    weights: UnruhWeights,
    grid: &[f64],
    quantum: f64,
    samples: usize,
    seed: u64,
) -> Result<SurveyReport> {
    if samples == 0 {
        return Err(FockError::InvalidParameter("need at least one sample".into()));
    }
    let orderings = sample_orderings(field, samples, seed);
    survey_orderings(
        spec,
        field,
        weights,
        grid,
        quantum,
        &orderings,
        SurveyMode::MonteCarlo { samples, seed },
    )
}

/// The class holding the region-II-rightmost orderings.
pub fn physical_class<'a>(report: &'a SurveyReport, field: &FieldSpec) -> Result<&'a BehaviorClass> {
    if report.field != *field {
        return Err(FockError::FieldMismatch {
            report: report.field.name(),
            requested: field.name(),
        });
    }
    report
        .classes
        .iter()
        .find(|c| c.contains_physical)
        .ok_or(FockError::NoPhysicalClass)
}
