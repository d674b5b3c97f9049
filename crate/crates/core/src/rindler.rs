//! Unruh vacuum, Unruh excitations and Alice–Rob joint states written in the
//! Rindler Fock basis.
//!
//! Canonical ordering, per Unruh sector: the right sector lists `c†_{σ,I}`
//! by descending σ followed by `d†_{σ,II}` by descending σ; the left sector
//! lists `d†_{σ,I}` then `c†_{σ,II}`. The right sector precedes the left one
//! and Alice's mode precedes both.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::fock::{
    tensor_product, FermionOp, ModeId, ModeOrdering, OccupationKey, Region, Sector, SparseState,
    Species,
};

/// Tolerance on the normalization constraints of user-supplied weights.
const WEIGHT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    /// Anticommuting scalar: one particle and one antiparticle mode per region.
    Grassmann,
    /// Half-integer spin `s = twice_s / 2`.
    Spin { twice_s: u8 },
}

/// A fermionic field together with its Rindler mode table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    kind: FieldKind,
}

impl FieldSpec {
    pub fn grassmann() -> Self {
        FieldSpec {
            kind: FieldKind::Grassmann,
        }
    }

    pub fn dirac() -> Self {
        FieldSpec {
            kind: FieldKind::Spin { twice_s: 1 },
        }
    }

    pub fn spin(twice_s: u8) -> Result<Self> {
        if twice_s.is_multiple_of(2) {
            return Err(FockError::InvalidParameter(format!(
                "spin {twice_s}/2 is not half-integer"
            )));
        }
        // 4n modes plus Alice must fit a 32-bit key
        if 4 * (twice_s as usize + 1) + 1 > crate::fock::MAX_MODES {
            return Err(FockError::InvalidParameter(format!(
                "spin {twice_s}/2 has too many modes"
            )));
        }
        Ok(FieldSpec {
            kind: FieldKind::Spin { twice_s },
        })
    }

    /// Parses `grassmann`, `dirac` or `spin:<s>` with `s` like `1/2` or `3/2`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || FockError::InvalidParameter(format!("unknown field `{text}`"));
        match text {
            "grassmann" => Ok(Self::grassmann()),
            "dirac" => Ok(Self::dirac()),
            _ => {
                let s = text.strip_prefix("spin:").ok_or_else(bad)?;
                let twice = match s.split_once('/') {
                    Some((num, "2")) => num.parse::<u8>().map_err(|_| bad())?,
                    _ => return Err(bad()),
                };
                Self::spin(twice)
            }
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    /// Chain length `n`: `2s + 1` for spin `s`, 1 for the Grassmann field.
    pub fn chain_length(&self) -> usize {
        match self.kind {
            FieldKind::Grassmann => 1,
            FieldKind::Spin { twice_s } => twice_s as usize + 1,
        }
    }

    /// Number of Rindler modes, `4n`.
    pub fn rindler_mode_count(&self) -> usize {
        4 * self.chain_length()
    }

    /// Spin labels in descending order.
    pub fn spins(&self) -> Vec<Option<i8>> {
        match self.kind {
            FieldKind::Grassmann => vec![None],
            FieldKind::Spin { twice_s } => {
                let s = twice_s as i8;
                (0..=twice_s as i8).map(|k| Some(s - 2 * k)).collect()
            }
        }
    }

    pub fn check_spin(&self, sigma: Option<i8>) -> Result<()> {
        if self.spins().contains(&sigma) {
            Ok(())
        } else {
            Err(FockError::SpinOutOfRange {
                twice_sz: sigma.unwrap_or(0),
            })
        }
    }

    fn block(&self, species: Species, region: Region) -> impl Iterator<Item = ModeId> {
        self.spins()
            .into_iter()
            .map(move |s| ModeId::rindler(species, region, s))
    }

    pub fn sector_modes(&self, sector: Sector) -> Vec<ModeId> {
        match sector {
            Sector::Right => self
                .block(Species::Particle, Region::I)
                .chain(self.block(Species::Antiparticle, Region::II))
                .collect(),
            Sector::Left => self
                .block(Species::Antiparticle, Region::I)
                .chain(self.block(Species::Particle, Region::II))
                .collect(),
        }
    }

    /// Canonical order of the `4n` Rindler modes: right sector, then left.
    pub fn rindler_modes(&self) -> Vec<ModeId> {
        let mut modes = self.sector_modes(Sector::Right);
        modes.extend(self.sector_modes(Sector::Left));
        modes
    }

    pub fn sector_ordering(&self, sector: Sector) -> ModeOrdering {
        ModeOrdering::new(self.sector_modes(sector)).expect("sector modes are distinct")
    }

    pub fn rindler_ordering(&self) -> ModeOrdering {
        ModeOrdering::new(self.rindler_modes()).expect("rindler modes are distinct")
    }

    /// Alice followed by the canonical Rindler ordering.
    pub fn joint_ordering(&self) -> ModeOrdering {
        let mut modes = vec![ModeId::Alice];
        modes.extend(self.rindler_modes());
        ModeOrdering::new(modes).expect("joint modes are distinct")
    }

    pub fn name(&self) -> String {
        match self.kind {
            FieldKind::Grassmann => "grassmann".into(),
            FieldKind::Spin { twice_s: 1 } => "dirac".into(),
            FieldKind::Spin { twice_s } => format!("spin:{twice_s}/2"),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Squeeze angle `r`, with `tan r = exp(-π ω c / a)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SqueezeParameter(f64);

impl SqueezeParameter {
    /// Clamps finite input into `[0, π/4]`.
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(FockError::InvalidParameter(format!("squeeze parameter {r}")));
        }
        Ok(SqueezeParameter(r.clamp(0.0, FRAC_PI_4)))
    }

    /// The infinite-acceleration limit `r = π/4`.
    pub fn infinite_acceleration() -> Self {
        SqueezeParameter(FRAC_PI_4)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// `r = arctan(exp(-π ω c / a))` for Rindler frequency `omega` and proper acceleration `a`.
pub fn acceleration_to_squeeze(omega: f64, a: f64, c: f64) -> Result<SqueezeParameter> {
    if !(omega > 0.0 && a > 0.0 && c > 0.0) || !omega.is_finite() || !c.is_finite() {
        return Err(FockError::InvalidParameter(format!(
            "need positive ω, a, c (got {omega}, {a}, {c})"
        )));
    }
    SqueezeParameter::new((-std::f64::consts::PI * omega * c / a).exp().atan())
}

/// Right/left weights of an Unruh excitation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnruhWeights {
    pub q_r: Complex64,
    pub q_l: Complex64,
}

impl UnruhWeights {
    pub fn new(q_r: Complex64, q_l: Complex64) -> Result<Self> {
        let total = q_r.norm_sqr() + q_l.norm_sqr();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(FockError::InvalidParameter(format!(
                "|q_R|² + |q_L|² = {total}, expected 1"
            )));
        }
        Ok(UnruhWeights { q_r, q_l })
    }

    /// Real `q_R` in `[0, 1]` with `q_L = sqrt(1 - q_R²)`.
    pub fn from_qr(q_r: f64) -> Result<Self> {
        if !(0.0..=1.0 + WEIGHT_TOLERANCE).contains(&q_r) {
            return Err(FockError::InvalidParameter(format!("q_R = {q_r} outside [0, 1]")));
        }
        let q_r = q_r.min(1.0);
        Ok(UnruhWeights {
            q_r: Complex64::new(q_r, 0.0),
            q_l: Complex64::new((1.0 - q_r * q_r).sqrt(), 0.0),
        })
    }

    /// The single mode approximation, `q_R = 1`.
    pub fn single_mode() -> Self {
        UnruhWeights {
            q_r: Complex64::new(1.0, 0.0),
            q_l: Complex64::new(0.0, 0.0),
        }
    }
}

/// Binary occupation chain `α` of one sector; digit 1 is the leftmost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinaryChain {
    bits: u32,
    len: usize,
}

impl BinaryChain {
    /// `bits` bit `j` holds digit `j + 1`.
    pub fn new(bits: u32, len: usize) -> Self {
        debug_assert!(len < 32);
        BinaryChain {
            bits: bits & ((1 << len) - 1),
            len,
        }
    }

    pub fn parse(digits: &str) -> Result<Self> {
        let key = OccupationKey::from_digits(digits)?;
        Ok(BinaryChain::new(key.0, digits.len()))
    }

    /// All `2^len` chains in increasing bit order.
    pub fn all(len: usize) -> impl Iterator<Item = BinaryChain> {
        (0..1u32 << len).map(move |b| BinaryChain::new(b, len))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Digit at 1-based position `k`.
    pub fn digit(&self, k: usize) -> bool {
        self.bits >> (k - 1) & 1 == 1
    }

    /// `χ(α)`: digit sum.
    pub fn chi(&self) -> u32 {
        self.bits.count_ones()
    }

    /// `χ(α, k)`: number of ones strictly before 1-based position `k`.
    pub fn prefix_chi(&self, k: usize) -> u32 {
        OccupationKey(self.bits).occupied_before(k.saturating_sub(1).min(self.len))
    }

    /// `R(α)`: digit reversal.
    pub fn reversed(&self) -> BinaryChain {
        let mut out = 0;
        for j in 0..self.len {
            if self.bits >> j & 1 == 1 {
                out |= 1 << (self.len - 1 - j);
            }
        }
        BinaryChain::new(out, self.len)
    }

    /// Membership of `S_k`: digit `k` is zero.
    pub fn in_s(&self, k: usize) -> bool {
        !self.digit(k)
    }

    /// `α + 2^k`: the chain with digit `k` set.
    pub fn with_digit(&self, k: usize) -> BinaryChain {
        BinaryChain::new(self.bits | 1 << (k - 1), self.len)
    }

    pub fn to_digits(&self) -> String {
        OccupationKey(self.bits).to_digits(self.len)
    }
}

/// `(χ(α), k ↦ χ(α, k), R(α))`.
pub fn chain_stats(alpha: BinaryChain) -> (u32, impl Fn(usize) -> u32, BinaryChain) {
    (alpha.chi(), move |k| alpha.prefix_chi(k), alpha.reversed())
}

/// Unnormalized vacuum coefficients `x_α = tan(r)^χ(α)`.
pub fn vacuum_coefficients(n: usize, r: SqueezeParameter) -> Vec<(BinaryChain, f64)> {
    let t = r.value().tan();
    BinaryChain::all(n)
        .map(|a| (a, t.powi(a.chi() as i32)))
        .collect()
}

/// Vacuum of one Unruh sector in its own `2n`-mode ordering:
/// `Σ_α (±1)^χ cos(r)^(n-χ) sin(r)^χ |α R(α)⟩`, with the minus sign on the left.
pub fn build_sector_vacuum(field: &FieldSpec, r: SqueezeParameter, sector: Sector) -> SparseState {
    let n = field.chain_length();
    let (s, c) = r.value().sin_cos();
    let terms = BinaryChain::all(n).map(|alpha| {
        let chi = alpha.chi() as i32;
        let mut amp = c.powi(n as i32 - chi) * s.powi(chi);
        if sector == Sector::Left && chi % 2 == 1 {
            amp = -amp;
        }
        let key = alpha.bits() | alpha.reversed().bits() << n;
        (OccupationKey(key), Complex64::new(amp, 0.0))
    });
    SparseState::from_terms(field.sector_ordering(sector), terms)
        .expect("sector keys fit the sector ordering")
}

/// `|0⟩_U = |0⟩_R ⊗ |0⟩_L` in the canonical Rindler ordering.
pub fn build_unruh_vacuum(field: &FieldSpec, r: SqueezeParameter) -> SparseState {
    tensor_product(
        &build_sector_vacuum(field, r, Sector::Right),
        &build_sector_vacuum(field, r, Sector::Left),
    )
    .expect("sectors are disjoint")
}

fn flip(sigma: Option<i8>) -> Option<i8> {
    sigma.map(|s| -s)
}

/// Linear combination of single fermionic operators.
pub type LinearOp = Vec<(Complex64, FermionOp)>;

/// Sector Unruh creator `C†_{σ,R} = cos r c†_{σ,I} − sin r d_{−σ,II}` or
/// `C†_{σ,L} = cos r c†_{σ,II} − sin r d_{−σ,I}`.
pub fn unruh_creator(
    field: &FieldSpec,
    sigma: Option<i8>,
    sector: Sector,
    r: SqueezeParameter,
) -> Result<LinearOp> {
    field.check_spin(sigma)?;
    let (s, c) = r.value().sin_cos();
    let (cr, an) = match sector {
        Sector::Right => (
            ModeId::rindler(Species::Particle, Region::I, sigma),
            ModeId::rindler(Species::Antiparticle, Region::II, flip(sigma)),
        ),
        Sector::Left => (
            ModeId::rindler(Species::Particle, Region::II, sigma),
            ModeId::rindler(Species::Antiparticle, Region::I, flip(sigma)),
        ),
    };
    Ok(vec![
        (Complex64::new(c, 0.0), FermionOp::create(cr)),
        (Complex64::new(-s, 0.0), FermionOp::annihilate(an)),
    ])
}

/// Adjoint of [`unruh_creator`]: `C_{σ,R} = cos r c_{σ,I} − sin r d†_{−σ,II}`, etc.
pub fn unruh_annihilator(
    field: &FieldSpec,
    sigma: Option<i8>,
    sector: Sector,
    r: SqueezeParameter,
) -> Result<LinearOp> {
    Ok(unruh_creator(field, sigma, sector, r)?
        .into_iter()
        .map(|(c, op)| {
            (
                c.conj(),
                FermionOp {
                    mode: op.mode,
                    dagger: !op.dagger,
                },
            )
        })
        .collect())
}

/// Applies `Σ c_i op_i` to `psi`.
pub fn apply_linear(op: &[(Complex64, FermionOp)], psi: &SparseState) -> Result<SparseState> {
    op.iter().try_fold(SparseState::zero(psi.ordering().clone()), |acc, (c, o)| {
        acc.add_scaled(&psi.apply_op(o)?, *c)
    })
}

/// `C†_{σ,U} ψ = (q_R C†_{σ,R} + q_L C†_{σ,L}) ψ`.
pub fn apply_unruh_creation(
    field: &FieldSpec,
    sigma: Option<i8>,
    weights: UnruhWeights,
    r: SqueezeParameter,
    psi: &SparseState,
) -> Result<SparseState> {
    let mut op = Vec::with_capacity(4);
    for (q, sector) in [(weights.q_r, Sector::Right), (weights.q_l, Sector::Left)] {
        if q == Complex64::new(0.0, 0.0) {
            continue;
        }
        op.extend(
            unruh_creator(field, sigma, sector, r)?
                .into_iter()
                .map(|(c, o)| (c * q, o)),
        );
    }
    if op.is_empty() {
        field.check_spin(sigma)?;
    }
    apply_linear(&op, psi)
}

/// `coeff · C†_{σ1,U} C†_{σ2,U} ... |0⟩_U`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnruhMonomial {
    pub coeff: Complex64,
    pub creators: Vec<Option<i8>>,
}

impl UnruhMonomial {
    pub fn new(coeff: Complex64, creators: Vec<Option<i8>>) -> Self {
        UnruhMonomial { coeff, creators }
    }
}

/// Polynomial in Unruh creators acting on the Unruh vacuum.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UnruhPolynomial {
    pub terms: Vec<UnruhMonomial>,
}

impl UnruhPolynomial {
    pub fn new(terms: Vec<UnruhMonomial>) -> Self {
        UnruhPolynomial { terms }
    }

    pub fn single(coeff: f64, creators: Vec<Option<i8>>) -> Self {
        Self::new(vec![UnruhMonomial::new(Complex64::new(coeff, 0.0), creators)])
    }

    /// Acts on the Unruh vacuum; the result is not normalized.
    pub fn apply(
        &self,
        field: &FieldSpec,
        weights: UnruhWeights,
        r: SqueezeParameter,
        vacuum: &SparseState,
    ) -> Result<SparseState> {
        let mut out = SparseState::zero(vacuum.ordering().clone());
        for m in &self.terms {
            let mut ket = vacuum.clone();
            for &sigma in m.creators.iter().rev() {
                ket = apply_unruh_creation(field, sigma, weights, r, &ket)?;
            }
            out = out.add_scaled(&ket, m.coeff)?;
        }
        Ok(out)
    }
}

/// `P |0⟩_A (A_U|0⟩_U) + Q |1⟩_A (B_U|0⟩_U)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointStateSpec {
    pub p: Complex64,
    pub q: Complex64,
    pub branch_a: UnruhPolynomial,
    pub branch_b: UnruhPolynomial,
}

impl JointStateSpec {
    pub fn new(
        p: Complex64,
        q: Complex64,
        branch_a: UnruhPolynomial,
        branch_b: UnruhPolynomial,
    ) -> Result<Self> {
        let total = p.norm_sqr() + q.norm_sqr();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(FockError::InvalidParameter(format!(
                "|P|² + |Q|² = {total}, expected 1"
            )));
        }
        Ok(JointStateSpec {
            p,
            q,
            branch_a,
            branch_b,
        })
    }

    pub fn check_field(&self, field: &FieldSpec) -> Result<()> {
        for m in self.branch_a.terms.iter().chain(&self.branch_b.terms) {
            for &s in &m.creators {
                field.check_spin(s)?;
            }
        }
        Ok(())
    }
}

/// Builds the joint state in [`FieldSpec::joint_ordering`]. Each branch is
/// normalized before it is weighted by `P` or `Q`.
pub fn build_joint_state(
    spec: &JointStateSpec,
    field: &FieldSpec,
    weights: UnruhWeights,
    r: SqueezeParameter,
) -> Result<SparseState> {
    spec.check_field(field)?;
    let vacuum = build_unruh_vacuum(field, r);
    let alice = ModeOrdering::new(vec![ModeId::Alice])?;
    let mut out = SparseState::zero(field.joint_ordering());
    let branches = [
        (spec.p, &spec.branch_a, 0u32, "A"),
        (spec.q, &spec.branch_b, 1u32, "B"),
    ];
    for (weight, poly, alice_bit, name) in branches {
        if weight == Complex64::new(0.0, 0.0) {
            continue;
        }
        let branch = poly
            .apply(field, weights, r, &vacuum)?
            .normalize()
            .map_err(|_| FockError::DegenerateSpec(name))?;
        let alice_ket = SparseState::basis(alice.clone(), OccupationKey(alice_bit));
        out = out.add_scaled(&tensor_product(&alice_ket, &branch)?, weight)?;
    }
    Ok(out)
}
