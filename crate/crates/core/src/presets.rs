//! Named joint states used by the CLI and the reproduction runs.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::entanglement::{negativity, partial_trace, von_neumann_entropy, PartitionSpec};
use crate::error::{FockError, Result};
use crate::fock::{ModeId, ModeOrdering, OccupationKey, SparseState};
use crate::rindler::{FieldKind, FieldSpec, JointStateSpec, UnruhMonomial, UnruhPolynomial};

/// Seed for the generic-coefficient states when none is given.
pub const DEFAULT_STATE_SEED: u64 = 2011;

const UP: Option<i8> = Some(1);
const DOWN: Option<i8> = Some(-1);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn poly(terms: &[(Complex64, Vec<Option<i8>>)]) -> UnruhPolynomial {
    UnruhPolynomial::new(
        terms
            .iter()
            .filter(|(c, _)| c.norm() > 0.0)
            .map(|(c, ops)| UnruhMonomial::new(*c, ops.clone()))
            .collect(),
    )
}

/// `P|0⟩(a1|0⟩_U + b1|1⟩_U) + Q|1⟩(a2|0⟩_U + b2|1⟩_U)`.
pub fn grassmann_state(p: Complex64, branch_a: [Complex64; 2], branch_b: [Complex64; 2]) -> Result<JointStateSpec> {
    let q = Complex64::new((1.0 - p.norm_sqr()).max(0.0).sqrt(), 0.0);
    let build = |[a, b]: [Complex64; 2]| poly(&[(a, vec![]), (b, vec![None])]);
    JointStateSpec::new(p, q, build(branch_a), build(branch_b))
}

/// `P = 1/√2`, `a1 = b2 = 1`, `a2 = b1 = 0`.
pub fn grassmann_bell() -> JointStateSpec {
    grassmann_state(re(FRAC_1_SQRT_2), [re(1.0), re(0.0)], [re(0.0), re(1.0)])
        .expect("valid weights")
}

/// `P|0⟩(a1|0⟩ + b1|↑⟩ + c1|↓⟩ + d1|p⟩) + Q|1⟩(a2|0⟩ + ...)` with `|p⟩ = C†↑C†↓|0⟩`.
pub fn dirac_state(p: Complex64, branch_a: [Complex64; 4], branch_b: [Complex64; 4]) -> Result<JointStateSpec> {
    let q = Complex64::new((1.0 - p.norm_sqr()).max(0.0).sqrt(), 0.0);
    let build = |[a, b, c, d]: [Complex64; 4]| {
        poly(&[(a, vec![]), (b, vec![UP]), (c, vec![DOWN]), (d, vec![UP, DOWN])])
    };
    JointStateSpec::new(p, q, build(branch_a), build(branch_b))
}

/// `b1 = c2 = 1`, `P = 1/√2`.
pub fn dirac_singlet() -> JointStateSpec {
    let z = re(0.0);
    let o = re(1.0);
    dirac_state(re(FRAC_1_SQRT_2), [z, o, z, z], [z, z, o, z]).expect("valid weights")
}

/// Singlet analogue for any field: `A_U = Σ_{σ>0} C†_σ`, `B_U = Σ_{σ<0} C†_σ`,
/// `P = 1/√2`. The Grassmann field has no spin and gets [`grassmann_bell`].
pub fn singlet(field: &FieldSpec) -> JointStateSpec {
    if field.kind() == FieldKind::Grassmann {
        return grassmann_bell();
    }
    let spins = field.spins();
    let half = |positive: bool| {
        UnruhPolynomial::new(
            spins
                .iter()
                .filter(|s| (s.unwrap_or(0) > 0) == positive)
                .map(|s| UnruhMonomial::new(re(1.0), vec![*s]))
                .collect(),
        )
    };
    JointStateSpec::new(re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2), half(true), half(false))
        .expect("valid weights")
}

fn random_unit(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..len)
        .map(|_| {
            Complex64::new(
                StandardNormal.sample(&mut *rng),
                StandardNormal.sample(&mut *rng),
            )
        })
        .collect();
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / n).collect()
}

/// Seeded complex Gaussian coefficients, normalized per branch. With
/// `pairs = false` the Dirac pair coefficients are zero.
pub fn generic(field: &FieldSpec, seed: u64, pairs: bool) -> Result<JointStateSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pq = random_unit(&mut rng, 2);
    match field.kind() {
        FieldKind::Grassmann => {
            let a = random_unit(&mut rng, 2);
            let b = random_unit(&mut rng, 2);
            grassmann_state_pq(pq[0], pq[1], [a[0], a[1]], [b[0], b[1]])
        }
        FieldKind::Spin { twice_s: 1 } => {
            let len = if pairs { 4 } else { 3 };
            let mut a = random_unit(&mut rng, len);
            let mut b = random_unit(&mut rng, len);
            a.resize(4, re(0.0));
            b.resize(4, re(0.0));
            let build = |c: &[Complex64]| {
                poly(&[
                    (c[0], vec![]),
                    (c[1], vec![UP]),
                    (c[2], vec![DOWN]),
                    (c[3], vec![UP, DOWN]),
                ])
            };
            JointStateSpec::new(pq[0], pq[1], build(&a), build(&b))
        }
        FieldKind::Spin { .. } => {
            // vacuum plus every single excitation
            let spins = field.spins();
            let build = |rng: &mut ChaCha8Rng| {
                let c = random_unit(rng, spins.len() + 1);
                let mut terms = vec![(c[0], vec![])];
                terms.extend(spins.iter().zip(&c[1..]).map(|(s, c)| (*c, vec![*s])));
                poly(&terms)
            };
            let a = build(&mut rng);
            let b = build(&mut rng);
            JointStateSpec::new(pq[0], pq[1], a, b)
        }
    }
}

fn grassmann_state_pq(
    p: Complex64,
    q: Complex64,
    a: [Complex64; 2],
    b: [Complex64; 2],
) -> Result<JointStateSpec> {
    let build = |[x, y]: [Complex64; 2]| poly(&[(x, vec![]), (y, vec![None])]);
    JointStateSpec::new(p, q, build(a), build(b))
}

/// Named state families accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatePreset {
    /// [`singlet`]; for the Grassmann field the two-term Bell-like state.
    Singlet,
    /// Generic coefficients without pair terms.
    NoPair,
    /// Generic coefficients on every term.
    Generic,
}

impl StatePreset {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "singlet" | "bell" => Ok(StatePreset::Singlet),
            "no-pair" => Ok(StatePreset::NoPair),
            "generic" => Ok(StatePreset::Generic),
            _ => Err(FockError::InvalidParameter(format!("unknown state `{text}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StatePreset::Singlet => "singlet",
            StatePreset::NoPair => "no-pair",
            StatePreset::Generic => "generic",
        }
    }

    pub fn build(&self, field: &FieldSpec, seed: u64) -> Result<JointStateSpec> {
        match self {
            StatePreset::Singlet => Ok(singlet(field)),
            StatePreset::NoPair => generic(field, seed, false),
            StatePreset::Generic => generic(field, seed, true),
        }
    }
}

/// Builds a state from explicit real branch coefficients: two per branch for
/// the Grassmann field (`a, b`), four for Dirac (`a, b, c, d`).
pub fn from_coefficients(field: &FieldSpec, p: f64, coeffs: &[f64]) -> Result<JointStateSpec> {
    let c: Vec<Complex64> = coeffs.iter().map(|x| re(*x)).collect();
    match (field.kind(), c.len()) {
        (FieldKind::Grassmann, 4) => grassmann_state(re(p), [c[0], c[1]], [c[2], c[3]]),
        (FieldKind::Spin { twice_s: 1 }, 8) => {
            dirac_state(re(p), [c[0], c[1], c[2], c[3]], [c[4], c[5], c[6], c[7]])
        }
        _ => Err(FockError::InvalidParameter(format!(
            "{} coefficients do not fit field {field}",
            c.len()
        ))),
    }
}

/// Ordering over single-letter toy modes, e.g. `"acb"`.
pub fn toy_ordering(names: &str) -> Result<ModeOrdering> {
    ModeOrdering::new(names.chars().map(ModeId::Toy).collect())
}

fn toy_state(names: &str, terms: &[(&str, f64)]) -> Result<SparseState> {
    let terms = terms
        .iter()
        .map(|(d, a)| Ok((OccupationKey::from_digits(d)?, re(*a))))
        .collect::<Result<Vec<_>>>()?;
    SparseState::from_terms(toy_ordering(names)?, terms)
}

/// `½(|00⟩ + |01⟩ + |10⟩ + |11⟩)` in the `a†b†` basis: a product state.
pub fn toy_product_state() -> Result<SparseState> {
    toy_state("ab", &[("00", 0.5), ("01", 0.5), ("10", 0.5), ("11", 0.5)])
}

/// Entropy of the first qubit of [`toy_product_state`] in the basis of `ordering` (`"ab"` or `"ba"`).
pub fn toy_entropy(ordering: &str) -> Result<f64> {
    let psi = toy_product_state()?.reorder_basis(&toy_ordering(ordering)?)?;
    von_neumann_entropy(&partial_trace(&psi, &PartitionSpec::new(0, vec![], vec![1]))?)
}

/// `½(|100⟩ + |010⟩ + |101⟩ + |011⟩)` in the `a†b†c†` basis.
pub fn toy_tripartite_state() -> Result<SparseState> {
    toy_state("abc", &[("100", 0.5), ("010", 0.5), ("101", 0.5), ("011", 0.5)])
}

/// Negativity between `a` and `b` of [`toy_tripartite_state`] after tracing
/// `c`, in the basis of `ordering` (a permutation of `"abc"`).
pub fn toy_tripartite_negativity(ordering: &str) -> Result<f64> {
    let target = toy_ordering(ordering)?;
    let psi = toy_tripartite_state()?.reorder_basis(&target)?;
    let pos = |c| target.position_of(&ModeId::Toy(c));
    let part = PartitionSpec::new(pos('a')?, vec![pos('b')?], vec![pos('c')?]);
    Ok(negativity(&partial_trace(&psi, &part)?))
}
