//! Partial trace, partial transpose, negativity and von Neumann entropy.
//!
//! Reduced density matrices live on the support of the reduced state only;
//! the basis index of a reduced ket packs Alice's bit into bit 0 and the kept
//! region-I occupations into the bits above it.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::fock::{ModeOrdering, Region, SparseState};
use crate::rindler::{build_joint_state, FieldSpec, JointStateSpec, SqueezeParameter, UnruhWeights};

/// Eigenvalues with magnitude below this count as zero for negativity.
pub const NEGATIVITY_EIGEN_CUTOFF: f64 = 1e-12;
/// Eigenvalues at or below this make entropy evaluation fail.
pub const PSD_TOLERANCE: f64 = 1e-10;
/// Eigenvalues at or below this are skipped in the entropy sum.
pub const ENTROPY_EIGEN_CUTOFF: f64 = 1e-14;
/// Matrix entries below this are treated as structural zeros when splitting blocks.
const BLOCK_COUPLING_CUTOFF: f64 = 1e-14;

/// Which ordering positions are kept on each side and which are traced out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSpec {
    pub traced: Vec<usize>,
    pub kept_a: usize,
    pub kept_b: Vec<usize>,
}

impl PartitionSpec {
    pub fn new(kept_a: usize, kept_b: Vec<usize>, traced: Vec<usize>) -> Self {
        PartitionSpec {
            traced,
            kept_a,
            kept_b,
        }
    }

    /// Alice against region I, with region II traced out.
    pub fn alice_vs_region_one(ordering: &ModeOrdering) -> Result<Self> {
        let kept_a = ordering.position_of(&crate::fock::ModeId::Alice)?;
        let mut kept_b = Vec::new();
        let mut traced = Vec::new();
        for (k, m) in ordering.modes().iter().enumerate() {
            match m.region() {
                Some(Region::I) => kept_b.push(k),
                Some(Region::II) => traced.push(k),
                None => {}
            }
        }
        let part = PartitionSpec::new(kept_a, kept_b, traced);
        part.validate(ordering.len())?;
        Ok(part)
    }

    /// Every position in `0..len` must appear exactly once.
    pub fn validate(&self, len: usize) -> Result<()> {
        let mut seen = vec![false; len];
        for &p in self.traced.iter().chain(&self.kept_b).chain([&self.kept_a]) {
            if p >= len {
                return Err(FockError::InvalidPartition(format!(
                    "position {p} outside {len} modes"
                )));
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(FockError::InvalidPartition(format!("position {p} used twice")));
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(FockError::InvalidPartition(format!("position {p} not assigned")));
        }
        Ok(())
    }

    /// Splits a full key into (reduced key, traced key).
    pub fn split(&self, key: u32) -> (u32, u32) {
        let mut reduced = key >> self.kept_a & 1;
        for (j, &p) in self.kept_b.iter().enumerate() {
            reduced |= (key >> p & 1) << (j + 1);
        }
        let mut traced = 0;
        for (j, &p) in self.traced.iter().enumerate() {
            traced |= (key >> p & 1) << j;
        }
        (reduced, traced)
    }
}

/// Index structure of a partial trace over a fixed set of terms.
///
/// Built once for a term list; [`ReducedLayout::density`] then accepts any
/// amplitudes on those terms. Surveys rely on this to share the structure
/// between orderings that only change term signs.
#[derive(Debug, Clone)]
pub struct ReducedLayout {
    basis: Vec<u32>,
    /// Per traced configuration: `(basis index, term index)` pairs.
    groups: Vec<Vec<(usize, usize)>>,
    kept_b_len: usize,
}

impl ReducedLayout {
    /// `keys[t] = (reduced key, traced key)` of term `t`.
    pub fn new(keys: &[(u32, u32)], kept_b_len: usize) -> Self {
        let mut basis: Vec<u32> = keys.iter().map(|k| k.0).collect();
        basis.sort_unstable();
        basis.dedup();
        let mut by_traced: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
        for (t, (red, tr)) in keys.iter().enumerate() {
            let i = basis.binary_search(red).expect("basis holds every reduced key");
            by_traced.entry(*tr).or_default().push((i, t));
        }
        ReducedLayout {
            basis,
            groups: by_traced.into_values().collect(),
            kept_b_len,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn density(&self, amps: &[Complex64]) -> DensityMatrix {
        let d = self.basis.len();
        let mut data = DMatrix::<Complex64>::zeros(d, d);
        for group in &self.groups {
            for &(i, ti) in group {
                let ai = amps[ti];
                for &(j, tj) in group {
                    data[(i, j)] += ai * amps[tj].conj();
                }
            }
        }
        DensityMatrix {
            basis: self.basis.clone(),
            kept_b_len: self.kept_b_len,
            data,
        }
    }
}

/// Precomputed negativity evaluator for a fixed term list.
///
/// The block structure of `ρ^{T_A}` and the term pairs feeding each entry do
/// not depend on the amplitudes, so they are computed once; each evaluation
/// then only accumulates the entries and diagonalizes the small blocks.
#[derive(Debug, Clone)]
pub struct NegativityKernel {
    blocks: Vec<KernelBlock>,
}

#[derive(Debug, Clone)]
struct KernelBlock {
    dim: usize,
    /// `(row, col, term i, term j)`: entry `(row, col) += amp_i · conj(amp_j)`.
    contributions: Vec<(u16, u16, u32, u32)>,
}

impl NegativityKernel {
    /// `keys[t] = (reduced key, traced key)` of term `t`, as from [`PartitionSpec::split`].
    pub fn new(keys: &[(u32, u32)]) -> Self {
        let mut by_traced: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (t, (_, tr)) in keys.iter().enumerate() {
            by_traced.entry(*tr).or_default().push(t);
        }
        // ρ entry ((a,i),(b,j)) lands on ρ^{T_A} entry ((b,i),(a,j))
        let mut index: BTreeMap<u32, usize> = BTreeMap::new();
        let mut entries: Vec<(usize, usize, u32, u32)> = Vec::new();
        for group in by_traced.values() {
            for &ti in group {
                for &tj in group {
                    let (ri, rj) = (keys[ti].0, keys[tj].0);
                    let row = (ri & !1) | (rj & 1);
                    let col = (rj & !1) | (ri & 1);
                    let n = index.len();
                    let row = *index.entry(row).or_insert(n);
                    let n = index.len();
                    let col = *index.entry(col).or_insert(n);
                    entries.push((row, col, ti as u32, tj as u32));
                }
            }
        }
        let d = index.len();
        let mut parent: Vec<usize> = (0..d).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(r, c, _, _) in &entries {
            let (a, b) = (find(&mut parent, r), find(&mut parent, c));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut local = vec![0usize; d];
        let mut block_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut dims: Vec<usize> = Vec::new();
        for (i, slot) in local.iter_mut().enumerate() {
            let root = find(&mut parent, i);
            let b = *block_of_root.entry(root).or_insert_with(|| {
                dims.push(0);
                dims.len() - 1
            });
            *slot = dims[b];
            dims[b] += 1;
        }
        let mut blocks: Vec<KernelBlock> = dims
            .iter()
            .map(|&dim| KernelBlock {
                dim,
                contributions: Vec::new(),
            })
            .collect();
        for (r, c, ti, tj) in entries {
            let b = block_of_root[&find(&mut parent, r)];
            blocks[b]
                .contributions
                .push((local[r] as u16, local[c] as u16, ti, tj));
        }
        NegativityKernel { blocks }
    }

    /// Dimension of the `ρ^{T_A}` support.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    /// Splits into one kernel per block. Each part lists the global term
    /// indices it reads; its own kernel indexes terms locally in that order.
    pub fn into_blocks(self) -> Vec<(Vec<usize>, NegativityKernel)> {
        self.blocks
            .into_iter()
            .map(|mut block| {
                let mut terms: Vec<usize> = block
                    .contributions
                    .iter()
                    .flat_map(|&(_, _, i, j)| [i as usize, j as usize])
                    .collect();
                terms.sort_unstable();
                terms.dedup();
                for c in &mut block.contributions {
                    c.2 = terms.binary_search(&(c.2 as usize)).expect("term listed") as u32;
                    c.3 = terms.binary_search(&(c.3 as usize)).expect("term listed") as u32;
                }
                (terms, NegativityKernel { blocks: vec![block] })
            })
            .collect()
    }

    pub fn largest_block(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).max().unwrap_or(0)
    }

    /// Negativity of the state with amplitudes `amps` on the kernel's terms.
    pub fn negativity(&self, amps: &[Complex64]) -> f64 {
        self.negativity_flipped(amps, |_| false)
    }

    /// Every contribution, numbered in the order [`NegativityKernel::negativity_flipped`] visits them.
    pub fn contributions(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        let mut offset = 0;
        self.blocks.iter().flat_map(move |b| {
            let base = offset;
            offset += b.dim;
            b.contributions.iter().map(move |&(r, c, i, j)| {
                (base + r as usize, base + c as usize, i as usize, j as usize)
            })
        })
    }

    /// Like [`NegativityKernel::negativity`], with contribution `k` negated when `flip(k)`.
    pub fn negativity_flipped(&self, amps: &[Complex64], flip: impl Fn(usize) -> bool) -> f64 {
        if amps.iter().all(|a| a.im == 0.0) {
            return self.negativity_real(amps, flip);
        }
        let mut total = 0.0;
        let mut scratch: Vec<Complex64> = Vec::new();
        let mut k = 0;
        for block in &self.blocks {
            let n = block.dim;
            scratch.clear();
            scratch.resize(n * n, Complex64::new(0.0, 0.0));
            for &(r, c, ti, tj) in &block.contributions {
                let v = amps[ti as usize] * amps[tj as usize].conj();
                scratch[r as usize * n + c as usize] += if flip(k) { -v } else { v };
                k += 1;
            }
            let eig = match n {
                1 => vec![scratch[0].re],
                _ => hermitian_eigenvalues(&DMatrix::from_row_slice(n, n, &scratch)),
            };
            total += negative_part(eig);
        }
        total
    }

    /// Real symmetric path. A block whose shift by the cutoff still admits a
    /// Cholesky factorization has no eigenvalue below `-cutoff` and is skipped.
    fn negativity_real(&self, amps: &[Complex64], flip: impl Fn(usize) -> bool) -> f64 {
        let mut total = 0.0;
        let mut k = 0;
        for block in &self.blocks {
            let n = block.dim;
            let mut m = DMatrix::<f64>::zeros(n, n);
            for &(r, c, ti, tj) in &block.contributions {
                let v = amps[ti as usize].re * amps[tj as usize].re;
                m[(r as usize, c as usize)] += if flip(k) { -v } else { v };
                k += 1;
            }
            if n == 1 {
                total += negative_part([m[(0, 0)]]);
                continue;
            }
            let mut shifted = m.clone();
            for i in 0..n {
                shifted[(i, i)] += NEGATIVITY_EIGEN_CUTOFF;
            }
            if shifted.cholesky().is_some() {
                continue;
            }
            total += negative_part(m.symmetric_eigenvalues().iter().copied());
        }
        total
    }
}

/// `Σ |λ|` over eigenvalues below the cutoff; `+0.0` when there are none.
fn negative_part(eig: impl IntoIterator<Item = f64>) -> f64 {
    eig.into_iter()
        .filter(|&l| l < -NEGATIVITY_EIGEN_CUTOFF)
        .fold(0.0, |acc, l| acc - l)
}

/// Reduced state of Alice and the kept modes, stored on its support.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: Vec<u32>,
    kept_b_len: usize,
    data: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Wraps a dense matrix on the full `2 · 2^kept_b_len` basis.
    pub fn from_dense(data: DMatrix<Complex64>, kept_b_len: usize) -> Result<Self> {
        let dim = 2usize << kept_b_len;
        if data.nrows() != dim || data.ncols() != dim {
            return Err(FockError::InvalidParameter(format!(
                "expected a {dim}×{dim} matrix"
            )));
        }
        Ok(DensityMatrix {
            basis: (0..dim as u32).collect(),
            kept_b_len,
            data,
        })
    }

    /// Reduced keys of the stored rows: bit 0 is Alice, bits above are the kept modes.
    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    /// Dimension of the full `Alice ⊗ kept` space.
    pub fn full_dim(&self) -> usize {
        2 << self.kept_b_len
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    /// Entry `⟨(a,i)|ρ|(b,j)⟩` by reduced key; zero off the support.
    pub fn entry(&self, row: u32, col: u32) -> Complex64 {
        match (self.basis.binary_search(&row), self.basis.binary_search(&col)) {
            (Ok(i), Ok(j)) => self.data[(i, j)],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = self.full_dim();
        let mut out = DMatrix::zeros(d, d);
        for (i, &ri) in self.basis.iter().enumerate() {
            for (j, &rj) in self.basis.iter().enumerate() {
                out[(ri as usize, rj as usize)] = self.data[(i, j)];
            }
        }
        out
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.data.nrows();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.data)
    }
}

/// Hermitian matrix produced by [`partial_transpose`], with its own support basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialTranspose {
    pub basis: Vec<u32>,
    pub data: DMatrix<Complex64>,
}

impl PartialTranspose {
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.data)
    }
}

/// Reduced density matrix of `psi` with the `traced` positions summed out.
pub fn partial_trace(psi: &SparseState, part: &PartitionSpec) -> Result<DensityMatrix> {
    part.validate(psi.ordering().len())?;
    let (keys, amps): (Vec<_>, Vec<_>) = psi.terms().map(|(k, a)| (part.split(k.0), a)).unzip();
    Ok(ReducedLayout::new(&keys, part.kept_b.len()).density(&amps))
}

/// Transpose on Alice's index: `(a,i),(b,j) ↦ (b,i),(a,j)`.
pub fn partial_transpose(rho: &DensityMatrix) -> PartialTranspose {
    // support of ρ^{T_A} is {0,1} × {kept keys present in ρ}
    let mut kept: Vec<u32> = rho.basis.iter().map(|k| k >> 1).collect();
    kept.dedup();
    let basis: Vec<u32> = kept.iter().flat_map(|b| [b << 1, b << 1 | 1]).collect();
    let index: Vec<usize> = rho
        .basis
        .iter()
        .map(|k| 2 * kept.binary_search(&(k >> 1)).unwrap())
        .collect();
    let d = basis.len();
    let mut data = DMatrix::<Complex64>::zeros(d, d);
    for (i, &ri) in rho.basis.iter().enumerate() {
        let a = (ri & 1) as usize;
        for (j, &rj) in rho.basis.iter().enumerate() {
            let b = (rj & 1) as usize;
            let v = rho.data[(i, j)];
            if v != Complex64::new(0.0, 0.0) {
                data[(index[i] + b, index[j] + a)] = v;
            }
        }
    }
    PartialTranspose { basis, data }
}

/// Sum of the magnitudes of the negative eigenvalues of `ρ^{T_A}`.
pub fn negativity(rho: &DensityMatrix) -> f64 {
    negative_part(partial_transpose(rho).eigenvalues())
}

/// `−Σ λ log₂ λ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eig = rho.eigenvalues();
    if let Some(&worst) = eig.iter().find(|&&l| l < -PSD_TOLERANCE) {
        return Err(FockError::NegativeEigenvalue(worst));
    }
    Ok(eig
        .into_iter()
        .filter(|&l| l > ENTROPY_EIGEN_CUTOFF)
        .map(|l| -l * l.log2())
        .fold(0.0, |acc, x| acc + x))
}

/// Eigenvalues of a Hermitian matrix, solving each decoupled block separately.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let d = m.nrows();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..d {
        for j in i + 1..d {
            if m[(i, j)].norm() > BLOCK_COUPLING_CUTOFF {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..d {
        let root = find(&mut parent, i);
        blocks.entry(root).or_default().push(i);
    }
    let mut out = Vec::with_capacity(d);
    for idx in blocks.values() {
        match idx.len() {
            1 => out.push(m[(idx[0], idx[0])].re),
            2 => {
                let a = m[(idx[0], idx[0])].re;
                let c = m[(idx[1], idx[1])].re;
                let b = m[(idx[0], idx[1])].norm();
                let mean = 0.5 * (a + c);
                let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
                out.push(mean - rad);
                out.push(mean + rad);
            }
            n => {
                let sub = DMatrix::from_fn(n, n, |i, j| m[(idx[i], idx[j])]);
                out.extend(sub.symmetric_eigenvalues().iter().copied());
            }
        }
    }
    out
}

/// Negativity as a function of the squeeze parameter for one ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativityCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl NegativityCurve {
    pub fn endpoint(&self) -> f64 {
        *self.values.last().expect("curves are non-empty")
    }

    pub fn max_abs_diff(&self, other: &NegativityCurve) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `points` uniformly spaced values on `[0, π/4]`, both ends included.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|k| FRAC_PI_4 * k as f64 / (points - 1) as f64)
            .collect(),
    }
}

pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(FockError::InvalidParameter("empty grid".into()));
    }
    if grid.iter().any(|r| !(0.0..=FRAC_PI_4 + 1e-15).contains(r)) {
        return Err(FockError::InvalidParameter("grid leaves [0, π/4]".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FockError::InvalidParameter("grid must increase strictly".into()));
    }
    Ok(())
}

/// For each `r`: build the joint state, re-express it in `ordering`, trace
/// region II and take the negativity against Alice.
pub fn negativity_curve(
    spec: &JointStateSpec,
    field: &FieldSpec,
    weights: UnruhWeights,
    ordering: &ModeOrdering,
    grid: &[f64],
) -> Result<NegativityCurve> {
    check_grid(grid)?;
    let part = PartitionSpec::alice_vs_region_one(ordering)?;
    let values = grid
        .iter()
        .map(|&r| {
            let psi = build_joint_state(spec, field, weights, SqueezeParameter::new(r)?)?;
            let psi = psi.reorder_basis(ordering)?;
            Ok(negativity(&partial_trace(&psi, &part)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NegativityCurve {
        grid: grid.to_vec(),
        values,
    })
}
