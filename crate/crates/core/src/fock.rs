//! Truncated multi-mode Fock spaces.
//!
//! A [`ModeRegistry`] fixes an ordered list of labelled modes; the product
//! basis is lexicographic in registration order with the first registered
//! mode varying slowest, so the global vacuum is always basis index 0. The
//! `truncation` of a mode is its maximum occupation.
//!
//! [`FockOperator`] is an exact sparse (CSR) complex operator on such a
//! space. Few-mode dense blocks ([`LocalOp`]) are embedded into it, or
//! applied directly to a [`StateVector`] when the global operator would be
//! too large to materialize.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dense::{self, ONE, ZERO};
use crate::{CMatrix, Error, Result, C64};

/// Hard ceiling on the number of basis states a registry may describe.
pub const MAX_DIMENSION: usize = 1 << 28;

/// Position of a mode inside its registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeId(usize);

impl ModeId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Mode {
    label: String,
    truncation: usize,
}

/// Ordered, labelled modes with per-mode truncation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModeRegistry {
    modes: Vec<Mode>,
    strides: Vec<usize>,
    dimension: usize,
}

impl ModeRegistry {
    pub const MIN_TRUNCATION: usize = 2;

    pub fn new() -> Self {
        ModeRegistry {
            modes: Vec::new(),
            strides: Vec::new(),
            dimension: 1,
        }
    }

    /// Builds a registry from `(label, truncation)` pairs in order.
    pub fn with_modes<'a, I>(modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, usize)>,
    {
        let mut registry = ModeRegistry::new();
        for (label, truncation) in modes {
            registry.register(label, truncation)?;
        }
        Ok(registry)
    }

    pub fn register(&mut self, label: &str, truncation: usize) -> Result<ModeId> {
        if self.modes.iter().any(|m| m.label == label) {
            return Err(Error::DuplicateMode(label.to_string()));
        }
        if truncation < Self::MIN_TRUNCATION {
            return Err(Error::invalid(
                "truncation",
                alloc::format!(
                    "mode `{label}` has truncation {truncation}, minimum is {}",
                    Self::MIN_TRUNCATION
                ),
            ));
        }
        let dimension = (self.dimension as u128) * (truncation as u128 + 1);
        if dimension > MAX_DIMENSION as u128 {
            return Err(Error::DimensionGuard {
                dimension,
                limit: MAX_DIMENSION as u128,
            });
        }
        self.modes.push(Mode {
            label: label.to_string(),
            truncation,
        });
        self.recompute_strides();
        Ok(ModeId(self.modes.len() - 1))
    }

    fn recompute_strides(&mut self) {
        let n = self.modes.len();
        self.strides = vec![1; n];
        let mut stride = 1;
        for k in (0..n).rev() {
            self.strides[k] = stride;
            stride *= self.modes[k].truncation + 1;
        }
        self.dimension = stride;
    }

    pub fn id(&self, label: &str) -> Result<ModeId> {
        self.modes
            .iter()
            .position(|m| m.label == label)
            .map(ModeId)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn label(&self, id: ModeId) -> &str {
        &self.modes[id.0].label
    }

    pub fn truncation(&self, id: ModeId) -> usize {
        self.modes[id.0].truncation
    }

    pub fn local_dim(&self, id: ModeId) -> usize {
        self.modes[id.0].truncation + 1
    }

    pub fn stride(&self, id: ModeId) -> usize {
        self.strides[id.0]
    }

    pub fn ids(&self) -> impl Iterator<Item = ModeId> + '_ {
        (0..self.modes.len()).map(ModeId)
    }

    fn check(&self, id: ModeId) -> Result<()> {
        if id.0 < self.modes.len() {
            Ok(())
        } else {
            Err(Error::UnknownMode(alloc::format!("#{}", id.0)))
        }
    }

    pub fn occupation(&self, index: usize, id: ModeId) -> usize {
        (index / self.strides[id.0]) % self.local_dim(id)
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        self.ids().map(|id| self.occupation(index, id)).collect()
    }

    /// Basis index of an occupation-number list given in registration order.
    pub fn index_of(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.modes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.modes.len(),
                found: occupations.len(),
            });
        }
        let mut index = 0;
        for (k, &n) in occupations.iter().enumerate() {
            if n > self.modes[k].truncation {
                return Err(Error::invalid(
                    "occupations",
                    alloc::format!(
                        "mode `{}` holds at most {} particles",
                        self.modes[k].label,
                        self.modes[k].truncation
                    ),
                ));
            }
            index += n * self.strides[k];
        }
        Ok(index)
    }

    /// Basis index with the given `(mode, occupation)` pairs and vacuum
    /// elsewhere.
    pub fn index_with(&self, occupied: &[(ModeId, usize)]) -> Result<usize> {
        let mut occ = vec![0; self.modes.len()];
        for &(id, n) in occupied {
            self.check(id)?;
            occ[id.0] = n;
        }
        self.index_of(&occ)
    }
}

/// Which single-mode operator to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
    Number,
}

/// A dense operator on a few modes, embedded with identities elsewhere.
///
/// The local basis follows the order of `modes` (first mode slowest).
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOp {
    modes: Vec<ModeId>,
    matrix: CMatrix,
}

impl LocalOp {
    pub fn new(registry: &ModeRegistry, modes: Vec<ModeId>, matrix: CMatrix) -> Result<Self> {
        for (k, &id) in modes.iter().enumerate() {
            registry.check(id)?;
            if modes[..k].contains(&id) {
                return Err(Error::invalid(
                    "modes",
                    alloc::format!("mode `{}` listed twice", registry.label(id)),
                ));
            }
        }
        let dim: usize = modes.iter().map(|&id| registry.local_dim(id)).product();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(LocalOp { modes, matrix })
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    fn nonzeros(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::new();
        for c in 0..self.matrix.ncols() {
            for r in 0..self.matrix.nrows() {
                let v = self.matrix[(r, c)];
                if v != ZERO {
                    out.push((r, c, v));
                }
            }
        }
        out
    }
}

/// Where the local basis of a set of modes sits inside the global basis.
struct Placement {
    offsets: Vec<usize>,
    bases: Vec<usize>,
}

impl Placement {
    fn new(registry: &ModeRegistry, modes: &[ModeId]) -> Placement {
        let mut offsets = vec![0usize];
        for &id in modes {
            let stride = registry.stride(id);
            let dim = registry.local_dim(id);
            offsets = offsets
                .iter()
                .flat_map(|&o| (0..dim).map(move |n| o + n * stride))
                .collect();
        }
        let mut bases = vec![0usize];
        for id in registry.ids() {
            if modes.contains(&id) {
                continue;
            }
            let stride = registry.stride(id);
            let dim = registry.local_dim(id);
            bases = bases
                .iter()
                .flat_map(|&b| (0..dim).map(move |n| b + n * stride))
                .collect();
        }
        bases.sort_unstable();
        Placement { offsets, bases }
    }
}

/// Exact sparse complex operator on the Fock space of a registry.
#[derive(Clone)]
pub struct FockOperator {
    registry: Arc<ModeRegistry>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl fmt::Debug for FockOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FockOperator")
            .field("dimension", &self.dimension())
            .field("nnz", &self.nnz())
            .finish()
    }
}

fn same_registry(a: &Arc<ModeRegistry>, b: &Arc<ModeRegistry>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::RegistryMismatch)
    }
}

impl FockOperator {
    pub fn zero(registry: &Arc<ModeRegistry>) -> Self {
        FockOperator {
            registry: registry.clone(),
            row_ptr: vec![0; registry.dimension() + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(registry: &Arc<ModeRegistry>) -> Self {
        Self::diagonal(registry, |_| ONE)
    }

    /// Diagonal operator with entry `f(i)` at basis state `i`.
    pub fn diagonal<F: Fn(usize) -> C64>(registry: &Arc<ModeRegistry>, f: F) -> Self {
        let dim = registry.dimension();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::with_capacity(dim);
        let mut vals = Vec::with_capacity(dim);
        row_ptr.push(0);
        for i in 0..dim {
            let v = f(i);
            if v != ZERO {
                cols.push(i);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        FockOperator {
            registry: registry.clone(),
            row_ptr,
            cols,
            vals,
        }
    }

    /// Builds an operator from `(row, col, value)` triplets; duplicates add.
    pub fn from_triplets(
        registry: &Arc<ModeRegistry>,
        triplets: Vec<(usize, usize, C64)>,
    ) -> Result<Self> {
        let dim = registry.dimension();
        if let Some(&(r, c, _)) = triplets.iter().find(|&&(r, c, _)| r >= dim || c >= dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.max(c) + 1,
            });
        }
        Ok(Self::from_triplets_unchecked(registry, triplets))
    }

    fn from_triplets_unchecked(
        registry: &Arc<ModeRegistry>,
        triplets: Vec<(usize, usize, C64)>,
    ) -> Self {
        let dim = registry.dimension();
        let mut counts = vec![0usize; dim + 1];
        for &(r, _, _) in &triplets {
            counts[r + 1] += 1;
        }
        for i in 0..dim {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut staged: Vec<(usize, C64)> = vec![(0, ZERO); triplets.len()];
        for (r, c, v) in triplets {
            staged[next[r]] = (c, v);
            next[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::with_capacity(staged.len());
        let mut vals = Vec::with_capacity(staged.len());
        row_ptr.push(0);
        for i in 0..dim {
            let row = &mut staged[counts[i]..counts[i + 1]];
            row.sort_unstable_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut acc = ZERO;
                while k < row.len() && row[k].0 == c {
                    acc += row[k].1;
                    k += 1;
                }
                if acc != ZERO {
                    cols.push(c);
                    vals.push(acc);
                }
            }
            row_ptr.push(cols.len());
        }
        FockOperator {
            registry: registry.clone(),
            row_ptr,
            cols,
            vals,
        }
    }

    /// Tensor product of local blocks on disjoint modes, identity elsewhere.
    pub fn embed(registry: &Arc<ModeRegistry>, factors: &[LocalOp]) -> Result<Self> {
        let mut all_modes: Vec<ModeId> = Vec::new();
        for f in factors {
            for &id in f.modes() {
                registry.check(id)?;
                if all_modes.contains(&id) {
                    return Err(Error::invalid(
                        "factors",
                        alloc::format!("mode `{}` appears in two factors", registry.label(id)),
                    ));
                }
                all_modes.push(id);
            }
            let dim: usize = f.modes().iter().map(|&id| registry.local_dim(id)).product();
            if f.matrix().nrows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: f.matrix().nrows(),
                });
            }
        }
        // global offsets of every nonzero combination across factors
        let mut combos: Vec<(usize, usize, C64)> = vec![(0, 0, ONE)];
        for f in factors {
            let place = Placement::new(registry, f.modes());
            let entries = f.nonzeros();
            let mut next = Vec::with_capacity(combos.len() * entries.len());
            for &(ro, co, v) in &combos {
                for &(r, c, w) in &entries {
                    next.push((ro + place.offsets[r], co + place.offsets[c], v * w));
                }
            }
            combos = next;
        }
        let bases = Placement::new(registry, &all_modes).bases;
        let mut triplets = Vec::with_capacity(bases.len() * combos.len());
        for &b in &bases {
            for &(r, c, v) in &combos {
                triplets.push((b + r, b + c, v));
            }
        }
        Ok(Self::from_triplets_unchecked(registry, triplets))
    }

    pub fn ladder(registry: &Arc<ModeRegistry>, id: ModeId, kind: Ladder) -> Result<Self> {
        registry.check(id)?;
        let t = registry.truncation(id);
        let block = match kind {
            Ladder::Annihilate => dense::annihilation(t),
            Ladder::Create => dense::creation(t),
            Ladder::Number => {
                let a = dense::annihilation(t);
                a.adjoint() * a
            }
        };
        Self::embed(registry, &[LocalOp::new(registry, vec![id], block)?])
    }

    pub fn ladder_by_label(
        registry: &Arc<ModeRegistry>,
        label: &str,
        kind: Ladder,
    ) -> Result<Self> {
        Self::ladder(registry, registry.id(label)?, kind)
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn dimension(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let (lo, hi) = (self.row_ptr[row], self.row_ptr[row + 1]);
        match self.cols[lo..hi].binary_search(&col) {
            Ok(k) => self.vals[lo + k],
            Err(_) => ZERO,
        }
    }

    /// Nonzero entries ordered by `(row, col)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dimension()).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn scale(&self, c: C64) -> Self {
        if c == ZERO {
            return Self::zero(&self.registry);
        }
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= c;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let dim = self.dimension();
        let mut counts = vec![0usize; dim + 1];
        for &c in &self.cols {
            counts[c + 1] += 1;
        }
        for i in 0..dim {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; self.nnz()];
        let mut vals = vec![ZERO; self.nnz()];
        for r in 0..dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k];
                cols[next[c]] = r;
                vals[next[c]] = self.vals[k].conj();
                next[c] += 1;
            }
        }
        FockOperator {
            registry: self.registry.clone(),
            row_ptr: counts,
            cols,
            vals,
        }
    }

    /// Sum `self + c·other`.
    fn axpy(&self, c: C64, other: &Self) -> Result<Self> {
        same_registry(&self.registry, &other.registry)?;
        let dim = self.dimension();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::with_capacity(self.nnz() + other.nnz());
        let mut vals = Vec::with_capacity(self.nnz() + other.nnz());
        row_ptr.push(0);
        for r in 0..dim {
            let (mut i, ie) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let (mut j, je) = (other.row_ptr[r], other.row_ptr[r + 1]);
            while i < ie || j < je {
                let (col, v) = if j >= je || (i < ie && self.cols[i] < other.cols[j]) {
                    i += 1;
                    (self.cols[i - 1], self.vals[i - 1])
                } else if i >= ie || other.cols[j] < self.cols[i] {
                    j += 1;
                    (other.cols[j - 1], c * other.vals[j - 1])
                } else {
                    i += 1;
                    j += 1;
                    (self.cols[i - 1], self.vals[i - 1] + c * other.vals[j - 1])
                };
                if v != ZERO {
                    cols.push(col);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(FockOperator {
            registry: self.registry.clone(),
            row_ptr,
            cols,
            vals,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(ONE, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-ONE, other)
    }

    /// Operator product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        same_registry(&self.registry, &other.registry)?;
        let dim = self.dimension();
        let mut acc = vec![ZERO; dim];
        let mut seen = vec![usize::MAX; dim];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for r in 0..dim {
            touched.clear();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let (mid, a) = (self.cols[k], self.vals[k]);
                for m in other.row_ptr[mid]..other.row_ptr[mid + 1] {
                    let c = other.cols[m];
                    if seen[c] != r {
                        seen[c] = r;
                        acc[c] = ZERO;
                        touched.push(c);
                    }
                    acc[c] += a * other.vals[m];
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                if acc[c] != ZERO {
                    cols.push(c);
                    vals.push(acc[c]);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(FockOperator {
            registry: self.registry.clone(),
            row_ptr,
            cols,
            vals,
        })
    }

    /// Product of a chain of operators, leftmost first.
    pub fn product(ops: &[&FockOperator]) -> Result<Self> {
        let (first, rest) = ops
            .split_first()
            .ok_or(Error::Degenerate("empty operator product"))?;
        rest.iter()
            .try_fold((*first).clone(), |acc, op| acc.compose(op))
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        same_registry(&self.registry, &state.registry)?;
        let amplitudes = (0..self.dimension())
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.vals[k] * state.amplitudes[self.cols[k]])
                    .sum()
            })
            .collect();
        Ok(StateVector {
            registry: self.registry.clone(),
            amplitudes,
        })
    }

    /// `⟨0|A|0⟩`.
    pub fn vacuum_expectation(&self) -> C64 {
        self.get(0, 0)
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let diff = self.sub(other)?;
        Ok(diff.vals.iter().map(|v| v.norm()).fold(0.0, f64::max))
    }

    /// Dense matrix of `P†AP` where `P` selects the given basis states.
    pub fn project(&self, basis: &[usize]) -> CMatrix {
        CMatrix::from_fn(basis.len(), basis.len(), |i, j| {
            self.get(basis[i], basis[j])
        })
    }

    /// Drops entries with magnitude at or below `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        let triplets = self.triplets().filter(|t| t.2.norm() > tol).collect();
        Self::from_triplets_unchecked(&self.registry, triplets)
    }
}

/// `U† A U`.
pub fn heisenberg_evolve(u: &FockOperator, a: &FockOperator) -> Result<FockOperator> {
    u.adjoint().compose(a)?.compose(u)
}

/// `⟨0| A₁ A₂ … Aₙ |0⟩`, applying the chain right to left on the vacuum.
pub fn vacuum_expectation_chain(ops: &[&FockOperator]) -> Result<C64> {
    let first = ops
        .first()
        .ok_or(Error::Degenerate("empty operator chain"))?;
    let mut state = StateVector::vacuum(first.registry());
    for op in ops.iter().rev() {
        state = op.apply(&state)?;
    }
    Ok(state.amplitudes[0])
}

/// Two-mode squeezer block `exp(χ(u†v† − uv))` on the `(u, v)` product space.
pub fn two_mode_squeezer_block(u_truncation: usize, v_truncation: usize, chi: f64) -> CMatrix {
    let dims = [u_truncation, v_truncation];
    let u = dense::local_annihilation(&dims, 0);
    let v = dense::local_annihilation(&dims, 1);
    let generator = (u.adjoint() * v.adjoint() - &u * &v) * C64::new(chi, 0.0);
    dense::expm(&generator)
}

/// Two-mode squeezer on modes `u`, `v` of the registry.
pub fn two_mode_squeezer(
    registry: &Arc<ModeRegistry>,
    u: &str,
    v: &str,
    chi: f64,
) -> Result<FockOperator> {
    let (uid, vid) = (registry.id(u)?, registry.id(v)?);
    if uid == vid {
        return Err(Error::invalid("modes", "squeezer needs two distinct modes"));
    }
    let block = two_mode_squeezer_block(registry.truncation(uid), registry.truncation(vid), chi);
    FockOperator::embed(registry, &[LocalOp::new(registry, vec![uid, vid], block)?])
}

/// Dense amplitude vector over the basis of a registry.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    registry: Arc<ModeRegistry>,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn vacuum(registry: &Arc<ModeRegistry>) -> Self {
        let mut amplitudes = vec![ZERO; registry.dimension()];
        amplitudes[0] = ONE;
        StateVector {
            registry: registry.clone(),
            amplitudes,
        }
    }

    pub fn zero(registry: &Arc<ModeRegistry>) -> Self {
        StateVector {
            registry: registry.clone(),
            amplitudes: vec![ZERO; registry.dimension()],
        }
    }

    /// Fock basis state with the given `(mode, occupation)` pairs.
    pub fn basis(registry: &Arc<ModeRegistry>, occupied: &[(ModeId, usize)]) -> Result<Self> {
        let index = registry.index_with(occupied)?;
        let mut state = Self::zero(registry);
        state.amplitudes[index] = ONE;
        Ok(state)
    }

    pub fn from_amplitudes(registry: &Arc<ModeRegistry>, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != registry.dimension() {
            return Err(Error::DimensionMismatch {
                expected: registry.dimension(),
                found: amplitudes.len(),
            });
        }
        Ok(StateVector {
            registry: registry.clone(),
            amplitudes,
        })
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        same_registry(&self.registry, &other.registry)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        StateVector {
            registry: self.registry.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_registry(&self.registry, &other.registry)?;
        Ok(StateVector {
            registry: self.registry.clone(),
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        same_registry(&self.registry, &other.registry)?;
        for (a, b) in self.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a += b;
        }
        Ok(())
    }

    /// Applies a local block without materializing the global operator.
    pub fn apply_local(&self, op: &LocalOp) -> Result<StateVector> {
        for &id in op.modes() {
            self.registry.check(id)?;
        }
        let place = Placement::new(&self.registry, op.modes());
        let entries = op.nonzeros();
        let mut out = vec![ZERO; self.amplitudes.len()];
        for &b in &place.bases {
            for &(r, c, v) in &entries {
                out[b + place.offsets[r]] += v * self.amplitudes[b + place.offsets[c]];
            }
        }
        Ok(StateVector {
            registry: self.registry.clone(),
            amplitudes: out,
        })
    }

    /// Elementwise multiplication by a diagonal given as a function of the
    /// basis index.
    pub fn apply_diagonal<F: Fn(usize) -> C64>(&self, f: F) -> StateVector {
        StateVector {
            registry: self.registry.clone(),
            amplitudes: self
                .amplitudes
                .iter()
                .enumerate()
                .map(|(i, a)| a * f(i))
                .collect(),
        }
    }
}
