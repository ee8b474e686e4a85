//! Dual-rail qubits: Stokes operators, the matrix-to-field map and the gate
//! set.
//!
//! Computational ordering: in a multi-qubit [`GateMatrix`] the first qubit is
//! the most significant bit. Bit 0 puts the particle on rail `a`, bit 1 on
//! rail `b`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

// f64 math for no_std builds; redundant once std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::dense::{self, real, ONE, ZERO};
use crate::fock::{FockOperator, Ladder, LocalOp, ModeId, ModeRegistry};
use crate::{CMatrix, Error, Result, C64};

/// Unitarity tolerance for gate matrices.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DualRailQubit {
    pub a: ModeId,
    pub b: ModeId,
}

impl DualRailQubit {
    pub fn new(registry: &ModeRegistry, a: &str, b: &str) -> Result<Self> {
        let (a, b) = (registry.id(a)?, registry.id(b)?);
        if a == b {
            return Err(Error::RailCollision(alloc::format!(
                "both rails are `{}`",
                registry.label(a)
            )));
        }
        Ok(DualRailQubit { a, b })
    }

    fn rail(&self, bit: usize) -> ModeId {
        if bit == 0 {
            self.a
        } else {
            self.b
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stokes {
    I,
    X,
    Y,
    Z,
}

/// Local block for `x† y` (number operator when `x == y`).
fn bilinear_factor(registry: &ModeRegistry, x: ModeId, y: ModeId) -> Result<LocalOp> {
    if x == y {
        let a = dense::annihilation(registry.truncation(x));
        LocalOp::new(registry, vec![x], a.adjoint() * a)
    } else {
        let block = dense::kron(
            &dense::creation(registry.truncation(x)),
            &dense::annihilation(registry.truncation(y)),
        );
        LocalOp::new(registry, vec![x, y], block)
    }
}

/// `x† y` as a global operator.
pub fn bilinear(registry: &Arc<ModeRegistry>, x: ModeId, y: ModeId) -> Result<FockOperator> {
    FockOperator::embed(registry, &[bilinear_factor(registry, x, y)?])
}

pub fn stokes_operator(
    q: DualRailQubit,
    which: Stokes,
    registry: &Arc<ModeRegistry>,
) -> Result<FockOperator> {
    let m = match which {
        Stokes::I => GateMatrix::identity(1),
        Stokes::X => GateMatrix::pauli_x(),
        Stokes::Y => GateMatrix::pauli_y(),
        Stokes::Z => GateMatrix::pauli_z(),
    };
    matrix_to_field(&m, &[q], registry)
}

/// Dense `2ⁿ × 2ⁿ` matrix on the computational space of `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct GateMatrix {
    n_qubits: usize,
    matrix: CMatrix,
}

impl GateMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if !matrix.is_square() || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::invalid(
                "matrix",
                alloc::format!(
                    "gate matrix must be square with power-of-two size, got {}x{}",
                    matrix.nrows(),
                    matrix.ncols()
                ),
            ));
        }
        Ok(GateMatrix {
            n_qubits: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    fn from_rows(n: usize, rows: &[C64]) -> Self {
        GateMatrix::new(CMatrix::from_row_slice(n, n, rows)).expect("static gate")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn identity(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        GateMatrix {
            n_qubits,
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn pauli_x() -> Self {
        Self::from_rows(2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn pauli_y() -> Self {
        let i = C64::new(0.0, 1.0);
        Self::from_rows(2, &[ZERO, -i, i, ZERO])
    }

    pub fn pauli_z() -> Self {
        Self::from_rows(2, &[ONE, ZERO, ZERO, -ONE])
    }

    /// `(Z + X)/√2`.
    pub fn hadamard() -> Self {
        let h = real(core::f64::consts::FRAC_1_SQRT_2);
        Self::from_rows(2, &[h, h, h, -h])
    }

    /// `cos θ · I + i sin θ · Z`.
    pub fn z_rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_rows(2, &[C64::new(c, s), ZERO, ZERO, C64::new(c, -s)])
    }

    /// `[[√(1−α²), −α], [α, √(1−α²)]]`.
    pub fn u_s(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::invalid(
                "alpha",
                alloc::format!("{alpha} outside [0, 1]"),
            ));
        }
        let c = (1.0 - alpha * alpha).max(0.0).sqrt();
        Ok(Self::from_rows(
            2,
            &[real(c), real(-alpha), real(alpha), real(c)],
        ))
    }

    /// `diag(1, 1, 1, −1)`.
    pub fn csign() -> Self {
        let mut m = CMatrix::identity(4, 4);
        m[(3, 3)] = -ONE;
        GateMatrix {
            n_qubits: 2,
            matrix: m,
        }
    }

    /// Controlled-NOT with the first qubit as control.
    pub fn cnot() -> Self {
        Self::from_rows(
            4,
            &[
                ONE, ZERO, ZERO, ZERO, //
                ZERO, ONE, ZERO, ZERO, //
                ZERO, ZERO, ZERO, ONE, //
                ZERO, ZERO, ONE, ZERO,
            ],
        )
    }

    pub fn kron(&self, other: &GateMatrix) -> GateMatrix {
        GateMatrix {
            n_qubits: self.n_qubits + other.n_qubits,
            matrix: dense::kron(&self.matrix, &other.matrix),
        }
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &GateMatrix) -> Result<GateMatrix> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(GateMatrix {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn adjoint(&self) -> GateMatrix {
        GateMatrix {
            n_qubits: self.n_qubits,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn unitarity_defect(&self) -> f64 {
        dense::unitarity_defect(&self.matrix)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= UNITARY_TOL
    }
}

/// Field operator `Σ_{r,s} M_{rs} Π_k R(r_k)† R(s_k)` of a gate matrix on
/// the given qubits, first qubit most significant.
pub fn matrix_to_field(
    m: &GateMatrix,
    qubits: &[DualRailQubit],
    registry: &Arc<ModeRegistry>,
) -> Result<FockOperator> {
    if qubits.len() != m.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: m.n_qubits,
            found: qubits.len(),
        });
    }
    check_distinct_rails(qubits, registry)?;
    let n = qubits.len();
    let dim = 1usize << n;
    let mut total = FockOperator::zero(registry);
    for r in 0..dim {
        for s in 0..dim {
            let coeff = m.matrix[(r, s)];
            if coeff == ZERO {
                continue;
            }
            let factors = qubits
                .iter()
                .enumerate()
                .map(|(k, q)| {
                    let shift = n - 1 - k;
                    bilinear_factor(registry, q.rail((r >> shift) & 1), q.rail((s >> shift) & 1))
                })
                .collect::<Result<Vec<_>>>()?;
            let term = FockOperator::embed(registry, &factors)?;
            total = total.add(&term.scale(coeff))?;
        }
    }
    Ok(total)
}

fn check_distinct_rails(qubits: &[DualRailQubit], registry: &ModeRegistry) -> Result<()> {
    let mut seen: Vec<ModeId> = Vec::new();
    for q in qubits {
        for id in [q.a, q.b] {
            if seen.contains(&id) {
                return Err(Error::RailCollision(alloc::format!(
                    "mode `{}` used by two rails",
                    registry.label(id)
                )));
            }
            seen.push(id);
        }
    }
    Ok(())
}

/// `1 − 2 n_{b1} n_{b2}`.
pub fn csign_field(
    q1: DualRailQubit,
    q2: DualRailQubit,
    registry: &Arc<ModeRegistry>,
) -> Result<FockOperator> {
    check_distinct_rails(&[q1, q2], registry)?;
    let (b1, b2) = (q1.b, q2.b);
    Ok(FockOperator::diagonal(registry, |i| {
        let n = registry.occupation(i, b1) * registry.occupation(i, b2);
        real(1.0 - 2.0 * n as f64)
    }))
}

/// Cross-Kerr unitary `exp(−iπ n_{b1} n_{b2})`.
pub fn kerr_csign(
    q1: DualRailQubit,
    q2: DualRailQubit,
    registry: &Arc<ModeRegistry>,
) -> Result<FockOperator> {
    check_distinct_rails(&[q1, q2], registry)?;
    Ok(kerr_on(q1.b, q2.b, registry))
}

pub(crate) fn kerr_on(b1: ModeId, b2: ModeId, registry: &Arc<ModeRegistry>) -> FockOperator {
    FockOperator::diagonal(registry, |i| {
        let n = registry.occupation(i, b1) * registry.occupation(i, b2);
        if n % 2 == 0 {
            ONE
        } else {
            -ONE
        }
    })
}

/// Passive linear-optics unitary `exp(Σ L_xy x† y)` with `exp(L) = m`; on
/// single-particle states over `modes` it acts as `m`.
pub fn passive_unitary(
    registry: &Arc<ModeRegistry>,
    modes: &[ModeId],
    m: &CMatrix,
) -> Result<LocalOp> {
    if m.nrows() != modes.len() {
        return Err(Error::DimensionMismatch {
            expected: modes.len(),
            found: m.nrows(),
        });
    }
    let log = dense::unitary_log(m)?;
    let truncations: Vec<usize> = modes.iter().map(|&id| registry.truncation(id)).collect();
    let ladders: Vec<CMatrix> = (0..modes.len())
        .map(|k| dense::local_annihilation(&truncations, k))
        .collect();
    let dim = ladders[0].nrows();
    let mut generator = CMatrix::zeros(dim, dim);
    for x in 0..modes.len() {
        for y in 0..modes.len() {
            if log[(x, y)] != ZERO {
                generator += ladders[x].adjoint() * &ladders[y] * log[(x, y)];
            }
        }
    }
    LocalOp::new(registry, modes.to_vec(), dense::expm(&generator))
}

/// Basis indices of the one-particle-per-qubit subspace in computational
/// order, all other modes empty.
pub fn qubit_subspace_basis(
    qubits: &[DualRailQubit],
    registry: &ModeRegistry,
) -> Result<Vec<usize>> {
    check_distinct_rails(qubits, registry)?;
    let n = qubits.len();
    (0..1usize << n)
        .map(|bits| {
            let occ: Vec<(ModeId, usize)> = qubits
                .iter()
                .enumerate()
                .map(|(k, q)| (q.rail((bits >> (n - 1 - k)) & 1), 1))
                .collect();
            registry.index_with(&occ)
        })
        .collect()
}

/// Ladder helper for callers that only hold a qubit.
pub fn rail_number(registry: &Arc<ModeRegistry>, rail: ModeId) -> Result<FockOperator> {
    FockOperator::ladder(registry, rail, Ladder::Number)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::max_abs_diff;

    fn setup(n: usize) -> (Arc<ModeRegistry>, Vec<DualRailQubit>) {
        let mut r = ModeRegistry::new();
        let mut labels = Vec::new();
        for k in 0..n {
            labels.push((alloc::format!("a{k}"), alloc::format!("b{k}")));
        }
        for (a, b) in &labels {
            r.register(a, 2).unwrap();
            r.register(b, 2).unwrap();
        }
        let qs = labels
            .iter()
            .map(|(a, b)| DualRailQubit::new(&r, a, b).unwrap())
            .collect();
        (Arc::new(r), qs)
    }

    #[test]
    fn z_eigenvalues() {
        let (r, q) = setup(1);
        let z = stokes_operator(q[0], Stokes::Z, &r).unwrap();
        let basis = qubit_subspace_basis(&q, &r).unwrap();
        assert_eq!(z.get(basis[0], basis[0]), ONE);
        assert_eq!(z.get(basis[1], basis[1]), -ONE);
    }

    #[test]
    fn identity_is_total_number() {
        let (r, q) = setup(1);
        let i = stokes_operator(q[0], Stokes::I, &r).unwrap();
        let n = rail_number(&r, q[0].a)
            .unwrap()
            .add(&rail_number(&r, q[0].b).unwrap())
            .unwrap();
        assert_eq!(i.max_abs_diff(&n).unwrap(), 0.0);
    }

    #[test]
    fn y_follows_field_convention() {
        let (r, q) = setup(1);
        let y = stokes_operator(q[0], Stokes::Y, &r).unwrap();
        let i = C64::new(0.0, 1.0);
        let expected = bilinear(&r, q[0].b, q[0].a)
            .unwrap()
            .scale(i)
            .sub(&bilinear(&r, q[0].a, q[0].b).unwrap().scale(i))
            .unwrap();
        assert_eq!(y.max_abs_diff(&expected).unwrap(), 0.0);
    }

    #[test]
    fn csign_matrix_matches_field() {
        let (r, q) = setup(2);
        let basis = qubit_subspace_basis(&q, &r).unwrap();
        let from_matrix = matrix_to_field(&GateMatrix::csign(), &q, &r)
            .unwrap()
            .project(&basis);
        let field = csign_field(q[0], q[1], &r).unwrap().project(&basis);
        let kerr = kerr_csign(q[0], q[1], &r).unwrap().project(&basis);
        assert!(max_abs_diff(&from_matrix, &field) < 1e-15);
        assert!(max_abs_diff(&kerr, &field) < 1e-15);
        assert!(max_abs_diff(&field, GateMatrix::csign().matrix()) < 1e-15);
    }

    #[test]
    fn csign_is_identity_without_particles() {
        let (r, q) = setup(2);
        let c = csign_field(q[0], q[1], &r).unwrap();
        let only_b1 = r.index_with(&[(q[0].b, 1)]).unwrap();
        assert_eq!(c.get(only_b1, only_b1), ONE);
        assert_eq!(c.get(0, 0), ONE);
    }

    #[test]
    fn rail_collisions() {
        let (r, q) = setup(1);
        assert!(matches!(
            csign_field(q[0], q[0], &r),
            Err(Error::RailCollision(_))
        ));
        assert!(DualRailQubit::new(&r, "a0", "a0").is_err());
    }

    #[test]
    fn standard_gate_examples() {
        let h = GateMatrix::hadamard();
        assert!(max_abs_diff(h.mul(&h).unwrap().matrix(), &CMatrix::identity(2, 2)) < 1e-15);
        let z = GateMatrix::z_rotation(core::f64::consts::FRAC_PI_2);
        let iz = GateMatrix::pauli_z().matrix() * C64::new(0.0, 1.0);
        assert!(max_abs_diff(z.matrix(), &iz) < 1e-15);
        assert!(GateMatrix::u_s(1.5).is_err());
        let alpha: f64 = 0.6;
        let us = GateMatrix::u_s(alpha)
            .unwrap()
            .kron(&GateMatrix::identity(1));
        let bell = GateMatrix::cnot().mul(&us).unwrap();
        let col = bell.matrix().column(0);
        let expected = [(1.0 - alpha * alpha).sqrt(), 0.0, 0.0, alpha];
        for k in 0..4 {
            assert!((col[k] - real(expected[k])).norm() < 1e-15);
        }
    }

    #[test]
    fn passive_hadamard_acts_as_matrix_on_one_particle() {
        let (r, q) = setup(1);
        let u = passive_unitary(&r, &[q[0].a, q[0].b], GateMatrix::hadamard().matrix()).unwrap();
        let full = FockOperator::embed(&r, &[u]).unwrap();
        let basis = qubit_subspace_basis(&q, &r).unwrap();
        assert!(max_abs_diff(&full.project(&basis), GateMatrix::hadamard().matrix()) < 1e-12);
    }
}
