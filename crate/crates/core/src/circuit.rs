//! Gate descriptors and their composition on the computational space.
//!
//! Qubit indices are 0-based; qubit 0 is the most significant bit.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::qubit::GateMatrix;
use crate::{CMatrix, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Hadamard(usize),
    ZRotation {
        qubit: usize,
        theta: f64,
    },
    /// State-preparation rotation `u_s(α)`.
    Us {
        qubit: usize,
        alpha: f64,
    },
    CSign(usize, usize),
    Identity(Vec<usize>),
    Custom {
        qubits: Vec<usize>,
        matrix: CMatrix,
    },
}

impl Gate {
    pub fn name(&self) -> String {
        match self {
            Gate::Hadamard(q) => alloc::format!("h[{q}]"),
            Gate::ZRotation { qubit, theta } => alloc::format!("zrot({theta})[{qubit}]"),
            Gate::Us { qubit, alpha } => alloc::format!("us({alpha})[{qubit}]"),
            Gate::CSign(a, b) => alloc::format!("csign[{a},{b}]"),
            Gate::Identity(qs) => alloc::format!("identity{qs:?}"),
            Gate::Custom { qubits, .. } => alloc::format!("custom{qubits:?}"),
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Hadamard(q) => vec![*q],
            Gate::ZRotation { qubit, .. } | Gate::Us { qubit, .. } => vec![*qubit],
            Gate::CSign(a, b) => vec![*a, *b],
            Gate::Identity(qs) => qs.clone(),
            Gate::Custom { qubits, .. } => qubits.clone(),
        }
    }

    pub fn is_csign(&self) -> bool {
        matches!(self, Gate::CSign(..))
    }

    /// Matrix on the gate's own qubits, in the order of [`Gate::qubits`].
    pub fn matrix(&self) -> Result<GateMatrix> {
        let m = match self {
            Gate::Hadamard(_) => GateMatrix::hadamard(),
            Gate::ZRotation { theta, .. } => GateMatrix::z_rotation(*theta),
            Gate::Us { alpha, .. } => GateMatrix::u_s(*alpha)?,
            Gate::CSign(..) => GateMatrix::csign(),
            Gate::Identity(qs) => GateMatrix::identity(qs.len()),
            Gate::Custom { qubits, matrix } => {
                let m = GateMatrix::new(matrix.clone())?;
                if m.n_qubits() != qubits.len() {
                    return Err(Error::DimensionMismatch {
                        expected: 1 << qubits.len(),
                        found: matrix.nrows(),
                    });
                }
                m
            }
        };
        let defect = m.unitarity_defect();
        if defect > crate::qubit::UNITARY_TOL {
            return Err(Error::NonUnitary {
                gate: self.name(),
                defect,
            });
        }
        Ok(m)
    }

    /// Checks qubit indices against the register size.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for (k, &q) in qs.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::invalid(
                    "gate",
                    alloc::format!(
                        "{} targets qubit {q} of a {n_qubits}-qubit register",
                        self.name()
                    ),
                ));
            }
            if qs[..k].contains(&q) {
                return Err(Error::invalid(
                    "gate",
                    alloc::format!("{} repeats qubit {q}", self.name()),
                ));
            }
        }
        self.matrix().map(|_| ())
    }

    /// Full `2ⁿ × 2ⁿ` matrix on an `n_qubits` register.
    pub fn full_matrix(&self, n_qubits: usize) -> Result<CMatrix> {
        self.validate(n_qubits)?;
        Ok(embed_on(self.matrix()?.matrix(), &self.qubits(), n_qubits))
    }
}

/// Embeds a `k`-qubit matrix acting on `targets` into an `n`-qubit register.
pub fn embed_on(local: &CMatrix, targets: &[usize], n: usize) -> CMatrix {
    let dim = 1usize << n;
    let k = targets.len();
    let bit = |index: usize, q: usize| (index >> (n - 1 - q)) & 1;
    let sub = |index: usize| {
        targets
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | bit(index, q))
    };
    let mask: usize = targets.iter().map(|&q| 1usize << (n - 1 - q)).sum();
    debug_assert_eq!(local.nrows(), 1 << k);
    CMatrix::from_fn(dim, dim, |r, c| {
        if r & !mask == c & !mask {
            local[(sub(r), sub(c))]
        } else {
            crate::dense::ZERO
        }
    })
}

/// `G_last ⋯ G_first` on an `n_qubits` register.
pub fn circuit_unitary(gates: &[Gate], n_qubits: usize) -> Result<GateMatrix> {
    let mut total = CMatrix::identity(1 << n_qubits, 1 << n_qubits);
    for g in gates {
        total = g.full_matrix(n_qubits)? * total;
    }
    GateMatrix::new(total)
}

/// Controlled-NOT from qubit `control` to `target` built as `H·csign·H`.
pub fn cnot_decomposition(control: usize, target: usize) -> Vec<Gate> {
    vec![
        Gate::Hadamard(target),
        Gate::CSign(control, target),
        Gate::Hadamard(target),
    ]
}
