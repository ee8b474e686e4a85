//! Matched/orthogonal splitting of a mismatched qubit and the 8×8 block
//! system.
//!
//! Block basis order is `{a₁b₁, cd} ⊗ {a₂b₂}`: index = `block·4 + q₁·2 + q₂`,
//! where block 0 holds the rails matched to the gate's reference amplitude
//! and block 1 the auxiliary orthogonal rails `c`, `d`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

// f64 math for no_std builds; redundant once std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::circuit::{circuit_unitary, Gate};
use crate::dense::{self, real};
use crate::fock::{FockOperator, LocalOp, ModeId, ModeRegistry};
use crate::qubit::{matrix_to_field, DualRailQubit, GateMatrix};
use crate::{CMatrix, Error, Result};

/// Qubit 1 split into matched rails `(a, b)` and orthogonal rails `(c, d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeDecomposition {
    pub matched: DualRailQubit,
    pub orthogonal: DualRailQubit,
    pub xi: f64,
}

fn check_xi(xi: f64) -> Result<()> {
    if (0.0..=1.0).contains(&xi) {
        Ok(())
    } else {
        Err(Error::invalid("xi", alloc::format!("{xi} outside [0, 1]")))
    }
}

impl ModeDecomposition {
    pub fn new(
        registry: &ModeRegistry,
        matched: DualRailQubit,
        orthogonal: DualRailQubit,
        xi: f64,
    ) -> Result<Self> {
        check_xi(xi)?;
        let rails = [matched.a, matched.b, orthogonal.a, orthogonal.b];
        for k in 0..4 {
            if rails[..k].contains(&rails[k]) {
                return Err(Error::RailCollision(alloc::format!(
                    "mode `{}` is both matched and orthogonal",
                    registry.label(rails[k])
                )));
            }
        }
        Ok(ModeDecomposition {
            matched,
            orthogonal,
            xi,
        })
    }

    /// Local rotation blocks on `(a, c)` and `(b, d)`.
    pub fn rotation_factors(&self, registry: &ModeRegistry) -> Result<[LocalOp; 2]> {
        let theta = self.xi.sqrt().min(1.0).acos();
        let pair = |x: ModeId, y: ModeId| -> Result<LocalOp> {
            let tr = [registry.truncation(x), registry.truncation(y)];
            let ax = dense::local_annihilation(&tr, 0);
            let ay = dense::local_annihilation(&tr, 1);
            let g = (ax.adjoint() * &ay - ay.adjoint() * &ax) * real(theta);
            LocalOp::new(registry, vec![x, y], dense::expm(&g))
        };
        Ok([
            pair(self.matched.a, self.orthogonal.a)?,
            pair(self.matched.b, self.orthogonal.b)?,
        ])
    }
}

/// The 8×8 rotation `[[√ξ I, √(1−ξ) I], [−√(1−ξ) I, √ξ I]]`.
pub fn rotation_matrix(xi: f64) -> Result<CMatrix> {
    check_xi(xi)?;
    let (s, c) = ((1.0 - xi).sqrt(), xi.sqrt());
    Ok(CMatrix::from_fn(8, 8, |r, col| {
        if r % 4 != col % 4 {
            return dense::ZERO;
        }
        real(match (r / 4, col / 4) {
            (0, 0) | (1, 1) => c,
            (0, 1) => s,
            _ => -s,
        })
    }))
}

/// Fock realization `exp(θ(a†c − c†a)) exp(θ(b†d − d†b))` with `cos θ = √ξ`,
/// together with the 8×8 matrix form.
pub fn rotation_unitary(
    dec: &ModeDecomposition,
    registry: &Arc<ModeRegistry>,
) -> Result<(FockOperator, CMatrix)> {
    let op = FockOperator::embed(registry, &dec.rotation_factors(registry)?)?;
    Ok((op, rotation_matrix(dec.xi)?))
}

/// The circuit as seen by the orthogonal rails: every c-sign becomes the
/// identity, single-qubit gates are kept.
pub fn orthogonal_circuit(gates: &[Gate]) -> Result<Vec<Gate>> {
    gates
        .iter()
        .map(|g| match g {
            Gate::CSign(a, b) => Ok(Gate::Identity(vec![*a, *b])),
            Gate::Custom { qubits, .. } if qubits.len() > 1 => {
                Err(Error::Unsupported(alloc::format!(
                    "{}: multi-qubit custom gates have no defined orthogonal-mode action",
                    g.name()
                )))
            }
            other => Ok(other.clone()),
        })
        .collect()
}

/// Matched and orthogonal 4×4 blocks plus the rotation that feeds them.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockCircuit {
    pub matched: GateMatrix,
    pub orthogonal: GateMatrix,
    pub rotation: CMatrix,
}

impl BlockCircuit {
    /// `diag(U_C, U′_C)`.
    pub fn block_diagonal(&self) -> CMatrix {
        dense::direct_sum(self.matched.matrix(), self.orthogonal.matrix())
    }

    /// `Ū_sys = diag(U_C, U′_C) · Ū_r`.
    pub fn system(&self) -> CMatrix {
        self.block_diagonal() * &self.rotation
    }
}

pub fn build_block_system(gates: &[Gate], xi: f64) -> Result<BlockCircuit> {
    let matched = circuit_unitary(gates, 2)?;
    let orthogonal = circuit_unitary(&orthogonal_circuit(gates)?, 2)?;
    Ok(BlockCircuit {
        matched,
        orthogonal,
        rotation: rotation_matrix(xi)?,
    })
}

/// `J̄₁K̄₂ = (J⊗K) ⊕ (J⊗K)`.
pub fn lift_observable(j: &GateMatrix, k: &GateMatrix) -> Result<CMatrix> {
    if j.n_qubits() != 1 || k.n_qubits() != 1 {
        return Err(Error::invalid(
            "observable",
            "lifted factors must be single-qubit",
        ));
    }
    let jk = j.kron(k);
    Ok(dense::direct_sum(jk.matrix(), jk.matrix()))
}

/// Field form: `J` acts on both the matched and the orthogonal rails of
/// qubit 1, `K` on qubit 2.
pub fn lift_observable_field(
    j: &GateMatrix,
    k: &GateMatrix,
    dec: &ModeDecomposition,
    partner: DualRailQubit,
    registry: &Arc<ModeRegistry>,
) -> Result<FockOperator> {
    let jk = j.kron(k);
    matrix_to_field(&jk, &[dec.matched, partner], registry)?.add(&matrix_to_field(
        &jk,
        &[dec.orthogonal, partner],
        registry,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::cnot_decomposition;
    use crate::dense::max_abs_diff;
    use crate::fock::{heisenberg_evolve, Ladder};

    fn registry() -> (Arc<ModeRegistry>, ModeDecomposition, DualRailQubit) {
        let r =
            ModeRegistry::with_modes(["a1", "b1", "c", "d", "a2", "b2"].iter().map(|l| (*l, 2)))
                .unwrap();
        let m = DualRailQubit::new(&r, "a1", "b1").unwrap();
        let o = DualRailQubit::new(&r, "c", "d").unwrap();
        let q2 = DualRailQubit::new(&r, "a2", "b2").unwrap();
        let dec = ModeDecomposition::new(&r, m, o, 0.5).unwrap();
        (Arc::new(r), dec, q2)
    }

    #[test]
    fn rotation_is_orthogonal() {
        for xi in [0.0, 0.3, 1.0] {
            let u = rotation_matrix(xi).unwrap();
            assert!(dense::unitarity_defect(&u) < 1e-12);
        }
        assert!(max_abs_diff(&rotation_matrix(1.0).unwrap(), &CMatrix::identity(8, 8)) == 0.0);
        assert!(rotation_matrix(1.5).is_err());
    }

    #[test]
    fn fock_rotation_heisenberg_map() {
        let (r, dec, _) = registry();
        let (u, _) = rotation_unitary(&dec, &r).unwrap();
        let a1 = FockOperator::ladder_by_label(&r, "a1", Ladder::Annihilate).unwrap();
        let c = FockOperator::ladder_by_label(&r, "c", Ladder::Annihilate).unwrap();
        let evolved = heisenberg_evolve(&u, &a1).unwrap();
        let s = 0.5f64.sqrt();
        let expected = a1.scale(real(s)).add(&c.scale(real(s))).unwrap();
        // compare on states with at most one particle in (a1, c)
        let occ_ok =
            |i: usize| r.occupation(i, dec.matched.a) + r.occupation(i, dec.orthogonal.a) <= 1;
        let diff = evolved.sub(&expected).unwrap();
        for (row, col, v) in diff.triplets() {
            if occ_ok(row) && occ_ok(col) {
                assert!(v.norm() < 1e-10, "({row},{col}) {v}");
            }
        }
    }

    #[test]
    fn orthogonal_cnot_is_identity() {
        let gates = cnot_decomposition(0, 1);
        let orth = orthogonal_circuit(&gates).unwrap();
        assert_eq!(orth[1], Gate::Identity(vec![0, 1]));
        let u = circuit_unitary(&orth, 2).unwrap();
        assert!(max_abs_diff(u.matrix(), &CMatrix::identity(4, 4)) < 1e-12);
        assert_eq!(
            orthogonal_circuit(&[Gate::CSign(0, 1)]).unwrap(),
            vec![Gate::Identity(vec![0, 1])]
        );
    }

    #[test]
    fn block_system_special_cases() {
        let gates = cnot_decomposition(0, 1);
        let sys = build_block_system(&gates, 1.0).unwrap();
        assert!(max_abs_diff(&sys.system(), &sys.block_diagonal()) < 1e-15);
        let ident = build_block_system(&[], 0.3).unwrap();
        assert!(max_abs_diff(&ident.system(), &rotation_matrix(0.3).unwrap()) < 1e-15);
    }

    #[test]
    fn lifted_observable_forms() {
        let i = GateMatrix::identity(1);
        assert_eq!(lift_observable(&i, &i).unwrap(), CMatrix::identity(8, 8));
        let (r, dec, q2) = registry();
        let x = GateMatrix::pauli_x();
        let field = crate::qubit::stokes_operator(dec.matched, crate::qubit::Stokes::X, &r)
            .unwrap()
            .add(
                &crate::qubit::stokes_operator(dec.orthogonal, crate::qubit::Stokes::X, &r)
                    .unwrap(),
            )
            .unwrap();
        let lifted = lift_observable_field(&x, &i, &dec, q2, &r).unwrap();
        // equal once qubit 2 holds one particle
        let n2 = crate::qubit::stokes_operator(q2, crate::qubit::Stokes::I, &r).unwrap();
        let expected = field.compose(&n2).unwrap();
        assert!(lifted.max_abs_diff(&expected).unwrap() < 1e-15);
    }
}
