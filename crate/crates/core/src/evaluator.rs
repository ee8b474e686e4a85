//! Expectation values against the global vacuum, by two independent routes:
//! the 8×8 block rule and a full Fock-space construction.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{cnot_decomposition, Gate};
use crate::fock::{heisenberg_evolve, FockOperator, LocalOp, ModeRegistry, StateVector};
use crate::mismatch::{build_block_system, lift_observable};
use crate::qubit::{kerr_on, matrix_to_field, passive_unitary, DualRailQubit, GateMatrix};
use crate::source::{heralded_moments, SourceParams};
use crate::{Error, Result};

// f64 math for no_std builds; redundant once std is linked
#[allow(unused_imports)]
use num_traits::Float;

/// Largest Fock registry the evaluator will build.
pub const FOCK_DIMENSION_LIMIT: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum SourceModel {
    /// Exact one-particle creation `a†` on each a-rail.
    Ideal,
    /// Each a-rail fed by an independent heralded source.
    Mbc {
        params: SourceParams,
        truncation: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitSpec {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    /// Mismatch of qubit 0 against the gates' reference amplitude.
    pub xi: f64,
    pub source: SourceModel,
    /// One single-qubit factor per qubit.
    pub observable: Vec<GateMatrix>,
}

impl CircuitSpec {
    /// `u_s(α)` on qubit 0, then a c-not built as `H·csign·H` on qubit 1,
    /// observing `I ⊗ Z`.
    pub fn cnot_example(alpha: f64, xi: f64) -> Self {
        let mut gates = vec![Gate::Us { qubit: 0, alpha }];
        gates.extend(cnot_decomposition(0, 1));
        CircuitSpec {
            n_qubits: 2,
            gates,
            xi,
            source: SourceModel::Ideal,
            observable: vec![GateMatrix::identity(1), GateMatrix::pauli_z()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::invalid("n_qubits", "need at least one qubit"));
        }
        if !(0.0..=1.0).contains(&self.xi) {
            return Err(Error::invalid(
                "xi",
                alloc::format!("{} outside [0, 1]", self.xi),
            ));
        }
        for g in &self.gates {
            g.validate(self.n_qubits)?;
        }
        if self.observable.len() != self.n_qubits {
            return Err(Error::invalid(
                "observable",
                alloc::format!(
                    "{} factors for {} qubits",
                    self.observable.len(),
                    self.n_qubits
                ),
            ));
        }
        if self.observable.iter().any(|m| m.n_qubits() != 1) {
            return Err(Error::invalid(
                "observable",
                "factors must be single-qubit matrices",
            ));
        }
        if let SourceModel::Mbc { params, .. } = &self.source {
            params.validate()?;
        }
        Ok(())
    }
}

/// Real part of the top-left entry of `Ū_sys† (J̄ K̄) Ū_sys`.
pub fn evaluate_block(spec: &CircuitSpec) -> Result<f64> {
    if spec.n_qubits != 2 {
        return Err(Error::Unsupported(alloc::format!(
            "block evaluation needs exactly two qubits, got {}",
            spec.n_qubits
        )));
    }
    if spec.source != SourceModel::Ideal {
        return Err(Error::Unsupported(
            "block evaluation assumes ideal sources".into(),
        ));
    }
    spec.validate()?;
    let sys = build_block_system(&spec.gates, spec.xi)?.system();
    let obs = lift_observable(&spec.observable[0], &spec.observable[1])?;
    let m = sys.adjoint() * obs * &sys;
    // the input is the single basis state 0, so every other entry of the
    // first row and column pairs it with an orthogonal state; the observable
    // must stay Hermitian for the read-off to be a real expectation value
    if cfg!(debug_assertions) {
        let skew = crate::dense::max_abs_diff(&m, &m.adjoint());
        if skew > 1e-10 {
            return Err(Error::NumericalFailure(alloc::format!(
                "evolved observable is not Hermitian (defect {skew:.3e})"
            )));
        }
    }
    Ok(m[(0, 0)].re)
}

/// The circuit realized on a Fock registry.
pub struct FockCircuit {
    pub registry: Arc<ModeRegistry>,
    pub qubits: Vec<DualRailQubit>,
    /// Orthogonal rails of each qubit that carries a mismatch.
    pub orthogonal: Vec<Option<DualRailQubit>>,
    /// Schrödinger-picture unitary of rotation plus gates.
    pub unitary: FockOperator,
    /// Lifted observable before evolution.
    pub observable: FockOperator,
}

impl FockCircuit {
    /// `U† O U`.
    pub fn heisenberg_observable(&self) -> Result<FockOperator> {
        heisenberg_evolve(&self.unitary, &self.observable)
    }

    /// Basis index with `occupations[k]` particles on the a-rail of qubit k.
    pub fn input_index(&self, occupations: &[usize]) -> Result<usize> {
        let occ: Vec<_> = self
            .qubits
            .iter()
            .zip(occupations)
            .map(|(q, &m)| (q.a, m))
            .collect();
        self.registry.index_with(&occ)
    }
}

/// Builds the Fock realization; `xis[k]` splits qubit `k` into matched and
/// orthogonal rails.
pub fn build_fock_circuit(
    n_qubits: usize,
    gates: &[Gate],
    xis: &[Option<f64>],
    observable: &[GateMatrix],
    truncation: usize,
) -> Result<FockCircuit> {
    let rails: usize = xis.iter().map(|x| if x.is_some() { 4 } else { 2 }).sum();
    let dimension = (truncation as u128 + 1).saturating_pow(rails as u32);
    if dimension > FOCK_DIMENSION_LIMIT {
        return Err(Error::DimensionGuard {
            dimension,
            limit: FOCK_DIMENSION_LIMIT,
        });
    }
    let mut reg = ModeRegistry::new();
    let mut labels = Vec::new();
    for (k, xi) in xis.iter().enumerate() {
        let a = alloc::format!("a{k}");
        let b = alloc::format!("b{k}");
        reg.register(&a, truncation)?;
        reg.register(&b, truncation)?;
        let orth = if xi.is_some() {
            let c = alloc::format!("c{k}");
            let d = alloc::format!("d{k}");
            reg.register(&c, truncation)?;
            reg.register(&d, truncation)?;
            Some((c, d))
        } else {
            None
        };
        labels.push((a, b, orth));
    }
    let registry = Arc::new(reg);
    let mut qubits = Vec::new();
    let mut orthogonal = Vec::new();
    for (a, b, orth) in &labels {
        qubits.push(DualRailQubit::new(&registry, a, b)?);
        orthogonal.push(match orth {
            Some((c, d)) => Some(DualRailQubit::new(&registry, c, d)?),
            None => None,
        });
    }

    let mut unitary = FockOperator::identity(&registry);
    for (k, xi) in xis.iter().enumerate() {
        if let (Some(xi), Some(orth)) = (xi, orthogonal[k]) {
            let dec = crate::mismatch::ModeDecomposition::new(&registry, qubits[k], orth, *xi)?;
            let rot = FockOperator::embed(&registry, &dec.rotation_factors(&registry)?)?;
            unitary = rot.compose(&unitary)?;
        }
    }
    for g in gates {
        g.validate(n_qubits)?;
        let step = match g {
            Gate::Identity(_) => continue,
            Gate::CSign(x, y) => kerr_on(qubits[*x].b, qubits[*y].b, &registry),
            Gate::Custom { qubits: qs, .. } if qs.len() > 1 => {
                return Err(Error::Unsupported(alloc::format!(
                    "{} has no Fock realization; decompose it into single-qubit gates and c-signs",
                    g.name()
                )))
            }
            _ => {
                let q = g.qubits()[0];
                let m = g.matrix()?;
                let mut factors: Vec<LocalOp> = vec![passive_unitary(
                    &registry,
                    &[qubits[q].a, qubits[q].b],
                    m.matrix(),
                )?];
                if let Some(o) = orthogonal[q] {
                    factors.push(passive_unitary(&registry, &[o.a, o.b], m.matrix())?);
                }
                FockOperator::embed(&registry, &factors)?
            }
        };
        unitary = step.compose(&unitary)?;
    }

    let mut obs = FockOperator::identity(&registry);
    for (k, j) in observable.iter().enumerate() {
        let mut factor = matrix_to_field(j, &[qubits[k]], &registry)?;
        if let Some(o) = orthogonal[k] {
            factor = factor.add(&matrix_to_field(j, &[o], &registry)?)?;
        }
        obs = obs.compose(&factor)?;
    }
    Ok(FockCircuit {
        registry,
        qubits,
        orthogonal,
        unitary,
        observable: obs,
    })
}

/// Detail of a Fock-path evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct FockEvaluation {
    /// Expectation value per delivered particle pair (equal to `raw` for
    /// ideal sources).
    pub value: f64,
    /// Vacuum expectation with the heralded modes substituted.
    pub raw: f64,
    /// `⟨A_P†^j A_P^j⟩`, `j = 0..=truncation` (ideal: `[1, 1, 0, …]`).
    pub moments: Vec<f64>,
}

pub fn evaluate_fock(spec: &CircuitSpec, truncation: usize) -> Result<f64> {
    Ok(evaluate_fock_detailed(spec, truncation)?.value)
}

pub fn evaluate_fock_detailed(spec: &CircuitSpec, truncation: usize) -> Result<FockEvaluation> {
    let mut xis = vec![None; spec.n_qubits];
    xis[0] = Some(spec.xi);
    evaluate_fock_with(spec, &xis, truncation)
}

/// Fock evaluation with an independent mismatch on every listed qubit.
pub fn evaluate_fock_mismatched(spec: &CircuitSpec, xis: &[f64], truncation: usize) -> Result<f64> {
    if xis.len() != spec.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: spec.n_qubits,
            found: xis.len(),
        });
    }
    for &xi in xis {
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::invalid("xi", alloc::format!("{xi} outside [0, 1]")));
        }
    }
    let xis: Vec<Option<f64>> = xis.iter().map(|&x| Some(x)).collect();
    Ok(evaluate_fock_with(spec, &xis, truncation)?.value)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn evaluate_fock_with(
    spec: &CircuitSpec,
    xis: &[Option<f64>],
    truncation: usize,
) -> Result<FockEvaluation> {
    spec.validate()?;
    let circuit = build_fock_circuit(
        spec.n_qubits,
        &spec.gates,
        xis,
        &spec.observable,
        truncation,
    )?;
    let f = circuit.heisenberg_observable()?;
    let n = spec.n_qubits;

    let moments = match &spec.source {
        SourceModel::Ideal => {
            let index = circuit.input_index(&vec![1; n])?;
            let raw = f.get(index, index).re;
            let mut moments = vec![0.0; truncation + 1];
            moments[0] = 1.0;
            moments[1] = 1.0;
            return Ok(FockEvaluation {
                value: raw,
                raw,
                moments,
            });
        }
        SourceModel::Mbc {
            params,
            truncation: st,
        } => heralded_moments(params, *st, truncation)?,
    };

    // F restricted to a-rail inputs is Σ_j c_j Π_k a_k†^{j_k} a_k^{j_k};
    // recover c_j from F(m) by inclusion-exclusion, then substitute moments
    let t1 = truncation + 1;
    let total = t1.pow(n as u32);
    let digits = |mut idx: usize| {
        let mut out = vec![0usize; n];
        for k in (0..n).rev() {
            out[k] = idx % t1;
            idx /= t1;
        }
        out
    };
    let mut f_red = vec![0.0; total];
    for (idx, slot) in f_red.iter_mut().enumerate() {
        let m = digits(idx);
        let i = circuit.input_index(&m)?;
        *slot = f.get(i, i).re / m.iter().map(|&x| factorial(x)).product::<f64>();
    }
    let mut raw = 0.0;
    for jdx in 0..total {
        let j = digits(jdx);
        let weight: f64 = j.iter().map(|&x| moments[x]).product();
        if weight == 0.0 {
            continue;
        }
        let mut c = 0.0;
        for (mdx, &fm) in f_red.iter().enumerate() {
            let m = digits(mdx);
            if m.iter().zip(&j).any(|(a, b)| a > b) {
                continue;
            }
            let mut coef = 1.0;
            for (&mk, &jk) in m.iter().zip(&j) {
                let sign = if (jk - mk) % 2 == 0 { 1.0 } else { -1.0 };
                coef *= sign / factorial(jk - mk);
            }
            c += coef * fm;
        }
        raw += c * weight;
    }
    let norm = moments[1].powi(n as i32);
    if norm == 0.0 {
        return Err(Error::Degenerate("source never delivers a particle"));
    }
    Ok(FockEvaluation {
        value: raw / norm,
        raw,
        moments,
    })
}

/// `(ξ, ⟨I Z⟩)` along a ξ grid for the c-not example.
pub fn cnot_mismatch_sweep(alpha: f64, xi_values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(
            "alpha",
            alloc::format!("{alpha} outside [0, 1]"),
        ));
    }
    xi_values
        .iter()
        .map(|&xi| Ok((xi, evaluate_block(&CircuitSpec::cnot_example(alpha, xi))?)))
        .collect()
}

/// Schrödinger-side value `⟨ψ|U† O U|ψ⟩` with one particle on every a-rail.
pub fn schrodinger_value(circuit: &FockCircuit) -> Result<f64> {
    let occ: Vec<_> = circuit.qubits.iter().map(|q| (q.a, 1)).collect();
    let psi = StateVector::basis(&circuit.registry, &occ)?;
    let out = circuit.unitary.apply(&psi)?;
    let o_out = circuit.observable.apply(&out)?;
    Ok(out.inner(&o_out)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_examples() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert!(
            evaluate_block(&CircuitSpec::cnot_example(h, 1.0))
                .unwrap()
                .abs()
                < 1e-12
        );
        assert!(
            (evaluate_block(&CircuitSpec::cnot_example(0.3, 0.0)).unwrap() - 1.0).abs() < 1e-12
        );
        assert!(
            (evaluate_block(&CircuitSpec::cnot_example(0.6, 0.5)).unwrap() - 0.64).abs() < 1e-12
        );
    }

    #[test]
    fn block_rejects_three_qubits() {
        let mut spec = CircuitSpec::cnot_example(0.6, 0.5);
        spec.n_qubits = 3;
        assert!(matches!(evaluate_block(&spec), Err(Error::Unsupported(_))));
    }

    #[test]
    fn fock_matches_block_example() {
        let spec = CircuitSpec::cnot_example(0.6, 0.5);
        assert!((evaluate_fock(&spec, 2).unwrap() - 0.64).abs() < 1e-8);
    }

    #[test]
    fn identity_normalization() {
        let spec = CircuitSpec {
            n_qubits: 2,
            gates: vec![],
            xi: 0.4,
            source: SourceModel::Ideal,
            observable: vec![GateMatrix::identity(1), GateMatrix::identity(1)],
        };
        assert!((evaluate_fock(&spec, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!((evaluate_block(&spec).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_endpoints() {
        let rows = cnot_mismatch_sweep(1.0, &[0.0, 0.5, 1.0]).unwrap();
        let vals: Vec<f64> = rows.iter().map(|r| r.1).collect();
        for (v, e) in vals.iter().zip([1.0, 0.0, -1.0]) {
            assert!((v - e).abs() < 1e-12);
        }
    }
}
