//! TOML circuit description. Qubits are numbered from 0; qubit 0 is the
//! most significant bit of gate matrices and carries the mismatch.
//!
//! ```toml
//! qubits = 2
//! observable = ["i", "z"]
//! xi = 1.0                      # or a [wavepacket] table with dx, sigma
//!
//! [source]
//! kind = "ideal"                # or "mbc" with chi, n_sources, truncation
//!
//! [[gates]]
//! type = "us"                   # h | zrot | us | csign | custom
//! target = 0
//! params = { alpha = 0.6 }
//! ```
//!
//! `custom` gates take `targets` and `matrix`, a list of rows of
//! `[re, im]` pairs.

use std::collections::BTreeMap;
use std::path::Path;

use dualrail_core::circuit::Gate;
use dualrail_core::evaluator::{CircuitSpec, SourceModel};
use dualrail_core::qubit::GateMatrix;
use dualrail_core::source::SourceParams;
use dualrail_core::{CMatrix, C64};
use serde::Deserialize;
use toml::Spanned;

use crate::commands::gaussian_xi;
use crate::config::DEFAULT_SOURCE_TRUNCATION;
use crate::error::line_col;
use crate::{AppError, AppResult};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    qubits: usize,
    #[serde(default)]
    gates: Vec<Spanned<RawGate>>,
    observable: Vec<Spanned<RawObservable>>,
    xi: Option<f64>,
    wavepacket: Option<RawWavepacket>,
    source: Option<RawSource>,
    truncation: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGate {
    #[serde(rename = "type")]
    kind: Spanned<String>,
    target: Option<usize>,
    targets: Option<Vec<usize>>,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawObservable {
    Named(String),
    Matrix(Vec<Vec<[f64; 2]>>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWavepacket {
    dx: f64,
    sigma: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
enum RawSource {
    Ideal,
    Mbc {
        chi: f64,
        n_sources: usize,
        truncation: Option<usize>,
    },
}

/// A parsed and validated circuit file.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitFile {
    pub spec: CircuitSpec,
    /// Rail truncation for the Fock path.
    pub truncation: usize,
    /// `(dx, sigma)` when ξ came from a wavepacket block.
    pub wavepacket: Option<(f64, f64)>,
}

struct Ctx<'a> {
    text: &'a str,
    origin: &'a str,
}

impl Ctx<'_> {
    fn error_at(&self, offset: usize, message: String) -> AppError {
        let (line, column) = line_col(self.text, offset);
        AppError::Parse {
            origin: self.origin.to_owned(),
            line,
            column,
            message,
        }
    }
}

fn complex_matrix(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix, String> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err("matrix must be square and non-empty".into());
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

fn param(params: &BTreeMap<String, f64>, name: &str) -> Result<f64, String> {
    params
        .get(name)
        .copied()
        .ok_or_else(|| format!("missing params.{name}"))
}

fn build_gate(raw: &RawGate) -> Result<Gate, String> {
    let single = || match (raw.target, raw.targets.as_deref()) {
        (Some(q), None) => Ok(q),
        (None, Some([q])) => Ok(*q),
        _ => Err("needs exactly one target".to_string()),
    };
    let targets = || match (raw.target, &raw.targets) {
        (None, Some(qs)) => Ok(qs.clone()),
        (Some(q), None) => Ok(vec![q]),
        _ => Err("give either `target` or `targets`".to_string()),
    };
    let allowed: &[&str] = match raw.kind.get_ref().as_str() {
        "zrot" => &["theta"],
        "us" => &["alpha"],
        _ => &[],
    };
    if let Some(extra) = raw.params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(format!("unexpected params.{extra}"));
    }
    if raw.matrix.is_some() && raw.kind.get_ref() != "custom" {
        return Err("`matrix` is only accepted on custom gates".into());
    }
    Ok(match raw.kind.get_ref().as_str() {
        "h" => Gate::Hadamard(single()?),
        "zrot" => Gate::ZRotation {
            qubit: single()?,
            theta: param(&raw.params, "theta")?,
        },
        "us" => Gate::Us {
            qubit: single()?,
            alpha: param(&raw.params, "alpha")?,
        },
        "csign" => match targets()?.as_slice() {
            [a, b] => Gate::CSign(*a, *b),
            _ => return Err("csign needs two targets".into()),
        },
        "custom" => {
            let rows = raw.matrix.as_ref().ok_or("custom gate needs `matrix`")?;
            Gate::Custom {
                qubits: targets()?,
                matrix: complex_matrix(rows)?,
            }
        }
        _ => unreachable!("gate type checked by caller"),
    })
}

const GATE_TYPES: [&str; 5] = ["h", "zrot", "us", "csign", "custom"];

pub fn parse_circuit(text: &str, origin: &str) -> AppResult<CircuitFile> {
    let ctx = Ctx { text, origin };
    let raw: RawCircuit = toml::from_str(text).map_err(|e| {
        let at = e.span().map_or(0, |s| s.start);
        ctx.error_at(at, e.message().trim_end().to_owned())
    })?;

    let mut gates = Vec::with_capacity(raw.gates.len());
    for (i, g) in raw.gates.iter().enumerate() {
        let kind = g.get_ref().kind.get_ref();
        if !GATE_TYPES.contains(&kind.as_str()) {
            return Err(ctx.error_at(
                g.get_ref().kind.span().start,
                format!(
                    "gate {i}: unknown gate type `{kind}` (expected one of {})",
                    GATE_TYPES.join(", ")
                ),
            ));
        }
        let gate = build_gate(g.get_ref())
            .map_err(|m| ctx.error_at(g.span().start, format!("gate {i} ({kind}): {m}")))?;
        if let Err(e) = gate
            .validate(raw.qubits)
            .and_then(|_| gate.matrix().map(|_| ()))
        {
            return Err(ctx.error_at(g.span().start, format!("gate {i} ({}): {e}", gate.name())));
        }
        gates.push(gate);
    }

    let mut observable = Vec::with_capacity(raw.observable.len());
    for (i, o) in raw.observable.iter().enumerate() {
        let m = match o.get_ref() {
            RawObservable::Named(name) => match name.to_ascii_lowercase().as_str() {
                "i" => Ok(GateMatrix::identity(1)),
                "x" => Ok(GateMatrix::pauli_x()),
                "y" => Ok(GateMatrix::pauli_y()),
                "z" => Ok(GateMatrix::pauli_z()),
                _ => Err(format!(
                    "unknown observable factor `{name}` (expected i, x, y, z)"
                )),
            },
            RawObservable::Matrix(rows) => {
                complex_matrix(rows).and_then(|m| GateMatrix::new(m).map_err(|e| e.to_string()))
            }
        };
        observable
            .push(m.map_err(|m| ctx.error_at(o.span().start, format!("observable {i}: {m}")))?);
    }

    let (xi, wavepacket) = match (raw.xi, raw.wavepacket) {
        (Some(_), Some(_)) => {
            return Err(AppError::invalid(format!(
                "{origin}: give either `xi` or a [wavepacket] table, not both"
            )))
        }
        (Some(xi), None) => (xi, None),
        (None, Some(w)) => (gaussian_xi(w.dx, w.sigma)?, Some((w.dx, w.sigma))),
        (None, None) => (1.0, None),
    };

    let source = match raw.source.unwrap_or(RawSource::Ideal) {
        RawSource::Ideal => SourceModel::Ideal,
        RawSource::Mbc {
            chi,
            n_sources,
            truncation,
        } => SourceModel::Mbc {
            params: SourceParams::closed_form(chi, n_sources),
            truncation: truncation.unwrap_or(DEFAULT_SOURCE_TRUNCATION),
        },
    };

    let spec = CircuitSpec {
        n_qubits: raw.qubits,
        gates,
        xi,
        source,
        observable,
    };
    spec.validate()
        .map_err(|e| AppError::invalid(format!("{origin}: {e}")))?;
    Ok(CircuitFile {
        spec,
        truncation: raw.truncation.unwrap_or(2),
        wavepacket,
    })
}

pub fn load_circuit(path: &Path) -> AppResult<CircuitFile> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    parse_circuit(&text, &path.display().to_string())
}
