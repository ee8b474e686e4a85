//! The four computing subcommands. Each returns a [`Table`]; rows are built
//! from an ordered point list so concurrency never changes the output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use dualrail_core::evaluator::{evaluate_block, evaluate_fock, CircuitSpec, SourceModel};
use dualrail_core::source::{
    closed_form_stats, general_stats, oracle_stats, SourceParams, ORACLE_MAX_SOURCES,
    ORACLE_MAX_TRUNCATION,
};
use dualrail_core::wavepacket::{make_gaussian, mismatch_factor, Wavepacket};
use dualrail_core::Error;

use crate::amplitude::load_amplitude;
use crate::circuit_file::{load_circuit, CircuitFile};
use crate::config::{Command, PathSel, RunConfig};
use crate::table::{Cell, Table};
use crate::{AppError, AppResult};

/// Mismatch between two equal Gaussian packets displaced by `dx`.
/// The carrier is placed far enough out that negative-k mass is negligible;
/// `ξ` does not depend on it.
pub fn gaussian_xi(dx: f64, sigma: f64) -> AppResult<f64> {
    let k0 = 10.0 * sigma.max(1.0);
    let g = make_gaussian(k0, sigma, dx, 0.0)?;
    let reference = make_gaussian(k0, sigma, 0.0, 0.0)?;
    Ok(mismatch_factor(&g, &reference, 0.0)?)
}

pub fn execute(config: &RunConfig, workers: usize) -> AppResult<Table> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| AppError::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match config.command {
        Command::SourceStats => source_stats(config),
        Command::CnotSweep => cnot_sweep(config),
        Command::Run => run_circuit(config),
        Command::Xi => xi_table(config),
    })
}

fn par_rows<T: Sync>(
    points: &[T],
    f: impl Fn(&T) -> AppResult<Vec<Vec<Cell>>> + Sync + Send,
) -> AppResult<Vec<Vec<Cell>>> {
    let chunks: Vec<AppResult<Vec<Vec<Cell>>>> = points.par_iter().map(f).collect();
    let mut rows = Vec::new();
    for chunk in chunks {
        rows.extend(chunk?);
    }
    Ok(rows)
}

fn g2_cell(n_sources: u64, g2: Option<f64>) -> Cell {
    match g2 {
        Some(g) => Cell::Num(g),
        None if n_sources == 0 => Cell::from("degenerate"),
        None => Cell::Empty,
    }
}

pub fn source_stats(config: &RunConfig) -> AppResult<Table> {
    let mut table = Table::new(vec![
        "N",
        "chi",
        "n_closed",
        "g2_closed",
        "n_general",
        "g2_general",
        "n_oracle",
        "g2_oracle",
        "g2_closed_abs",
    ]);
    let points: Vec<(f64, u64)> = config
        .chi
        .iter()
        .flat_map(|&chi| config.n_sources.iter().map(move |&n| (chi, n)))
        .collect();
    let t = config.truncation;
    table.rows = par_rows(&points, |&(chi, n)| {
        let closed = closed_form_stats(chi, n);
        let n_usize =
            usize::try_from(n).map_err(|_| AppError::invalid(format!("N = {n} too large")))?;
        let general = general_stats(&SourceParams::closed_form(chi, n_usize))?;
        let oracle = if n >= 1 && n_usize <= ORACLE_MAX_SOURCES && t <= ORACLE_MAX_TRUNCATION {
            match oracle_stats(&SourceParams::closed_form(chi, n_usize), t) {
                Ok(o) => Some(o),
                Err(Error::DimensionGuard { .. }) => None,
                Err(e) => return Err(e.into()),
            }
        } else {
            None
        };
        Ok(vec![vec![
            Cell::from(n),
            Cell::from(chi),
            Cell::from(closed.n),
            g2_cell(n, closed.g2),
            Cell::from(general.n),
            g2_cell(n, general.g2),
            Cell::from(oracle.map(|o| o.n)),
            oracle.map_or(Cell::Empty, |o| g2_cell(n, o.g2)),
            g2_cell(n, closed.g2_magnitude()),
        ]])
    })?;
    Ok(table)
}

/// A mismatch value with the wavepacket geometry that produced it, if any.
#[derive(Clone, Copy, Debug)]
struct XiPoint {
    xi: f64,
    dx: Option<f64>,
    sigma: Option<f64>,
}

fn xi_points(config: &RunConfig) -> AppResult<Vec<XiPoint>> {
    let mut points: Vec<XiPoint> = config
        .xi
        .iter()
        .map(|&xi| XiPoint {
            xi,
            dx: None,
            sigma: None,
        })
        .collect();
    for &sigma in &config.sigma {
        for &dx in &config.dx {
            points.push(XiPoint {
                xi: gaussian_xi(dx, sigma)?,
                dx: Some(dx),
                sigma: Some(sigma),
            });
        }
    }
    Ok(points)
}

const SWEEP_COLUMNS: [&str; 9] = [
    "alpha",
    "xi",
    "chi",
    "n_sources",
    "truncation",
    "path",
    "expectation",
    "dx",
    "sigma",
];

pub fn cnot_sweep(config: &RunConfig) -> AppResult<Table> {
    let mut table = Table::new(SWEEP_COLUMNS.to_vec());
    let mut points = Vec::new();
    for &alpha in &config.alpha {
        for p in xi_points(config)? {
            points.push((alpha, p));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.random_points {
        let alpha: f64 = rng.gen_range(0.0..=1.0);
        let xi: f64 = rng.gen_range(0.0..=1.0);
        points.push((
            alpha,
            XiPoint {
                xi,
                dx: None,
                sigma: None,
            },
        ));
    }
    table.rows = par_rows(&points, |&(alpha, p)| {
        let tail = [Cell::from(p.dx), Cell::from(p.sigma)];
        let mut rows = Vec::new();
        let mut spec = CircuitSpec::cnot_example(alpha, p.xi);
        if config.path.block() {
            let v = evaluate_block(&spec)?;
            let mut row = vec![
                alpha.into(),
                p.xi.into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
            ];
            row.extend([Cell::from("block"), v.into()]);
            row.extend(tail.clone());
            rows.push(row);
        }
        if config.path.fock() {
            if config.chi.is_empty() {
                let v = evaluate_fock(&spec, config.truncation)?;
                let mut row = vec![alpha.into(), p.xi.into(), Cell::Empty, Cell::Empty];
                row.extend([config.truncation.into(), "fock".into(), v.into()]);
                row.extend(tail.clone());
                rows.push(row);
            }
            for &chi in &config.chi {
                for &n in &config.n_sources {
                    spec.source = SourceModel::Mbc {
                        params: SourceParams::closed_form(chi, n as usize),
                        truncation: config.source_truncation,
                    };
                    let v = evaluate_fock(&spec, config.truncation)?;
                    let mut row = vec![alpha.into(), p.xi.into(), chi.into(), n.into()];
                    row.extend([config.truncation.into(), "fock".into(), v.into()]);
                    row.extend(tail.clone());
                    rows.push(row);
                }
            }
        }
        Ok(rows)
    })?;
    Ok(table)
}

fn block_supported(spec: &CircuitSpec) -> bool {
    spec.n_qubits == 2 && spec.source == SourceModel::Ideal
}

pub fn run_circuit(config: &RunConfig) -> AppResult<Table> {
    let path = config
        .input
        .as_ref()
        .ok_or_else(|| AppError::invalid("run needs a circuit file"))?;
    let file: CircuitFile = load_circuit(path)?;
    let mut points = xi_points(config)?;
    if points.is_empty() {
        let (dx, sigma) = file.wavepacket.unzip();
        points.push(XiPoint {
            xi: file.spec.xi,
            dx,
            sigma,
        });
    }
    let block =
        config.path.block() && (config.path == PathSel::Block || block_supported(&file.spec));
    let (chi, n_sources) = match &file.spec.source {
        SourceModel::Ideal => (Cell::Empty, Cell::Empty),
        SourceModel::Mbc { params, .. } => (params.chi.into(), params.n_sources.into()),
    };
    let mut table = Table::new(vec![
        "path",
        "xi",
        "chi",
        "n_sources",
        "truncation",
        "expectation",
        "dx",
        "sigma",
    ]);
    table.rows = par_rows(&points, |p| {
        let mut spec = file.spec.clone();
        spec.xi = p.xi;
        let mut rows = Vec::new();
        if block {
            let v = evaluate_block(&spec)?;
            rows.push(vec![
                "block".into(),
                p.xi.into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                v.into(),
                p.dx.into(),
                p.sigma.into(),
            ]);
        }
        if config.path.fock() {
            let v = evaluate_fock(&spec, config.truncation)?;
            rows.push(vec![
                "fock".into(),
                p.xi.into(),
                chi.clone(),
                n_sources.clone(),
                config.truncation.into(),
                v.into(),
                p.dx.into(),
                p.sigma.into(),
            ]);
        }
        Ok(rows)
    })?;
    Ok(table)
}

pub fn xi_table(config: &RunConfig) -> AppResult<Table> {
    let mut table = Table::new(vec!["dx", "sigma", "xi"]);
    match (&config.input, &config.reference) {
        (Some(input), Some(reference)) => {
            let g = load_amplitude(input)?;
            let r = Wavepacket::new(load_amplitude(reference)?, 0.0, 0.0);
            table.rows = par_rows(&config.dx, |&dx| {
                let w = Wavepacket::new(g.clone(), dx, 0.0);
                Ok(vec![vec![
                    dx.into(),
                    Cell::Empty,
                    mismatch_factor(&w, &r, 0.0)?.into(),
                ]])
            })?;
        }
        _ => {
            let points: Vec<(f64, f64)> = config
                .sigma
                .iter()
                .flat_map(|&s| config.dx.iter().map(move |&dx| (dx, s)))
                .collect();
            table.rows = par_rows(&points, |&(dx, sigma)| {
                Ok(vec![vec![
                    dx.into(),
                    sigma.into(),
                    gaussian_xi(dx, sigma)?.into(),
                ]])
            })?;
        }
    }
    Ok(table)
}
