//! Resolved run configuration. Everything that affects the numbers is
//! serialized into the CSV header; output location and worker count are not.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::{AppError, AppResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SourceStats,
    CnotSweep,
    Run,
    Xi,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SourceStats => "source-stats",
            Command::CnotSweep => "cnot-sweep",
            Command::Run => "run",
            Command::Xi => "xi",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PathSel {
    Block,
    Fock,
    Both,
}

impl PathSel {
    pub fn block(self) -> bool {
        self != PathSel::Fock
    }

    pub fn fock(self) -> bool {
        self != PathSel::Block
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub chi: Vec<f64>,
    pub n_sources: Vec<u64>,
    pub alpha: Vec<f64>,
    pub xi: Vec<f64>,
    pub dx: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Rail truncation on the Fock path; oracle truncation for `source-stats`.
    pub truncation: usize,
    /// Truncation of each heralded source's modes.
    pub source_truncation: usize,
    pub path: PathSel,
    /// Circuit file (`run`) or sampled amplitude file (`xi`).
    pub input: Option<PathBuf>,
    /// Sampled reference amplitude for `xi`.
    pub reference: Option<PathBuf>,
    /// Extra uniformly drawn `(α, ξ)` points appended to a `cnot-sweep`.
    pub random_points: usize,
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// Raw parameter ranges as given on the command line.
#[derive(Clone, Debug, Default)]
pub struct Params {
    pub chi: Vec<f64>,
    pub n_sources: Vec<u64>,
    pub alpha: Vec<f64>,
    pub xi: Vec<f64>,
    pub dx: Vec<f64>,
    pub sigma: Vec<f64>,
    pub truncation: Option<usize>,
    pub source_truncation: Option<usize>,
    pub path: Option<PathSel>,
    pub input: Option<PathBuf>,
    pub reference: Option<PathBuf>,
    pub random_points: usize,
    pub seed: u64,
    pub points_per_decade: Option<u32>,
}

pub const POINTS_PER_DECADE: u32 = 20;
pub const DEFAULT_SOURCE_TRUNCATION: usize = 4;
/// Far enough for |g2| to saturate at chi = 0.001.
pub const DEFAULT_N_MAX: u64 = 1_000_000_000;

/// `0` followed by `round(10^(k/ppd))` for `k ≥ 0`, deduplicated, up to `max`.
pub fn log_grid(max: u64, points_per_decade: u32) -> Vec<u64> {
    let mut grid = vec![0];
    if max == 0 {
        return grid;
    }
    let mut k = 0u32;
    loop {
        let v = 10f64
            .powf(f64::from(k) / f64::from(points_per_decade))
            .round() as u64;
        if v > max {
            break;
        }
        if grid.last() != Some(&v) {
            grid.push(v);
        }
        k += 1;
    }
    if grid.last() != Some(&max) {
        grid.push(max);
    }
    grid
}

fn check_all(name: &str, xs: &[f64], ok: impl Fn(f64) -> bool, want: &str) -> AppResult<()> {
    match xs.iter().find(|&&x| !ok(x)) {
        Some(x) => Err(AppError::invalid(format!("--{name} {x}: expected {want}"))),
        None => Ok(()),
    }
}

impl RunConfig {
    pub fn resolve(command: Command, p: Params) -> AppResult<Self> {
        let mut chi = p.chi;
        let mut n_sources = p.n_sources;
        let mut alpha = p.alpha;
        let mut xi = p.xi;
        let mut sigma = p.sigma;
        let path = p.path.unwrap_or(PathSel::Both);
        let ppd = p.points_per_decade.unwrap_or(POINTS_PER_DECADE);
        if ppd == 0 {
            return Err(AppError::invalid("points per decade must be positive"));
        }
        let truncation = match command {
            Command::SourceStats => p
                .truncation
                .unwrap_or(dualrail_core::source::ORACLE_MAX_TRUNCATION),
            // the circuit file's own truncation unless overridden
            Command::Run => match (p.truncation, &p.input) {
                (Some(t), _) => t,
                (None, Some(path)) => crate::circuit_file::load_circuit(path)?.truncation,
                (None, None) => return Err(AppError::invalid("run needs a circuit file")),
            },
            _ => p.truncation.unwrap_or(2),
        };
        match command {
            Command::SourceStats => {
                if chi.is_empty() {
                    chi = vec![0.01, 0.001];
                }
                n_sources = match n_sources.as_slice() {
                    [] => log_grid(DEFAULT_N_MAX, ppd),
                    [max] => log_grid(*max, ppd),
                    _ => n_sources,
                };
            }
            Command::CnotSweep => {
                if alpha.is_empty() && p.random_points == 0 {
                    alpha = vec![0.0, 0.25, 0.5, std::f64::consts::FRAC_1_SQRT_2, 1.0];
                }
                if xi.is_empty() && p.dx.is_empty() && p.random_points == 0 {
                    xi = (0..=10).map(|k| f64::from(k) / 10.0).collect();
                }
                if !chi.is_empty() && n_sources.is_empty() {
                    n_sources = vec![1];
                }
            }
            Command::Run => {
                if p.input.is_none() {
                    return Err(AppError::invalid("run needs a circuit file"));
                }
            }
            Command::Xi => {
                if p.dx.is_empty() {
                    return Err(AppError::invalid("xi needs at least one --dx value"));
                }
                if p.input.is_some() != p.reference.is_some() {
                    return Err(AppError::invalid(
                        "sampled amplitudes need both an input and a reference file",
                    ));
                }
            }
        }
        if !p.dx.is_empty() && sigma.is_empty() && p.input.is_none() {
            sigma = vec![1.0];
        }

        check_all(
            "chi",
            &chi,
            |c| (0.0..1.0).contains(&c),
            "a value in [0, 1)",
        )?;
        check_all(
            "alpha",
            &alpha,
            |a| (0.0..=1.0).contains(&a),
            "a value in [0, 1]",
        )?;
        check_all("xi", &xi, |x| (0.0..=1.0).contains(&x), "a value in [0, 1]")?;
        check_all("dx", &p.dx, f64::is_finite, "a finite value")?;
        check_all(
            "sigma",
            &sigma,
            |s| s.is_finite() && s > 0.0,
            "a positive width",
        )?;
        if command != Command::SourceStats && n_sources.contains(&0) {
            return Err(AppError::invalid(
                "--n-sources 0: heralding needs at least one source",
            ));
        }
        if truncation < 2 {
            return Err(AppError::invalid(format!(
                "--truncation {truncation}: minimum is 2"
            )));
        }

        let input = match p.input {
            Some(path) => Some(std::fs::canonicalize(&path).map_err(|e| AppError::io(&path, e))?),
            None => None,
        };
        let reference = match p.reference {
            Some(path) => Some(std::fs::canonicalize(&path).map_err(|e| AppError::io(&path, e))?),
            None => None,
        };

        Ok(RunConfig {
            command,
            chi,
            n_sources,
            alpha,
            xi,
            dx: p.dx,
            sigma,
            truncation,
            source_truncation: p.source_truncation.unwrap_or(DEFAULT_SOURCE_TRUNCATION),
            path,
            input,
            reference,
            random_points: p.random_points,
            seed: p.seed,
            out: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_shape() {
        let g = log_grid(100, 20);
        assert_eq!(&g[..6], &[0, 1, 2, 3, 4, 5]);
        assert_eq!(*g.last().unwrap(), 100);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(log_grid(0, 20), vec![0]);
        let g = log_grid(1_000_000, 20);
        assert!((1..=10).all(|n| g.contains(&n)));
        assert!(g.contains(&1_000_000));
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = RunConfig::resolve(Command::CnotSweep, Params::default()).unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        let p = Params {
            alpha: vec![1.5],
            ..Params::default()
        };
        assert!(RunConfig::resolve(Command::CnotSweep, p).is_err());
        let p = Params {
            chi: vec![1.0],
            ..Params::default()
        };
        assert!(RunConfig::resolve(Command::SourceStats, p).is_err());
    }
}
