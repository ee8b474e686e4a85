//! Multiplexed heralded single-particle source.
//!
//! An array of `N` pair sources acts on modes `(u_j, v_j)`. Each `u′_j` is
//! watched by a bucket detector `d = (μ − νn)n`; the first heralded `v′_j`
//! is routed to the output
//!
//! `A_P = Σ_j d_j v′_j Π_{i<j}(1 − d_i) + ĉ Â`,
//!
//! with `ĉ = (1 − Σ_j n′_j² Π_{i<j}(1 − n′_i)²)^{1/2}`. This module holds the
//! closed-form statistics, the general-detector expansion in the
//! coefficients `f₁…f₅`, and a brute-force construction of `A_P` on a
//! truncated Fock space.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

// f64 math for no_std builds; redundant once std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::dense::{self, real};
use crate::fock::{
    two_mode_squeezer_block, FockOperator, LocalOp, ModeId, ModeRegistry, StateVector,
};
use crate::{CMatrix, Error, Result};

/// Bucket detector `d = (μ − νn) n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Detector {
    pub mu: f64,
    pub nu: f64,
}

impl Default for Detector {
    fn default() -> Self {
        Detector { mu: 1.5, nu: 0.5 }
    }
}

impl Detector {
    pub fn eval(&self, n: f64) -> f64 {
        (self.mu - self.nu * n) * n
    }

    /// `μ n − ν n²` for a dense number-like block.
    pub fn dense(&self, n: &CMatrix) -> CMatrix {
        n * real(self.mu) - n * n * real(self.nu)
    }
}

/// `μ n − ν n²` for a global number operator.
pub fn bucket_detector_op(n_op: &FockOperator, detector: Detector) -> Result<FockOperator> {
    n_op.scale(real(detector.mu))
        .sub(&n_op.compose(n_op)?.scale(real(detector.nu)))
}

/// How the primed pair operators `u′`, `v′` are built from `u`, `v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairMap {
    /// `u′ = p u + q v†`, `v′ = p v + q u†` on the truncated space.
    Linear { p: f64, q: f64 },
    /// Heisenberg evolution through the truncated two-mode squeezer.
    Squeezer,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceParams {
    pub chi: f64,
    pub n_sources: usize,
    pub detector: Detector,
    pub pair_map: PairMap,
}

impl SourceParams {
    /// Closed-form substitution `(p, q) = (1, |χ|)`.
    pub fn closed_form(chi: f64, n_sources: usize) -> Self {
        SourceParams {
            chi,
            n_sources,
            detector: Detector::default(),
            pair_map: PairMap::Linear {
                p: 1.0,
                q: chi.abs(),
            },
        }
    }

    /// Exact squeezer coefficients `(p, q) = (cosh χ, sinh χ)`.
    pub fn exact(chi: f64, n_sources: usize) -> Self {
        SourceParams {
            pair_map: PairMap::Linear {
                p: chi.cosh(),
                q: chi.sinh(),
            },
            ..Self::closed_form(chi, n_sources)
        }
    }

    pub fn squeezer(chi: f64, n_sources: usize) -> Self {
        SourceParams {
            pair_map: PairMap::Squeezer,
            ..Self::closed_form(chi, n_sources)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.chi.is_finite() || self.chi < 0.0 {
            return Err(Error::invalid(
                "chi",
                alloc::format!("must be finite and non-negative, got {}", self.chi),
            ));
        }
        for (name, v) in [("mu", self.detector.mu), ("nu", self.detector.nu)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        if let PairMap::Linear { p, q } = self.pair_map {
            if !p.is_finite() || !q.is_finite() {
                return Err(Error::invalid("pair_map", "p and q must be finite"));
            }
        }
        Ok(())
    }

    /// `(p, q)`; the squeezer map reports its exact coefficients.
    pub fn pq(&self) -> (f64, f64) {
        match self.pair_map {
            PairMap::Linear { p, q } => (p, q),
            PairMap::Squeezer => (self.chi.cosh(), self.chi.sinh()),
        }
    }
}

/// Primed operators `(u′, v′)` on the `(u, v)` block with the given
/// truncation per mode.
pub fn pair_operators(map: PairMap, chi: f64, truncation: usize) -> (CMatrix, CMatrix) {
    let tr = [truncation, truncation];
    let u = dense::local_annihilation(&tr, 0);
    let v = dense::local_annihilation(&tr, 1);
    match map {
        PairMap::Linear { p, q } => (
            &u * real(p) + v.adjoint() * real(q),
            &v * real(p) + u.adjoint() * real(q),
        ),
        PairMap::Squeezer => {
            let s = two_mode_squeezer_block(truncation, truncation, chi);
            let sd = s.adjoint();
            (&sd * &u * &s, &sd * &v * &s)
        }
    }
}

/// Closed-form source statistics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceStats {
    /// `⟨A_P† A_P⟩`.
    pub n: f64,
    /// `⟨A_P† A_P† A_P A_P⟩`.
    pub numerator: f64,
    /// `numerator / n²`; `None` when `n = 0`.
    pub g2: Option<f64>,
}

impl SourceStats {
    fn new(n: f64, numerator: f64) -> Self {
        let g2 = if n != 0.0 {
            Some(numerator / (n * n))
        } else {
            None
        };
        SourceStats { n, numerator, g2 }
    }

    pub fn g2_magnitude(&self) -> Option<f64> {
        self.g2.map(f64::abs)
    }

    pub fn require_g2(&self) -> Result<f64> {
        self.g2
            .ok_or(Error::Degenerate("g2 is 0/0 when no particle is produced"))
    }
}

/// Closed forms in `χ` and `N` for the default detector at `(p, q) = (1, χ)`.
///
/// `g2` is evaluated exactly as the formula is written, which makes it
/// negative; use [`SourceStats::g2_magnitude`] for the physical value.
pub fn closed_form_stats(chi: f64, n_sources: u64) -> SourceStats {
    let c2 = chi * chi;
    let c4 = c2 * c2;
    let geo = (1.0 - c2).powf(n_sources as f64) - 1.0;
    let poly = 4.0 - 4.0 * c2 + 9.0 * c4;
    let n = poly * geo / (5.0 * c4 - 4.0);
    let g2 = if n_sources == 0 || geo == 0.0 {
        None
    } else {
        Some(2.0 * c2 * (4.0 - 5.0 * c4).powi(2) / (poly * poly * geo))
    };
    // g2 · n² collapses to 2χ²((1−χ²)^N − 1)
    SourceStats {
        n,
        numerator: 2.0 * c2 * geo,
        g2,
    }
}

/// `N → ∞` limit of the closed-form `n`.
pub fn closed_form_n_limit(chi: f64) -> f64 {
    let c2 = chi * chi;
    let c4 = c2 * c2;
    (4.0 - 4.0 * c2 + 9.0 * c4) / (4.0 - 5.0 * c4)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FCoefficients {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
    pub f5: f64,
}

/// Truncation of the pair space on which `f₁…f₅` are evaluated.
pub const F_TRUNCATION: usize = 6;

/// `f₁…f₅` as vacuum expectations on one pair with the linear map `(p, q)`.
pub fn f_coefficients(p: f64, q: f64, mu: f64, nu: f64) -> FCoefficients {
    let (u, v) = pair_operators(PairMap::Linear { p, q }, 0.0, F_TRUNCATION);
    f_coefficients_from_pair(&u, &v, Detector { mu, nu })
}

/// `f₁…f₅` from explicit pair operators.
pub fn f_coefficients_from_pair(u: &CMatrix, v: &CMatrix, detector: Detector) -> FCoefficients {
    let dim = u.nrows();
    let id = CMatrix::identity(dim, dim);
    let d = detector.dense(&(u.adjoint() * u));
    let omd = &id - &d;
    let vd = v.adjoint();
    let vac = |m: CMatrix| m[(0, 0)].re;
    let omd2 = &omd * &omd;
    FCoefficients {
        f1: vac(&vd * &d * &d * v),
        f2: vac(omd2.clone()),
        f3: vac(&omd2 * &omd2),
        f4: vac(&vd * &d * &d * v * &omd),
        f5: vac(&vd * &d * &vd * &d * &d * v * &d * v),
    }
}

/// Arrays up to this size are summed term by term.
const EXPLICIT_SUM_MAX: u64 = 4096;

/// `Σ_{j<N} f^j`, accurate for `f` near 1.
fn geometric(f: f64, n: f64) -> f64 {
    let eps = 1.0 - f;
    if eps == 0.0 {
        return n;
    }
    -(n * (-eps).ln_1p()).exp_m1() / eps
}

/// `Σ_{j<N} j f^{j−1}`, the derivative of [`geometric`] in `f`.
fn geometric_slope(f: f64, n: f64) -> f64 {
    let eps = 1.0 - f;
    if (n * eps).abs() < 1e-3 {
        // expansion about f = 1, third-order remainder ~ (Nε)³
        let c1 = n * (n - 1.0) / 2.0;
        let c2 = n * (n - 1.0) * (n - 2.0) / 3.0;
        let c3 = n * (n - 1.0) * (n - 2.0) * (n - 3.0) / 8.0;
        return c1 - eps * c2 + eps * eps * c3;
    }
    let u = n * (-eps).ln_1p();
    -(u.exp_m1() / (eps * eps) + n * u.exp() / ((1.0 - eps) * eps))
}

/// Statistics assembled from `f₁…f₅` by the geometric sums over the array:
/// `n = f₁ Σ_j f₂^{j−1}` and
/// `numerator = 4f₁f₄ Σ_{a>k} f₃^{k−1} f₂^{a−k−1} + f₅ Σ_k f₃^{k−1}`.
pub fn general_stats_from(f: &FCoefficients, n_sources: u64) -> SourceStats {
    let FCoefficients { f1, f2, f3, f4, f5 } = *f;
    if n_sources == 0 {
        return SourceStats::new(0.0, 0.0);
    }
    let (s2, s3, cross) = if n_sources <= EXPLICIT_SUM_MAX {
        // Horner over the tail length L = N − k
        let (mut s2, mut s3, mut cross) = (0.0, 0.0, 0.0);
        for _ in 0..n_sources {
            cross = cross * f3 + s2;
            s2 = s2 * f2 + 1.0;
            s3 = s3 * f3 + 1.0;
        }
        (s2, s3, cross)
    } else {
        let nn = n_sources as f64;
        let (s2, s3) = (geometric(f2, nn), geometric(f3, nn));
        // the double sum is the divided difference of the geometric sum
        // between f₂ and f₃; f₃ − f₂ is O(χ⁸) for bucket detectors
        let cross = if (f3 - f2).abs() <= 1e-4 * (1.0 - f2).abs() {
            geometric_slope(0.5 * (f2 + f3), nn)
        } else {
            (s3 - s2) / (f3 - f2)
        };
        (s2, s3, cross)
    };
    SourceStats::new(f1 * s2, 4.0 * f1 * f4 * cross + f5 * s3)
}

/// General statistics for the parameters' detector and pair map.
pub fn general_stats(params: &SourceParams) -> Result<SourceStats> {
    params.validate()?;
    let f = match params.pair_map {
        PairMap::Linear { p, q } => f_coefficients(p, q, params.detector.mu, params.detector.nu),
        PairMap::Squeezer => {
            let (u, v) = pair_operators(PairMap::Squeezer, params.chi, F_TRUNCATION);
            f_coefficients_from_pair(&u, &v, params.detector)
        }
    };
    Ok(general_stats_from(&f, params.n_sources as u64))
}

/// Registry `u1..uN, v1..vN, A`, all with the same truncation.
pub fn source_registry(n_sources: usize, truncation: usize) -> Result<ModeRegistry> {
    let mut r = ModeRegistry::new();
    for j in 1..=n_sources {
        r.register(&alloc::format!("u{j}"), truncation)?;
    }
    for j in 1..=n_sources {
        r.register(&alloc::format!("v{j}"), truncation)?;
    }
    r.register("A", truncation)?;
    Ok(r)
}

struct PairBlocks {
    modes: [ModeId; 2],
    dv: LocalOp,
    dv_adj: LocalOp,
    omd: LocalOp,
    to_eigen: LocalOp,
    from_eigen: LocalOp,
    eigenvalues: Vec<f64>,
}

/// `A_P` in factored form: every term is a product of pair-local blocks, so
/// it can act on state vectors without building the global operator.
pub struct HeraldedMode {
    registry: Arc<ModeRegistry>,
    pairs: Vec<PairBlocks>,
    annihilate_input: LocalOp,
    create_input: LocalOp,
    /// `ĉ` on the joint eigenbasis of the `n′_j`, indexed like the registry.
    normalizer: Vec<f64>,
    clipped: bool,
}

/// Minimum truncation that represents the two-particle detector eigenvalue.
pub const MIN_SOURCE_TRUNCATION: usize = 3;

pub fn build_heralded_mode(
    params: &SourceParams,
    registry: Arc<ModeRegistry>,
) -> Result<HeraldedMode> {
    params.validate()?;
    let n = params.n_sources;
    let input = registry.id("A")?;
    let mut pairs = Vec::with_capacity(n);
    for j in 1..=n {
        let u = registry.id(&alloc::format!("u{j}"))?;
        let v = registry.id(&alloc::format!("v{j}"))?;
        let t = registry.truncation(u);
        if t < MIN_SOURCE_TRUNCATION || registry.truncation(v) != t {
            return Err(Error::invalid(
                "truncation",
                alloc::format!(
                    "source modes need equal truncation ≥ {MIN_SOURCE_TRUNCATION}, got {t} and {}",
                    registry.truncation(v)
                ),
            ));
        }
        let (up, vp) = pair_operators(params.pair_map, params.chi, t);
        let np = up.adjoint() * &up;
        let d = params.detector.dense(&np);
        let dim = d.nrows();
        let omd = CMatrix::identity(dim, dim) - &d;
        let dv = &d * &vp;
        let (eigenvalues, vecs) = dense::hermitian_eigen_blocks(&np, 1e-14);
        let local = |m: CMatrix| LocalOp::new(&registry, vec![u, v], m);
        pairs.push(PairBlocks {
            modes: [u, v],
            dv_adj: local(dv.adjoint())?,
            dv: local(dv)?,
            omd: local(omd)?,
            to_eigen: local(vecs.adjoint())?,
            from_eigen: local(vecs)?,
            eigenvalues,
        });
    }
    let ti = registry.truncation(input);
    if ti < MIN_SOURCE_TRUNCATION {
        return Err(Error::invalid(
            "truncation",
            alloc::format!("input mode needs truncation ≥ {MIN_SOURCE_TRUNCATION}, got {ti}"),
        ));
    }
    let annihilate_input = LocalOp::new(&registry, vec![input], dense::annihilation(ti))?;
    let create_input = LocalOp::new(&registry, vec![input], dense::creation(ti))?;

    let mut clipped = false;
    let normalizer = (0..registry.dimension())
        .map(|i| {
            let mut sum = 0.0;
            let mut prefix = 1.0;
            for p in &pairs {
                let [u, v] = p.modes;
                let k =
                    registry.occupation(i, u) * registry.local_dim(v) + registry.occupation(i, v);
                let lambda = p.eigenvalues[k];
                sum += lambda * lambda * prefix;
                prefix *= (1.0 - lambda) * (1.0 - lambda);
            }
            let arg = 1.0 - sum;
            if arg < 0.0 {
                clipped = true;
            }
            arg.max(0.0).sqrt()
        })
        .collect();
    Ok(HeraldedMode {
        registry,
        pairs,
        annihilate_input,
        create_input,
        normalizer,
        clipped,
    })
}

impl HeraldedMode {
    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    /// Whether the radicand of `ĉ` went negative somewhere and was clipped.
    pub fn normalizer_clipped(&self) -> bool {
        self.clipped
    }

    fn apply_normalizer(&self, psi: &StateVector) -> Result<StateVector> {
        let mut phi = psi.clone();
        for p in &self.pairs {
            phi = phi.apply_local(&p.to_eigen)?;
        }
        phi = phi.apply_diagonal(|i| real(self.normalizer[i]));
        for p in &self.pairs {
            phi = phi.apply_local(&p.from_eigen)?;
        }
        Ok(phi)
    }

    /// `A_P |ψ⟩`.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        let mut out = self.apply_normalizer(&psi.apply_local(&self.annihilate_input)?)?;
        let mut prefix = psi.clone();
        for (j, p) in self.pairs.iter().enumerate() {
            out.add_assign(&prefix.apply_local(&p.dv)?)?;
            if j + 1 < self.pairs.len() {
                prefix = prefix.apply_local(&p.omd)?;
            }
        }
        Ok(out)
    }

    /// `A_P† |ψ⟩`.
    pub fn apply_adjoint(&self, psi: &StateVector) -> Result<StateVector> {
        let mut out = self
            .apply_normalizer(psi)?
            .apply_local(&self.create_input)?;
        let mut prefix = psi.clone();
        for (j, p) in self.pairs.iter().enumerate() {
            out.add_assign(&prefix.apply_local(&p.dv_adj)?)?;
            if j + 1 < self.pairs.len() {
                prefix = prefix.apply_local(&p.omd)?;
            }
        }
        Ok(out)
    }

    /// `ĉ` as an explicit operator.
    pub fn normalizer_operator(&self) -> Result<FockOperator> {
        let r = &self.registry;
        let to: Vec<LocalOp> = self.pairs.iter().map(|p| p.to_eigen.clone()).collect();
        let from: Vec<LocalOp> = self.pairs.iter().map(|p| p.from_eigen.clone()).collect();
        let diag = FockOperator::diagonal(r, |i| real(self.normalizer[i]));
        FockOperator::embed(r, &from)?
            .compose(&diag)?
            .compose(&FockOperator::embed(r, &to)?)
    }

    /// `A_P` as an explicit sparse operator; only sensible for small spaces.
    pub fn to_operator(&self) -> Result<FockOperator> {
        let r = &self.registry;
        let a = FockOperator::embed(r, core::slice::from_ref(&self.annihilate_input))?;
        let mut total = self.normalizer_operator()?.compose(&a)?;
        for j in 0..self.pairs.len() {
            let mut factors = vec![self.pairs[j].dv.clone()];
            factors.extend(self.pairs[..j].iter().map(|p| p.omd.clone()));
            total = total.add(&FockOperator::embed(r, &factors)?)?;
        }
        Ok(total)
    }
}

/// Brute-force statistics of `A_P`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleStats {
    pub n: f64,
    /// `⟨A_P† A_P† A_P A_P⟩`.
    pub fourth_moment: f64,
    pub g2: Option<f64>,
    /// `⟨[A_P, A_P†]⟩`.
    pub commutator: f64,
}

pub const ORACLE_MAX_SOURCES: usize = 4;
pub const ORACLE_MAX_TRUNCATION: usize = 4;

fn oracle_mode(params: &SourceParams, truncation: usize) -> Result<HeraldedMode> {
    if params.n_sources > ORACLE_MAX_SOURCES || truncation > ORACLE_MAX_TRUNCATION {
        let dim = (truncation as u128 + 1).pow(2 * params.n_sources as u32 + 1);
        let limit = (ORACLE_MAX_TRUNCATION as u128 + 1).pow(2 * ORACLE_MAX_SOURCES as u32 + 1);
        return Err(Error::DimensionGuard {
            dimension: dim,
            limit,
        });
    }
    let registry = Arc::new(source_registry(params.n_sources, truncation)?);
    build_heralded_mode(params, registry)
}

pub fn oracle_stats(params: &SourceParams, truncation: usize) -> Result<OracleStats> {
    let mode = oracle_mode(params, truncation)?;
    let vac = StateVector::vacuum(mode.registry());
    let once = mode.apply(&vac)?;
    let twice = mode.apply(&once)?;
    let n = once.norm_sqr();
    let fourth = twice.norm_sqr();
    let created = mode.apply_adjoint(&vac)?.norm_sqr();
    Ok(OracleStats {
        n,
        fourth_moment: fourth,
        g2: if n != 0.0 {
            Some(fourth / (n * n))
        } else {
            None
        },
        commutator: created - n,
    })
}

/// Normally ordered moments `⟨A_P†^j A_P^j⟩` for `j = 0..=max_order`.
pub fn heralded_moments(
    params: &SourceParams,
    truncation: usize,
    max_order: usize,
) -> Result<Vec<f64>> {
    let mode = oracle_mode(params, truncation)?;
    let mut state = StateVector::vacuum(mode.registry());
    let mut out = vec![1.0];
    for _ in 0..max_order {
        state = mode.apply(&state)?;
        out.push(state.norm_sqr());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detector_eigenvalues() {
        let d = Detector::default();
        assert_eq!(
            [d.eval(0.0), d.eval(1.0), d.eval(2.0), d.eval(3.0)],
            [0.0, 1.0, 1.0, 0.0]
        );
        let pnr = Detector { mu: 1.0, nu: 0.0 };
        assert_eq!(pnr.eval(2.0), 2.0);
    }

    #[test]
    fn closed_form_examples() {
        let s = closed_form_stats(0.1, 1);
        assert!((s.n - 0.0099035).abs() < 5e-8);
        assert!(s.g2.unwrap() < 0.0);
        let big = closed_form_stats(0.01, 1_000_000);
        assert!((big.n - 0.999900).abs() < 1e-6);
        assert!((big.g2_magnitude().unwrap() - 2.0004e-4).abs() < 1e-8);
        assert!(closed_form_stats(0.1, 0).require_g2().is_err());
    }

    #[test]
    fn f_at_zero_q() {
        let f = f_coefficients(1.0, 0.0, 1.5, 0.5);
        assert_eq!((f.f1, f.f2, f.f3, f.f4, f.f5), (0.0, 1.0, 1.0, 0.0, 0.0));
        let s = general_stats_from(&f, 5);
        assert_eq!(s.n, 0.0);
        assert_eq!(s.numerator, 0.0);
    }

    #[test]
    fn general_single_source_is_f1() {
        let f = f_coefficients(1.0, 0.1, 1.5, 0.5);
        assert!((general_stats_from(&f, 1).n - f.f1).abs() < 1e-15);
    }

    #[test]
    fn analytic_sums_match_explicit_sums() {
        let cases = [
            FCoefficients {
                f1: 0.3,
                f2: 0.9999,
                f3: 0.9998,
                f4: 0.2,
                f5: 0.1,
            },
            FCoefficients {
                f1: 0.3,
                f2: 0.9999,
                f3: 0.9999 + 1e-13,
                f4: 0.2,
                f5: 0.1,
            },
            f_coefficients(1.0, 0.01, 1.5, 0.5),
            f_coefficients(1.0, 0.001, 1.5, 0.5),
        ];
        for f in cases {
            for n in [4097u64, 6000, 20000] {
                let mut explicit = (0.0, 0.0, 0.0);
                for _ in 0..n {
                    explicit.2 = explicit.2 * f.f3 + explicit.0;
                    explicit.0 = explicit.0 * f.f2 + 1.0;
                    explicit.1 = explicit.1 * f.f3 + 1.0;
                }
                let num = 4.0 * f.f1 * f.f4 * explicit.2 + f.f5 * explicit.1;
                let s = general_stats_from(&f, n);
                assert!(
                    (s.n - f.f1 * explicit.0).abs() <= 1e-10 * s.n.abs(),
                    "{f:?} N={n}"
                );
                assert!((s.numerator - num).abs() <= 1e-8 * num.abs(), "{f:?} N={n}");
            }
        }
        // continuity across the switch
        let f = f_coefficients(1.0, 0.05, 1.5, 0.5);
        let (a, b) = (general_stats_from(&f, 4096), general_stats_from(&f, 4097));
        assert!(b.n > a.n && b.numerator > a.numerator);
    }

    #[test]
    fn huge_arrays_need_no_memory() {
        let s = general_stats(&SourceParams::closed_form(0.001, 1_000_000_000)).unwrap();
        assert!(s.n > 0.99 && s.n < 1.01);
        assert!(s.g2.unwrap() > 0.0);
    }

    #[test]
    fn empty_array_is_bare_input() {
        let params = SourceParams::closed_form(0.1, 0);
        let s = oracle_stats(&params, 3).unwrap();
        assert_eq!(s.n, 0.0);
        assert!((s.commutator - 1.0).abs() < 1e-14);
    }

    #[test]
    fn factored_and_explicit_agree() {
        let params = SourceParams::closed_form(0.2, 2);
        let reg = Arc::new(source_registry(2, 3).unwrap());
        let mode = build_heralded_mode(&params, reg.clone()).unwrap();
        let op = mode.to_operator().unwrap();
        let psi = StateVector::vacuum(&reg);
        let x = op.apply(&psi).unwrap();
        let y = mode.apply(&psi).unwrap();
        for (p, q) in x.amplitudes().iter().zip(y.amplitudes()) {
            assert!((p - q).norm() < 1e-13);
        }
        let xa = op.adjoint().apply(&psi).unwrap();
        let ya = mode.apply_adjoint(&psi).unwrap();
        for (p, q) in xa.amplitudes().iter().zip(ya.amplitudes()) {
            assert!((p - q).norm() < 1e-13);
        }
    }

    #[test]
    fn truncation_floor() {
        let params = SourceParams::closed_form(0.1, 1);
        let reg = Arc::new(source_registry(1, 2).unwrap());
        assert!(build_heralded_mode(&params, reg).is_err());
        assert!(matches!(
            oracle_stats(&SourceParams::closed_form(0.1, 5), 4),
            Err(Error::DimensionGuard { .. })
        ));
    }
}
