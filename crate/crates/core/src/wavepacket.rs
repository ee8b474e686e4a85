//! Spectral amplitudes `G(k, x) = g(k) e^{i(kx − ωt)}` of massless 1+1
//! dimensional wavepackets, their overlaps and the mismatch factor ξ.

use alloc::vec::Vec;
use core::f64::consts::PI;

// f64 math for no_std builds; redundant once std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::quadrature::{adaptive_gl, trapezoid};
use crate::{Error, Result, C64};

/// Minimum `k0 / sigma` for a Gaussian spectrum.
pub const MIN_CENTER_TO_WIDTH: f64 = 6.0;
/// Gaussian support half-width in units of sigma.
pub const SUPPORT_SIGMAS: f64 = 8.0;
/// Convergence target of the panel-doubling quadrature.
pub const QUADRATURE_TOL: f64 = 1e-10;
/// ξ values this close to 0 or 1 snap to the bound.
pub const SNAP_TOL: f64 = 1e-12;
/// Allowed mass at negative wavenumber.
pub const NEGATIVE_MASS_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Spectrum {
    Gaussian {
        k0: f64,
        sigma: f64,
    },
    /// Linearly interpolated samples on a strictly increasing grid, zero
    /// outside it.
    Sampled {
        ks: Vec<f64>,
        amps: Vec<C64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralAmplitude {
    spectrum: Spectrum,
    norm_tolerance: f64,
}

impl SpectralAmplitude {
    pub fn gaussian(k0: f64, sigma: f64) -> Result<Self> {
        if !k0.is_finite() || k0 <= 0.0 {
            return Err(Error::invalid(
                "k0",
                alloc::format!("must be positive, got {k0}"),
            ));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::invalid(
                "sigma",
                alloc::format!("must be positive, got {sigma}"),
            ));
        }
        if k0 / sigma < MIN_CENTER_TO_WIDTH {
            return Err(Error::invalid(
                "sigma",
                alloc::format!(
                    "k0/sigma = {} < {MIN_CENTER_TO_WIDTH}: spectrum leaks to negative k",
                    k0 / sigma
                ),
            ));
        }
        Ok(SpectralAmplitude {
            spectrum: Spectrum::Gaussian { k0, sigma },
            norm_tolerance: 1e-10,
        })
    }

    /// Tabulated spectrum; checks normalization and negative-k support.
    pub fn sampled(samples: Vec<(f64, C64)>, norm_tolerance: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid("samples", "need at least two grid points"));
        }
        if samples
            .windows(2)
            .any(|w| w[1].0.partial_cmp(&w[0].0) != Some(core::cmp::Ordering::Greater))
        {
            return Err(Error::invalid(
                "samples",
                "k grid must be strictly increasing",
            ));
        }
        let (ks, amps): (Vec<f64>, Vec<C64>) = samples.into_iter().unzip();
        let dens: Vec<C64> = amps.iter().map(|a| C64::new(a.norm_sqr(), 0.0)).collect();
        let norm = trapezoid(&ks, &dens).re;
        if (norm - 1.0).abs() > norm_tolerance {
            return Err(Error::invalid(
                "samples",
                alloc::format!("∫|g|² dk = {norm}, expected 1 ± {norm_tolerance}"),
            ));
        }
        let negative = negative_mass(&ks, &amps);
        if negative >= NEGATIVE_MASS_TOL {
            return Err(Error::invalid(
                "samples",
                alloc::format!("mass {negative:e} at negative wavenumber"),
            ));
        }
        Ok(SpectralAmplitude {
            spectrum: Spectrum::Sampled { ks, amps },
            norm_tolerance,
        })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn norm_tolerance(&self) -> f64 {
        self.norm_tolerance
    }

    /// `g(k)`.
    pub fn amplitude(&self, k: f64) -> C64 {
        match &self.spectrum {
            Spectrum::Gaussian { k0, sigma } => {
                let pref = (2.0 * PI * sigma * sigma).powf(-0.25);
                C64::new(
                    pref * (-(k - k0) * (k - k0) / (4.0 * sigma * sigma)).exp(),
                    0.0,
                )
            }
            Spectrum::Sampled { ks, amps } => interpolate(ks, amps, k),
        }
    }

    /// Interval outside which `g` is taken to vanish.
    pub fn support(&self) -> (f64, f64) {
        match &self.spectrum {
            Spectrum::Gaussian { k0, sigma } => {
                (k0 - SUPPORT_SIGMAS * sigma, k0 + SUPPORT_SIGMAS * sigma)
            }
            Spectrum::Sampled { ks, .. } => (ks[0], ks[ks.len() - 1]),
        }
    }

    /// `∫|g|² dk`.
    pub fn norm(&self) -> Result<f64> {
        match &self.spectrum {
            Spectrum::Gaussian { .. } => {
                let (a, b) = self.support();
                let f = |k: f64| C64::new(self.amplitude(k).norm_sqr(), 0.0);
                Ok(adaptive_gl(&f, a, b, QUADRATURE_TOL)?.re)
            }
            Spectrum::Sampled { ks, amps } => {
                let dens: Vec<C64> = amps.iter().map(|a| C64::new(a.norm_sqr(), 0.0)).collect();
                Ok(trapezoid(ks, &dens).re)
            }
        }
    }

    /// `∫_{k<0} |g|² dk`.
    pub fn negative_mass(&self) -> f64 {
        match &self.spectrum {
            Spectrum::Gaussian { k0, sigma } => {
                0.5 * libm::erfc(k0 / (sigma * core::f64::consts::SQRT_2))
            }
            Spectrum::Sampled { ks, amps } => negative_mass(ks, amps),
        }
    }
}

fn negative_mass(ks: &[f64], amps: &[C64]) -> f64 {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (k, a) in ks.iter().zip(amps) {
        if *k < 0.0 {
            xs.push(*k);
            ys.push(C64::new(a.norm_sqr(), 0.0));
        }
    }
    if xs.is_empty() {
        return 0.0;
    }
    if ks[ks.len() - 1] >= 0.0 {
        xs.push(0.0);
        ys.push(C64::new(interpolate(ks, amps, 0.0).norm_sqr(), 0.0));
    }
    trapezoid(&xs, &ys).re
}

fn interpolate(ks: &[f64], amps: &[C64], k: f64) -> C64 {
    let n = ks.len();
    if k < ks[0] || k > ks[n - 1] {
        return C64::new(0.0, 0.0);
    }
    let hi = ks.partition_point(|&x| x < k).clamp(1, n - 1);
    let lo = hi - 1;
    let t = (k - ks[lo]) / (ks[hi] - ks[lo]);
    amps[lo] * (1.0 - t) + amps[hi] * t
}

/// A spectral amplitude placed at `(x, t)`; dispersion is `ω = |k|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Wavepacket {
    pub spectrum: SpectralAmplitude,
    pub position: f64,
    pub time: f64,
}

impl Wavepacket {
    pub fn new(spectrum: SpectralAmplitude, position: f64, time: f64) -> Self {
        Wavepacket {
            spectrum,
            position,
            time,
        }
    }

    /// `G(k) = g(k) e^{i(kx − |k|t)}`, further evolved to time `t_eval`.
    pub fn amplitude_at(&self, k: f64, t_eval: f64) -> C64 {
        let phase = k * self.position - k.abs() * (self.time + t_eval);
        self.spectrum.amplitude(k) * C64::new(0.0, phase).exp()
    }
}

pub fn make_gaussian(k0: f64, sigma: f64, x: f64, t: f64) -> Result<Wavepacket> {
    Ok(Wavepacket::new(
        SpectralAmplitude::gaussian(k0, sigma)?,
        x,
        t,
    ))
}

/// `∫ G_a(k) G_b*(k) dk` at common time `t`.
pub fn overlap(a: &Wavepacket, b: &Wavepacket, t: f64) -> Result<C64> {
    let f = |k: f64| a.amplitude_at(k, t) * b.amplitude_at(k, t).conj();
    let gaussian = |w: &Wavepacket| matches!(w.spectrum.spectrum, Spectrum::Gaussian { .. });
    if gaussian(a) && gaussian(b) {
        let (a0, a1) = a.spectrum.support();
        let (b0, b1) = b.spectrum.support();
        if a1 < b0 || b1 < a0 {
            return Ok(C64::new(0.0, 0.0));
        }
        return adaptive_gl(&f, a0.min(b0), a1.max(b1), QUADRATURE_TOL);
    }
    // trapezoid on the union of the native grids
    let mut grid: Vec<f64> = Vec::new();
    for w in [a, b] {
        if let Spectrum::Sampled { ks, .. } = &w.spectrum.spectrum {
            grid.extend_from_slice(ks);
        }
    }
    grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
    grid.dedup();
    let values: Vec<C64> = grid.iter().map(|&k| f(k)).collect();
    Ok(trapezoid(&grid, &values))
}

/// Snaps `x` to 0 or 1 when within [`SNAP_TOL`].
fn snap(x: f64) -> f64 {
    if x.abs() <= SNAP_TOL {
        0.0
    } else if (x - 1.0).abs() <= SNAP_TOL {
        1.0
    } else {
        x
    }
}

/// ξ = |overlap|².
pub fn mismatch_factor(g: &Wavepacket, reference: &Wavepacket, t: f64) -> Result<f64> {
    let xi = snap(overlap(g, reference, t)?.norm_sqr());
    if !(-SNAP_TOL..=1.0 + 1e-8).contains(&xi) {
        return Err(Error::NumericalFailure(alloc::format!(
            "overlap magnitude squared {xi} outside [0, 1]"
        )));
    }
    Ok(xi.clamp(0.0, 1.0))
}

/// Equivalent single-qubit mismatch `xi1 · xi2`.
pub fn combine_mismatch(xi1: f64, xi2: f64) -> Result<f64> {
    for (name, v) in [("xi1", xi1), ("xi2", xi2)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::invalid(name, alloc::format!("{v} outside [0, 1]")));
        }
    }
    Ok(xi1 * xi2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn gaussian_is_normalized() {
        let w = make_gaussian(10.0, 1.0, 0.0, 0.0).unwrap();
        assert!((w.spectrum.norm().unwrap() - 1.0).abs() < 1e-10);
        assert!(w.spectrum.negative_mass() < 1e-12);
    }

    #[test]
    fn width_precondition() {
        assert!(make_gaussian(10.0, 2.0, 0.0, 0.0).is_err());
        assert!(make_gaussian(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(make_gaussian(10.0, -1.0, 0.0, 0.0).is_err());
        assert!(make_gaussian(6.0, 1.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn self_overlap_is_one() {
        let w = make_gaussian(10.0, 1.0, 0.3, 0.0).unwrap();
        let o = overlap(&w, &w, 0.7).unwrap();
        assert!((o - C64::new(1.0, 0.0)).norm() < 1e-10);
        assert_eq!(mismatch_factor(&w, &w, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn displaced_gaussians() {
        let a = make_gaussian(10.0, 1.0, 0.0, 0.0).unwrap();
        let b = make_gaussian(10.0, 1.0, 1.0, 0.0).unwrap();
        let o = overlap(&a, &b, 0.0).unwrap();
        assert!((o.norm() - (-0.5f64).exp()).abs() < 1e-10);
        let xi = mismatch_factor(&a, &b, 0.0).unwrap();
        assert!((xi - (-1.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn disjoint_sampled_supports() {
        let box_at = |lo: f64| {
            let ks: Vec<f64> = (0..=100).map(|i| lo + i as f64 * 0.01).collect();
            let amps = ks.iter().map(|_| C64::new(1.0, 0.0)).collect::<Vec<_>>();
            SpectralAmplitude::sampled(ks.into_iter().zip(amps).collect(), 1e-9).unwrap()
        };
        let a = Wavepacket::new(box_at(1.0), 0.0, 0.0);
        let b = Wavepacket::new(box_at(5.0), 0.0, 0.0);
        assert_eq!(overlap(&a, &b, 0.0).unwrap(), C64::new(0.0, 0.0));
        assert_eq!(mismatch_factor(&a, &b, 0.0).unwrap(), 0.0);
        assert!((overlap(&a, &a, 0.0).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_validation() {
        let bad = vec![(1.0, C64::new(1.0, 0.0)), (2.0, C64::new(2.0, 0.0))];
        assert!(SpectralAmplitude::sampled(bad, 1e-6).is_err());
        let neg = vec![(-1.0, C64::new(1.0, 0.0)), (0.0, C64::new(1.0, 0.0))];
        assert!(SpectralAmplitude::sampled(neg, 1e-6).is_err());
    }

    #[test]
    fn combine_examples() {
        assert_eq!(combine_mismatch(1.0, 0.7).unwrap(), 0.7);
        assert!((combine_mismatch(0.8, 0.5).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(combine_mismatch(0.0, 0.3).unwrap(), 0.0);
        assert!(combine_mismatch(1.2, 0.3).is_err());
    }
}
