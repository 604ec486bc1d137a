//! Single wireless link: distance-dependent average SNR, Rayleigh-faded
//! instantaneous SNR, and noisy symbol transport.
//!
//! The link abstraction is block fading: one SNR draw applies to every
//! symbol of a frame, and draws are independent across frames and across
//! links. Noise is complex white Gaussian at the sampled SNR, with symbol
//! energy normalized to one by the modem.

use crate::error::Error;
use crate::Result;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Geometry and radio parameters of one transmitter-to-receiver link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSpec {
    /// Link distance in meters.
    pub distance_m: f64,
    /// Path-loss exponent (0 for distance-independent links).
    pub path_loss_exponent: f64,
    /// Transmit power in watts.
    pub tx_power_w: f64,
    /// Noise power in watts.
    pub noise_power_w: f64,
    /// Dimensionless gain constant applied to the path-loss law. The law
    /// carries no carrier-dependent constant of its own, so this defaults
    /// to 1 and only relative SNR matters.
    pub gain: f64,
}

impl LinkSpec {
    pub fn new(
        distance_m: f64,
        path_loss_exponent: f64,
        tx_power_w: f64,
        noise_power_w: f64,
    ) -> Result<Self> {
        let link = LinkSpec {
            distance_m,
            path_loss_exponent,
            tx_power_w,
            noise_power_w,
            gain: 1.0,
        };
        link.validate()?;
        Ok(link)
    }

    pub fn with_gain(mut self, gain: f64) -> Result<Self> {
        if !(gain > 0.0) || !gain.is_finite() {
            return Err(Error::param("gain", "must be positive and finite"));
        }
        self.gain = gain;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance_m > 0.0) || !self.distance_m.is_finite() {
            return Err(Error::param("distance", "must be > 0"));
        }
        if !(self.path_loss_exponent >= 0.0) || !self.path_loss_exponent.is_finite() {
            return Err(Error::param("path_loss_exponent", "must be >= 0"));
        }
        if !(self.tx_power_w >= 0.0) || !self.tx_power_w.is_finite() {
            return Err(Error::param("tx_power", "must be >= 0"));
        }
        if !(self.noise_power_w > 0.0) || !self.noise_power_w.is_finite() {
            return Err(Error::param("noise_power", "must be > 0"));
        }
        Ok(())
    }

    /// Copy of this link with the transmit power replaced.
    pub fn with_tx_power(mut self, tx_power_w: f64) -> Self {
        self.tx_power_w = tx_power_w;
        self
    }

    /// Copy of this link with every distance scaled by `factor`.
    pub fn scaled_distance(mut self, factor: f64) -> Self {
        self.distance_m *= factor;
        self
    }
}

/// One draw of instantaneous received SNR on a faded link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadedSnrSample {
    snr: f64,
}

impl FadedSnrSample {
    /// Wraps a non-negative instantaneous SNR.
    pub fn new(snr: f64) -> Result<Self> {
        if !(snr >= 0.0) {
            return Err(Error::param("instantaneous_snr", "must be >= 0"));
        }
        Ok(FadedSnrSample { snr })
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }
}

/// Average received SNR of a link after path loss:
/// `gain * P_t * d^(-alpha) / N_0`.
///
/// Strictly decreasing in distance when the path-loss exponent is positive,
/// and non-decreasing in transmit power.
pub fn average_snr(link: &LinkSpec) -> Result<f64> {
    link.validate()?;
    Ok(link.gain * link.tx_power_w * link.distance_m.powf(-link.path_loss_exponent)
        / link.noise_power_w)
}

/// Probability density of the instantaneous SNR on a Rayleigh-faded link
/// with average SNR `sigma`: an exponential law `(1/sigma) exp(-gamma/sigma)`.
pub fn snr_density(gamma: f64, sigma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::param("gamma", "must be >= 0"));
    }
    if !(sigma > 0.0) {
        return Err(Error::param("sigma", "must be > 0"));
    }
    Ok((-gamma / sigma).exp() / sigma)
}

/// Draws an instantaneous SNR from the exponential fading law with mean
/// `sigma`. Inverse-CDF sampling, so one uniform draw per sample.
pub fn sample_snr<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> Result<FadedSnrSample> {
    if !(sigma > 0.0) {
        return Err(Error::param("sigma", "must be > 0"));
    }
    // u in (0, 1]; -ln(u) is standard exponential.
    let u: f64 = 1.0 - rng.gen::<f64>();
    FadedSnrSample::new(-sigma * u.ln())
}

/// Perturbs each symbol with independent zero-mean complex Gaussian noise
/// whose variance corresponds to the instantaneous SNR (unit symbol energy,
/// so per-dimension noise variance is `1/(2 snr)`).
///
/// At very large SNR the noise vanishes and the output equals the input;
/// at zero SNR the variance is clamped to a huge but finite value so the
/// output is effectively uninformative.
pub fn transmit_symbols<R: Rng + ?Sized>(
    symbols: &[Complex64],
    snr: FadedSnrSample,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if symbols.is_empty() {
        return Err(Error::param("symbols", "must be non-empty"));
    }
    // Clamp so snr = 0 yields enormous but finite noise.
    let snr_eff = snr.snr().max(1e-300);
    let sigma_dim = (0.5 / snr_eff).sqrt();
    Ok(symbols
        .iter()
        .map(|s| {
            let ni: f64 = StandardNormal.sample(rng);
            let nq: f64 = StandardNormal.sample(rng);
            Complex64::new(s.re + sigma_dim * ni, s.im + sigma_dim * nq)
        })
        .collect())
}
