use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::cube::{HyperspectralCube, Measurement};
use crate::error::{Error, Result};
use crate::model::SystemModel;

/// Adds i.i.d. zero-mean Gaussian noise. Negative pixels are kept.
pub fn add_gaussian_noise(b: &Measurement, variance: f64, seed: u64) -> Result<Measurement> {
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(Error::param(format!("noise variance {variance} must be >= 0")));
    }
    if variance == 0.0 {
        return Ok(b.clone());
    }
    let normal = Normal::new(0.0, variance.sqrt())
        .map_err(|e| Error::param(format!("noise distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = b.clone();
    out.data_mut().mapv_inplace(|v| v + normal.sample(&mut rng));
    Ok(out)
}

/// A simulated capture together with the exposure gain that produced it.
#[derive(Debug, Clone)]
pub struct Capture {
    pub measurement: Measurement,
    /// Factor applied to the scene before noise; reconstructions divide by it.
    pub gain: f64,
}

/// Simulates a capture with auto-exposure: the scene is scaled so the
/// noiseless measurement peaks at 1, then Gaussian noise is added.
pub fn simulate_capture(
    model: &SystemModel,
    scene: &HyperspectralCube,
    noise_variance: f64,
    seed: u64,
) -> Result<Capture> {
    let clean = model.forward(scene)?;
    let peak = clean.data().iter().copied().fold(0.0, f64::max);
    let gain = if peak > 0.0 { 1.0 / peak } else { 1.0 };
    let exposed = Measurement::new(clean.into_data() * gain)?;
    Ok(Capture { measurement: add_gaussian_noise(&exposed, noise_variance, seed)?, gain })
}
