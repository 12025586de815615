//! Seeded generators for the simulation studies: PSFs for the diffuser and
//! the two lens baselines, tiled filter arrays, synthetic scenes, and noise.

mod filter_gen;
mod noise;
mod psf_gen;
mod scene;

pub use filter_gen::{generate_filter_function, FilterArraySpec};
pub use noise::{add_gaussian_noise, simulate_capture, Capture};
pub use psf_gen::{
    generate_diffuser_psf, generate_lens_psf, generate_psf, LensKind, PsfKind, CAUSTIC_CONTRAST,
};
pub use scene::{make_point_scene, make_resolution_target, BarGroup, ScenePoint};

use crate::error::Result;
use crate::model::SystemModel;

/// Everything needed to build a simulated camera whose scene grid equals
/// the sensor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraSpec {
    pub sensor_shape: (usize, usize),
    pub psf_shape: (usize, usize),
    pub filter: FilterArraySpec,
    pub psf_kind: PsfKind,
    pub psf_seed: u64,
    pub feature_px: f64,
}

impl Default for CameraSpec {
    /// 64×64 sensor, 16-channel 4×4 mosaic with 2-px filters, full-frame diffuser.
    fn default() -> Self {
        CameraSpec {
            sensor_shape: (64, 64),
            psf_shape: (64, 64),
            filter: FilterArraySpec::default(),
            psf_kind: PsfKind::Diffuser,
            psf_seed: 1,
            feature_px: 1.5,
        }
    }
}

impl CameraSpec {
    pub fn with_kind(&self, kind: PsfKind) -> Self {
        CameraSpec { psf_kind: kind, ..self.clone() }
    }

    pub fn build(&self) -> Result<SystemModel> {
        let psf = generate_psf(
            self.psf_kind,
            self.psf_shape,
            self.psf_seed,
            self.feature_px,
            self.filter.superpixel_px(),
        )?;
        let wl = self.filter.channel_centers();
        let filter = generate_filter_function(self.sensor_shape, &self.filter, &wl)?;
        SystemModel::new(psf, filter, self.sensor_shape)
    }
}
