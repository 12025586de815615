//! Resolution, conditioning and spectral-accuracy measurements.

mod autocorr;
mod conditioning;
mod resolution;
mod spectral;

pub use autocorr::{autocorr_resolution, psf_autocorrelation, AUTOCORR_LEVEL};
pub use conditioning::{
    condition_sweep, lattice_support, local_condition_number, support_columns, CondSweepRow,
    SweepMode, Voxel, GOOD_CONDITION, RANK_TOLERANCE,
};
pub use resolution::{
    bar_group_dips, bar_group_resolved, psnr, rayleigh_dip, two_point_positions, two_point_test,
    TwoPointReport, TwoPointRow, RAYLEIGH_DIP,
};
pub use spectral::spectral_peak_error;
