//! Forward model, priors and FISTA reconstruction for a lensless snapshot
//! hyperspectral camera built from a diffuser and a tiled spectral filter
//! array, plus the simulation and analysis tools used to characterize it.
//!
//! A scene is a [`HyperspectralCube`] `v[λ][y][x]`; the sensor records
//! `b = Σ_λ F_λ · crop(h * v_λ)` where `h` is the [`Psf`] and `F_λ` the
//! [`FilterFunction`].

pub mod analysis;
pub mod cli;
pub mod conv;
mod cube;
mod error;
pub mod fft;
mod filter;
pub mod io;
mod model;
pub mod priors;
mod psf;
pub mod simkit;
pub mod solver;

pub use cube::{HyperspectralCube, Measurement};
pub use error::{Error, FormatError, Result};
pub use filter::FilterFunction;
pub use model::{sensor_irradiance, SystemModel};
pub use psf::Psf;
pub use solver::{data_gradient, fista_reconstruct, objective, SolveDiagnostics, SolverConfig};
