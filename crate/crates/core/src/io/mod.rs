//! File formats and configuration documents.

mod binary;
mod config;
pub mod csv;

pub use binary::{
    decode_cube, decode_image, encode_cube, encode_image, preview_pixels, read_cube, read_image,
    read_measurement, read_psf, write_cube, write_image, write_png_preview, CUBE_MAGIC,
    IMAGE_MAGIC,
};
pub use config::{
    parse_run_config, parse_scene_spec, read_run_config, read_scene_spec, PsfParams, RunConfig,
    SceneSpec,
};
