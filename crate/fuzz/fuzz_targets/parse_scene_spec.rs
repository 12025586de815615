#![no_main]

use libfuzzer_sys::fuzz_target;
use lensless_hsi::io::parse_scene_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_scene_spec(text) else { return };
    let voxels = spec.ny.saturating_mul(spec.nx).saturating_mul(spec.n_lambda);
    if voxels <= 1 << 16 {
        let _ = spec.point_scene();
        let _ = spec.resolution_target();
    }
});
