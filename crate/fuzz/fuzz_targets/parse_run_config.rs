#![no_main]

use libfuzzer_sys::fuzz_target;
use lensless_hsi::io::parse_run_config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_run_config(text) {
        let _ = cfg.solver_config();
        let _ = cfg.filter.channel_centers();
    }
});
