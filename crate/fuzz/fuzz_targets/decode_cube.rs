#![no_main]

use libfuzzer_sys::fuzz_target;
use lensless_hsi::io::{decode_cube, encode_cube};

fuzz_target!(|data: &[u8]| {
    if let Ok(cube) = decode_cube(data) {
        // every accepted file re-encodes to the same bytes
        assert_eq!(encode_cube(&cube).unwrap(), data);
    }
});
