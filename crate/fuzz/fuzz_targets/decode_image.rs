#![no_main]

use libfuzzer_sys::fuzz_target;
use lensless_hsi::io::{decode_image, encode_image};

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = decode_image(data) {
        assert_eq!(encode_image(&img).unwrap(), data);
    }
});
