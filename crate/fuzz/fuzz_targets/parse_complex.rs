#![no_main]

use libfuzzer_sys::fuzz_target;
use sigma_soliton::output::{format_complex, parse_complex};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Some(z) = parse_complex(text) {
        if z.re.is_finite() && z.im.is_finite() {
            assert_eq!(parse_complex(&format_complex(z)), Some(z));
        }
    }
});
