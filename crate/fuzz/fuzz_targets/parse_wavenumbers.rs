#![no_main]

use libfuzzer_sys::fuzz_target;
use sigma_soliton::config::parse_wavenumbers;
use sigma_soliton::SolitonCurve;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(k) = parse_wavenumbers(text) {
        assert!(k.iter().all(|x| x.is_finite()));
        if k.len() <= 8 {
            let _ = SolitonCurve::new(&k);
        }
    }
});
