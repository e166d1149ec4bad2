#![no_main]

use libfuzzer_sys::fuzz_target;
use sigma_soliton::output::{PeriodsDoc, TauDoc};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = PeriodsDoc::from_json(text) {
        let _ = doc.to_csv();
    }
    if let Ok(doc) = TauDoc::from_json(text) {
        let _ = doc.to_csv();
    }
});
