#![no_main]

use libfuzzer_sys::fuzz_target;
use repcount::data::parse_positions;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_positions(text) {
        if let Some(first) = rows.first() {
            assert!(rows.iter().all(|r| r.len() == first.len()));
        }
    }
});
