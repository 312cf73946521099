#![no_main]

use libfuzzer_sys::fuzz_target;
use repcount::data::parse_labels;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_labels(text) {
        for row in rows {
            assert!(row.start_frame <= row.end_frame);
            assert!(row.reps > 0);
        }
    }
});
