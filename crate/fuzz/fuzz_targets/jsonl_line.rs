#![no_main]

use libfuzzer_sys::fuzz_target;
use repcount::data::{frame_to_json, parse_frame_line};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(frame) = parse_frame_line(text, 1) {
        let again = parse_frame_line(&frame_to_json(&frame).to_string(), 1).expect("re-parse of written frame");
        assert_eq!(again, frame);
    }
});
