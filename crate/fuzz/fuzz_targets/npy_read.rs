#![no_main]

use libfuzzer_sys::fuzz_target;
use repcount::data::NpyArray;

fuzz_target!(|data: &[u8]| {
    if let Ok(array) = NpyArray::from_bytes(data) {
        assert_eq!(array.shape.iter().product::<usize>(), array.data.len());
        let again = NpyArray::from_bytes(&array.to_bytes()).expect("re-read of written array");
        assert_eq!(again.shape, array.shape);
        assert_eq!(again.data.len(), array.data.len());
        for (a, b) in again.data.iter().zip(&array.data) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
});
