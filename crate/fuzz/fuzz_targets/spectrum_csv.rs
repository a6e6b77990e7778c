#![no_main]

use boxhhg::io::{parse_spectrum_csv, spectrum_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(spectrum) = parse_spectrum_csv(data) {
        let again = parse_spectrum_csv(&spectrum_csv(&spectrum).unwrap()).unwrap();
        assert_eq!(again, spectrum);
    }
});
