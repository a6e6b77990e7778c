#![no_main]

use boxhhg::io::parse_dipole_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok((t, d)) = parse_dipole_csv(data) {
        assert_eq!(t.len(), d.len());
    }
});
