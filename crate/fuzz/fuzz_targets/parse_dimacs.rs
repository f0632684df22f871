#![no_main]

use libfuzzer_sys::fuzz_target;
use polarsat::dimacs::{parse_dimacs, to_dimacs};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((formula, _)) = parse_dimacs(text, None) {
        // Whatever parses must survive a round trip unchanged.
        let again = parse_dimacs(&to_dimacs(&formula), None).expect("round trip parses").0;
        assert_eq!(formula, again);
    }
});
