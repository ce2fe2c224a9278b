#![no_main]
use libfuzzer_sys::fuzz_target;
use rmfc::cli::{parse_solution, serialize_solution};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_solution(text) {
        let again = parse_solution(&serialize_solution(&s)).expect("serialized solution parses");
        assert_eq!(again, s);
    }
});
