#![no_main]
use libfuzzer_sys::fuzz_target;
use rmfc::cli::{parse_metric, serialize_metric};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_metric(text) {
        let again = parse_metric(&serialize_metric(&m)).expect("serialized metric parses");
        assert_eq!(again, m);
    }
});
