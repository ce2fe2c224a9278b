#![no_main]
use libfuzzer_sys::fuzz_target;
use rmfc::cli::{parse_tree, serialize_tree};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_tree(text) {
        // Serialization is canonical, so a second pass must reproduce it.
        let again = parse_tree(&serialize_tree(&f)).expect("serialized tree parses");
        assert_eq!(again, f);
        let _ = f.srmfc();
        let _ = f.rmfc();
    }
});
