#![no_main]

use libfuzzer_sys::fuzz_target;
use solrad::dataio::{parse_csv, Schema};

// Schema text, then a NUL byte, then CSV read through that schema.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let (schema_text, csv) = text.split_once('\0').unwrap_or((text, ""));
    if let Ok(schema) = Schema::parse(schema_text) {
        let _ = parse_csv(csv.as_bytes(), &schema);
    }
});
