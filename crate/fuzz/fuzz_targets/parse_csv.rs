#![no_main]

use libfuzzer_sys::fuzz_target;
use solrad::dataio::{parse_csv, write_csv, Schema};

fuzz_target!(|data: &[u8]| {
    let schema = Schema::default();
    if let Ok(records) = parse_csv(data, &schema) {
        let mut buf = Vec::new();
        write_csv(&records, &schema, &mut buf).expect("write accepted records");
        let again = parse_csv(buf.as_slice(), &schema).expect("reparse written records");
        assert_eq!(records, again);
    }
});
