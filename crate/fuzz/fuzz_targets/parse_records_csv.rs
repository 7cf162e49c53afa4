#![no_main]

use gmc::csvio::{parse_records_csv, write_records_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(records) = parse_records_csv(text) {
        let again = parse_records_csv(&write_records_csv(&records)).expect("written CSV reparses");
        assert_eq!(again.len(), records.len());
    }
});
