#![no_main]

use gmc::csvio::{parse_aggregates_csv, write_aggregates_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(aggs) = parse_aggregates_csv(text) {
        let again =
            parse_aggregates_csv(&write_aggregates_csv(&aggs)).expect("written CSV reparses");
        assert_eq!(again.len(), aggs.len());
    }
});
