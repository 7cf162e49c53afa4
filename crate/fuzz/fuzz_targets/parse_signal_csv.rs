#![no_main]

use gmc::csvio::{parse_signal_csv, write_signal_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(sig) = parse_signal_csv(text) {
        let samples = sig.to_complex();
        assert!(samples.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        let again = parse_signal_csv(&write_signal_csv(&samples)).expect("written CSV reparses");
        assert_eq!(again.len(), samples.len());
    }
});
