#![no_main]

use gmc::csvio::parse_lambda_grid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = parse_lambda_grid(text) {
        assert!(!grid.is_empty());
        assert!(grid.iter().all(|l| *l > 0.0 && l.is_finite()));
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }
});
