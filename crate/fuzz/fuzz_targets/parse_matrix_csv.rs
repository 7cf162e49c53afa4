#![no_main]

use gmc::operators::{DenseOperator, LinearOperator};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(b) = DenseOperator::from_csv_str(text) {
        assert!(b.rows() > 0 && b.cols() > 0);
        assert_eq!(b.as_slice().len(), b.rows() * b.cols());
        let x = vec![1.0; b.cols()];
        assert_eq!(b.apply_forward(&x).unwrap().len(), b.rows());
    }
});
