#![no_main]

use libfuzzer_sys::fuzz_target;
use twisted_toeplitz::json::{tensor_from_str, tensor_to_string};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(x) = tensor_from_str(s) else { return };
    let once = tensor_to_string(&x);
    let back = tensor_from_str(&once).expect("encoder output must decode");
    assert_eq!(tensor_to_string(&back), once);
});
