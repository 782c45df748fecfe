#![no_main]

use libfuzzer_sys::fuzz_target;
use twisted_toeplitz::json::{element_from_str, element_to_string};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(x) = element_from_str(s) else { return };
    let once = element_to_string(&x);
    let back = element_from_str(&once).expect("encoder output must decode");
    assert_eq!(element_to_string(&back), once);
});
