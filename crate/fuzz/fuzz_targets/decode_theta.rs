#![no_main]

use libfuzzer_sys::fuzz_target;
use twisted_toeplitz::json::{theta_from_str, theta_to_string};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(x) = theta_from_str(s) else { return };
    let once = theta_to_string(&x);
    let back = theta_from_str(&once).expect("encoder output must decode");
    assert_eq!(theta_to_string(&back), once);
});
