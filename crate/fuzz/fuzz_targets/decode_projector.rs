#![no_main]

use libfuzzer_sys::fuzz_target;
use twisted_toeplitz::json::{projector_from_str, projector_to_string};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(x) = projector_from_str(s) else { return };
    let once = projector_to_string(&x);
    let back = projector_from_str(&once).expect("encoder output must decode");
    assert_eq!(projector_to_string(&back), once);
});
