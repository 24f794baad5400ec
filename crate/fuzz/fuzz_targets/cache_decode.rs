#![no_main]
use libfuzzer_sys::fuzz_target;
use loopint::cache::{decode, encode};

fuzz_target!(|data: &[u8]| {
    if let Ok(e) = decode(data) {
        let again = encode(&e.hash, &e.eigenvalues, e.eigenvectors.as_ref()).expect("decoded entries re-encode");
        assert_eq!(again, data);
    }
});
