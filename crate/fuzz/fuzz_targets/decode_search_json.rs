#![no_main]

use libfuzzer_sys::fuzz_target;
use riesz_circle::export::decode_search_json;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = decode_search_json(text);
    }
});
