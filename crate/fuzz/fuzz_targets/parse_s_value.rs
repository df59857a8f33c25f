#![no_main]

use libfuzzer_sys::fuzz_target;
use riesz_circle::RieszParam;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = text.parse::<RieszParam>() {
        assert!(p.s().is_finite());
        // the value must survive a print/parse cycle
        let again: RieszParam = format!("{:?}", p.s()).parse().expect("reparse");
        assert_eq!(again.s().to_bits(), p.s().to_bits());
    }
});
