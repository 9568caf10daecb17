//! Instance files come from outside the process, so the parser and the
//! validator must reject anything malformed without panicking. A successful
//! parse must survive a canonical-JSON round trip unchanged.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(instance) = chap_core::Instance::from_json(data) {
        let rendered = instance.to_canonical_json();
        let reparsed = chap_core::Instance::from_json(rendered.as_bytes())
            .expect("canonical output must parse back");
        assert_eq!(instance, reparsed);
    }
});
