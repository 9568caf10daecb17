#![no_main]

use chap_core::solution::SolutionFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(solution) = SolutionFile::from_json(data) {
        let rendered = solution.to_canonical_json();
        let reparsed = SolutionFile::from_json(rendered.as_bytes())
            .expect("canonical output must parse back");
        assert_eq!(solution, reparsed);
    }
});
