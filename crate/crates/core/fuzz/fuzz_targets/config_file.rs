#![no_main]

use libfuzzer_sys::fuzz_target;
use oseen_cutfem::harness::parse::parse_config_str;
use oseen_cutfem::harness::{Study, StudySpec};

fuzz_target!(|input: &str| {
    // errors are fine, panics are not
    if let Ok(file) = parse_config_str(input) {
        let mut spec = StudySpec::new(Study::Converge);
        if spec.apply_config(&file).is_ok() {
            let _ = spec.validate();
        }
    }
});
