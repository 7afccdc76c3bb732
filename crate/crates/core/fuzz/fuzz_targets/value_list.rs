#![no_main]

use libfuzzer_sys::fuzz_target;
use oseen_cutfem::harness::parse::{parse_eps_list, parse_f64_list, parse_usize_list, parse_zeta};
use oseen_cutfem::harness::{parse_mode, parse_regime, Study};

fuzz_target!(|input: &str| {
    if let Ok(eps) = parse_eps_list(input) {
        for e in eps {
            assert!(e.value() >= 0.0);
        }
    }
    if let Ok(v) = parse_f64_list(input) {
        assert!(v.iter().all(|x| x.is_finite() && *x > 0.0));
    }
    if let Ok(n) = parse_usize_list(input) {
        assert!(n.iter().all(|&n| n > 0));
    }
    let _ = parse_zeta(input);
    let _ = parse_mode(input);
    let _ = parse_regime(input);
    let _ = Study::parse(input);
});
