#![no_main]

use libfuzzer_sys::fuzz_target;
use mdpvf::analyzer::parse_grid;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = parse_grid(s) {
        assert!(!g.is_empty() && g.len() <= 1_000_001);
        assert!(g.iter().all(|x| x.is_finite()));
    }
});
