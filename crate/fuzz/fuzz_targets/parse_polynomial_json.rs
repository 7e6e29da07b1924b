#![no_main]

use libfuzzer_sys::fuzz_target;
use mdpvf::algebra::parse_polynomial_json;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = parse_polynomial_json(s) {
        // trimmed: the zero polynomial has no coefficients
        assert_eq!(p.coeffs().len(), p.degree().map_or(0, |d| d + 1));
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(parse_polynomial_json(&text).unwrap(), p);
    }
});
