#![no_main]

use libfuzzer_sys::fuzz_target;
use mdpvf::synth::parse_spec_document;
use mdpvf::MaxFSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    let doc = parse_spec_document(s);
    match MaxFSpec::from_json(s) {
        Ok(spec) => {
            assert_eq!(doc.map(|d| d.len()).ok(), Some(spec.branches.len()));
            let _ = spec.validate();
            assert_eq!(MaxFSpec::from_json(&spec.to_json()).unwrap(), spec);
        }
        // a document that parses can only be rejected for a raw denominator
        Err(_) => {
            if let Ok(branches) = doc {
                assert!(branches.iter().any(|(_, d)| matches!(d, mdpvf::synth::DenominatorInput::Raw(_))));
            }
        }
    }
});
