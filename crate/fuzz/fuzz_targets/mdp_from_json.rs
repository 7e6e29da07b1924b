#![no_main]

use libfuzzer_sys::fuzz_target;
use mdpvf::Mdp;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = Mdp::from_json(s) {
        // parsing is structural; stochasticity is checked on use
        let _ = m.validate();
        assert_eq!(Mdp::from_json(&m.to_json()).unwrap(), m);
    }
});
