#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Accepted configs are already filled and validated, so serializing and
    // parsing again must give the same config back.
    if let Ok(config) = beamwave::parse_config(text) {
        let again = serde_json::to_string(&config).unwrap();
        assert_eq!(beamwave::parse_config(&again).unwrap(), config);
    }
});
