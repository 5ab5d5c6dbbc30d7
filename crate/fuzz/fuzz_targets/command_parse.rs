#![no_main]

use beamwave::Command;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(command) = text.parse::<Command>() {
        assert_eq!(command.name(), text);
    }
});
