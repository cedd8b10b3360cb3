//! Configuration files: parsing never panics, and an accepted configuration
//! survives being written out and read back.

#![no_main]

use libfuzzer_sys::fuzz_target;
use regen_experiments::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = ExperimentConfig::from_str_config(text) else {
        return;
    };
    let written: String = cfg
        .to_key_values()
        .into_iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect();
    let back = ExperimentConfig::from_str_config(&written).expect("written config parses");
    assert_eq!(back.to_key_values(), cfg.to_key_values());
});
