//! CSV input: parsing never panics, and after one emission the text is a
//! fixed point of parse-then-emit.

#![no_main]

use libfuzzer_sys::fuzz_target;
use regen_experiments::Table;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(table) = Table::from_csv(text) else {
        return;
    };
    let once = table.to_csv();
    let twice = Table::from_csv(&once).expect("emitted csv parses").to_csv();
    assert_eq!(once, twice);
});
