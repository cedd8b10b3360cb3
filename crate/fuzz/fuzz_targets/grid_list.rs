//! Grid and list values: parsing never panics, accepted grids are bounded and
//! ordered, and accepted values print back to themselves.

#![no_main]

use libfuzzer_sys::fuzz_target;
use regen_experiments::config::{parse_grid, parse_list, MAX_GRID_POINTS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = parse_grid(text) {
        let points = grid.points();
        assert!(!points.is_empty() && points.len() <= MAX_GRID_POINTS + 1);
        assert!(points.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(parse_grid(&grid.to_string()), Ok(grid));
    }
    if let Ok(xs) = parse_list::<f64>(text) {
        let joined = xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        let back = parse_list::<f64>(&joined).expect("printed list parses");
        assert_eq!(back.len(), xs.len());
        assert!(back.iter().zip(&xs).all(|(a, b)| a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())));
    }
    let _ = parse_list::<u64>(text);
    let _ = parse_list::<u32>(text);
});
