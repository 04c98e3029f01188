#![no_main]

use abelpn::schema::parse_curves;
use abelpn::tube::exceptional_intersection;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(curves) = parse_curves(text) else { return };
    for input in curves.iter().take(4) {
        let _ = input.gamma();
        if input.p.len() > 16 || input.f.len() > 16 {
            continue;
        }
        if let Ok(curve) = input.build() {
            let _ = exceptional_intersection(&curve);
        }
    }
});
