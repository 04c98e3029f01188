#![no_main]

use abelpn::schema::parse_torus;
use abelpn::torus::validate;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(input) = parse_torus(text) else { return };
    if input.polarization_type.len() > 4 {
        return;
    }
    if let Ok(tau) = input.tau_matrix() {
        let report = validate(&input.polarization_type, &tau);
        if let Ok(torus) = input.build() {
            assert!(report.all_passed(), "built a torus that fails validation: {report:?}");
            assert_eq!(torus.dim(), input.polarization_type.len());
        }
    }
});
