#![no_main]

use abelpn::schema::{parse_subtorus, parse_torus};
use libfuzzer_sys::fuzz_target;

const SURFACE: &str =
    r#"{"type":[1,2],"tau":[[{"re":0.1,"im":1.3},{"re":0.0,"im":0.0}],[{"re":0.0,"im":0.0},{"re":-0.3,"im":0.9}]]}"#;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(input) = parse_subtorus(text) else { return };
    let torus = parse_torus(SURFACE).unwrap().build().unwrap();
    if let Ok(sub) = input.build(&torus) {
        assert_eq!(sub.dim() + sub.codim(), torus.dim());
    }
});
