//! Reference networks and codes shipped with the crate.

use crate::format::{parse_generator, parse_network};
use crate::galois::Field;
use crate::network::NetworkSpec;
use crate::polymat::PolyMatrix;

pub const BUTTERFLY_F2: &str = include_str!("../data/butterfly_f2.net");
pub const BUTTERFLY_F3: &str = include_str!("../data/butterfly_f3.net");
pub const COMBINATION_4C2_F3: &str = include_str!("../data/c42_f3.net");
/// `[1+z^2, 1+z+z^2]`
pub const INPUT_CODE: &str = include_str!("../data/cs.gen");
/// `[1+z^2, 1+z+2z^2]`, ternary only
pub const INPUT_CODE_PRIME: &str = include_str!("../data/cs_prime.gen");

/// Nine-edge butterfly over GF(p) for p = 2 or 3.
pub fn butterfly(p: u32) -> NetworkSpec {
    let text = match p {
        2 => BUTTERFLY_F2,
        3 => BUTTERFLY_F3,
        _ => panic!("butterfly reference data exists for GF(2) and GF(3) only"),
    };
    parse_network(text, None).expect("shipped butterfly file parses")
}

/// The 4C2 combination network over GF(3): 4 relay nodes, 6 sinks, 16 edges.
pub fn combination_4c2() -> NetworkSpec {
    parse_network(COMBINATION_4C2_F3, None).expect("shipped 4C2 file parses")
}

/// `[1+z^2, 1+z+z^2]` over the given field.
pub fn input_code(field: &Field) -> PolyMatrix {
    parse_generator(INPUT_CODE, Some(field))
        .expect("shipped code parses")
        .generator
}

/// `[1+z^2, 1+z+2z^2]` over GF(3).
pub fn input_code_prime() -> PolyMatrix {
    let f3 = Field::new(3, 1).expect("GF(3)");
    parse_generator(INPUT_CODE_PRIME, Some(&f3))
        .expect("shipped code parses")
        .generator
}
