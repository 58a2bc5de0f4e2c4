//! Shared inputs for the engine benchmarks.

use qborel::{build_preset, coproduct, Generator, OperatorSum, Representation};

pub fn preset(name: &str) -> Representation {
    build_preset(name).expect("bundled preset")
}

/// `Δ(e_i)` of a preset, the input to the decomposition scripts.
pub fn coproduct_of(name: &str, g: Generator) -> OperatorSum {
    let rep = preset(name);
    let two = rep.space.tensor_square().expect("tensor square");
    coproduct(g, &rep, &two).expect("coproduct")
}
