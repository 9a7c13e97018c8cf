//! Symbolic simulation checking for timed event-automata.

pub mod bench;
pub mod generate;
pub mod model;
pub mod nonzeno;
pub mod oracle;
pub mod sim;
pub mod text;
pub mod zone;

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/automata.md")]
    mod automata {}
    #[doc = include_str!("../../../book/src/zones.md")]
    mod zones {}
    #[doc = include_str!("../../../book/src/checking.md")]
    mod checking {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
}
