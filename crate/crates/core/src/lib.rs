pub mod cli;
pub mod error;
pub mod fz;
pub mod id;
pub mod lookup;
pub mod ring;
pub mod rvn;
pub mod sim;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/identifiers.md")]
    mod identifiers {}
    #[doc = include_str!("../../../book/src/ring.md")]
    mod ring {}
    #[doc = include_str!("../../../book/src/lookup.md")]
    mod lookup {}
    #[doc = include_str!("../../../book/src/rvn.md")]
    mod rvn {}
    #[doc = include_str!("../../../book/src/fz.md")]
    mod fz {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
