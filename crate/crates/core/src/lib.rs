//! Wavelet and multiwavelet analysis on the Vilenkin group.
//!
//! The crate is organized bottom-up:
//!
//! - [`group`]: digit sequences, the group operation, dilations, `λ` and characters;
//! - [`walsh`]: generalized Walsh functions and the radix-`p` Chrestenson transform;
//! - [`grid`]: finite-resolution samples of functions on `G*` and `G`;
//! - [`mask`]: refinement masks, refinable functions and their checks;
//! - [`mra`]: blocked sets and the MRA verdict for a mask;
//! - [`frame`]: generalized filters, pseudo-scaling functions and Parseval frame multiwavelets;
//! - [`io`]: the text file formats for masks, filters and vectors.
//!
//! A guide with worked examples lives in the `book/` directory of the repository.

pub mod error;
pub mod frame;
pub mod grid;
pub mod group;
pub mod io;
pub mod mask;
pub mod mra;
pub mod walsh;

pub use error::{Error, Result};
pub use num_complex::Complex64;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/group.md")]
    mod group {}
    #[doc = include_str!("../../../book/src/walsh.md")]
    mod walsh {}
    #[doc = include_str!("../../../book/src/masks.md")]
    mod masks {}
    #[doc = include_str!("../../../book/src/mra.md")]
    mod mra {}
    #[doc = include_str!("../../../book/src/frames.md")]
    mod frames {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
