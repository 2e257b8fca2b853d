//! Joint detection and LDPC decoding for decode-and-forward relay links,
//! posed as linear and mixed-integer programs with adaptive parity cuts.
//!
//! The guide under `book/` walks through each module; its snippets run as
//! doctests of this crate.

pub mod channel;
pub mod harness;
pub mod ldpc;
pub mod lp;
pub mod receivers;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/channel.md")]
mod book_channel {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/solver.md")]
mod book_solver {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/parity.md")]
mod book_parity {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/receivers.md")]
mod book_receivers {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/experiments.md")]
mod book_experiments {}
