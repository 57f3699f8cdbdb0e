//! Adaptive forward error correction for short-range terahertz links.
//!
//! The crate bundles the two codecs (Reed-Solomon over `GF(2^s)` and
//! multidimensional parity check), a table-driven binary symmetric channel,
//! the feedback-driven configuration controller, and a discrete-time link
//! simulator that ties them together.

pub mod bits;
pub mod channel;
pub mod control;
pub mod error;
pub mod gf;
pub mod mdpc;
pub mod rs;
pub mod sim;
pub mod spec;

pub use error::{CodecError, SimError, SpecError, TableError};
