//! Convolutional network-error correction for coherent linear network
//! coding over finite fields.
//!
//! The pipeline: describe a network ([`network::NetworkSpec`]), derive its
//! transfer matrices, pick an error-pattern set, and run
//! [`nec::construct`] to obtain a convolutional code together with a
//! decoding plan for every sink. [`sim`] pushes encoded messages through the
//! network with injected edge errors to check that every sink recovers them.

pub mod convcode;
pub mod error;
pub mod format;
pub mod galois;
pub mod nec;
pub mod network;
pub mod polymat;
pub mod reference;
pub mod sim;

pub use error::{Error, Result};
pub use galois::{Elem, Field};
