//! Classical protocols that reproduce the measurement statistics of
//! maximally entangled qubits exactly, using shared randomness plus a few
//! bits of one-way communication.
//!
//! * [`protocols::table`]: any finite scenario with `ceil(log2 |M_A|)` bits.
//! * [`protocols::slot`]: all real measurements on one Bell pair with 4 bits.
//! * [`protocols::composed`]: all von Neumann measurements with 8 bits.
//! * [`dj`]: restricted equality on top of any exact simulator of
//!   Deutsch-Jozsa measurements on `n` Bell pairs.
//!
//! [`quantum`] holds the exact distributions the protocols are measured
//! against and [`verify`] the machinery that does the measuring.
//!
//! ```
//! use entsim::slots::Angle;
//! use entsim::verify::integrate_slot;
//!
//! let x = Angle::new(0.0)?;
//! let y = Angle::new(std::f64::consts::PI / 3.0)?;
//! // cos^2(pi/6)
//! assert!((integrate_slot(x, y) - 0.75).abs() < 1e-12);
//! # Ok::<(), entsim::Error>(())
//! ```

pub mod cli;
pub mod dj;
pub mod engine;
pub mod error;
pub mod protocols;
pub mod quantum;
pub mod rng;
pub mod slots;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/slots.md")]
    mod slots {}
    #[doc = include_str!("../../../book/src/slot-protocol.md")]
    mod slot_protocol {}
    #[doc = include_str!("../../../book/src/composed.md")]
    mod composed {}
    #[doc = include_str!("../../../book/src/tables.md")]
    mod tables {}
    #[doc = include_str!("../../../book/src/deutsch-jozsa.md")]
    mod deutsch_jozsa {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
