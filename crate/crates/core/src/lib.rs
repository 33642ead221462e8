//! Linear sampling reconstruction of sound-soft obstacles from active
//! (near-field) and passive (cross-correlation) acoustic measurements.
//!
//! The crate is organised along the data flow: [`specfun`] and
//! [`geometry`] feed the boundary-integral solver in [`forward`], whose fields
//! become measurement matrices in [`acquisition`]. [`inversion`] turns a
//! matrix into an indicator map, and [`pipeline`] ties everything to presets,
//! configuration files and output files. The guide in `book/` walks through
//! each step.
//!
//! ```
//! use passive_lsm::pipeline::{execute, preset};
//!
//! # fn main() -> passive_lsm::Result<()> {
//! let mut cfg = preset("ellipse-N")?;
//! cfg.set("grid.nx", "20")?;
//! cfg.set("grid.ny", "20")?;
//! let out = execute(&cfg)?;
//! assert_eq!(out.map.values.len(), 400);
//! # Ok(())
//! # }
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acquisition;
pub mod error;
pub mod forward;
pub mod geometry;
pub mod inversion;
pub mod linalg;
pub mod pipeline;
pub mod point;
pub mod seeding;
pub mod specfun;

pub use error::{Error, Result};
pub use point::Point;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/quickstart.md")]
    mod quickstart {}
    #[doc = include_str!("../../../book/src/waves.md")]
    mod waves {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/forward.md")]
    mod forward {}
    #[doc = include_str!("../../../book/src/measurements.md")]
    mod measurements {}
    #[doc = include_str!("../../../book/src/inversion.md")]
    mod inversion {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
