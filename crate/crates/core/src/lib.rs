//! Evidential reasoning with random permutation sets.
//!
//! The crate covers classical Dempster-Shafer primitives ([`dst`]), permutation
//! mass functions and their combination rules ([`rps`]), the order-aware
//! transformations between the two ([`transform`]), outcome-driven source
//! reliability ([`reliability`]) and a fusion classifier built from those
//! pieces ([`classifier`], [`data`]).
//!
//! ```
//! use rps_evidence::dst::{Frame, MassFunction};
//! use rps_evidence::transform::{ranked_probability_transform, rps_transform, Lambda};
//!
//! let frame = Frame::new(["a", "b", "c"]).unwrap();
//! let m = MassFunction::from_labels(frame, [(vec!["a"], 0.6), (vec!["a", "b"], 0.4)]).unwrap();
//! let rps = rps_transform(&m).unwrap();
//! let p = ranked_probability_transform(&rps, Lambda::DEFAULT);
//! assert_eq!(p.argmax(), 0);
//! ```

pub mod classifier;
pub mod data;
pub mod dst;
mod error;
pub mod norm;
pub mod reliability;
pub mod rps;
pub mod transform;
pub mod worked;

pub use error::{Error, ErrorKind, Result};
