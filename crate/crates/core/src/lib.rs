//! Numerical geometry of surfaces in quaternionic projective space HP^n.
//!
//! Points of HP^n are modelled on C^{2n+2} with the quaternionic structure
//! `j v = J v̄`; surfaces are given by unit lifts with exact or
//! finite-difference jets. The crate checks total reality, minimality,
//! flatness and horizontality, builds harmonic sequences, constructs
//! horizontal lifts by integrating the SU(2) gauge equation, and generates
//! the exponential and classified flat minimal families.

pub mod calculus;
pub mod checkers;
pub mod congruence;
pub mod families;
pub mod gauge;
pub mod harmonic;
pub mod error;
pub mod jet;
pub mod linalg;
pub mod scan;
pub mod surface;
pub mod tolerances;

pub use error::{Error, Result};
pub use jet::{Jet, ScalarJet};
pub use linalg::{CMat, CVec, HPoint, C64};
pub use surface::{Cell, FdConfig, Grid, Lift, Provider, SurfaceMap};
