//! Belief combination on finite frames: classical rules, the entropy
//! maximizing rule, the sharpening order and a finite modal semantics.

pub mod document;
pub mod emr;
pub mod error;
pub mod frame;
pub mod lp;
pub mod mass;
pub mod maxent;
pub mod modal;
pub mod oracle;
pub mod qp;
pub mod rules;
pub mod sharpening;
pub mod table1;

pub use emr::{emr_fuse, FusionOutcome, FusionStatus, JointMass, SolverConfig};
pub use error::{Error, Result};
pub use frame::{Frame, Proposition};
pub use mass::{MassFunction, World};
