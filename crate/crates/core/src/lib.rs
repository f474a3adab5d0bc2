//! Exact calculator for RO(C2)-graded coefficient rings of Real spectra,
//! their local cohomology and Anderson duality.

pub mod blocks;
pub mod bpr;
pub mod duality;
pub mod error;
pub mod grading;
pub mod hfpss;
pub mod localcoh;
pub mod groups;
pub mod module;
pub mod snf;

pub use error::{Error, Result};
pub use grading::{Degree, Window};
pub use groups::{GradedGroups, GroupEntry};
pub use snf::Group;
