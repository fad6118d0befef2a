//! Cartan–Hartogs domains over bounded symmetric domains, their duals, and
//! the explicit symplectic coordinates relating them to flat space.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod cli;
pub mod error;
pub mod forms;
pub mod hartogs;
pub mod jtsys;
pub mod measures;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};
pub use forms::{FdConfig, FormDiff, HermitianForm, TwoForm};
pub use hartogs::{HartogsPoint, HartogsSpec};
pub use jtsys::{DomainKind, DomainPoint, DomainSpec, Isotropy, Sign, C64};
