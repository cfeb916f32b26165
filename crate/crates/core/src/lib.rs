pub mod analytic;
pub mod bethe;
pub mod catalog;
pub mod classical;
pub mod error;
pub mod linalg;
pub mod numeric;
pub mod ordering;
pub mod quadrature;

pub use catalog::{make_system, PdmModel, PdmSystem, SystemConfig, SystemId};
pub use error::{Error, Result};
pub use ordering::{aggregate, OrderingAggregate, OrderingScheme, OrderingTerm};
