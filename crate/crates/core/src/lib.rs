//! Power-system optimization toolkit.
//!
//! * [`netmodel`]: case files, validation, per-unit conversion
//! * [`dense`]: dense real/complex matrices and LU
//! * [`matrices`]: B_bus, B_line, X_bus, PTDF, Y_bus, Y_line
//! * [`lp`]: simplex solver with dual multipliers
//! * [`dispatch`]: merit-order and LP economic dispatch
//! * [`dcopf`]: DC optimal power flow (angle and PTDF forms) and LMPs
//! * [`acval`]: AC evaluation of an operating point
//! * [`cli`]: the `gridopt` command-line front end

pub mod acval;
pub mod cli;
pub mod dcopf;
pub mod dense;
pub mod dispatch;
pub mod error;
pub mod lp;
pub mod matrices;
pub mod netmodel;

pub use error::{Error, Result};
pub use netmodel::{parse_case, BusId, Network};

/// Tool version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
