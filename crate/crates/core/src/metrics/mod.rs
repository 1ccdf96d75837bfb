//! Recovery times, covering estimates, box dimension and rate diagnostics.

mod cover;
mod dimension;
mod rates;
mod recovery;

pub use cover::{covering_estimate, greedy_centres, CoverEstimate};
pub use dimension::{box_dimension, DimensionEstimate, ScaleSchedule};
pub use rates::{iterated_log_rate, key_inequality_check, log_rate, rate_ratio};
pub use recovery::{orbit_covers, recovery_time, recovery_times, RecoveryRecord};
