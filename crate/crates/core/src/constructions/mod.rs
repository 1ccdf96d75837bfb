//! Covering words and the slow-driver schedule.

mod base;
mod rate;
mod schedule;
mod sigma;
mod slow;

pub use base::{choose_base_map, BaseMapChoice, DEFAULT_MIN_OUTSIDE};
pub use rate::RateFunction;
pub use schedule::{build_schedule, Schedule, ScheduleEntry, ScheduleLimits, TrendSample};
pub use sigma::{build_sigma, AddressedPoints, CoveringWord, SIGMA_BUDGET};
pub use slow::slow_driver;
