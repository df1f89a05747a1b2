//! Point clouds, domains and parameter schedules.

mod cloud;
mod domain;
mod schedule;

pub use cloud::{dist2, lex_cmp, PointCloud};
pub use domain::{unit_from_angles, DomainKind, DomainSpec};
pub use schedule::{schedule_params, GraphParams, ScheduleMode, DEFAULT_LOG_POWER};
