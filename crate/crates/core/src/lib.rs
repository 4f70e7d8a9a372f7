//! Real-time disk scheduling testbed.
//!
//! A parametric disk model ([`disk`]), seeded request workloads
//! ([`workload`]), an online service loop shared by every policy ([`sim`]),
//! classical baselines ([`baselines`]), a MAX-MIN Ant System scheduler
//! ([`aco`]), an exhaustive reference optimizer for small queues
//! ([`oracle`]) and the experiment harness behind the `rtdisk` CLI
//! ([`bench`]).

pub mod aco;
pub mod baselines;
pub mod bench;
pub mod disk;
pub mod error;
pub mod oracle;
pub mod plot;
pub mod policy;
pub mod seed;
pub mod sim;
pub mod units;
pub mod workload;

pub use aco::{AcoParams, AcoPolicy, AntResult};
pub use disk::{DiskGeometry, HeadState, RotationMode};
pub use error::{Error, Result};
pub use policy::PolicyKind;
pub use sim::{run, ExecutionRecord, Outcome, RunMetrics, RunOutput, SchedulerPolicy};
pub use workload::{Problem, Task, TestSet, WorkloadSpec};
