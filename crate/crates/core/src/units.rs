//! Unit conventions shared across the crate.
//!
//! All times are `f64` milliseconds. Sizes are bytes. A kilobyte is 1024
//! bytes; a megabyte-per-second transfer rate is 10^6 bytes per second.

/// Bytes in one kilobyte (binary).
pub const KB: u64 = 1024;

/// Bytes per second in one "MBps" (decimal).
pub const MBPS: f64 = 1_000_000.0;

/// Default request size: 36 KB.
pub const DEFAULT_REQUEST_BYTES: u64 = 36 * KB;

/// Throughput reporting unit: one 36 KB request per second.
pub const THROUGHPUT_UNIT_BPS: f64 = DEFAULT_REQUEST_BYTES as f64;

pub const MS_PER_SECOND: f64 = 1000.0;
pub const MS_PER_MINUTE: f64 = 60_000.0;
