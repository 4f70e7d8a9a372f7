//! Parametric disk service-time model.
//!
//! The defaults describe an HP 97560: 1972 cylinders, 19 tracks per
//! cylinder, 72 sectors of 512 bytes per track, 4002 RPM and a 10 MBps
//! transfer rate. Seek time is piecewise in the cylinder distance `d`:
//!
//! ```text
//! seek(0) = 0
//! seek(d) = 3.24 + 0.4 * sqrt(d)    for 1 <= d <= 383
//! seek(d) = 8.00 + 0.008 * d        for d > 383
//! ```
//!
//! A request on the current cylinder costs no seek at all; the 3.24 ms
//! offset only applies to real arm movement.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{MBPS, MS_PER_MINUTE, MS_PER_SECOND};
use crate::workload::Task;

/// How rotational latency is derived.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationMode {
    /// Track the platter angle from the simulated clock.
    #[default]
    Angular,
    /// Always charge half a revolution.
    FixedHalf,
}

impl std::str::FromStr for RotationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "angular" => Ok(RotationMode::Angular),
            "fixed-half" | "fixed_half" => Ok(RotationMode::FixedHalf),
            other => Err(Error::Usage(format!(
                "unknown rotation mode `{other}` (expected angular|fixed-half)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiskGeometry {
    pub cylinders: u32,
    pub tracks_per_cylinder: u32,
    pub sectors_per_track: u32,
    /// Bytes.
    pub sector_size: u32,
    pub rpm: f64,
    /// Bytes per second.
    pub transfer_rate: f64,
    pub seek_near_base: f64,
    pub seek_near_coeff: f64,
    pub seek_far_base: f64,
    pub seek_far_coeff: f64,
    /// Largest distance (in cylinders) served by the square-root branch.
    pub seek_breakpoint: u32,
    pub rotation_mode: RotationMode,
}

impl Default for DiskGeometry {
    fn default() -> Self {
        DiskGeometry {
            cylinders: 1972,
            tracks_per_cylinder: 19,
            sectors_per_track: 72,
            sector_size: 512,
            rpm: 4002.0,
            transfer_rate: 10.0 * MBPS,
            seek_near_base: 3.24,
            seek_near_coeff: 0.4,
            seek_far_base: 8.00,
            seek_far_coeff: 0.008,
            seek_breakpoint: 383,
            rotation_mode: RotationMode::Angular,
        }
    }
}

/// Simulated clock and arm position.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HeadState {
    pub time: f64,
    pub cylinder: u32,
}

impl HeadState {
    pub fn new(time: f64, cylinder: u32) -> Self {
        HeadState { time, cylinder }
    }
}

impl DiskGeometry {
    pub fn with_rotation(mut self, mode: RotationMode) -> Self {
        self.rotation_mode = mode;
        self
    }

    /// Reads a geometry from a JSON document. Missing fields keep their
    /// HP 97560 defaults.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let geometry: DiskGeometry = serde_json::from_str(text)?;
        geometry.validate()?;
        Ok(geometry)
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("cylinders", self.cylinders),
            ("tracks_per_cylinder", self.tracks_per_cylinder),
            ("sectors_per_track", self.sectors_per_track),
            ("sector_size", self.sector_size),
        ];
        for (name, value) in counts {
            if value == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        let rates = [("rpm", self.rpm), ("transfer_rate", self.transfer_rate)];
        for (name, value) in rates {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!("{name} must be finite and positive")));
            }
        }
        let seek_params = [
            self.seek_near_base,
            self.seek_near_coeff,
            self.seek_far_base,
            self.seek_far_coeff,
        ];
        if seek_params.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config(
                "seek parameters must be finite and non-negative".into(),
            ));
        }
        if self.seek_breakpoint >= self.cylinders {
            return Err(Error::Config(format!(
                "seek_breakpoint {} must be below cylinders {}",
                self.seek_breakpoint, self.cylinders
            )));
        }
        let period = self.rotation_period();
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::Config("rotation period must be finite and positive".into()));
        }
        Ok(())
    }

    /// One revolution, in ms.
    pub fn rotation_period(&self) -> f64 {
        MS_PER_MINUTE / self.rpm
    }

    pub fn seek_time(&self, distance: u32) -> Result<f64> {
        if distance >= self.cylinders {
            return Err(Error::Domain(format!(
                "seek distance {distance} outside [0, {})",
                self.cylinders
            )));
        }
        Ok(if distance == 0 {
            0.0
        } else if distance <= self.seek_breakpoint {
            self.seek_near_base + self.seek_near_coeff * f64::from(distance).sqrt()
        } else {
            self.seek_far_base + self.seek_far_coeff * f64::from(distance)
        })
    }

    pub fn rotational_latency(&self, arrival_time: f64, target_sector: u32) -> Result<f64> {
        if target_sector >= self.sectors_per_track {
            return Err(Error::Domain(format!(
                "sector {target_sector} outside [0, {})",
                self.sectors_per_track
            )));
        }
        if !(arrival_time >= 0.0) {
            return Err(Error::Domain(format!(
                "arrival time {arrival_time} must be non-negative"
            )));
        }
        let period = self.rotation_period();
        Ok(match self.rotation_mode {
            RotationMode::FixedHalf => period / 2.0,
            RotationMode::Angular => {
                let sector_offset =
                    f64::from(target_sector) * period / f64::from(self.sectors_per_track);
                let latency = (sector_offset - arrival_time % period).rem_euclid(period);
                // rem_euclid may round up to exactly `period`
                if latency >= period {
                    0.0
                } else {
                    latency
                }
            }
        })
    }

    pub fn transfer_time(&self, size: u64) -> f64 {
        size as f64 / self.transfer_rate * MS_PER_SECOND
    }

    /// Cost of serving `task` next from `head`: seek, then rotation at the
    /// post-seek arrival time, then transfer.
    pub fn service_time(&self, head: HeadState, task: &Task) -> Result<f64> {
        if task.cylinder >= self.cylinders {
            return Err(Error::Domain(format!(
                "task {} cylinder {} outside [0, {})",
                task.id, task.cylinder, self.cylinders
            )));
        }
        let seek = self.seek_time(task.cylinder.abs_diff(head.cylinder))?;
        let rotation = self.rotational_latency(head.time + seek, task.sector)?;
        Ok(seek + rotation + self.transfer_time(task.size))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn task(cylinder: u32, sector: u32, size: u64) -> Task {
        Task {
            id: 0,
            ready: 0.0,
            deadline: 1e9,
            cylinder,
            sector,
            size,
        }
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn seek_examples() {
        let g = DiskGeometry::default();
        assert_eq!(g.seek_time(0).unwrap(), 0.0);
        assert!(close(g.seek_time(100).unwrap(), 7.24));
        assert!(close(g.seek_time(383).unwrap(), 11.068_154_316_312_37));
        assert!(close(g.seek_time(384).unwrap(), 11.072));
        assert!(g.seek_time(1972).is_err());
        assert!(g.seek_time(1971).is_ok());
    }

    #[test]
    fn seek_branches_meet_near_breakpoint() {
        let g = DiskGeometry::default();
        let gap = (g.seek_time(383).unwrap() - g.seek_time(384).unwrap()).abs();
        assert!(gap < 0.01, "gap {gap}");
    }

    #[test]
    fn rotation_examples() {
        let g = DiskGeometry::default();
        let half = 60000.0 / 4002.0 / 2.0;
        assert_eq!(g.rotational_latency(0.0, 0).unwrap(), 0.0);
        assert!(close(g.rotational_latency(0.0, 36).unwrap(), half));
        assert!(close(half, 7.496_251_874_062_969));
        let fixed = g.clone().with_rotation(RotationMode::FixedHalf);
        assert!(close(fixed.rotational_latency(123.4, 5).unwrap(), half));
        assert!(g.rotational_latency(0.0, 72).is_err());
        assert!(g.rotational_latency(-1.0, 0).is_err());
    }

    #[test]
    fn angular_rotation_wraps_with_the_clock() {
        let g = DiskGeometry::default();
        let period = g.rotation_period();
        // Arriving one full revolution later sees the same angle.
        let a = g.rotational_latency(1.0, 10).unwrap();
        let b = g.rotational_latency(1.0 + period, 10).unwrap();
        assert!((a - b).abs() < 1e-9);
        // Just past the sector start means waiting almost a full turn.
        let sector_time = period / 72.0;
        let late = g.rotational_latency(10.0 * sector_time + 1e-6, 10).unwrap();
        assert!(late > period - 1e-5 && late < period);
    }

    #[test]
    fn transfer_examples() {
        let g = DiskGeometry::default();
        assert_eq!(g.transfer_time(0), 0.0);
        assert!(close(g.transfer_time(36864), 3.6864));
        assert!(close(g.transfer_time(512), 0.0512));
    }

    #[test]
    fn service_examples() {
        let g = DiskGeometry::default();
        let head = HeadState::new(0.0, 0);
        assert!(close(g.service_time(head, &task(0, 0, 36864)).unwrap(), 3.6864));

        let fixed = g.clone().with_rotation(RotationMode::FixedHalf);
        let c = fixed.service_time(head, &task(100, 17, 36864)).unwrap();
        assert!(close(c, 7.24 + 60000.0 / 4002.0 / 2.0 + 3.6864));
        assert!(close(c, 18.422_651_874_062_97));

        let c = fixed
            .service_time(HeadState::new(0.0, 5), &task(5, 0, 0))
            .unwrap();
        assert!(close(c, 7.496_251_874_062_969));
    }

    #[test]
    fn service_rejects_out_of_range_task() {
        let g = DiskGeometry::default();
        let head = HeadState::default();
        assert!(g.service_time(head, &task(1972, 0, 1)).is_err());
        assert!(g.service_time(head, &task(0, 72, 1)).is_err());
    }

    #[test]
    fn geometry_json_defaults_and_overrides() {
        let g = DiskGeometry::from_json_str("{}").unwrap();
        assert_eq!(g, DiskGeometry::default());
        let g = DiskGeometry::from_json_str(r#"{"rpm": 7200, "rotation_mode": "fixed_half"}"#)
            .unwrap();
        assert_eq!(g.rpm, 7200.0);
        assert_eq!(g.rotation_mode, RotationMode::FixedHalf);
        assert_eq!(g.cylinders, 1972);
        assert!(DiskGeometry::from_json_str(r#"{"rpms": 1}"#).is_err());
        assert!(DiskGeometry::from_json_str(r#"{"seek_breakpoint": 1972}"#).is_err());
        assert!(DiskGeometry::from_json_str(r#"{"cylinders": 0}"#).is_err());
    }
}
