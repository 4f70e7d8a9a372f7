//! Classical comparison schedulers.
//!
//! SSTF and the sweep family break ties by lower cylinder, then lower id.
//! FIFO and EDF break ties by lower id.
//!
//! The sweep variants follow the usual textbook behavior:
//!
//! * LOOK serves the nearest request ahead of the arm and reverses at the
//!   last pending request in its direction.
//! * SCAN behaves the same but travels to the disk edge before reversing.
//! * C-LOOK only moves upward; when nothing is ahead it jumps to the lowest
//!   pending request.
//! * C-SCAN only moves upward; when nothing is ahead it travels to the top
//!   edge, returns to cylinder 0 and sweeps up again.
//!
//! Edge travel is charged as ordinary seek time through
//! [`SchedulerPolicy::reposition`]. SCAN-EDF works online: at each decision
//! it takes the requests sharing the earliest deadline and serves them in
//! an ascending sweep from the arm position.

use crate::disk::{DiskGeometry, HeadState};
use crate::error::Result;
use crate::sim::SchedulerPolicy;
use crate::workload::Task;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Direction {
    #[default]
    Up,
    Down,
}

impl Direction {
    fn flipped(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScanState {
    pub direction: Direction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScanVariant {
    Scan,
    CScan,
    Look,
    CLook,
}

impl ScanVariant {
    fn circular(self) -> bool {
        matches!(self, ScanVariant::CScan | ScanVariant::CLook)
    }
}

pub fn fifo_pick(queue: &[Task]) -> Option<u32> {
    queue
        .iter()
        .min_by(|a, b| a.ready.total_cmp(&b.ready).then(a.id.cmp(&b.id)))
        .map(|t| t.id)
}

pub fn edf_pick(queue: &[Task]) -> Option<u32> {
    queue
        .iter()
        .min_by(|a, b| a.deadline.total_cmp(&b.deadline).then(a.id.cmp(&b.id)))
        .map(|t| t.id)
}

pub fn sstf_pick(queue: &[Task], head: HeadState) -> Option<u32> {
    queue
        .iter()
        .min_by_key(|t| (t.cylinder.abs_diff(head.cylinder), t.cylinder, t.id))
        .map(|t| t.id)
}

/// Nearest request at or beyond the head in `direction`.
fn nearest_ahead<'a>(
    tasks: impl Iterator<Item = &'a Task>,
    head: u32,
    direction: Direction,
) -> Option<&'a Task> {
    match direction {
        Direction::Up => tasks
            .filter(|t| t.cylinder >= head)
            .min_by_key(|t| (t.cylinder, t.id)),
        Direction::Down => tasks
            .filter(|t| t.cylinder <= head)
            .min_by_key(|t| (head - t.cylinder, t.id)),
    }
}

fn lowest(queue: &[Task]) -> Option<&Task> {
    queue.iter().min_by_key(|t| (t.cylinder, t.id))
}

pub fn scan_family_pick(
    queue: &[Task],
    head: HeadState,
    state: &mut ScanState,
    variant: ScanVariant,
) -> Option<u32> {
    if variant.circular() {
        state.direction = Direction::Up;
        return nearest_ahead(queue.iter(), head.cylinder, Direction::Up)
            .or_else(|| lowest(queue))
            .map(|t| t.id);
    }
    if let Some(t) = nearest_ahead(queue.iter(), head.cylinder, state.direction) {
        return Some(t.id);
    }
    state.direction = state.direction.flipped();
    nearest_ahead(queue.iter(), head.cylinder, state.direction).map(|t| t.id)
}

/// Edge travel for SCAN and C-SCAN when nothing is pending ahead.
pub fn scan_family_reposition(
    queue: &[Task],
    head: HeadState,
    state: &ScanState,
    variant: ScanVariant,
    geometry: &DiskGeometry,
) -> Option<u32> {
    let top = geometry.cylinders - 1;
    let direction = if variant.circular() {
        Direction::Up
    } else {
        state.direction
    };
    if queue.is_empty() || nearest_ahead(queue.iter(), head.cylinder, direction).is_some() {
        return None;
    }
    match (variant, direction) {
        (ScanVariant::Scan, Direction::Up) if head.cylinder < top => Some(top),
        (ScanVariant::Scan, Direction::Down) if head.cylinder > 0 => Some(0),
        (ScanVariant::CScan, _) if head.cylinder < top => Some(top),
        (ScanVariant::CScan, _) => Some(0),
        _ => None,
    }
}

pub fn scan_edf_pick(queue: &[Task], head: HeadState) -> Option<u32> {
    let earliest = queue.iter().map(|t| t.deadline).min_by(f64::total_cmp)?;
    let group = || queue.iter().filter(move |t| t.deadline == earliest);
    nearest_ahead(group(), head.cylinder, Direction::Up)
        .or_else(|| group().min_by_key(|t| (t.cylinder, t.id)))
        .map(|t| t.id)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    Fifo,
    Edf,
    Sstf,
    Scan(ScanVariant),
    ScanEdf,
}

impl BaselineKind {
    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::Fifo => "fifo",
            BaselineKind::Edf => "edf",
            BaselineKind::Sstf => "sstf",
            BaselineKind::Scan(ScanVariant::Scan) => "scan",
            BaselineKind::Scan(ScanVariant::CScan) => "cscan",
            BaselineKind::Scan(ScanVariant::Look) => "look",
            BaselineKind::Scan(ScanVariant::CLook) => "clook",
            BaselineKind::ScanEdf => "scanedf",
        }
    }
}

/// A deterministic baseline as a [`SchedulerPolicy`].
#[derive(Clone, Debug)]
pub struct Baseline {
    kind: BaselineKind,
    state: ScanState,
}

impl Baseline {
    pub fn new(kind: BaselineKind) -> Self {
        Baseline {
            kind,
            state: ScanState::default(),
        }
    }

    pub fn state(&self) -> ScanState {
        self.state
    }
}

impl SchedulerPolicy for Baseline {
    fn name(&self) -> &str {
        self.kind.name()
    }

    fn pick_next(
        &mut self,
        queue: &[Task],
        head: HeadState,
        _geometry: &DiskGeometry,
    ) -> Result<Option<u32>> {
        Ok(match self.kind {
            BaselineKind::Fifo => fifo_pick(queue),
            BaselineKind::Edf => edf_pick(queue),
            BaselineKind::Sstf => sstf_pick(queue, head),
            BaselineKind::Scan(variant) => scan_family_pick(queue, head, &mut self.state, variant),
            BaselineKind::ScanEdf => scan_edf_pick(queue, head),
        })
    }

    fn reposition(&mut self, queue: &[Task], head: HeadState, geometry: &DiskGeometry) -> Option<u32> {
        match self.kind {
            BaselineKind::Scan(variant) => {
                scan_family_reposition(queue, head, &self.state, variant, geometry)
            }
            _ => None,
        }
    }

    fn reset(&mut self) {
        self.state = ScanState::default();
    }
}
