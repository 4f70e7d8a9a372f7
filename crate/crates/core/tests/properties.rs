use proptest::collection::vec;
use proptest::prelude::*;

use rtdisk::aco::{self, PheromoneMatrix};
use rtdisk::baselines::{edf_pick, scan_edf_pick, sstf_pick};
use rtdisk::workload::{read_jsonl, write_jsonl};
use rtdisk::{DiskGeometry, HeadState, Problem, RotationMode, Task};

fn arb_task(id: u32) -> impl Strategy<Value = Task> {
    (0.0..500.0f64, 1.0..400.0f64, 0u32..1972, 0u32..72, 1u64..200_000).prop_map(
        move |(ready, period, cylinder, sector, size)| Task {
            id,
            ready,
            deadline: ready + period,
            cylinder,
            sector,
            size,
        },
    )
}

fn arb_queue(max: usize) -> impl Strategy<Value = Vec<Task>> {
    (1..=max).prop_flat_map(|n| (0..n as u32).map(arb_task).collect::<Vec<_>>())
}

fn arb_rotation() -> impl Strategy<Value = RotationMode> {
    prop_oneof![Just(RotationMode::Angular), Just(RotationMode::FixedHalf)]
}

proptest! {
    #[test]
    fn seek_is_monotone(a in 0u32..1971) {
        let g = DiskGeometry::default();
        prop_assert!(g.seek_time(a).unwrap() <= g.seek_time(a + 1).unwrap());
    }

    #[test]
    fn angular_latency_stays_within_one_revolution(t in 0.0..1e7f64, sector in 0u32..72) {
        let g = DiskGeometry::default();
        let latency = g.rotational_latency(t, sector).unwrap();
        prop_assert!((0.0..g.rotation_period()).contains(&latency));
    }

    #[test]
    fn service_is_the_sum_of_its_parts(
        time in 0.0..1e5f64,
        cylinder in 0u32..1972,
        task in arb_task(0),
        mode in arb_rotation(),
    ) {
        let g = DiskGeometry::default().with_rotation(mode);
        let head = HeadState::new(time, cylinder);
        let seek = g.seek_time(task.cylinder.abs_diff(cylinder)).unwrap();
        let rotation = g.rotational_latency(time + seek, task.sector).unwrap();
        let transfer = g.transfer_time(task.size);
        let service = g.service_time(head, &task).unwrap();
        prop_assert_eq!(service, seek + rotation + transfer);
        prop_assert!(service >= transfer);
    }

    #[test]
    fn selection_probabilities_normalize(
        heuristics in vec(1e-6..1.0f64, 1..12),
        tau in 10.0..20.0f64,
        alpha in 0.0..3.0f64,
        beta in 0.0..3.0f64,
        mask in vec(any::<bool>(), 12),
    ) {
        let n = heuristics.len();
        let mut eligible = mask[..n].to_vec();
        eligible[0] = true;
        let m = PheromoneMatrix::new(n, tau);
        let p = aco::selection_probability(&m, &heuristics, alpha, beta, m.start(), &eligible);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for (pj, e) in p.iter().zip(&eligible) {
            prop_assert!(*pj >= 0.0);
            if !e {
                prop_assert_eq!(*pj, 0.0);
            }
        }
    }

    #[test]
    fn jsonl_round_trips(queues in vec(arb_queue(6), 1..5)) {
        let problems: Vec<Problem> = queues
            .into_iter()
            .enumerate()
            .map(|(id, tasks)| Problem { id: id as u32, tasks })
            .collect();
        let mut buf = Vec::new();
        write_jsonl(&problems, &mut buf).unwrap();
        prop_assert_eq!(read_jsonl(buf.as_slice()).unwrap(), problems);
    }

    #[test]
    fn edf_and_sstf_pick_global_minima(queue in arb_queue(20), cylinder in 0u32..1972) {
        let head = HeadState::new(0.0, cylinder);
        let edf = edf_pick(&queue).unwrap();
        let min_deadline = queue.iter().map(|t| t.deadline).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(queue.iter().find(|t| t.id == edf).unwrap().deadline, min_deadline);

        let sstf = sstf_pick(&queue, head).unwrap();
        let min_distance = queue.iter().map(|t| t.cylinder.abs_diff(cylinder)).min().unwrap();
        prop_assert_eq!(queue.iter().find(|t| t.id == sstf).unwrap().cylinder.abs_diff(cylinder), min_distance);
    }

    #[test]
    fn scan_edf_is_edf_for_distinct_deadlines(queue in arb_queue(20), cylinder in 0u32..1972) {
        let mut deadlines: Vec<f64> = queue.iter().map(|t| t.deadline).collect();
        deadlines.sort_by(f64::total_cmp);
        prop_assume!(deadlines.windows(2).all(|w| w[0] != w[1]));
        let head = HeadState::new(0.0, cylinder);
        prop_assert_eq!(scan_edf_pick(&queue, head), edf_pick(&queue));
    }
}
