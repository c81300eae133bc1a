use std::collections::VecDeque;

use musegen::bspca::{
    generate_layout, generate_scene, partition, place_rooms_and_corridors, rasterize_states, BspError, BspParams,
    CellState, DEFAULT_MAX_RESTARTS,
};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = BspParams> {
    (24i32..72, 24i32..72, 1u32..10, 3i32..6, 0i32..5, 1i32..3, 0i32..2, any::<u64>()).prop_map(
        |(w, d, n, rmin, rextra, cmin, cextra, seed)| BspParams {
            footprint_w: w,
            footprint_d: d,
            num_rooms: n,
            room_min: rmin,
            room_max: rmin + rextra,
            corridor_min: cmin,
            corridor_max: cmin + cextra,
            seed,
            max_restarts: DEFAULT_MAX_RESTARTS,
        },
    )
}

/// Floor cells reachable from the first floor cell by 4-neighbour steps
/// through floor and door cells.
fn bfs_reaches_all(grid: &musegen::bspca::CellGrid) -> bool {
    let walk = |x: i32, y: i32| grid.get(x, y).is_some_and(|c| matches!(c.state, CellState::Floor | CellState::Door));
    let floors: Vec<(i32, i32)> = grid.iter().filter(|(_, _, c)| c.state == CellState::Floor).map(|(x, y, _)| (x, y)).collect();
    let Some(&start) = floors.first() else { return true };
    let mut seen = std::collections::HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((x, y)) = queue.pop_front() {
        for (dx, dy) in [(0, -1), (1, 0), (0, 1), (-1, 0)] {
            let n = (x + dx, y + dy);
            if walk(n.0, n.1) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    floors.iter().all(|f| seen.contains(f))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn layouts_are_sound(p in params()) {
        match generate_layout(&p) {
            Ok(layout) => {
                prop_assert_eq!(layout.rooms.len(), p.num_rooms as usize);
                prop_assert!(layout.tree.is_well_formed());
                prop_assert_eq!(layout.seed_used, p.seed.wrapping_add(layout.attempt as u64));
                let grid = rasterize_states(&layout);
                prop_assert_eq!((grid.width(), grid.depth()), (p.footprint_w, p.footprint_d));
                prop_assert!(bfs_reaches_all(&grid));
                prop_assert!(grid.is_enclosed());
                // the same attempt replays from its seed
                let tree = partition(&p, layout.seed_used).unwrap();
                let replay = place_rooms_and_corridors(tree, &p, layout.seed_used, layout.attempt).unwrap();
                prop_assert_eq!(replay, layout);
            }
            Err(BspError::InfeasibleParams(_) | BspError::RestartExhausted(_)) => {}
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn layouts_are_deterministic(p in params()) {
        if let Ok((_, grid, scene)) = generate_scene(&p, 3.0, 1) {
            let (_, grid2, scene2) = generate_scene(&p, 3.0, 1).unwrap();
            prop_assert_eq!(grid, grid2);
            prop_assert_eq!(scene.export_layout(), scene2.export_layout());
        }
    }

    #[test]
    fn rejected_params_fail_validation(p in params()) {
        let area = p.footprint_w as i64 * p.footprint_d as i64;
        let leaf = (p.room_min + 4) as i64;
        if p.num_rooms as i64 * leaf * leaf > area {
            prop_assert!(matches!(p.validate(), Err(BspError::InfeasibleParams(_))));
            prop_assert!(matches!(generate_layout(&p), Err(BspError::InfeasibleParams(_))));
        }
    }
}
