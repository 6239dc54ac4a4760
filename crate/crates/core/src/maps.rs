//! Built-in generators for the six evaluation workspaces.
//!
//! `empty-32-32` is exact. The other layouts are seeded procedural
//! reconstructions with the published dimensions and topology class; the two
//! warehouse maps carry workstation and endpoint cells.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gridmap::{Cell, CellKind, GridMap};

pub const BENCHMARK_MAPS: [&str; 6] = [
    "warehouse-33-36",
    "warehouse-10-20-10-2-1",
    "maze-32-32-4",
    "empty-32-32",
    "random-64-64-10",
    "room-64-64-16",
];

const LAYOUT_SEED: u64 = 0x0005_eed0_f1a7;

/// Generate a benchmark map by name. Returns `None` for unknown names.
pub fn benchmark_map(name: &str) -> Option<GridMap> {
    let mut map = match name {
        "empty-32-32" => GridMap::empty(32, 32),
        "random-64-64-10" => random_map(64, 64, 0.10),
        "room-64-64-16" => room_map(64, 16),
        "maze-32-32-4" => maze_map(32, 4),
        "warehouse-10-20-10-2-1" => warehouse_10_20(),
        "warehouse-33-36" => warehouse_33_36(),
        _ => return None,
    };
    map.keep_largest_component();
    Some(map)
}

fn grid(width: u32, height: u32, fill: CellKind) -> Vec<CellKind> {
    vec![fill; (width * height) as usize]
}

fn random_map(width: u32, height: u32, density: f64) -> GridMap {
    let mut rng = ChaCha8Rng::seed_from_u64(LAYOUT_SEED);
    let kinds = (0..width * height)
        .map(|_| {
            if rng.random_bool(density) {
                CellKind::Obstacle
            } else {
                CellKind::Free
            }
        })
        .collect();
    GridMap::from_kinds(width, height, kinds).expect("random map has free cells")
}

/// Square rooms of `pitch - 1` cells separated by one-cell walls with one door per wall segment.
fn room_map(size: u32, pitch: u32) -> GridMap {
    let mut rng = ChaCha8Rng::seed_from_u64(LAYOUT_SEED + 1);
    let mut kinds = grid(size, size, CellKind::Free);
    let idx = |r: u32, c: u32| (r * size + c) as usize;
    let walls: Vec<u32> = (1..size / pitch).map(|k| k * pitch - 1).collect();
    for &w in &walls {
        for i in 0..size {
            kinds[idx(w, i)] = CellKind::Obstacle;
            kinds[idx(i, w)] = CellKind::Obstacle;
        }
    }
    // one door in every wall segment between two neighboring rooms
    let mut bounds = vec![0];
    bounds.extend(walls.iter().map(|w| w + 1));
    for &w in &walls {
        for &lo in &bounds {
            let hi = (lo + pitch - 1).min(size);
            let span: Vec<u32> = (lo..hi).filter(|i| !walls.contains(i)).collect();
            let door = span[rng.random_range(0..span.len())];
            kinds[idx(w, door)] = CellKind::Free;
            let door = span[rng.random_range(0..span.len())];
            kinds[idx(door, w)] = CellKind::Free;
        }
    }
    GridMap::from_kinds(size, size, kinds).expect("room map has free cells")
}

/// Depth-first maze on a lattice of `corridor`-wide passages separated by one-cell walls.
fn maze_map(size: u32, corridor: u32) -> GridMap {
    let mut rng = ChaCha8Rng::seed_from_u64(LAYOUT_SEED + 2);
    let pitch = corridor + 1;
    let lattice = size / pitch;
    let mut kinds = grid(size, size, CellKind::Obstacle);
    let idx = |r: u32, c: u32| (r * size + c) as usize;
    let carve = |kinds: &mut Vec<CellKind>, r0: u32, c0: u32, h: u32, w: u32| {
        for r in r0..(r0 + h).min(size) {
            for c in c0..(c0 + w).min(size) {
                kinds[idx(r, c)] = CellKind::Free;
            }
        }
    };
    let mut visited = vec![false; (lattice * lattice) as usize];
    let mut stack = vec![(0u32, 0u32)];
    visited[0] = true;
    carve(&mut kinds, 0, 0, corridor, corridor);
    while let Some(&(r, c)) = stack.last() {
        let mut options: Vec<(u32, u32)> = Vec::new();
        if r > 0 {
            options.push((r - 1, c));
        }
        if c + 1 < lattice {
            options.push((r, c + 1));
        }
        if r + 1 < lattice {
            options.push((r + 1, c));
        }
        if c > 0 {
            options.push((r, c - 1));
        }
        options.retain(|(nr, nc)| !visited[(nr * lattice + nc) as usize]);
        let Some(&(nr, nc)) = options.choose(&mut rng) else {
            stack.pop();
            continue;
        };
        visited[(nr * lattice + nc) as usize] = true;
        carve(&mut kinds, nr * pitch, nc * pitch, corridor, corridor);
        // open the wall between the two lattice cells
        let (r0, c0) = (r.min(nr) * pitch, c.min(nc) * pitch);
        if nr != r {
            carve(&mut kinds, r0 + corridor, c0, 1, corridor);
        } else {
            carve(&mut kinds, r0, c0 + corridor, corridor, 1);
        }
        stack.push((nr, nc));
    }
    GridMap::from_kinds(size, size, kinds).expect("maze has free cells")
}

/// Horizontal shelf rows; free cells directly above or below a shelf become endpoints.
fn place_shelves(
    kinds: &mut [CellKind],
    width: u32,
    shelf_rows: &[u32],
    shelf_spans: &[(u32, u32)],
) {
    let idx = |r: u32, c: u32| (r * width + c) as usize;
    for &r in shelf_rows {
        for &(c0, c1) in shelf_spans {
            for c in c0..c1 {
                kinds[idx(r, c)] = CellKind::Obstacle;
                for nr in [r.wrapping_sub(1), r + 1] {
                    let i = idx(nr, c);
                    if nr != u32::MAX && i < kinds.len() && kinds[i] == CellKind::Free {
                        kinds[i] = CellKind::Endpoint;
                    }
                }
            }
        }
    }
}

fn warehouse_10_20() -> GridMap {
    let (width, height) = (161u32, 63u32);
    let mut kinds = grid(width, height, CellKind::Free);
    let shelf_rows: Vec<u32> = (0..20).map(|k| 2 + 3 * k).collect();
    let spans: Vec<(u32, u32)> = (0..10).map(|k| (21 + 12 * k, 31 + 12 * k)).collect();
    place_shelves(&mut kinds, width, &shelf_rows, &spans);
    for r in (1..height).step_by(3) {
        kinds[(r * width) as usize] = CellKind::Workstation;
        kinds[(r * width + width - 1) as usize] = CellKind::Workstation;
    }
    GridMap::from_kinds(width, height, kinds).expect("warehouse has free cells")
}

fn warehouse_33_36() -> GridMap {
    let (width, height) = (36u32, 33u32);
    let mut kinds = grid(width, height, CellKind::Free);
    let shelf_rows: Vec<u32> = (0..10).map(|k| 2 + 3 * k).collect();
    place_shelves(&mut kinds, width, &shelf_rows, &[(5, 17), (19, 31)]);
    for r in (2..height - 2).step_by(3) {
        kinds[(r * width) as usize] = CellKind::Workstation;
        kinds[(r * width + width - 1) as usize] = CellKind::Workstation;
    }
    GridMap::from_kinds(width, height, kinds).expect("warehouse has free cells")
}

/// Distinct random traversable cells, sampled by rejection.
pub fn sample_distinct_cells<R: Rng>(map: &GridMap, count: usize, rng: &mut R) -> Option<Vec<Cell>> {
    let free: Vec<Cell> = map.traversable_cells().collect();
    if free.len() < count {
        return None;
    }
    let mut taken = vec![false; map.num_cells()];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let c = free[rng.random_range(0..free.len())];
        let i = map.index(c);
        if !taken[i] {
            taken[i] = true;
            out.push(c);
        }
    }
    Some(out)
}
