//! Shared fixtures for the integration and acceptance suites: reference
//! walks, cached oracle grids, and a seeded random walk generator.

use std::sync::OnceLock;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qptail::oracle::{solve_stationary, StationaryGrid};
use qptail::walk::{reference_walk_w1, WalkSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One W1 grid at the acceptance truncation, shared across tests.
pub fn w1_grid_400() -> &'static StationaryGrid {
    static GRID: OnceLock<StationaryGrid> = OnceLock::new();
    GRID.get_or_init(|| solve_stationary(&reference_walk_w1(), 400, 1e-13).expect("W1 solves"))
}

/// Fully X-shaped walk (interior, horizontal, and vertical all X-shaped)
/// with the branch point dominant on both sides: scenario 5, Case 3.
pub fn fully_x_shaped_walk() -> WalkSpec {
    WalkSpec::from_steps(
        &[
            (1, 1, 0.05),
            (-1, 1, 0.15),
            (1, -1, 0.10),
            (-1, -1, 0.30),
            (0, 0, 0.40),
        ],
        &[(-1, 1, 0.095), (1, 1, 0.005), (0, 0, 0.9)],
        &[(1, -1, 0.095), (1, 1, 0.005), (0, 0, 0.9)],
        &[(1, 0, 0.3), (0, 1, 0.3), (1, 1, 0.2), (0, 0, 0.2)],
    )
    .expect("valid fully X-shaped walk")
}

/// Interior-only X-shaped walk (scenario 2) with x3 dominant: Case 3 with
/// both parities populated.
pub fn interior_x_shaped_walk() -> WalkSpec {
    WalkSpec::from_steps(
        &[
            (1, 1, 0.05),
            (-1, 1, 0.15),
            (1, -1, 0.10),
            (-1, -1, 0.30),
            (0, 0, 0.40),
        ],
        &[(0, 1, 0.05), (-1, 0, 0.25), (1, 0, 0.05), (0, 0, 0.65)],
        &[(1, 0, 0.05), (0, -1, 0.25), (0, 1, 0.05), (0, 0, 0.65)],
        &[(1, 0, 0.3), (0, 1, 0.3), (1, 1, 0.2), (0, 0, 0.2)],
    )
    .expect("valid interior X-shaped walk")
}

/// Draw a dense random walk: every interior step positive (hence not
/// X-shaped), boundary and origin maps fully supported.
pub fn random_dense_walk(rng: &mut ChaCha8Rng) -> WalkSpec {
    let draw = |rng: &mut ChaCha8Rng, steps: &[(i32, i32)]| {
        let raw: Vec<f64> = steps.iter().map(|_| rng.gen_range(0.02..1.0)).collect();
        let total: f64 = raw.iter().sum();
        steps
            .iter()
            .zip(raw)
            .map(|(&(di, dj), w)| (di, dj, w / total))
            .collect::<Vec<_>>()
    };
    let interior_steps: Vec<(i32, i32)> = (-1..=1)
        .flat_map(|di| (-1..=1).map(move |dj| (di, dj)))
        .collect();
    let horizontal_steps: Vec<(i32, i32)> = (-1..=1)
        .flat_map(|di| (0..=1).map(move |dj| (di, dj)))
        .collect();
    let vertical_steps: Vec<(i32, i32)> = (0..=1)
        .flat_map(|di| (-1..=1).map(move |dj| (di, dj)))
        .collect();
    let origin_steps: Vec<(i32, i32)> = (0..=1)
        .flat_map(|di| (0..=1).map(move |dj| (di, dj)))
        .collect();
    let interior = draw(rng, &interior_steps);
    let horizontal = draw(rng, &horizontal_steps);
    let vertical = draw(rng, &vertical_steps);
    let origin = draw(rng, &origin_steps);
    WalkSpec::from_steps(&interior, &horizontal, &vertical, &origin).expect("normalized draw")
}

/// Draw a simple (cross-shaped) walk with M_y > 0 and M_x < 0, the
/// premise of the closed-form region conditions.
pub fn random_simple_walk_my_pos(rng: &mut ChaCha8Rng) -> Option<WalkSpec> {
    // Interior axis steps with upward y-drift and leftward x-drift.
    let up = rng.gen_range(0.1..0.3);
    let down = rng.gen_range(0.02..1.0) * up; // p_{0,-1} < p_{0,1}
    let right = rng.gen_range(0.05..0.2);
    let left = right + rng.gen_range(0.02..0.25); // p_{-1,0} > p_{1,0}
    let hold = 1.0 - up - down - left - right;
    if hold < 0.02 {
        return None;
    }
    let h_up = rng.gen_range(0.05..0.3);
    let h_right = rng.gen_range(0.05..0.3);
    let h_left = rng.gen_range(0.05..0.3);
    let h_hold = 1.0 - h_up - h_right - h_left;
    if h_hold < 0.02 {
        return None;
    }
    // Vertical boundary must push down for stability under M_y > 0.
    let v_up = rng.gen_range(0.02..0.1);
    let v_down = v_up + rng.gen_range(0.1..0.4);
    let v_right = rng.gen_range(0.02..0.2);
    let v_hold = 1.0 - v_up - v_down - v_right;
    if v_hold < 0.02 {
        return None;
    }
    WalkSpec::from_steps(
        &[
            (0, 1, up),
            (0, -1, down),
            (1, 0, right),
            (-1, 0, left),
            (0, 0, hold),
        ],
        &[
            (0, 1, h_up),
            (1, 0, h_right),
            (-1, 0, h_left),
            (0, 0, h_hold),
        ],
        &[
            (0, 1, v_up),
            (0, -1, v_down),
            (1, 0, v_right),
            (0, 0, v_hold),
        ],
        &[(1, 0, 0.4), (0, 1, 0.4), (0, 0, 0.2)],
    )
    .ok()
}
