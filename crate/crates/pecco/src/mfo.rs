//! The original moth-flame optimizer.
//!
//! A population of `nsa` moths (positions) chases a shrinking set of flames
//! (the best positions seen so far). Each iteration the flame count drops
//! toward 1, moths spiral toward their paired flame, and positions are
//! clamped back into `[0, ub]`. The spiral offset for one coordinate with
//! distance `d = |flame - moth|` and draw `t` is `d * e^(b*t) * cos(2*pi*t)`,
//! so `t` near 1 explores far from the flame and negative `t` exploits close
//! to it; the lower bound of `t` slides from -1 to -2 over the run.
//!
//! All randomness comes from a single seeded stream with a fixed draw order
//! (initial positions coordinate-major, then per iteration one `t` per
//! coordinate per moth, moth-major), so a seed reproduces a run bit for bit.
//! Fitness evaluations within an iteration run on parallel workers; every
//! draw for the iteration happens before dispatch, so parallelism cannot
//! change results.

use std::f64::consts::TAU;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::objective::{DimensionMismatch, EvalContext, Position};
use crate::report::{finalize_run, Algorithm, RunReport};
use crate::topology::CostMatrix;
use crate::workload::Scenario;

/// Optimizer parameters. `lb` is fixed at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MfoParams {
    /// Number of search candidates (moths).
    pub nsa: usize,
    pub max_iter: usize,
    /// Spiral shape parameter.
    pub b: f64,
    /// Upper bound of every position coordinate.
    pub ub: f64,
    /// Keep the best flames across iterations instead of rebuilding the
    /// flame set from the current moths only.
    pub elitism: bool,
    pub seed: u64,
}

impl Default for MfoParams {
    fn default() -> Self {
        Self {
            nsa: 30,
            max_iter: 100,
            b: 1.0,
            ub: 1.0,
            elitism: true,
            seed: 0,
        }
    }
}

impl MfoParams {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        if self.nsa < 2 {
            return Err(OptimizeError::InvalidParams(
                "nsa must be at least 2".to_string(),
            ));
        }
        if self.max_iter < 1 {
            return Err(OptimizeError::InvalidParams(
                "max_iter must be at least 1".to_string(),
            ));
        }
        if !self.ub.is_finite() || self.ub <= 0.0 {
            return Err(OptimizeError::InvalidParams(
                "ub must be positive and finite".to_string(),
            ));
        }
        if !self.b.is_finite() {
            return Err(OptimizeError::InvalidParams(
                "b must be finite".to_string(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Dimension(#[from] DimensionMismatch),
}

/// Moths, flames, and their objective values during one run. Flames are
/// always sorted by ascending objective (the objective is minimized, so
/// index 0 is the best).
#[derive(Debug, Clone)]
pub struct SwarmState {
    pub moths: Vec<Position>,
    pub moth_objectives: Vec<f64>,
    pub flames: Vec<Position>,
    pub flame_objectives: Vec<f64>,
    /// Current iteration, 1-based.
    pub iteration: usize,
}

impl SwarmState {
    pub fn new(moths: Vec<Position>) -> Self {
        Self {
            moth_objectives: vec![f64::INFINITY; moths.len()],
            moths,
            flames: Vec::new(),
            flame_objectives: Vec::new(),
            iteration: 0,
        }
    }

    /// Score every moth. Evaluations are pure, so they run in parallel;
    /// results are collected back in moth order.
    pub fn evaluate(&mut self, ctx: &EvalContext<'_>) -> Result<(), DimensionMismatch> {
        self.moth_objectives = self
            .moths
            .par_iter()
            .map(|moth| ctx.evaluate_objective(moth))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(())
    }

    /// Rebuild the flame set, keeping the `k` best candidates. With elitism
    /// the previous flames compete alongside the current moths; without it
    /// only the current moths are ranked. Ties keep the earlier candidate
    /// (previous flames first, then moths in index order).
    pub fn select_flames(&mut self, k: usize, elitism: bool) {
        let mut candidates: Vec<(f64, &Position)> = Vec::new();
        if elitism {
            candidates.extend(self.flame_objectives.iter().copied().zip(self.flames.iter()));
        }
        candidates.extend(self.moth_objectives.iter().copied().zip(self.moths.iter()));
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
        candidates.truncate(k);
        let (objectives, positions): (Vec<f64>, Vec<Position>) = candidates
            .into_iter()
            .map(|(objective, position)| (objective, position.clone()))
            .unzip();
        self.flames = positions;
        self.flame_objectives = objectives;
    }

    pub fn best(&self) -> (&Position, f64) {
        (&self.flames[0], self.flame_objectives[0])
    }
}

/// Draw a fresh position: each coordinate is `ub * u` with `u` uniform in
/// `[0, 1)`, one draw per coordinate in order.
pub fn random_position(dim: usize, ub: f64, rng: &mut impl Rng) -> Position {
    let uniforms: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    position_from_uniforms(&uniforms, ub)
}

/// Map already-drawn uniforms in `[0, 1]` onto `[0, ub]` coordinates.
pub fn position_from_uniforms(uniforms: &[f64], ub: f64) -> Position {
    Position::new(uniforms.iter().map(|u| ub * u).collect())
}

/// Number of flames that survive iteration `current_iter` of `max_iter`:
/// `round(n - current_iter * (n - 1) / max_iter)`, rounded half away from
/// zero and clamped to `[1, n]`. Reaches exactly 1 at the final iteration.
pub fn flame_count(n: usize, current_iter: usize, max_iter: usize) -> usize {
    debug_assert!((1..=max_iter).contains(&current_iter));
    let value = n as f64 - (current_iter as f64 * (n - 1) as f64) / max_iter as f64;
    (value.round() as usize).clamp(1, n)
}

/// Lower bound of the spiral draw `t` at this iteration: slides linearly
/// from -1 (first iteration) to -2 (last). Defined as -1 when `max_iter`
/// is 1.
pub fn t_lower_bound(current_iter: usize, max_iter: usize) -> f64 {
    if max_iter <= 1 {
        -1.0
    } else {
        -1.0 - (current_iter - 1) as f64 / (max_iter - 1) as f64
    }
}

/// Index of the flame moth `moth_idx` chases (0-based): its own flame while
/// that survives, otherwise the last surviving flame.
pub fn paired_flame_index(moth_idx: usize, flame_count: usize) -> usize {
    debug_assert!(flame_count >= 1);
    if moth_idx < flame_count {
        moth_idx
    } else {
        flame_count - 1
    }
}

/// Move a moth one spiral step toward `target` with per-coordinate draws
/// `t`, clamping the result into `[0, ub]`.
pub fn spiral_step(moth: &Position, target: &Position, b: f64, t: &[f64], ub: f64) -> Position {
    debug_assert_eq!(moth.dim(), target.dim());
    debug_assert_eq!(moth.dim(), t.len());
    let values = moth
        .values
        .iter()
        .zip(&target.values)
        .zip(t)
        .map(|((&m, &f), &t)| {
            let distance = (f - m).abs();
            let moved = distance * (b * t).exp() * (TAU * t).cos() + f;
            moved.clamp(0.0, ub)
        })
        .collect();
    Position::new(values)
}

/// Run the original moth-flame optimizer. `initial` overrides the uniform
/// random initialization (it must be `nsa` positions of the scenario's
/// dimension). Deterministic given the seed.
pub fn run_mfo(
    scenario: &Scenario,
    costs: &CostMatrix,
    params: &MfoParams,
    initial: Option<Vec<Position>>,
) -> Result<RunReport, OptimizeError> {
    params.validate()?;
    let started = Instant::now();
    let dim = scenario.task_count();
    let ctx = EvalContext::new(scenario, costs, params.ub);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let moths = match initial {
        Some(positions) => {
            if positions.len() != params.nsa {
                return Err(OptimizeError::InvalidParams(format!(
                    "initial population has {} rows, expected nsa = {}",
                    positions.len(),
                    params.nsa
                )));
            }
            for position in &positions {
                if position.dim() != dim {
                    return Err(OptimizeError::Dimension(DimensionMismatch {
                        expected: dim,
                        got: position.dim(),
                    }));
                }
            }
            positions
        }
        None => (0..params.nsa)
            .map(|_| random_position(dim, params.ub, &mut rng))
            .collect(),
    };

    let mut state = SwarmState::new(moths);
    let mut history = Vec::with_capacity(params.max_iter);

    for current_iter in 1..=params.max_iter {
        state.iteration = current_iter;
        state.evaluate(&ctx)?;
        let k = flame_count(params.nsa, current_iter, params.max_iter);
        state.select_flames(k, params.elitism);
        history.push(state.flame_objectives[0]);

        let t_floor = t_lower_bound(current_iter, params.max_iter);
        for i in 0..params.nsa {
            let t: Vec<f64> = (0..dim).map(|_| rng.random_range(t_floor..=1.0)).collect();
            let target = &state.flames[paired_flame_index(i, k)];
            let next = spiral_step(&state.moths[i], target, params.b, &t, params.ub);
            state.moths[i] = next;
        }
    }

    let (best, _) = state.best();
    let best = best.clone();
    let outcome = ctx.decode(&best)?;
    Ok(finalize_run(
        Algorithm::Mfo,
        params.seed,
        Some(best),
        outcome,
        history,
        &ctx,
        started,
    ))
}
