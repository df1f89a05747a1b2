//! Monte-Carlo play of the one-player game.
//!
//! At an interior position `x` the player names an annulus member `y`; a fair
//! coin then moves the token to `y` or to its quasi-reflection `y_x`. The game
//! stops on the first boundary vertex and pays the datum there.

use rand::RngCore;
use rayon::prelude::*;

use crate::dpp::{greedy_among, BoundaryDatum, ValueField};
use crate::error::{Error, Result};
use crate::rgg::Board;
use crate::rng::{derive_seed, stream_rng, STREAM_GAME};

/// Default step-cap factor: episodes longer than `factor * d / r^2` are errors.
pub const DEFAULT_STEP_CAP_FACTOR: f64 = 50.0;

/// `ceil(factor * d / r^2)`.
pub fn step_cap(factor: f64, d: usize, r: f64) -> usize {
    (factor * d as f64 / (r * r)).ceil() as usize
}

/// A Markov strategy: the annulus member chosen at each interior position.
pub trait Strategy: Sync {
    fn choose(&self, board: &Board, x: usize) -> Result<usize>;
}

/// Picks a minimizer of `(v(y) + v(y_x)) / 2`, smallest index on ties.
pub struct Greedy<'a> {
    values: &'a [f64],
}

impl<'a> Greedy<'a> {
    pub fn new(values: &'a ValueField) -> Self {
        Self {
            values: values.values(),
        }
    }

    pub fn from_slice(values: &'a [f64]) -> Self {
        Self { values }
    }
}

impl Strategy for Greedy<'_> {
    fn choose(&self, board: &Board, x: usize) -> Result<usize> {
        let pairs = board
            .stencil()
            .pairs(x)
            .ok_or(Error::MissingAnnulus { vertex: x })?;
        greedy_among(self.values, pairs)
            .map(|(y, _)| y)
            .ok_or(Error::MissingAnnulus { vertex: x })
    }
}

impl<F: Fn(&Board, usize) -> usize + Sync> Strategy for F {
    fn choose(&self, board: &Board, x: usize) -> Result<usize> {
        Ok(self(board, x))
    }
}

/// One move from interior `x`: `heads` keeps the chosen `y`, tails takes `y_x`.
pub fn step(board: &Board, strategy: &dyn Strategy, x: usize, heads: bool) -> Result<usize> {
    let y = strategy.choose(board, x)?;
    let pairs = board
        .stencil()
        .pairs(x)
        .ok_or(Error::MissingAnnulus { vertex: x })?;
    let k = pairs.binary_search_by_key(&y, |p| p.0).map_err(|_| {
        Error::InvalidParameter(format!("strategy chose {y}, not in the annulus of {x}"))
    })?;
    Ok(if heads { y } else { pairs[k].1 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    /// Positions `x_0, ..., x_tau`.
    pub positions: Vec<usize>,
    /// Hitting time of the boundary.
    pub tau: usize,
    pub payoff: f64,
}

/// Plays one game from `x0` with coins drawn from `episode_seed`.
pub fn simulate_episode(
    board: &Board,
    f: &dyn BoundaryDatum,
    strategy: &dyn Strategy,
    x0: usize,
    episode_seed: u64,
    max_steps: usize,
) -> Result<Episode> {
    let (positions, tau) = play(board, strategy, x0, episode_seed, max_steps)?;
    let payoff = f.eval(board.point(positions[tau]));
    Ok(Episode {
        positions,
        tau,
        payoff,
    })
}

fn play(
    board: &Board,
    strategy: &dyn Strategy,
    x0: usize,
    episode_seed: u64,
    max_steps: usize,
) -> Result<(Vec<usize>, usize)> {
    let classes = board.classes();
    if x0 >= board.len() || !classes.in_component(x0) {
        return Err(Error::InvalidParameter(format!(
            "start vertex {x0} is not in the largest component"
        )));
    }
    if max_steps == 0 {
        return Err(Error::InvalidParameter("max_steps must be at least 1".into()));
    }
    let mut rng = stream_rng(episode_seed, STREAM_GAME);
    let mut positions = vec![x0];
    let mut x = x0;
    while !classes.is_boundary(x) {
        if positions.len() > max_steps {
            return Err(Error::NonTermination {
                episode: 0,
                max_steps,
            });
        }
        let heads = rng.next_u64() >> 63 == 1;
        x = step(board, strategy, x, heads)?;
        positions.push(x);
    }
    let tau = positions.len() - 1;
    Ok((positions, tau))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(N)`.
    pub stderr: f64,
    pub episodes: usize,
    pub tau_max: usize,
    pub tau_mean: f64,
}

/// Greedy-play estimate of the game value at `x0` from `episodes` games.
///
/// Episode `i` uses the coin stream of `derive_seed(seed, i)`; payoffs are the
/// field's boundary values.
pub fn monte_carlo_value(
    board: &Board,
    values: &ValueField,
    x0: usize,
    episodes: usize,
    seed: u64,
    max_steps: usize,
) -> Result<McEstimate> {
    if episodes == 0 {
        return Err(Error::InvalidParameter("episode count must be at least 1".into()));
    }
    let strategy = Greedy::new(values);
    let outcomes: Vec<(f64, usize)> = (0..episodes)
        .into_par_iter()
        .map(|i| {
            let (pos, tau) = play(board, &strategy, x0, derive_seed(seed, i as u64), max_steps)
                .map_err(|e| match e {
                    Error::NonTermination { max_steps, .. } => Error::NonTermination {
                        episode: i,
                        max_steps,
                    },
                    other => other,
                })?;
            Ok((values.values()[pos[tau]], tau))
        })
        .collect::<Result<_>>()?;
    Ok(summarize(&outcomes))
}

/// Welford running moments; exact for constant payoffs.
fn summarize(outcomes: &[(f64, usize)]) -> McEstimate {
    let (mut mean, mut m2) = (0.0, 0.0);
    for (k, &(x, _)) in outcomes.iter().enumerate() {
        let d = x - mean;
        mean += d / (k + 1) as f64;
        m2 += d * (x - mean);
    }
    let n = outcomes.len() as f64;
    let var = if outcomes.len() > 1 { m2 / (n - 1.0) } else { 0.0 };
    McEstimate {
        mean,
        stderr: (var / n).sqrt(),
        episodes: outcomes.len(),
        tau_max: outcomes.iter().map(|o| o.1).max().unwrap_or(0),
        tau_mean: outcomes.iter().map(|o| o.1 as f64).sum::<f64>() / n,
    }
}
