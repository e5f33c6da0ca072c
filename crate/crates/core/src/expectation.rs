//! Expected utilities when every player picks a candidate independently at
//! random.
//!
//! The one-dimensional routine walks outward from the focal point and keeps
//! the probability that nothing nearer has been chosen yet. The planar
//! routine cuts the plane around the focal point into angular sectors in
//! which the order of all boundary lines is fixed, runs the same walk over
//! boundary lines inside each sector, and sums triangle areas.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use thiserror::Error;

use crate::games::{Board, Candidates, GameInstance, GameVariant};
use crate::geometry::{clockwise_distance, HalfPlane, PlanarPoint};
use crate::numeric::{Rational, Scalar};

pub const DEFAULT_ORACLE_BUDGET: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpectationError {
    #[error("distribution shape does not match the instance: {0}")]
    Shape(String),
    #[error("player {player} gives candidate {choice} a negative probability")]
    NegativeProbability { player: usize, choice: usize },
    #[error("player {player}'s probabilities sum to {total}, not 1")]
    NotNormalized { player: usize, total: String },
    #[error("operation does not apply to variant {0}")]
    VariantMismatch(GameVariant),
    #[error("{configurations} opponent configurations exceed the budget of {budget}")]
    BudgetExceeded { configurations: String, budget: u128 },
    #[error("points not in general position: {0}")]
    Degenerate(String),
}

/// Independent per-player probabilities over candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductDistribution<S>(Vec<Vec<S>>);

impl<S: Scalar> ProductDistribution<S> {
    /// Validates shape against `game`, non-negativity and normalization.
    pub fn new(game: &GameInstance<S>, probabilities: Vec<Vec<S>>) -> Result<Self, ExpectationError> {
        Self::validated(&game.choice_counts(), probabilities)
    }

    pub fn validated(counts: &[usize], probabilities: Vec<Vec<S>>) -> Result<Self, ExpectationError> {
        if probabilities.len() != counts.len() {
            return Err(ExpectationError::Shape(format!(
                "{} players in the distribution, {} in the instance",
                probabilities.len(),
                counts.len()
            )));
        }
        for (player, (row, &m)) in probabilities.iter().zip(counts).enumerate() {
            if row.len() != m {
                return Err(ExpectationError::Shape(format!(
                    "player {player} has {m} candidates but {} probabilities",
                    row.len()
                )));
            }
            if let Some(choice) = row.iter().position(|s| *s < S::zero()) {
                return Err(ExpectationError::NegativeProbability { player, choice });
            }
            let total = row.iter().fold(S::zero(), |acc, s| acc + s.clone());
            if !(total.clone() - S::one()).negligible() {
                return Err(ExpectationError::NotNormalized { player, total: total.render() });
            }
        }
        Ok(Self(probabilities))
    }

    pub fn uniform(counts: &[usize]) -> Self {
        Self(counts.iter().map(|&m| vec![S::from_ratio(1, m as i64); m]).collect())
    }

    /// All mass on the given choice of every player.
    pub fn point_mass(counts: &[usize], choices: &[usize]) -> Self {
        Self(
            counts
                .iter()
                .zip(choices)
                .map(|(&m, &c)| (0..m).map(|i| if i == c { S::one() } else { S::zero() }).collect())
                .collect(),
        )
    }

    pub fn probability(&self, player: usize, choice: usize) -> &S {
        &self.0[player][choice]
    }

    pub fn player(&self, player: usize) -> &[S] {
        &self.0[player]
    }

    pub fn players(&self) -> usize {
        self.0.len()
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.0
    }

    pub fn to_f64(&self) -> ProductDistribution<f64> {
        ProductDistribution(self.0.iter().map(|r| r.iter().map(Scalar::as_f64).collect()).collect())
    }
}

/// Random probabilities from uniform weights, normalized per player.
pub fn random_distribution(counts: &[usize], rng: &mut impl Rng) -> ProductDistribution<f64> {
    ProductDistribution(
        counts
            .iter()
            .map(|&m| {
                let w: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 1e-3).collect();
                let total: f64 = w.iter().sum();
                w.into_iter().map(|x| x / total).collect()
            })
            .collect(),
    )
}

/// Random exact probabilities from small integer weights.
pub fn random_rational_distribution(counts: &[usize], rng: &mut impl Rng) -> ProductDistribution<Rational> {
    ProductDistribution(
        counts
            .iter()
            .map(|&m| {
                let w: Vec<i64> = (0..m).map(|_| rng.random_range(1..=12)).collect();
                let total: i64 = w.iter().sum();
                w.into_iter().map(|x| Rational::from_ratio(x, total)).collect()
            })
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Clockwise,
    Counterclockwise,
}

/// Probability bookkeeping shared by both walks: the chance that nothing
/// seen so far was chosen, and each player's probability mass not yet seen.
struct Walk<S> {
    total: S,
    none_yet: S,
    remaining: Vec<S>,
    unseen: Vec<usize>,
    early_stop: bool,
}

enum Step {
    Continue,
    Finished,
}

impl<S: Scalar> Walk<S> {
    fn new(counts: &[usize], early_stop: bool) -> Self {
        Self {
            total: S::zero(),
            none_yet: S::one(),
            remaining: vec![S::one(); counts.len()],
            unseen: counts.to_vec(),
            early_stop,
        }
    }

    /// Records candidate `choice` of `player`, whose selection would yield
    /// `value`.
    fn visit(&mut self, dist: &ProductDistribution<S>, player: usize, choice: usize, value: S) -> Step {
        self.unseen[player] -= 1;
        if self.early_stop && self.unseen[player] == 0 {
            self.total = self.total.clone() + self.none_yet.clone() * value;
            return Step::Finished;
        }
        let s = dist.probability(player, choice).clone();
        let left = self.remaining[player].clone();
        if !self.none_yet.is_zero() && left > S::zero() {
            let share = self.none_yet.clone() / left.clone();
            self.total = self.total.clone() + share.clone() * s.clone() * value;
            self.none_yet = share * (left.clone() - s.clone());
        }
        self.remaining[player] = left - s;
        Step::Continue
    }

    /// Ends the walk; whatever probability is left takes `fallback`.
    fn finish(self, fallback: S) -> S {
        self.total + self.none_yet * fallback
    }
}

/// Expected distance from candidate `choice` of `player` to the first point
/// chosen by anyone else in `direction`, given that the player picks it.
/// With no opponents the whole circle counts.
pub fn expected_gap<S: Scalar>(
    game: &GameInstance<S>,
    player: usize,
    choice: usize,
    dist: &ProductDistribution<S>,
    direction: Direction,
    early_stop: bool,
) -> S {
    let slots = game.circle_slots();
    let len = slots.len();
    let start = game.circle_rank(player, choice);
    let here = game.circle_point(player, choice);
    let mut walk = Walk::new(&game.choice_counts(), early_stop);
    for step in 1..len {
        let rank = match direction {
            Direction::Clockwise => (start + step) % len,
            Direction::Counterclockwise => (start + len - step) % len,
        };
        let (j, i) = slots[rank];
        if j == player {
            continue;
        }
        let there = game.circle_point(j, i);
        let gap = match direction {
            Direction::Clockwise => clockwise_distance(here, there),
            Direction::Counterclockwise => clockwise_distance(there, here),
        };
        if let Step::Finished = walk.visit(dist, j, i, gap) {
            return walk.total;
        }
    }
    walk.finish(S::one())
}

pub fn expected_clockwise_gap<S: Scalar>(
    game: &GameInstance<S>,
    player: usize,
    choice: usize,
    dist: &ProductDistribution<S>,
) -> S {
    expected_gap(game, player, choice, dist, Direction::Clockwise, true)
}

/// Conditional expected utility of each of `player`'s candidates on the
/// circle.
pub fn expected_utility_1d<S: Scalar>(
    game: &GameInstance<S>,
    player: usize,
    dist: &ProductDistribution<S>,
) -> Result<Vec<S>, ExpectationError> {
    expected_utility_1d_with(game, player, dist, true)
}

pub fn expected_utility_1d_with<S: Scalar>(
    game: &GameInstance<S>,
    player: usize,
    dist: &ProductDistribution<S>,
    early_stop: bool,
) -> Result<Vec<S>, ExpectationError> {
    let variant = game.variant();
    if !variant.is_circle() {
        return Err(ExpectationError::VariantMismatch(variant));
    }
    Ok((0..game.choices_of(player))
        .map(|c| {
            let ahead = expected_gap(game, player, c, dist, Direction::Clockwise, early_stop);
            let measure = match variant {
                GameVariant::OneWay1D => ahead,
                _ => (ahead + expected_gap(game, player, c, dist, Direction::Counterclockwise, early_stop))
                    .half(),
            };
            game.objective().signed(measure)
        })
        .collect())
}

/// Exact expectation by summing over every configuration of the opponents.
pub fn oracle_expected_utility<S: Scalar>(
    game: &GameInstance<S>,
    player: usize,
    dist: &ProductDistribution<S>,
) -> Result<Vec<S>, ExpectationError> {
    oracle_expected_utility_within(game, player, dist, DEFAULT_ORACLE_BUDGET)
}

pub fn oracle_expected_utility_within<S: Scalar>(
    game: &GameInstance<S>,
    player: usize,
    dist: &ProductDistribution<S>,
    budget: u128,
) -> Result<Vec<S>, ExpectationError> {
    let counts = game.choice_counts();
    let configurations = counts
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != player)
        .try_fold(1u128, |acc, (_, &m)| acc.checked_mul(m as u128));
    match configurations {
        Some(c) if c <= budget => {}
        c => {
            return Err(ExpectationError::BudgetExceeded {
                configurations: c.map_or_else(|| "overflowing".into(), |c| c.to_string()),
                budget,
            })
        }
    }
    let m = counts[player];
    let mut sums = vec![S::zero(); m];
    let mut board = Board::new(game, vec![0; counts.len()]);
    let opponents: Vec<usize> = (0..counts.len()).filter(|&k| k != player).collect();
    loop {
        let weight = opponents
            .iter()
            .fold(S::one(), |acc, &k| acc * dist.probability(k, board.choices()[k]).clone());
        if !weight.is_zero() {
            for (c, sum) in sums.iter_mut().enumerate() {
                *sum = sum.clone() + weight.clone() * board.measure(player, c);
            }
        }
        let mut idx = opponents.len();
        loop {
            if idx == 0 {
                return Ok(sums.into_iter().map(|s| game.objective().signed(s)).collect());
            }
            idx -= 1;
            let k = opponents[idx];
            let next = board.choices()[k] + 1;
            if next < counts[k] {
                board.set(k, next);
                break;
            }
            board.set(k, 0);
        }
    }
}

/// Where a boundary line comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineSource {
    /// An edge of the region the cell lives in; always present.
    Fixed,
    /// The bisector with an opponent candidate (or one of its translates).
    Opponent { player: usize, choice: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryLine {
    pub plane: HalfPlane<f64>,
    pub source: LineSource,
}

/// The angular breakpoints around a focal point and the boundary lines that
/// can bound its cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorDecomposition {
    pub focal: PlanarPoint<f64>,
    pub lines: Vec<BoundaryLine>,
    /// Possible cell vertices, counterclockwise by angle around the focal
    /// point.
    pub vertices: Vec<(f64, PlanarPoint<f64>)>,
    /// Strictly increasing angles in `[0, 2π)`.
    pub angles: Vec<f64>,
}

impl SectorDecomposition {
    pub fn sectors(&self) -> usize {
        self.angles.len()
    }

    /// Start and end angle of sector `i`; the last one wraps past 2π.
    pub fn bounds(&self, i: usize) -> (f64, f64) {
        let start = self.angles[i];
        let end = if i + 1 < self.angles.len() { self.angles[i + 1] } else { self.angles[0] + TAU };
        (start, end)
    }
}

const ANGLE_TIE: f64 = 1e-12;

fn rectangle_edges(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<HalfPlane<f64>> {
    vec![
        HalfPlane::new(PlanarPoint::new(-1.0, 0.0), -x0),
        HalfPlane::new(PlanarPoint::new(1.0, 0.0), x1),
        HalfPlane::new(PlanarPoint::new(0.0, -1.0), -y0),
        HalfPlane::new(PlanarPoint::new(0.0, 1.0), y1),
    ]
}

/// Builds the sectors for candidate `choice` of `player` in a planar game.
///
/// On the square the region is the unit square; on the torus it is the unit
/// box centred on the focal point, and every opponent candidate enters with
/// its eight translates.
pub fn sector_decomposition(
    game: &GameInstance<f64>,
    player: usize,
    choice: usize,
) -> Result<SectorDecomposition, ExpectationError> {
    let points = match game.candidates() {
        Candidates::Plane(p) => p,
        Candidates::Circle(_) => return Err(ExpectationError::VariantMismatch(game.variant())),
    };
    let p = points[player][choice].clone();
    let torus = game.variant() == GameVariant::Voronoi2DTorus;
    let (x0, y0, x1, y1) = if torus {
        (p.x - 0.5, p.y - 0.5, p.x + 0.5, p.y + 0.5)
    } else {
        (0.0, 0.0, 1.0, 1.0)
    };
    let reach = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
        .iter()
        .map(|&(x, y)| (x - p.x).hypot(y - p.y))
        .fold(0.0, f64::max);
    let shifts: &[f64] = if torus { &[-1.0, 0.0, 1.0] } else { &[0.0] };

    let mut lines: Vec<BoundaryLine> = rectangle_edges(x0, y0, x1, y1)
        .into_iter()
        .map(|plane| BoundaryLine { plane, source: LineSource::Fixed })
        .collect();
    for (j, pts) in points.iter().enumerate().filter(|&(j, _)| j != player) {
        for (i, q) in pts.iter().enumerate() {
            for &dx in shifts {
                for &dy in shifts {
                    let q = q.translated(&dx, &dy);
                    if q.squared_distance(&p).sqrt() / 2.0 > reach + 1e-9 {
                        continue;
                    }
                    lines.push(BoundaryLine {
                        plane: HalfPlane::bisector(&p, &q),
                        source: LineSource::Opponent { player: j, choice: i },
                    });
                }
            }
        }
    }

    let mut vertices = Vec::new();
    for a in 0..lines.len() {
        for b in a + 1..lines.len() {
            let meet = lines[a].plane.meet(&lines[b].plane);
            let Some(v) = meet else {
                if let (LineSource::Opponent { player: pa, choice: ca }, LineSource::Opponent { player: pb, choice: cb }) =
                    (lines[a].source, lines[b].source)
                {
                    if (pa, ca) != (pb, cb) {
                        return Err(ExpectationError::Degenerate(format!(
                            "{} is collinear with candidates {ca} of player {pa} and {cb} of player {pb}",
                            p.render()
                        )));
                    }
                }
                continue;
            };
            let r = (v.x - p.x).hypot(v.y - p.y);
            if r <= ANGLE_TIE || r > reach + 1e-9 {
                continue;
            }
            let angle = (v.y - p.y).atan2(v.x - p.x).rem_euclid(TAU);
            vertices.push((angle, v));
        }
    }
    vertices.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut angles: Vec<f64> = vertices
        .iter()
        .map(|v| v.0)
        .chain([0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2])
        .collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|b, a| *b - *a <= ANGLE_TIE);
    if angles.len() > 1 && angles[0] + TAU - angles[angles.len() - 1] <= ANGLE_TIE {
        angles.pop();
    }
    Ok(SectorDecomposition { focal: p, lines, vertices, angles })
}

fn edge_distance(line: &BoundaryLine, focal: &PlanarPoint<f64>, theta: f64) -> Result<f64, ExpectationError> {
    match line.plane.ray_distance(focal, theta) {
        Some(d) => Ok(d),
        None if line.plane.excess(focal).abs() <= 1e-12 => Ok(0.0),
        None => Err(ExpectationError::Degenerate(format!(
            "boundary line runs parallel to the sector edge at angle {theta}"
        ))),
    }
}

/// Expected product of the distances to the cell boundary along the two
/// edges of sector `sector`.
pub fn expected_di_dj(
    game: &GameInstance<f64>,
    decomposition: &SectorDecomposition,
    sector: usize,
    dist: &ProductDistribution<f64>,
    early_stop: bool,
) -> Result<f64, ExpectationError> {
    let (start, end) = decomposition.bounds(sector);
    let mid = (start + end) / 2.0;
    let focal = &decomposition.focal;
    let mut order: Vec<(f64, &BoundaryLine)> = decomposition
        .lines
        .iter()
        .filter_map(|line| line.plane.ray_distance(focal, mid).map(|d| (d, line)))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    let counts = game.choice_counts();
    let mut seen: Vec<Vec<bool>> = counts.iter().map(|&m| vec![false; m]).collect();
    let mut walk = Walk::new(&counts, early_stop);
    for (_, line) in order {
        let product = || -> Result<f64, ExpectationError> {
            Ok(edge_distance(line, focal, start)? * edge_distance(line, focal, end)?)
        };
        match line.source {
            LineSource::Fixed => return Ok(walk.finish(product()?)),
            LineSource::Opponent { player, choice } => {
                if seen[player][choice] {
                    continue;
                }
                seen[player][choice] = true;
                if let Step::Finished = walk.visit(dist, player, choice, product()?) {
                    return Ok(walk.total);
                }
            }
        }
    }
    Err(ExpectationError::Degenerate("sector ray leaves the region".into()))
}

/// Conditional expected utility of each of `player`'s candidates in a planar
/// game.
pub fn expected_utility_2d(
    game: &GameInstance<f64>,
    player: usize,
    dist: &ProductDistribution<f64>,
) -> Result<Vec<f64>, ExpectationError> {
    expected_utility_2d_with(game, player, dist, true)
}

pub fn expected_utility_2d_with(
    game: &GameInstance<f64>,
    player: usize,
    dist: &ProductDistribution<f64>,
    early_stop: bool,
) -> Result<Vec<f64>, ExpectationError> {
    if game.variant().is_circle() {
        return Err(ExpectationError::VariantMismatch(game.variant()));
    }
    (0..game.choices_of(player))
        .map(|c| {
            let sectors = sector_decomposition(game, player, c)?;
            let mut area = 0.0;
            for i in 0..sectors.sectors() {
                let (start, end) = sectors.bounds(i);
                area += expected_di_dj(game, &sectors, i, dist, early_stop)? * (end - start).sin() / 2.0;
            }
            Ok(game.objective().signed(area))
        })
        .collect()
}

/// Dispatches to the circle or planar routine.
pub fn expected_utility(
    game: &GameInstance<f64>,
    player: usize,
    dist: &ProductDistribution<f64>,
) -> Result<Vec<f64>, ExpectationError> {
    if game.variant().is_circle() {
        expected_utility_1d(game, player, dist)
    } else {
        expected_utility_2d(game, player, dist)
    }
}
