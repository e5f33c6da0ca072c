//! Game instances, strategy profiles and exact utilities.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    cell_area_square, cell_area_torus, clockwise_distance, PlanarPoint, UnitCirclePosition,
};
use crate::numeric::{Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GameVariant {
    OneWay1D,
    Voronoi1D,
    Voronoi2DSquare,
    Voronoi2DTorus,
}

impl GameVariant {
    pub const ALL: [GameVariant; 4] = [
        GameVariant::OneWay1D,
        GameVariant::Voronoi1D,
        GameVariant::Voronoi2DSquare,
        GameVariant::Voronoi2DTorus,
    ];

    pub fn is_circle(self) -> bool {
        matches!(self, GameVariant::OneWay1D | GameVariant::Voronoi1D)
    }

    pub fn name(self) -> &'static str {
        match self {
            GameVariant::OneWay1D => "one-way",
            GameVariant::Voronoi1D => "voronoi-1d",
            GameVariant::Voronoi2DSquare => "square",
            GameVariant::Voronoi2DTorus => "torus",
        }
    }
}

impl fmt::Display for GameVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for GameVariant {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "one-way" | "oneway" | "oneway1d" => Ok(GameVariant::OneWay1D),
            "voronoi-1d" | "1d" | "voronoi1d" => Ok(GameVariant::Voronoi1D),
            "square" | "voronoi2dsquare" => Ok(GameVariant::Voronoi2DSquare),
            "torus" | "voronoi2dtorus" => Ok(GameVariant::Voronoi2DTorus),
            _ => Err(GameError::UnknownName(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Objective {
    Maximize,
    Minimize,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::Maximize => "max",
            Objective::Minimize => "min",
        }
    }

    /// Applies the sign convention: minimizers receive the negated measure.
    pub fn signed<S: Scalar>(self, measure: S) -> S {
        match self {
            Objective::Maximize => measure,
            Objective::Minimize => -measure,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Objective {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "max" | "maximize" => Ok(Objective::Maximize),
            "min" | "minimize" => Ok(Objective::Minimize),
            _ => Err(GameError::UnknownName(s.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("an instance needs at least one player")]
    NoPlayers,
    #[error("player {0} has no candidate points")]
    NoCandidates(usize),
    #[error("candidate point {0} appears more than once")]
    DuplicatePoint(String),
    #[error("point {0} lies outside the unit domain")]
    OutOfRange(String),
    #[error("variant {0} does not take this kind of point")]
    VariantMismatch(GameVariant),
    #[error("profile does not fit the instance: {0}")]
    InvalidProfile(String),
    #[error("epsilon {0} outside (0, 1/64]")]
    EpsilonOutOfRange(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Candidates<S> {
    Circle(Vec<Vec<UnitCirclePosition<S>>>),
    Plane(Vec<Vec<PlanarPoint<S>>>),
}

/// Candidate points sorted around the circle, with each point's rank.
#[derive(Debug, Clone, PartialEq)]
struct CircleOrder {
    rank: Vec<Vec<usize>>,
    slot: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance<S = f64> {
    variant: GameVariant,
    objective: Objective,
    candidates: Candidates<S>,
    order: Option<CircleOrder>,
}

/// One chosen candidate index per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StrategyProfile(Vec<usize>);

impl StrategyProfile {
    pub fn new(choices: Vec<usize>) -> Self {
        Self(choices)
    }

    pub fn first_choices(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn choices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn with_choice(&self, player: usize, choice: usize) -> Self {
        let mut next = self.0.clone();
        next[player] = choice;
        Self(next)
    }
}

impl std::ops::Index<usize> for StrategyProfile {
    type Output = usize;

    fn index(&self, player: usize) -> &usize {
        &self.0[player]
    }
}

impl<S: Scalar> GameInstance<S> {
    /// A one-dimensional instance from raw positions in `[0, 1)`.
    pub fn circle(
        variant: GameVariant,
        objective: Objective,
        players: Vec<Vec<S>>,
    ) -> Result<Self, GameError> {
        if !variant.is_circle() {
            return Err(GameError::VariantMismatch(variant));
        }
        check_shape(players.iter().map(Vec::len))?;
        let positions = players
            .into_iter()
            .map(|pts| {
                pts.into_iter()
                    .map(|v| {
                        UnitCirclePosition::new(v.clone())
                            .map_err(|_| GameError::OutOfRange(v.render()))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let order = circle_order(&positions)?;
        Ok(Self { variant, objective, candidates: Candidates::Circle(positions), order: Some(order) })
    }

    /// A two-dimensional instance; coordinates must lie in `[0, 1]`.
    pub fn planar(
        variant: GameVariant,
        objective: Objective,
        players: Vec<Vec<PlanarPoint<S>>>,
    ) -> Result<Self, GameError> {
        if variant.is_circle() {
            return Err(GameError::VariantMismatch(variant));
        }
        check_shape(players.iter().map(Vec::len))?;
        if let Some(p) = players.iter().flatten().find(|p| !p.in_unit_square()) {
            return Err(GameError::OutOfRange(p.render()));
        }
        let mut all: Vec<&PlanarPoint<S>> = players.iter().flatten().collect();
        all.sort_by(|a, b| {
            a.x.partial_cmp(&b.x)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.y.partial_cmp(&b.y).unwrap_or(std::cmp::Ordering::Equal))
        });
        if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
            return Err(GameError::DuplicatePoint(w[0].render()));
        }
        if variant == GameVariant::Voronoi2DTorus {
            let folded = |v: &S| if *v == S::one() { S::zero() } else { v.clone() };
            let mut wrapped: Vec<(S, S)> = players
                .iter()
                .flatten()
                .map(|p| (folded(&p.x), folded(&p.y)))
                .collect();
            wrapped.sort_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            });
            if let Some(w) = wrapped.windows(2).find(|w| w[0] == w[1]) {
                return Err(GameError::DuplicatePoint(format!(
                    "({}, {})",
                    w[0].0.render(),
                    w[0].1.render()
                )));
            }
        }
        Ok(Self { variant, objective, candidates: Candidates::Plane(players), order: None })
    }

    pub fn variant(&self) -> GameVariant {
        self.variant
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn candidates(&self) -> &Candidates<S> {
        &self.candidates
    }

    pub fn with_objective(&self, objective: Objective) -> Self {
        Self { objective, ..self.clone() }
    }

    pub fn players(&self) -> usize {
        match &self.candidates {
            Candidates::Circle(p) => p.len(),
            Candidates::Plane(p) => p.len(),
        }
    }

    pub fn choices_of(&self, player: usize) -> usize {
        match &self.candidates {
            Candidates::Circle(p) => p[player].len(),
            Candidates::Plane(p) => p[player].len(),
        }
    }

    pub fn choice_counts(&self) -> Vec<usize> {
        (0..self.players()).map(|k| self.choices_of(k)).collect()
    }

    /// Number of pure profiles, or `None` if it overflows.
    pub fn profile_count(&self) -> Option<u128> {
        self.choice_counts().into_iter().try_fold(1u128, |acc, m| acc.checked_mul(m as u128))
    }

    pub fn circle_point(&self, player: usize, choice: usize) -> &S {
        match &self.candidates {
            Candidates::Circle(p) => p[player][choice].value(),
            Candidates::Plane(_) => panic!("planar instance has no circle points"),
        }
    }

    pub fn plane_point(&self, player: usize, choice: usize) -> &PlanarPoint<S> {
        match &self.candidates {
            Candidates::Plane(p) => &p[player][choice],
            Candidates::Circle(_) => panic!("circle instance has no planar points"),
        }
    }

    /// Every `(player, choice)` in increasing position around the circle.
    pub(crate) fn circle_slots(&self) -> &[(usize, usize)] {
        &self.order.as_ref().expect("circle instance").slot
    }

    pub(crate) fn circle_rank(&self, player: usize, choice: usize) -> usize {
        self.order.as_ref().expect("circle instance").rank[player][choice]
    }

    pub fn check_profile(&self, profile: &StrategyProfile) -> Result<(), GameError> {
        if profile.len() != self.players() {
            return Err(GameError::InvalidProfile(format!(
                "{} choices for {} players",
                profile.len(),
                self.players()
            )));
        }
        for (k, &c) in profile.choices().iter().enumerate() {
            if c >= self.choices_of(k) {
                return Err(GameError::InvalidProfile(format!(
                    "player {k} has no candidate {c}"
                )));
            }
        }
        Ok(())
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> GameInstance<T> {
        let candidates = match &self.candidates {
            Candidates::Circle(p) => Candidates::Circle(
                p.iter()
                    .map(|pts| pts.iter().map(|v| UnitCirclePosition::wrapping(f(v.value()))).collect())
                    .collect(),
            ),
            Candidates::Plane(p) => Candidates::Plane(
                p.iter()
                    .map(|pts| pts.iter().map(|q| PlanarPoint::new(f(&q.x), f(&q.y))).collect())
                    .collect(),
            ),
        };
        GameInstance {
            variant: self.variant,
            objective: self.objective,
            candidates,
            order: self.order.clone(),
        }
    }

    pub fn to_f64(&self) -> GameInstance<f64> {
        self.map_scalar(|v| v.as_f64())
    }

    /// Utility of every player under `profile`.
    pub fn utilities(&self, profile: &StrategyProfile) -> Vec<S> {
        let board = Board::new(self, profile.choices().to_vec());
        (0..self.players()).map(|k| board.utility(k, profile[k])).collect()
    }

    /// Unsigned measure owned by every player under `profile`.
    pub fn measures(&self, profile: &StrategyProfile) -> Vec<S> {
        let board = Board::new(self, profile.choices().to_vec());
        (0..self.players()).map(|k| board.measure(k, profile[k])).collect()
    }

    pub fn best_response(&self, profile: &StrategyProfile, player: usize) -> usize {
        Board::new(self, profile.choices().to_vec()).best_response(player)
    }

    pub fn is_pne(&self, profile: &StrategyProfile) -> bool {
        Board::new(self, profile.choices().to_vec()).is_stable()
    }
}

impl GameInstance<f64> {
    /// Exact rational copy of a float instance.
    pub fn to_rational(&self) -> GameInstance<Rational> {
        self.map_scalar(|v| Rational::from_f64_exact(*v))
    }
}

fn check_shape(sizes: impl Iterator<Item = usize>) -> Result<(), GameError> {
    let mut players = 0;
    for (k, m) in sizes.enumerate() {
        if m == 0 {
            return Err(GameError::NoCandidates(k));
        }
        players += 1;
    }
    if players == 0 {
        return Err(GameError::NoPlayers);
    }
    Ok(())
}

fn circle_order<S: Scalar>(players: &[Vec<UnitCirclePosition<S>>]) -> Result<CircleOrder, GameError> {
    let mut slot: Vec<(usize, usize)> = players
        .iter()
        .enumerate()
        .flat_map(|(k, pts)| (0..pts.len()).map(move |i| (k, i)))
        .collect();
    let at = |&(k, i): &(usize, usize)| players[k][i].value();
    slot.sort_by(|a, b| at(a).partial_cmp(at(b)).unwrap_or(std::cmp::Ordering::Equal));
    if let Some(w) = slot.windows(2).find(|w| at(&w[0]) == at(&w[1])) {
        return Err(GameError::DuplicatePoint(at(&w[0]).render()));
    }
    let mut rank: Vec<Vec<usize>> = players.iter().map(|pts| vec![0; pts.len()]).collect();
    for (r, &(k, i)) in slot.iter().enumerate() {
        rank[k][i] = r;
    }
    Ok(CircleOrder { rank, slot })
}

/// A profile prepared for repeated utility queries and single-player moves.
#[derive(Debug, Clone)]
pub struct Board<'a, S: Scalar> {
    game: &'a GameInstance<S>,
    choices: Vec<usize>,
    /// For circle variants: which player occupies each rank, if any.
    owner: Vec<Option<usize>>,
}

impl<'a, S: Scalar> Board<'a, S> {
    pub fn new(game: &'a GameInstance<S>, choices: Vec<usize>) -> Self {
        let owner = match &game.order {
            Some(order) => {
                let mut owner = vec![None; order.slot.len()];
                for (k, &c) in choices.iter().enumerate() {
                    owner[order.rank[k][c]] = Some(k);
                }
                owner
            }
            None => Vec::new(),
        };
        Self { game, choices, owner }
    }

    pub fn game(&self) -> &'a GameInstance<S> {
        self.game
    }

    pub fn choices(&self) -> &[usize] {
        &self.choices
    }

    pub fn profile(&self) -> StrategyProfile {
        StrategyProfile(self.choices.clone())
    }

    pub fn set(&mut self, player: usize, choice: usize) {
        if let Some(order) = &self.game.order {
            self.owner[order.rank[player][self.choices[player]]] = None;
            self.owner[order.rank[player][choice]] = Some(player);
        }
        self.choices[player] = choice;
    }

    /// Rank of the nearest point chosen by someone other than `player`,
    /// scanning from `from` in direction `step` (exclusive).
    fn neighbour(&self, from: usize, player: usize, forward: bool) -> Option<usize> {
        let len = self.owner.len();
        let mut r = from;
        for _ in 1..len {
            r = if forward { (r + 1) % len } else { (r + len - 1) % len };
            if matches!(self.owner[r], Some(q) if q != player) {
                return Some(r);
            }
        }
        None
    }

    /// Owned measure if `player` picks `choice` and everyone else stays put.
    pub fn measure(&self, player: usize, choice: usize) -> S {
        match (&self.game.candidates, &self.game.order) {
            (Candidates::Circle(_), Some(order)) => {
                let r = order.rank[player][choice];
                let here = self.game.circle_point(player, choice);
                let pos = |rank: usize| {
                    let (k, i) = order.slot[rank];
                    self.game.circle_point(k, i)
                };
                match self.game.variant {
                    GameVariant::OneWay1D => match self.neighbour(r, player, true) {
                        Some(next) => clockwise_distance(here, pos(next)),
                        None => S::one(),
                    },
                    _ => {
                        let next = self.neighbour(r, player, true);
                        let prev = self.neighbour(r, player, false);
                        match (prev, next) {
                            (Some(a), Some(b)) if a != b => clockwise_distance(pos(a), pos(b)).half(),
                            (Some(_), Some(_)) => S::one().half(),
                            _ => S::one(),
                        }
                    }
                }
            }
            (Candidates::Plane(points), _) => {
                let site = &points[player][choice];
                let others: Vec<PlanarPoint<S>> = self
                    .choices
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != player)
                    .map(|(k, &c)| points[k][c].clone())
                    .collect();
                let area = if self.game.variant == GameVariant::Voronoi2DTorus {
                    cell_area_torus(site, &others)
                } else {
                    cell_area_square(site, &others)
                };
                area.expect("instance points are distinct")
            }
            (Candidates::Circle(_), None) => unreachable!("circle instances carry an order"),
        }
    }

    pub fn utility(&self, player: usize, choice: usize) -> S {
        self.game.objective.signed(self.measure(player, choice))
    }

    /// Utilities of all of `player`'s candidates against the current board.
    pub fn options(&self, player: usize) -> Vec<S> {
        (0..self.game.choices_of(player)).map(|c| self.utility(player, c)).collect()
    }

    /// Best candidate: stays on near-ties, otherwise the lowest index among
    /// strictly improving candidates that are within tolerance of the best.
    pub fn best_response(&self, player: usize) -> usize {
        let current = self.choices[player];
        if self.game.choices_of(player) == 1 {
            return current;
        }
        let values = self.options(player);
        let best = values
            .iter()
            .skip(1)
            .fold(values[0].clone(), |acc, v| if *v > acc { v.clone() } else { acc });
        if !best.exceeds(&values[current]) {
            return current;
        }
        values
            .iter()
            .position(|v| v.exceeds(&values[current]) && !best.exceeds(v))
            .unwrap_or(current)
    }

    /// True when `player` has no strictly improving alternative.
    pub fn is_stable_for(&self, player: usize) -> bool {
        let m = self.game.choices_of(player);
        if m == 1 {
            return true;
        }
        let current = self.choices[player];
        let now = self.utility(player, current);
        (0..m).filter(|&c| c != current).all(|c| !self.utility(player, c).exceeds(&now))
    }

    pub fn is_stable(&self) -> bool {
        (0..self.game.players()).all(|k| self.is_stable_for(k))
    }
}

/// The three-player no-equilibrium configuration on the unit square,
/// optionally padded with extra players clustered at the origin.
pub fn build_fig3_instance<S: Scalar>(
    epsilon: S,
    players: usize,
    objective: Objective,
) -> Result<GameInstance<S>, GameError> {
    if epsilon <= S::zero() || epsilon > S::from_ratio(1, 64) {
        return Err(GameError::EpsilonOutOfRange(epsilon.render()));
    }
    if players < 3 {
        return Err(GameError::InvalidProfile("the construction needs at least 3 players".into()));
    }
    let e = epsilon;
    let e2 = e.clone() * e.clone();
    let quarter = S::from_ratio(1, 4);
    let half = S::from_ratio(1, 2);
    let p = |x: S, y: S| PlanarPoint::new(x, y);
    let mut all = vec![
        vec![
            p(quarter.clone() + e2.clone(), half.clone() + e.clone()),
            p(quarter.clone() + e2.clone(), half.clone() - e.clone()),
        ],
        vec![
            p(quarter.clone() - e2.clone(), half.clone() + e.clone()),
            p(quarter - e2, half - e.clone()),
        ],
        vec![p(S::zero(), S::zero()), p(e.clone(), S::zero())],
    ];
    let n = S::from_ratio(players as i64, 1);
    for j in 4..=players {
        let height = e.clone() * S::from_ratio(j as i64 - 2, 1) / n.clone();
        let across = e.clone() / (n.clone() + n.clone());
        all.push(vec![p(S::zero(), height.clone()), p(across, height)]);
    }
    GameInstance::planar(GameVariant::Voronoi2DSquare, objective, all)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_way(players: Vec<Vec<f64>>) -> GameInstance<f64> {
        GameInstance::circle(GameVariant::OneWay1D, Objective::Maximize, players).unwrap()
    }

    #[test]
    fn one_way_and_voronoi_utilities() {
        let pts = vec![vec![0.1], vec![0.4], vec![0.8]];
        let g = one_way(pts.clone());
        let u = g.utilities(&StrategyProfile::first_choices(3));
        for (a, b) in u.iter().zip([0.3, 0.4, 0.3]) {
            assert!((a - b).abs() < 1e-12);
        }
        let g = GameInstance::circle(GameVariant::Voronoi1D, Objective::Maximize, pts).unwrap();
        let u = g.utilities(&StrategyProfile::first_choices(3));
        for (a, b) in u.iter().zip([0.3, 0.35, 0.35]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lone_player_owns_everything() {
        for variant in GameVariant::ALL {
            let g = if variant.is_circle() {
                GameInstance::circle(variant, Objective::Maximize, vec![vec![0.3, 0.6]]).unwrap()
            } else {
                GameInstance::planar(
                    variant,
                    Objective::Maximize,
                    vec![vec![PlanarPoint::new(0.2, 0.3)]],
                )
                .unwrap()
            };
            assert_eq!(g.utilities(&StrategyProfile::first_choices(1)), vec![1.0]);
            assert!(g.is_pne(&StrategyProfile::first_choices(1)));
        }
    }

    #[test]
    fn two_player_best_response() {
        let g = one_way(vec![vec![0.0, 0.5], vec![0.25, 0.6]]);
        // Against 0.0: choosing 0.25 leaves a clockwise gap of 0.75, 0.6 only 0.4.
        assert_eq!(g.best_response(&StrategyProfile::new(vec![0, 1]), 1), 0);
        assert_eq!(g.best_response(&StrategyProfile::new(vec![0, 0]), 1), 0);
    }

    #[test]
    fn two_player_pne_by_hand() {
        let g = one_way(vec![vec![0.0, 0.5], vec![0.25, 0.75]]);
        let profiles = [[0, 0], [0, 1], [1, 0], [1, 1]];
        // (0,0): player 0 leaves gap 0.25, moving to 0.5 gives 0.75.
        // (0,1): player 1 leaves gap 0.25, moving to 0.25 gives 0.75.
        // (1,0): player 1 leaves gap 0.25, moving to 0.75 gives 0.75.
        // (1,1): player 0 leaves gap 0.25, moving to 0.0 gives 0.75.
        let movers = [0, 1, 1, 0];
        for (c, mover) in profiles.iter().zip(movers) {
            let p = StrategyProfile::new(c.to_vec());
            assert!(!g.is_pne(&p));
            assert_ne!(g.best_response(&p, mover), c[mover]);
        }
    }

    #[test]
    fn duplicates_rejected() {
        let err = GameInstance::circle(
            GameVariant::OneWay1D,
            Objective::Maximize,
            vec![vec![0.1, 0.2], vec![0.2]],
        );
        assert!(matches!(err, Err(GameError::DuplicatePoint(_))));
        let err = GameInstance::planar(
            GameVariant::Voronoi2DTorus,
            Objective::Maximize,
            vec![vec![PlanarPoint::new(0.0, 0.5)], vec![PlanarPoint::new(1.0, 0.5)]],
        );
        assert!(matches!(err, Err(GameError::DuplicatePoint(_))));
    }

    #[test]
    fn minimize_negates() {
        let g = one_way(vec![vec![0.1, 0.7], vec![0.4, 0.9], vec![0.2]]);
        let h = g.with_objective(Objective::Minimize);
        let p = StrategyProfile::new(vec![1, 0, 0]);
        let (a, b) = (g.utilities(&p), h.utilities(&p));
        assert!(a.iter().zip(&b).all(|(x, y)| *x == -*y));
    }

    #[test]
    fn square_counterexample_construction() {
        let e = Rational::from_ratio(1, 64);
        let g = build_fig3_instance(e.clone(), 3, Objective::Maximize).unwrap();
        let p = g.plane_point(0, 0);
        assert_eq!(p.x, Rational::from_ratio(1, 4) + e.clone() * e.clone());
        assert_eq!(p.y, Rational::from_ratio(1, 2) + e.clone());
        assert!(build_fig3_instance(0.0, 3, Objective::Maximize).is_err());
        assert!(build_fig3_instance(1.0 / 32.0, 3, Objective::Maximize).is_err());
        let g5 = build_fig3_instance(e.clone(), 5, Objective::Maximize).unwrap();
        for k in 3..5 {
            for c in 0..2 {
                let q = g5.plane_point(k, c);
                assert!(q.x.clone() * q.x.clone() + q.y.clone() * q.y.clone() < e.clone() * e.clone());
            }
        }
    }
}
