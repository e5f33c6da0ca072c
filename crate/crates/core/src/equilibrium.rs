//! Pure-equilibrium enumeration, best-response dynamics and the arc-multiset
//! potential order for one-dimensional games.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_traits::ToPrimitive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::games::{Board, GameInstance, GameVariant, Objective, StrategyProfile};
use crate::geometry::clockwise_distance;
use crate::numeric::{Rational, Scalar};

pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquilibriumError {
    #[error("{profiles} profiles exceed the enumeration budget of {budget}")]
    BudgetExceeded { profiles: String, budget: u128 },
    #[error("search visited more than {nodes} nodes")]
    SearchBudgetExceeded { nodes: u64 },
    #[error("the pruned search only handles one-way games, not {0}")]
    UnsupportedVariant(GameVariant),
    #[error("positions need a common denominator that fits in 64 bits")]
    DenominatorTooLarge,
}

fn check_budget<S: Scalar>(game: &GameInstance<S>, budget: u128) -> Result<(), EquilibriumError> {
    match game.profile_count() {
        Some(count) if count <= budget => Ok(()),
        count => Err(EquilibriumError::BudgetExceeded {
            profiles: count.map_or_else(|| "overflowing".to_string(), |c| c.to_string()),
            budget,
        }),
    }
}

/// Visits every profile in lexicographic order (last player varies fastest).
fn for_each_profile<S: Scalar>(game: &GameInstance<S>, mut visit: impl FnMut(&Board<'_, S>)) {
    let counts = game.choice_counts();
    let n = counts.len();
    let mut board = Board::new(game, vec![0; n]);
    loop {
        visit(&board);
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            let next = board.choices()[k] + 1;
            if next < counts[k] {
                board.set(k, next);
                break;
            }
            board.set(k, 0);
        }
    }
}

/// All pure Nash equilibria, in lexicographic order.
pub fn enumerate_pne<S: Scalar>(game: &GameInstance<S>) -> Result<Vec<StrategyProfile>, EquilibriumError> {
    enumerate_pne_within(game, DEFAULT_ENUMERATION_BUDGET)
}

pub fn enumerate_pne_within<S: Scalar>(
    game: &GameInstance<S>,
    budget: u128,
) -> Result<Vec<StrategyProfile>, EquilibriumError> {
    check_budget(game, budget)?;
    let mut found = Vec::new();
    for_each_profile(game, |board| {
        if board.is_stable() {
            found.push(board.profile());
        }
    });
    Ok(found)
}

pub fn count_pne<S: Scalar>(game: &GameInstance<S>, budget: u128) -> Result<usize, EquilibriumError> {
    check_budget(game, budget)?;
    let mut count = 0;
    for_each_profile(game, |board| {
        if board.is_stable() {
            count += 1;
        }
    });
    Ok(count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DynamicsStatus {
    Converged,
    GaveUp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicsOutcome {
    pub status: DynamicsStatus,
    pub profile: StrategyProfile,
    /// Passes used by the last run, including the final quiet pass.
    pub passes: usize,
    pub attempts: usize,
    pub moves: usize,
}

impl DynamicsOutcome {
    pub fn converged(&self) -> bool {
        self.status == DynamicsStatus::Converged
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEvent {
    pub attempt: usize,
    pub pass: usize,
    pub player: usize,
    pub from: usize,
    pub to: usize,
    pub old_utility: f64,
    pub new_utility: f64,
}

/// A move about to be applied: `board` still holds the old profile.
pub struct Move<'b, 'a, S: Scalar> {
    pub board: &'b Board<'a, S>,
    pub pass: usize,
    pub player: usize,
    pub to: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DynamicsOptions {
    pub max_passes: usize,
    /// Stop as soon as an end-of-pass profile repeats. The sweep is
    /// deterministic, so a repeat means the run can only end by exhausting
    /// its passes; the outcome reports `max_passes` exactly as a full run
    /// would.
    pub stop_on_cycle: bool,
}

impl DynamicsOptions {
    pub fn new(max_passes: usize) -> Self {
        Self { max_passes, stop_on_cycle: true }
    }
}

/// Sweeps players in index order, moving each to its best response, until a
/// pass changes nothing or the pass limit is reached.
pub fn run_best_response<S: Scalar>(
    game: &GameInstance<S>,
    initial: &StrategyProfile,
    max_passes: usize,
) -> DynamicsOutcome {
    run_observed(game, initial, DynamicsOptions::new(max_passes), |_| {})
}

pub fn run_best_response_traced<S: Scalar>(
    game: &GameInstance<S>,
    initial: &StrategyProfile,
    max_passes: usize,
) -> (DynamicsOutcome, Vec<TraceEvent>) {
    let mut trace = Vec::new();
    let options = DynamicsOptions { max_passes, stop_on_cycle: false };
    let outcome = run_observed(game, initial, options, |mv| {
        let from = mv.board.choices()[mv.player];
        trace.push(TraceEvent {
            attempt: 1,
            pass: mv.pass,
            player: mv.player,
            from,
            to: mv.to,
            old_utility: mv.board.utility(mv.player, from).as_f64(),
            new_utility: mv.board.utility(mv.player, mv.to).as_f64(),
        });
    });
    (outcome, trace)
}

/// Best-response dynamics with a callback before every move.
pub fn run_observed<S: Scalar>(
    game: &GameInstance<S>,
    initial: &StrategyProfile,
    options: DynamicsOptions,
    mut observe: impl FnMut(Move<'_, '_, S>),
) -> DynamicsOutcome {
    assert!(options.max_passes >= 1, "at least one pass is required");
    let mut board = Board::new(game, initial.choices().to_vec());
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut moves = 0;
    for pass in 1..=options.max_passes {
        let mut changed = false;
        for player in 0..game.players() {
            let to = board.best_response(player);
            if to != board.choices()[player] {
                observe(Move { board: &board, pass, player, to });
                board.set(player, to);
                moves += 1;
                changed = true;
            }
        }
        if !changed {
            return DynamicsOutcome {
                status: DynamicsStatus::Converged,
                profile: board.profile(),
                passes: pass,
                attempts: 1,
                moves,
            };
        }
        if options.stop_on_cycle && !seen.insert(board.choices().to_vec()) {
            break;
        }
    }
    DynamicsOutcome {
        status: DynamicsStatus::GaveUp,
        profile: board.profile(),
        passes: options.max_passes,
        attempts: 1,
        moves,
    }
}

pub fn random_profile<S: Scalar>(game: &GameInstance<S>, rng: &mut impl Rng) -> StrategyProfile {
    StrategyProfile::new(
        game.choice_counts().into_iter().map(|m| rng.random_range(0..m)).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub attempts: usize,
    pub max_passes: usize,
    /// Start the first attempt from the all-first-choices profile.
    pub first_all_zero: bool,
}

impl SearchOptions {
    pub fn new(attempts: usize, max_passes: usize) -> Self {
        Self { attempts, max_passes, first_all_zero: false }
    }
}

/// Restarts best-response dynamics from uniformly random profiles until one
/// run converges or the attempts run out.
pub fn multi_start_search<S: Scalar>(
    game: &GameInstance<S>,
    attempts: usize,
    max_passes: usize,
    seed: u64,
) -> DynamicsOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    multi_start_search_with(game, SearchOptions::new(attempts, max_passes), &mut rng)
}

pub fn multi_start_search_with<S: Scalar>(
    game: &GameInstance<S>,
    options: SearchOptions,
    rng: &mut impl Rng,
) -> DynamicsOutcome {
    assert!(options.attempts >= 1, "at least one attempt is required");
    let mut last = None;
    for attempt in 1..=options.attempts {
        let start = if attempt == 1 && options.first_all_zero {
            StrategyProfile::first_choices(game.players())
        } else {
            random_profile(game, rng)
        };
        let mut outcome = run_best_response(game, &start, options.max_passes);
        outcome.attempts = attempt;
        if outcome.converged() {
            return outcome;
        }
        last = Some(outcome);
    }
    last.expect("attempts >= 1")
}

/// Arc lengths between consecutive chosen points, kept in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcMultiset<S>(Vec<S>);

impl<S: Scalar> ArcMultiset<S> {
    pub fn new(mut arcs: Vec<S>) -> Self {
        arcs.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        Self(arcs)
    }

    /// Arcs cut by distinct points in `[0, 1)`.
    pub fn from_points(points: &[S]) -> Self {
        let mut sorted = points.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        let n = sorted.len();
        let arcs = match n {
            0 => Vec::new(),
            1 => vec![S::one()],
            _ => (0..n).map(|i| clockwise_distance(&sorted[i], &sorted[(i + 1) % n])).collect(),
        };
        Self::new(arcs)
    }

    /// Arcs of the points chosen under `profile` in a circle instance.
    pub fn of_profile(game: &GameInstance<S>, profile: &StrategyProfile) -> Self {
        let points: Vec<S> = profile
            .choices()
            .iter()
            .enumerate()
            .map(|(k, &c)| game.circle_point(k, c).clone())
            .collect();
        Self::from_points(&points)
    }

    pub fn arcs(&self) -> &[S] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The potential order: `Greater` means `a` ranks above `b`.
///
/// Fewer arcs rank higher; otherwise the larger maximum wins, with ties
/// resolved by dropping one copy of the maximum from both and recursing.
pub fn potential_compare<S: Scalar>(a: &ArcMultiset<S>, b: &ArcMultiset<S>) -> Ordering {
    if a.len() != b.len() {
        return b.len().cmp(&a.len());
    }
    for (x, y) in a.arcs().iter().zip(b.arcs()) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(order) => return order,
        }
    }
    Ordering::Equal
}

/// Result of a backtracking equilibrium search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PneSearch {
    pub profile: Option<StrategyProfile>,
    pub nodes: u64,
}

/// A one-way game with every position scaled to an integer tick count.
struct TickGame {
    circumference: i64,
    slots: Vec<(usize, usize)>,
    ticks: Vec<Vec<i64>>,
    rank: Vec<Vec<usize>>,
    maximize: bool,
}

impl TickGame {
    fn new(game: &GameInstance<Rational>) -> Result<Self, EquilibriumError> {
        let mut denom = num_bigint::BigInt::from(1);
        let counts = game.choice_counts();
        for (k, &m) in counts.iter().enumerate() {
            for c in 0..m {
                denom = num_integer::Integer::lcm(&denom, game.circle_point(k, c).denom());
            }
        }
        let circumference = denom.to_i64().ok_or(EquilibriumError::DenominatorTooLarge)?;
        let ticks = counts
            .iter()
            .enumerate()
            .map(|(k, &m)| {
                (0..m)
                    .map(|c| {
                        let p = game.circle_point(k, c);
                        (p.numer() * (&denom / p.denom())).to_i64().ok_or(EquilibriumError::DenominatorTooLarge)
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let slots = game.circle_slots().to_vec();
        let rank = counts.iter().enumerate().map(|(k, &m)| (0..m).map(|c| game.circle_rank(k, c)).collect()).collect();
        Ok(Self { circumference, slots, ticks, rank, maximize: game.objective() == Objective::Maximize })
    }

    /// Bounds on the clockwise gap from `(player, choice)` to the next
    /// chosen point of someone else, given a partial assignment: the
    /// nearest point that might be chosen and the nearest one that is.
    fn gap_bounds(&self, assigned: &[Option<usize>], player: usize, choice: usize) -> (i64, i64) {
        let len = self.slots.len();
        let start = self.rank[player][choice];
        let here = self.ticks[player][choice];
        let mut possible = None;
        for step in 1..len {
            let (j, i) = self.slots[(start + step) % len];
            if j == player {
                continue;
            }
            match assigned[j] {
                Some(c) if c != i => continue,
                Some(_) => {
                    let gap = (self.ticks[j][i] - here).rem_euclid(self.circumference);
                    return (possible.unwrap_or(gap), gap);
                }
                None => {
                    possible.get_or_insert((self.ticks[j][i] - here).rem_euclid(self.circumference));
                }
            }
        }
        (possible.unwrap_or(self.circumference), self.circumference)
    }

    /// True when some alternative beats the current choice whatever the
    /// unassigned players do.
    fn surely_unstable(&self, assigned: &[Option<usize>], player: usize) -> bool {
        let current = assigned[player].expect("assigned player");
        let (low, high) = self.gap_bounds(assigned, player, current);
        (0..self.ticks[player].len()).filter(|&c| c != current).any(|c| {
            let (alt_low, alt_high) = self.gap_bounds(assigned, player, c);
            if self.maximize {
                alt_low > high
            } else {
                alt_high < low
            }
        })
    }
}

/// Backtracking search for one pure equilibrium of a one-way game with
/// exact positions. Players with a single candidate are fixed up front;
/// the rest are assigned in `order` (index order when `None`), and a
/// branch is cut as soon as an assigned player has a deviation that wins
/// against every completion.
pub fn find_pne_one_way(
    game: &GameInstance<Rational>,
    order: Option<&[usize]>,
    node_budget: u64,
) -> Result<PneSearch, EquilibriumError> {
    if game.variant() != GameVariant::OneWay1D {
        return Err(EquilibriumError::UnsupportedVariant(game.variant()));
    }
    let ticks = TickGame::new(game)?;
    let counts = game.choice_counts();
    let mut assigned: Vec<Option<usize>> = counts.iter().map(|&m| if m == 1 { Some(0) } else { None }).collect();
    let free: Vec<usize> = match order {
        Some(o) => o.iter().copied().filter(|&k| counts[k] > 1).collect(),
        None => (0..counts.len()).filter(|&k| counts[k] > 1).collect(),
    };
    let mut nodes = 0u64;
    let mut placed: Vec<usize> = Vec::with_capacity(free.len());
    let found = search_from(&ticks, &counts, &free, &mut assigned, &mut placed, &mut nodes, node_budget)?;
    Ok(PneSearch { profile: found.then(|| StrategyProfile::new(assigned.iter().map(|c| c.expect("complete")).collect())), nodes })
}

fn search_from(
    ticks: &TickGame,
    counts: &[usize],
    free: &[usize],
    assigned: &mut Vec<Option<usize>>,
    placed: &mut Vec<usize>,
    nodes: &mut u64,
    budget: u64,
) -> Result<bool, EquilibriumError> {
    let Some(&player) = free.get(placed.len()) else {
        return Ok(true);
    };
    for choice in 0..counts[player] {
        *nodes += 1;
        if *nodes > budget {
            return Err(EquilibriumError::SearchBudgetExceeded { nodes: budget });
        }
        assigned[player] = Some(choice);
        placed.push(player);
        let viable = placed.iter().all(|&k| !ticks.surely_unstable(assigned, k));
        if viable && search_from(ticks, counts, free, assigned, placed, nodes, budget)? {
            return Ok(true);
        }
        placed.pop();
    }
    assigned[player] = None;
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::build_fig3_instance;

    #[test]
    fn singleton_game_every_profile_is_stable() {
        let g = GameInstance::circle(GameVariant::Voronoi1D, Objective::Maximize, vec![vec![0.1, 0.5, 0.9]])
            .unwrap();
        let all = enumerate_pne(&g).unwrap();
        assert_eq!(all.len(), 3);
        assert_eq!(all[2].choices(), &[2]);
    }

    #[test]
    fn square_counterexample_has_no_equilibrium() {
        for objective in [Objective::Maximize, Objective::Minimize] {
            let g = build_fig3_instance(Rational::from_ratio(1, 64), 3, objective).unwrap();
            assert!(enumerate_pne(&g).unwrap().is_empty());
            let out = multi_start_search(&g, 3, 50, 7);
            assert_eq!(out.status, DynamicsStatus::GaveUp);
            assert_eq!(out.attempts, 3);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let players = (0..30).map(|k| vec![k as f64 / 100.0, 0.5 + k as f64 / 100.0]).collect();
        let g = GameInstance::circle(GameVariant::OneWay1D, Objective::Maximize, players).unwrap();
        assert!(matches!(enumerate_pne(&g), Err(EquilibriumError::BudgetExceeded { .. })));
    }

    #[test]
    fn stable_start_converges_in_one_pass() {
        let g = GameInstance::circle(
            GameVariant::Voronoi1D,
            Objective::Maximize,
            vec![vec![0.0, 0.05], vec![0.5, 0.55]],
        )
        .unwrap();
        let start = StrategyProfile::new(vec![0, 0]);
        assert!(g.is_pne(&start));
        let out = run_best_response(&g, &start, 10);
        assert_eq!(out.status, DynamicsStatus::Converged);
        assert_eq!(out.passes, 1);
    }

    #[test]
    fn cycle_shortcut_matches_full_run() {
        let g = build_fig3_instance(1.0 / 64.0, 3, Objective::Maximize).unwrap();
        let start = StrategyProfile::new(vec![0, 0, 0]);
        let quick = run_best_response(&g, &start, 1000);
        let full = run_observed(&g, &start, DynamicsOptions { max_passes: 1000, stop_on_cycle: false }, |_| {});
        assert_eq!(quick.status, full.status);
        assert_eq!(quick.passes, full.passes);
    }

    #[test]
    fn potential_examples() {
        let a = ArcMultiset::new(vec![0.5, 0.5]);
        let b = ArcMultiset::new(vec![0.2, 0.3, 0.5]);
        assert_eq!(potential_compare(&a, &b), Ordering::Greater);
        assert_eq!(potential_compare(&a, &a.clone()), Ordering::Equal);
        let c = ArcMultiset::new(vec![0.6, 0.4]);
        assert_eq!(potential_compare(&c, &a), Ordering::Greater);
        assert_eq!(potential_compare(&a, &c), Ordering::Less);
        let d = ArcMultiset::new(vec![0.5, 0.3, 0.2]);
        let e = ArcMultiset::new(vec![0.5, 0.4, 0.1]);
        assert_eq!(potential_compare(&e, &d), Ordering::Greater);
    }

    #[test]
    fn pruned_search_matches_enumeration() {
        use rand::seq::index::sample;
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for round in 0..300 {
            let n = rng.random_range(1..=4usize);
            let m = rng.random_range(1..=3usize);
            let slots = sample(&mut rng, 36, n * m).into_vec();
            let players: Vec<Vec<Rational>> = slots
                .chunks(m)
                .map(|c| c.iter().map(|&s| Rational::new((s as i64).into(), 36.into())).collect())
                .collect();
            let objective = if round % 2 == 0 { Objective::Maximize } else { Objective::Minimize };
            let g = GameInstance::circle(GameVariant::OneWay1D, objective, players).unwrap();
            let all = enumerate_pne(&g).unwrap();
            let found = find_pne_one_way(&g, None, 1_000_000).unwrap();
            assert_eq!(found.profile.is_some(), !all.is_empty());
            if let Some(p) = found.profile {
                assert!(g.is_pne(&p));
            }
        }
    }

    #[test]
    fn pruned_search_rejects_other_variants() {
        let g = GameInstance::circle(GameVariant::Voronoi1D, Objective::Maximize, vec![vec![Rational::from_integer(0.into())]])
            .unwrap();
        assert!(matches!(find_pne_one_way(&g, None, 10), Err(EquilibriumError::UnsupportedVariant(_))));
    }
}
