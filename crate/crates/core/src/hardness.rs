//! Reduction from monotone 1-in-3 SAT to pure-equilibrium existence in the
//! one-way circle game.
//!
//! The circle is cut into one region per variable followed by one region per
//! clause. A clause player can sit in the region of any of its three
//! variables, and two shadow players per clause can sit just in front of it
//! in the same three regions. A clause player earns the full spacing `d` only
//! when no shadow lands right after it, which forces every region to hold
//! either clause players or shadows but not both. Each clause region hosts a
//! two-player gadget with no stable state as long as the clause player sits
//! there, so the only way out is an exact cover.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::equilibrium::{find_pne_one_way, EquilibriumError, PneSearch};
use crate::games::{Board, GameError, GameInstance, GameVariant, Objective, StrategyProfile};
use crate::geometry::clockwise_distance;
use crate::numeric::Rational;

/// Largest variable count `solve_1in3` accepts.
pub const MAX_SOLVER_VARIABLES: usize = 24;

/// Node budget for the pruned equilibrium search on reduction games.
pub const DEFAULT_SEARCH_BUDGET: u64 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HardnessError {
    #[error("invalid formula: {0}")]
    InvalidFormula(String),
    #[error("{variables} variables exceed the solver limit of {limit}")]
    TooManyVariables { variables: usize, limit: usize },
    #[error("epsilon must be positive")]
    EpsilonNotPositive,
    #[error("epsilon {eps} must stay below {bound}")]
    EpsilonTooLarge { eps: String, bound: String },
    #[error("player {0} does not exist")]
    UnknownPlayer(usize),
    #[error("the gadget needs a one-way maximization game")]
    WrongGame,
    #[error("cannot pad player {0}: another candidate sits too close in front of it")]
    PaddingConflict(usize),
    #[error("cannot pad to {target} candidates: player {player} already has {has}")]
    PaddingTooSmall { target: usize, player: usize, has: usize },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct FormulaParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// A monotone 3-CNF formula read under 1-in-3 semantics: every clause must
/// have exactly one true variable. Variables are stored zero-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monotone1in3Formula {
    variables: usize,
    clauses: Vec<[usize; 3]>,
}

impl Monotone1in3Formula {
    /// Builds a formula from one-based variable indices.
    pub fn new(variables: usize, clauses: Vec<[usize; 3]>) -> Result<Self, HardnessError> {
        if variables == 0 {
            return Err(HardnessError::InvalidFormula("at least one variable is required".into()));
        }
        let mut stored = Vec::with_capacity(clauses.len());
        for (j, clause) in clauses.iter().enumerate() {
            if let Some(v) = clause.iter().find(|&&v| v == 0 || v > variables) {
                return Err(HardnessError::InvalidFormula(format!(
                    "clause {} uses variable {v} outside 1..={variables}",
                    j + 1
                )));
            }
            if clause[0] == clause[1] || clause[0] == clause[2] || clause[1] == clause[2] {
                return Err(HardnessError::InvalidFormula(format!(
                    "clause {} repeats a variable",
                    j + 1
                )));
            }
            stored.push([clause[0] - 1, clause[1] - 1, clause[2] - 1]);
        }
        Ok(Self { variables, clauses: stored })
    }

    /// Reads a DIMACS-like listing: `c` comment lines, an optional
    /// `p <kind> <variables> <clauses>` header, then one clause per line as
    /// three positive integers with an optional trailing `0`.
    pub fn parse(text: &str) -> Result<Self, FormulaParseError> {
        let mut declared: Option<(usize, usize, usize)> = None;
        let mut clauses: Vec<([usize; 3], usize)> = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let tokens = tokenize(raw);
            let Some(&(first_col, first)) = tokens.first() else {
                continue;
            };
            if first == "c" || first.starts_with('%') {
                continue;
            }
            let fail = |column: usize, message: String| FormulaParseError { line, column, message };
            if first == "p" {
                if declared.is_some() || !clauses.is_empty() {
                    return Err(fail(first_col, "header must come once, before any clause".into()));
                }
                if tokens.len() != 4 {
                    return Err(fail(first_col, "expected `p <kind> <variables> <clauses>`".into()));
                }
                let k = parse_count(tokens[2]).map_err(|m| fail(tokens[2].0, m))?;
                let l = parse_count(tokens[3]).map_err(|m| fail(tokens[3].0, m))?;
                declared = Some((k, l, line));
                continue;
            }
            let mut values: Vec<usize> = Vec::new();
            for &(col, tok) in &tokens {
                let v = parse_count((col, tok)).map_err(|m| fail(col, m))?;
                values.push(v);
            }
            if values.len() == 4 && values[3] == 0 {
                values.pop();
            }
            if values.len() != 3 {
                return Err(fail(first_col, format!("expected three variables, found {}", values.len())));
            }
            if let Some(pos) = values.iter().position(|&v| v == 0) {
                return Err(fail(tokens[pos].0, "variables are numbered from 1".into()));
            }
            for a in 0..3 {
                for b in a + 1..3 {
                    if values[a] == values[b] {
                        return Err(fail(tokens[b].0, format!("variable {} repeats in the clause", values[b])));
                    }
                }
            }
            if let Some((k, _, _)) = declared {
                if let Some(pos) = values.iter().position(|&v| v > k) {
                    return Err(fail(tokens[pos].0, format!("variable {} exceeds the declared {k}", values[pos])));
                }
            }
            clauses.push(([values[0], values[1], values[2]], line));
        }
        let variables = match declared {
            Some((k, l, line)) => {
                if l != clauses.len() {
                    return Err(FormulaParseError {
                        line,
                        column: 1,
                        message: format!("header declares {l} clauses, found {}", clauses.len()),
                    });
                }
                k
            }
            None => clauses.iter().flat_map(|(c, _)| c.iter().copied()).max().unwrap_or(0),
        };
        Self::new(variables, clauses.iter().map(|(c, _)| *c).collect()).map_err(|e| FormulaParseError {
            line: 1,
            column: 1,
            message: e.to_string(),
        })
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    /// Zero-based variables of clause `j`.
    pub fn clause(&self, j: usize) -> [usize; 3] {
        self.clauses[j]
    }

    /// Clauses containing `variable`, in increasing order.
    pub fn occurrences(&self, variable: usize) -> Vec<usize> {
        (0..self.clauses.len()).filter(|&j| self.clauses[j].contains(&variable)).collect()
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.variables
            && self.clauses.iter().all(|c| c.iter().filter(|&&v| assignment[v]).count() == 1)
    }
}

impl fmt::Display for Monotone1in3Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p 1in3 {} {}", self.variables, self.clauses.len())?;
        for c in &self.clauses {
            writeln!(f, "{} {} {} 0", c[0] + 1, c[1] + 1, c[2] + 1)?;
        }
        Ok(())
    }
}

fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(|(byte, tok)| (line[..byte].chars().count() + 1, tok)).collect()
}

fn parse_count((_, token): (usize, &str)) -> Result<usize, String> {
    token.parse::<usize>().map_err(|_| format!("`{token}` is not a non-negative integer"))
}

/// A truth assignment, indexed by zero-based variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatWitness(pub Vec<bool>);

impl SatWitness {
    pub fn true_variables(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&v| self.0[v]).collect()
    }
}

/// Every satisfying assignment, by exhaustive search; limited to
/// `MAX_SOLVER_VARIABLES` variables.
pub fn solve_1in3(formula: &Monotone1in3Formula) -> Result<Vec<SatWitness>, HardnessError> {
    let k = formula.variables();
    if k > MAX_SOLVER_VARIABLES {
        return Err(HardnessError::TooManyVariables { variables: k, limit: MAX_SOLVER_VARIABLES });
    }
    let masks: Vec<u32> = formula.clauses.iter().map(|c| c.iter().fold(0u32, |m, &v| m | 1 << v)).collect();
    Ok((0u32..1 << k)
        .filter(|&bits| masks.iter().all(|&m| (bits & m).count_ones() == 1))
        .map(|bits| SatWitness((0..k).map(|v| bits >> v & 1 == 1).collect()))
        .collect())
}

/// Which of the two shadow slots a shadow player uses: `Near` sits `2ε`
/// before its clause point and `Far` sits `4ε` before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShadowSlot {
    Near,
    Far,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// Single fixed point at the start of a region.
    Boundary,
    /// A player carried over from a game the gadget was attached to.
    Base,
    Clause { clause: usize },
    ShadowClause { clause: usize, slot: ShadowSlot },
    Wrap { variable: usize },
    UegX { guarded: usize },
    UegY { guarded: usize },
    UegZ { guarded: usize },
}

impl Role {
    pub fn name(&self) -> &'static str {
        match self {
            Role::Boundary => "boundary",
            Role::Base => "base",
            Role::Clause { .. } => "clause",
            Role::ShadowClause { .. } => "shadow",
            Role::Wrap { .. } => "wrap",
            Role::UegX { .. } => "ueg-x",
            Role::UegY { .. } => "ueg-y",
            Role::UegZ { .. } => "ueg-z",
        }
    }
}

/// A reduction game together with the role of every player and, for clause
/// and shadow candidates, the variable region each candidate lies in.
#[derive(Debug, Clone)]
pub struct RoleTaggedInstance {
    game: GameInstance<Rational>,
    roles: Vec<Role>,
    regions: Vec<Vec<Option<usize>>>,
    formula: Option<Monotone1in3Formula>,
    d: Rational,
    eps: Rational,
}

impl RoleTaggedInstance {
    /// Tags every player of an existing one-way game as `Base`, except
    /// single-candidate players at position 0, which count as boundaries.
    pub fn from_game(game: GameInstance<Rational>) -> Result<Self, HardnessError> {
        if game.variant() != GameVariant::OneWay1D || game.objective() != Objective::Maximize {
            return Err(HardnessError::WrongGame);
        }
        let roles = (0..game.players())
            .map(|k| {
                if game.choices_of(k) == 1 && game.circle_point(k, 0).is_zero() {
                    Role::Boundary
                } else {
                    Role::Base
                }
            })
            .collect();
        let regions = game.choice_counts().iter().map(|&m| vec![None; m]).collect();
        Ok(Self { game, roles, regions, formula: None, d: Rational::one(), eps: Rational::zero() })
    }

    pub fn game(&self) -> &GameInstance<Rational> {
        &self.game
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn formula(&self) -> Option<&Monotone1in3Formula> {
        self.formula.as_ref()
    }

    /// Clause spacing, in circle units.
    pub fn d(&self) -> &Rational {
        &self.d
    }

    /// Gadget offset unit, in circle units.
    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    /// Variable region holding `player`'s candidate `choice`, if any.
    pub fn region_of(&self, player: usize, choice: usize) -> Option<usize> {
        self.regions[player][choice]
    }

    /// Number of players per role name.
    pub fn census(&self) -> Vec<(&'static str, usize)> {
        let mut out: Vec<(&'static str, usize)> = Vec::new();
        for r in &self.roles {
            match out.iter_mut().find(|(name, _)| *name == r.name()) {
                Some((_, n)) => *n += 1,
                None => out.push((r.name(), 1)),
            }
        }
        out
    }

    pub fn players_where(&self, pred: impl Fn(&Role) -> bool) -> Vec<usize> {
        (0..self.roles.len()).filter(|&k| pred(&self.roles[k])).collect()
    }

    /// Assignment order for the pruned search: each clause player right
    /// before its gadget pair, then shadows from the last clause down, then
    /// wraps and anything else.
    pub fn search_order(&self) -> Vec<usize> {
        let key = |k: usize| match self.roles[k] {
            Role::Clause { clause } => (0, clause, 0),
            Role::UegX { guarded } => (0, self.clause_of(guarded), 1),
            Role::UegY { guarded } => (0, self.clause_of(guarded), 2),
            Role::ShadowClause { clause, slot } => (1, usize::MAX - clause, usize::from(slot == ShadowSlot::Far)),
            Role::Wrap { variable } => (2, variable, 0),
            _ => (3, k, 0),
        };
        let mut order: Vec<usize> = (0..self.roles.len()).collect();
        order.sort_by_key(|&k| key(k));
        order
    }

    fn clause_of(&self, player: usize) -> usize {
        match self.roles.get(player) {
            Some(Role::Clause { clause }) => *clause,
            _ => player,
        }
    }

    /// Reads a truth assignment off a profile: a variable is true when some
    /// clause player sits in its region. `None` when a clause player sits in
    /// its gadget region or the instance has no formula.
    pub fn assignment_from_profile(&self, profile: &StrategyProfile) -> Option<SatWitness> {
        let formula = self.formula.as_ref()?;
        let mut values = vec![false; formula.variables()];
        for k in self.players_where(|r| matches!(r, Role::Clause { .. })) {
            values[self.regions[k][profile[k]]?] = true;
        }
        Some(SatWitness(values))
    }
}

/// Knobs for `build_game`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionOptions {
    /// Gadget offset relative to a unit clause spacing; `None` picks
    /// `default_epsilon`.
    pub eps: Option<Rational>,
    /// Pad every player to this many candidates with dominated points.
    pub pad_to: Option<usize>,
    /// Stretch every region to the length of the longest one.
    pub equal_regions: bool,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        Self { eps: None, pad_to: None, equal_regions: true }
    }
}

/// Supremum of admissible offsets for clause spacing `d`. The layout needs
/// `4ε < d` to keep each clause's slots ahead of the next clause, and
/// `4ε < d - 2ε` so that a shadow earns more anywhere outside a true region
/// than inside one; the gadget needs `2ε < d`. The binding one is `ε < d/6`.
pub fn epsilon_supremum(d: &Rational) -> Rational {
    d / Rational::from_integer(6.into())
}

/// Half of `epsilon_supremum`.
pub fn default_epsilon(d: &Rational) -> Rational {
    epsilon_supremum(d) / Rational::from_integer(2.into())
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

/// Offsets of the gadget points from the start of its content, for spacing
/// `d` and offset `eps`. The guarded player's point sits `d - ε` before the
/// end of the region.
struct GadgetOffsets {
    x: [Rational; 2],
    y: [Rational; 2],
    z: Rational,
    guard: Rational,
    length: Rational,
}

fn gadget_offsets(d: &Rational, eps: &Rational) -> GadgetOffsets {
    GadgetOffsets {
        x: [eps.clone(), eps * int(3)],
        y: [eps * int(2), eps * int(6)],
        z: eps * int(5),
        guard: eps * int(8),
        length: d + eps * int(7),
    }
}

/// Player layout under construction, in unscaled units.
struct Layout {
    roles: Vec<Role>,
    points: Vec<Vec<Option<Rational>>>,
    regions: Vec<Vec<Option<usize>>>,
}

impl Layout {
    fn add(&mut self, role: Role, candidates: usize) -> usize {
        self.roles.push(role);
        self.points.push(vec![None; candidates]);
        self.regions.push(vec![None; candidates]);
        self.roles.len() - 1
    }

    fn place(&mut self, player: usize, choice: usize, at: Rational, region: Option<usize>) {
        self.points[player][choice] = Some(at);
        self.regions[player][choice] = region;
    }
}

/// Builds the reduction game for `formula` with unit clause spacing before
/// rescaling to the unit circle. Players: one boundary per region, one
/// clause player and two shadows per clause, one wrap per variable and three
/// gadget players per clause.
pub fn build_game(
    formula: &Monotone1in3Formula,
    options: &ReductionOptions,
) -> Result<RoleTaggedInstance, HardnessError> {
    let d = Rational::one();
    let eps = match &options.eps {
        Some(e) => e.clone(),
        None => default_epsilon(&d),
    };
    if eps <= Rational::zero() {
        return Err(HardnessError::EpsilonNotPositive);
    }
    let bound = epsilon_supremum(&d);
    if eps >= bound {
        return Err(HardnessError::EpsilonTooLarge { eps: eps.to_string(), bound: bound.to_string() });
    }
    let k = formula.variables();
    let l = formula.clause_count();
    let gadget = gadget_offsets(&d, &eps);
    let occurrences: Vec<Vec<usize>> = (0..k).map(|v| formula.occurrences(v)).collect();
    let natural = |t: usize| int(t.max(1) as i64) * &d + &eps * int(6);
    let longest = occurrences
        .iter()
        .map(|o| natural(o.len()))
        .chain((l > 0).then(|| gadget.length.clone()))
        .max()
        .expect("at least one variable");

    let mut layout = Layout { roles: Vec::new(), points: Vec::new(), regions: Vec::new() };
    let boundaries: Vec<usize> = (0..k + l).map(|_| layout.add(Role::Boundary, 1)).collect();
    let clause_players: Vec<usize> = (0..l).map(|j| layout.add(Role::Clause { clause: j }, 4)).collect();
    let shadows: Vec<[usize; 2]> = (0..l)
        .map(|j| {
            [
                layout.add(Role::ShadowClause { clause: j, slot: ShadowSlot::Near }, 3),
                layout.add(Role::ShadowClause { clause: j, slot: ShadowSlot::Far }, 3),
            ]
        })
        .collect();
    let wraps: Vec<usize> = (0..k).map(|v| layout.add(Role::Wrap { variable: v }, 2)).collect();
    let gadgets: Vec<[usize; 3]> = clause_players
        .iter()
        .map(|&r| {
            [
                layout.add(Role::UegX { guarded: r }, 2),
                layout.add(Role::UegY { guarded: r }, 2),
                layout.add(Role::UegZ { guarded: r }, 1),
            ]
        })
        .collect();

    let mut offset = Rational::zero();
    for v in 0..k {
        let own = natural(occurrences[v].len());
        let length = if options.equal_regions { longest.clone() } else { own.clone() };
        let start = &offset + (&length - &own);
        let end = &offset + &length;
        layout.place(boundaries[v], 0, offset.clone(), None);
        layout.place(wraps[v], 0, &start + &eps, None);
        layout.place(wraps[v], 1, &end - &eps * int(4), None);
        for (a, &j) in occurrences[v].iter().enumerate() {
            let slot = formula.clause(j).iter().position(|&u| u == v).expect("occurrence");
            let base = &start + int(a as i64) * &d;
            layout.place(shadows[j][1], slot, &base + &eps * int(2), Some(v));
            layout.place(shadows[j][0], slot, &base + &eps * int(4), Some(v));
            layout.place(clause_players[j], slot, &base + &eps * int(6), Some(v));
        }
        offset = end;
    }
    for j in 0..l {
        let length = if options.equal_regions { longest.clone() } else { gadget.length.clone() };
        let start = &offset + (&length - &gadget.length);
        let [x, y, z] = gadgets[j];
        layout.place(boundaries[k + j], 0, offset.clone(), None);
        layout.place(x, 0, &start + &gadget.x[0], None);
        layout.place(x, 1, &start + &gadget.x[1], None);
        layout.place(y, 0, &start + &gadget.y[0], None);
        layout.place(y, 1, &start + &gadget.y[1], None);
        layout.place(z, 0, &start + &gadget.z, None);
        layout.place(clause_players[j], 3, &start + &gadget.guard, None);
        offset += length;
    }
    let total = offset;
    let points: Vec<Vec<Rational>> = layout
        .points
        .into_iter()
        .map(|pts| pts.into_iter().map(|p| p.expect("every slot placed") / &total).collect())
        .collect();
    let game = GameInstance::circle(GameVariant::OneWay1D, Objective::Maximize, points)?;
    let tagged = RoleTaggedInstance {
        game,
        roles: layout.roles,
        regions: layout.regions,
        formula: Some(formula.clone()),
        d: &d / &total,
        eps: &eps / &total,
    };
    match options.pad_to {
        Some(m) => pad_candidates(&tagged, m),
        None => Ok(tagged),
    }
}

/// Gives every player exactly `m` candidates. Surplus points go just in
/// front of the player's first candidate, within `ε/8`, where they are
/// strictly dominated by it and so never change the equilibrium set.
pub fn pad_candidates(tagged: &RoleTaggedInstance, m: usize) -> Result<RoleTaggedInstance, HardnessError> {
    let game = &tagged.game;
    let reach = &tagged.eps / int(8);
    let step = &reach / int(m as i64);
    let mut points: Vec<Vec<Rational>> = Vec::with_capacity(game.players());
    let mut regions = tagged.regions.clone();
    for (k, region) in regions.iter_mut().enumerate() {
        let has = game.choices_of(k);
        if has > m {
            return Err(HardnessError::PaddingTooSmall { target: m, player: k, has });
        }
        let mut pts: Vec<Rational> = (0..has).map(|c| game.circle_point(k, c).clone()).collect();
        if has < m {
            let anchor = pts[0].clone();
            let crowded = (0..game.players()).filter(|&j| j != k).any(|j| {
                (0..game.choices_of(j)).any(|c| clockwise_distance(&anchor, game.circle_point(j, c)) <= reach)
            });
            if crowded {
                return Err(HardnessError::PaddingConflict(k));
            }
            for s in 1..=(m - has) {
                let mut p = &anchor + &step * int(s as i64);
                if p >= Rational::one() {
                    p -= Rational::one();
                }
                pts.push(p);
                region.push(tagged.regions[k][0]);
            }
        }
        points.push(pts);
    }
    Ok(RoleTaggedInstance {
        game: GameInstance::circle(GameVariant::OneWay1D, Objective::Maximize, points)?,
        roles: tagged.roles.clone(),
        regions,
        formula: tagged.formula.clone(),
        d: tagged.d.clone(),
        eps: tagged.eps.clone(),
    })
}

/// Every payoff `player` can reach from any of its candidates, over all
/// choices of the others.
fn reachable_payoffs(game: &GameInstance<Rational>, player: usize) -> Vec<Rational> {
    let mut out = Vec::new();
    for c in 0..game.choices_of(player) {
        let here = game.circle_point(player, c);
        let mut ahead: Vec<(Rational, bool)> = (0..game.players())
            .filter(|&j| j != player)
            .flat_map(|j| {
                let fixed = game.choices_of(j) == 1;
                (0..game.choices_of(j)).map(move |i| (j, i, fixed))
            })
            .map(|(j, i, fixed)| (clockwise_distance(here, game.circle_point(j, i)), fixed))
            .collect();
        ahead.sort_by(|a, b| a.0.cmp(&b.0));
        let mut blocked = false;
        for (gap, fixed) in ahead {
            out.push(gap);
            if fixed {
                blocked = true;
                break;
            }
        }
        if !blocked {
            out.push(Rational::one());
        }
    }
    out
}

/// Splices a gadget guarding `guarded` into the circle: a new region of
/// length `d + 7ε` is opened at position 0 and everything is rescaled to
/// unit circumference. `guarded` gains one candidate in the new region worth
/// exactly `d - ε`; while it sits there the gadget pair has no stable state,
/// and when it sits elsewhere the pair settles. `d` and `eps` are in the
/// current circle's units. A single-candidate player at position 0 closes
/// the region; without one a boundary player is added there, which shortens
/// the arc of whoever sat last on the old circle.
pub fn attach_ueg(
    tagged: &RoleTaggedInstance,
    guarded: usize,
    d: &Rational,
    eps: &Rational,
) -> Result<RoleTaggedInstance, HardnessError> {
    let game = &tagged.game;
    if game.variant() != GameVariant::OneWay1D || game.objective() != Objective::Maximize {
        return Err(HardnessError::WrongGame);
    }
    if guarded >= game.players() {
        return Err(HardnessError::UnknownPlayer(guarded));
    }
    if *eps <= Rational::zero() {
        return Err(HardnessError::EpsilonNotPositive);
    }
    let half = d / int(2);
    let below_d = reachable_payoffs(game, guarded).into_iter().filter(|u| u < d).max();
    let bound = match below_d {
        Some(u) => (d - u).min(half),
        None => half,
    };
    if *eps >= bound {
        return Err(HardnessError::EpsilonTooLarge { eps: eps.to_string(), bound: bound.to_string() });
    }
    let gadget = gadget_offsets(d, eps);
    let scale = Rational::one() + &gadget.length;
    let shift = |p: &Rational| (&gadget.length + p) / &scale;
    let fresh = |p: &Rational| p / &scale;
    let anchored = (0..game.players()).any(|k| game.choices_of(k) == 1 && game.circle_point(k, 0).is_zero());

    let mut points: Vec<Vec<Rational>> = (0..game.players())
        .map(|k| (0..game.choices_of(k)).map(|c| shift(game.circle_point(k, c))).collect())
        .collect();
    let mut roles = tagged.roles.clone();
    let mut regions = tagged.regions.clone();
    points[guarded].push(fresh(&gadget.guard));
    regions[guarded].push(None);
    let mut add = |role: Role, pts: Vec<Rational>| {
        regions.push(vec![None; pts.len()]);
        roles.push(role);
        points.push(pts);
    };
    add(Role::Boundary, vec![Rational::zero()]);
    if !anchored {
        add(Role::Boundary, vec![fresh(&gadget.length)]);
    }
    add(Role::UegX { guarded }, gadget.x.iter().map(&fresh).collect());
    add(Role::UegY { guarded }, gadget.y.iter().map(&fresh).collect());
    add(Role::UegZ { guarded }, vec![fresh(&gadget.z)]);
    Ok(RoleTaggedInstance {
        game: GameInstance::circle(GameVariant::OneWay1D, Objective::Maximize, points)?,
        roles,
        regions,
        formula: tagged.formula.clone(),
        d: fresh(d),
        eps: fresh(eps),
    })
}

/// Outcome of building an equilibrium from a satisfying assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub profile: StrategyProfile,
    pub rounds: usize,
    pub is_pne: bool,
}

/// Turns a satisfying assignment into a profile: clause players go to the
/// region of their true variable, gadget pairs to their settled state and
/// shadows to false regions. Then shadows take best responses from the last
/// clause down, followed by the wraps, repeating until nobody moves.
pub fn complete_from_witness(
    tagged: &RoleTaggedInstance,
    witness: &SatWitness,
) -> Result<Completion, HardnessError> {
    let formula = tagged.formula.as_ref().ok_or(HardnessError::InvalidFormula("instance has no formula".into()))?;
    if !formula.satisfied_by(&witness.0) {
        return Err(HardnessError::InvalidFormula("assignment does not satisfy every clause".into()));
    }
    let game = &tagged.game;
    let mut choices = vec![0; game.players()];
    for (k, role) in tagged.roles.iter().enumerate() {
        choices[k] = match *role {
            Role::Clause { clause } => {
                formula.clause(clause).iter().position(|&v| witness.0[v]).expect("one true variable")
            }
            Role::ShadowClause { clause, slot } => {
                let falses: Vec<usize> = (0..3).filter(|&i| !witness.0[formula.clause(clause)[i]]).collect();
                falses[usize::from(slot == ShadowSlot::Far)]
            }
            Role::UegY { .. } => 1,
            _ => 0,
        };
    }
    let mut board = Board::new(game, choices);
    let mut movers: Vec<usize> = tagged.players_where(|r| matches!(r, Role::ShadowClause { .. }));
    movers.sort_by_key(|&k| match tagged.roles[k] {
        Role::ShadowClause { clause, slot } => (usize::MAX - clause, usize::from(slot == ShadowSlot::Far)),
        _ => unreachable!(),
    });
    movers.extend(tagged.players_where(|r| matches!(r, Role::Wrap { .. })));
    let limit = 4 * game.players() + 4;
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut moved = false;
        for &k in &movers {
            let best = board.best_response(k);
            if best != board.choices()[k] {
                board.set(k, best);
                moved = true;
            }
        }
        if !moved || rounds >= limit {
            break;
        }
    }
    Ok(Completion { profile: board.profile(), rounds, is_pne: board.is_stable() })
}

/// Runs the pruned equilibrium search in the role-aware order.
pub fn search_pne(tagged: &RoleTaggedInstance, node_budget: u64) -> Result<PneSearch, HardnessError> {
    Ok(find_pne_one_way(&tagged.game, Some(&tagged.search_order()), node_budget)?)
}

/// Side-by-side answers of the solver and the equilibrium search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub players: usize,
    pub pne_exists: bool,
    pub sat_exists: bool,
    pub agree: bool,
    pub pne: Option<StrategyProfile>,
    /// Assignment read off the equilibrium found, if any.
    pub extracted: Option<SatWitness>,
    /// Whether that assignment satisfies the formula.
    pub extracted_valid: Option<bool>,
    /// Whether every clause player earns exactly `d` in that equilibrium.
    pub clause_utilities_at_d: Option<bool>,
    /// Whether each variable region holds all or none of the clause points
    /// that could go there.
    pub regions_all_or_none: Option<bool>,
    /// Whether completing the solver's first assignment gave an equilibrium.
    pub completion_is_pne: Option<bool>,
    pub nodes: u64,
}

/// Builds the game for `formula` and compares equilibrium existence with
/// satisfiability.
pub fn check_equivalence(
    formula: &Monotone1in3Formula,
    options: &ReductionOptions,
    node_budget: u64,
) -> Result<EquivalenceReport, HardnessError> {
    let tagged = build_game(formula, options)?;
    let search = search_pne(&tagged, node_budget)?;
    let witness = solve_1in3(formula)?.into_iter().next();
    let extracted = search.profile.as_ref().and_then(|p| tagged.assignment_from_profile(p));
    let extracted_valid = search.profile.as_ref().map(|_| extracted.as_ref().is_some_and(|w| formula.satisfied_by(&w.0)));
    let completion_is_pne = match &witness {
        Some(w) => Some(complete_from_witness(&tagged, w)?.is_pne),
        None => None,
    };
    let clause_players = tagged.players_where(|r| matches!(r, Role::Clause { .. }));
    let clause_utilities_at_d = search.profile.as_ref().map(|p| {
        let utilities = tagged.game.utilities(p);
        clause_players.iter().all(|&k| utilities[k] == tagged.d)
    });
    let regions_all_or_none = search.profile.as_ref().map(|p| {
        (0..formula.variables()).all(|v| {
            let placed: Vec<bool> = clause_players
                .iter()
                .filter_map(|&k| {
                    let slot = (0..tagged.game.choices_of(k)).find(|&c| tagged.regions[k][c] == Some(v))?;
                    Some(p[k] == slot)
                })
                .collect();
            placed.iter().all(|&b| b) || placed.iter().all(|&b| !b)
        })
    });
    let pne_exists = search.profile.is_some();
    let sat_exists = witness.is_some();
    Ok(EquivalenceReport {
        players: tagged.game.players(),
        pne_exists,
        sat_exists,
        agree: pne_exists == sat_exists,
        pne: search.profile,
        extracted,
        extracted_valid,
        clause_utilities_at_d,
        regions_all_or_none,
        completion_is_pne,
        nodes: search.nodes,
    })
}

/// Every formula with at most three variables and two clauses, one per
/// clause multiset, plus an unsatisfiable four-variable formula.
pub fn small_formula_suite() -> Vec<Monotone1in3Formula> {
    let mut out = Vec::new();
    for k in 1..=3 {
        out.push(Monotone1in3Formula::new(k, Vec::new()).expect("valid"));
    }
    out.push(Monotone1in3Formula::new(3, vec![[1, 2, 3]]).expect("valid"));
    out.push(Monotone1in3Formula::new(3, vec![[1, 2, 3], [1, 2, 3]]).expect("valid"));
    out.push(unsatisfiable_formula());
    out
}

/// All four 3-subsets of four variables. Each variable lies in three
/// clauses, so a cover would need `3t = 4` true variables.
pub fn unsatisfiable_formula() -> Monotone1in3Formula {
    Monotone1in3Formula::new(4, vec![[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]).expect("valid")
}
