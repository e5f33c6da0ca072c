//! JSON files for instances, mixed strategies and reduction role tables.
//!
//! Points and probabilities are written as decimal or `p/q` strings so that
//! rational values survive a round trip unchanged; plain JSON numbers are
//! accepted on input and read through their decimal text.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expectation::{ExpectationError, ProductDistribution};
use crate::games::{GameError, GameInstance, GameVariant, Objective};
use crate::geometry::PlanarPoint;
use crate::hardness::{Role, RoleTaggedInstance, ShadowSlot};
use crate::numeric::{ParseScalarError, Rational, Scalar};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{context}: {source}")]
    Number { context: String, source: ParseScalarError },
    #[error("player {player}: {message}")]
    Shape { player: usize, message: String },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Distribution(#[from] ExpectationError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum NumberText {
    Text(String),
    Number(serde_json::Number),
}

impl NumberText {
    fn value(&self, context: impl FnOnce() -> String) -> Result<Rational, IoError> {
        let text = match self {
            NumberText::Text(s) => s.clone(),
            NumberText::Number(n) => n.to_string(),
        };
        Rational::parse(&text).map_err(|source| IoError::Number { context: context(), source })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum PointText {
    Circle(NumberText),
    Plane([NumberText; 2]),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceDocument {
    variant: String,
    objective: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    players: Vec<Vec<PointText>>,
}

/// Serializes an instance; `seed` is recorded when the instance was drawn.
pub fn write_instance<S: Scalar>(game: &GameInstance<S>, seed: Option<u64>) -> String {
    let players = (0..game.players())
        .map(|k| {
            (0..game.choices_of(k))
                .map(|c| {
                    if game.variant().is_circle() {
                        PointText::Circle(NumberText::Text(game.circle_point(k, c).render()))
                    } else {
                        let p = game.plane_point(k, c);
                        PointText::Plane([NumberText::Text(p.x.render()), NumberText::Text(p.y.render())])
                    }
                })
                .collect()
        })
        .collect();
    let doc = InstanceDocument {
        variant: game.variant().name().to_string(),
        objective: game.objective().name().to_string(),
        seed,
        players,
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes") + "\n"
}

/// An instance read from JSON, held exactly.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub game: GameInstance<Rational>,
    pub seed: Option<u64>,
}

pub fn read_instance(text: &str) -> Result<LoadedInstance, IoError> {
    let doc: InstanceDocument = serde_json::from_str(text)?;
    let variant: GameVariant = doc.variant.parse()?;
    let objective: Objective = doc.objective.parse()?;
    let game = if variant.is_circle() {
        let players = doc
            .players
            .iter()
            .enumerate()
            .map(|(k, pts)| {
                pts.iter()
                    .enumerate()
                    .map(|(c, p)| match p {
                        PointText::Circle(v) => v.value(|| format!("player {k}, point {c}")),
                        PointText::Plane(_) => {
                            Err(IoError::Shape { player: k, message: "expected a single coordinate".into() })
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        GameInstance::circle(variant, objective, players)?
    } else {
        let players = doc
            .players
            .iter()
            .enumerate()
            .map(|(k, pts)| {
                pts.iter()
                    .enumerate()
                    .map(|(c, p)| match p {
                        PointText::Plane([x, y]) => Ok(PlanarPoint::new(
                            x.value(|| format!("player {k}, point {c}, x"))?,
                            y.value(|| format!("player {k}, point {c}, y"))?,
                        )),
                        PointText::Circle(_) => {
                            Err(IoError::Shape { player: k, message: "expected an [x, y] pair".into() })
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        GameInstance::planar(variant, objective, players)?
    };
    Ok(LoadedInstance { game, seed: doc.seed })
}

/// Serializes a product distribution as `{"<player>": [p, ...]}`.
pub fn write_distribution<S: Scalar>(dist: &ProductDistribution<S>) -> String {
    let doc: BTreeMap<usize, Vec<String>> =
        (0..dist.players()).map(|k| (k, dist.player(k).iter().map(Scalar::render).collect())).collect();
    serde_json::to_string_pretty(&doc).expect("plain data serializes") + "\n"
}

/// Reads a distribution and validates it against the candidate counts.
pub fn read_distribution(text: &str, counts: &[usize]) -> Result<ProductDistribution<Rational>, IoError> {
    let doc: BTreeMap<String, Vec<NumberText>> = serde_json::from_str(text)?;
    let mut rows: Vec<Option<Vec<Rational>>> = vec![None; counts.len()];
    for (key, probs) in &doc {
        let player: usize = key
            .parse()
            .ok()
            .filter(|&k| k < counts.len())
            .ok_or_else(|| IoError::Shape { player: counts.len(), message: format!("unknown player key `{key}`") })?;
        let values = probs
            .iter()
            .enumerate()
            .map(|(c, p)| p.value(|| format!("player {player}, choice {c}")))
            .collect::<Result<Vec<_>, _>>()?;
        rows[player] = Some(values);
    }
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(k, r)| r.ok_or(IoError::Shape { player: k, message: "missing from the distribution".into() }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProductDistribution::validated(counts, rows)?)
}

#[derive(Debug, Clone, Serialize)]
struct RoleEntry {
    player: usize,
    role: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    clause: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    slot: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    variable: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    guarded: Option<usize>,
    /// Variable region of each candidate, one-based; null outside regions.
    regions: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Serialize)]
struct RoleDocument {
    formula: Option<String>,
    variables: Option<usize>,
    clauses: Option<usize>,
    d: String,
    eps: String,
    players: usize,
    /// `2k + 6l`, the count quoted for the construction; `players` is what
    /// the layout actually uses.
    quoted_players: Option<usize>,
    roles: Vec<RoleEntry>,
}

/// Role table written next to a reduction instance. Clause and variable
/// numbers are one-based to match the formula file.
pub fn write_roles(tagged: &RoleTaggedInstance) -> String {
    let formula = tagged.formula();
    let roles = tagged
        .roles()
        .iter()
        .enumerate()
        .map(|(k, role)| {
            let mut entry = RoleEntry {
                player: k,
                role: role.name(),
                clause: None,
                slot: None,
                variable: None,
                guarded: None,
                regions: (0..tagged.game().choices_of(k)).map(|c| tagged.region_of(k, c).map(|v| v + 1)).collect(),
            };
            match *role {
                Role::Clause { clause } => entry.clause = Some(clause + 1),
                Role::ShadowClause { clause, slot } => {
                    entry.clause = Some(clause + 1);
                    entry.slot = Some(match slot {
                        ShadowSlot::Near => "near",
                        ShadowSlot::Far => "far",
                    });
                }
                Role::Wrap { variable } => entry.variable = Some(variable + 1),
                Role::UegX { guarded } | Role::UegY { guarded } | Role::UegZ { guarded } => {
                    entry.guarded = Some(guarded)
                }
                Role::Boundary | Role::Base => {}
            }
            entry
        })
        .collect();
    let doc = RoleDocument {
        formula: formula.map(|f| f.to_string()),
        variables: formula.map(|f| f.variables()),
        clauses: formula.map(|f| f.clause_count()),
        d: tagged.d().render(),
        eps: tagged.eps().render(),
        players: tagged.game().players(),
        quoted_players: formula.map(|f| 2 * f.variables() + 6 * f.clause_count()),
        roles,
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::build_fig3_instance;
    use crate::hardness::{build_game, Monotone1in3Formula, ReductionOptions};

    #[test]
    fn rational_instances_round_trip() {
        let f = Monotone1in3Formula::new(3, vec![[1, 2, 3]]).unwrap();
        let t = build_game(&f, &ReductionOptions::default()).unwrap();
        let text = write_instance(t.game(), None);
        let back = read_instance(&text).unwrap();
        assert_eq!(back.game, *t.game());
        assert_eq!(write_instance(&back.game, None), text);
        let counter = build_fig3_instance(Rational::from_ratio(1, 64), 5, Objective::Minimize).unwrap();
        let back = read_instance(&write_instance(&counter, Some(9))).unwrap();
        assert_eq!(back.game, counter);
        assert_eq!(back.seed, Some(9));
    }

    #[test]
    fn float_instances_round_trip() {
        let g = GameInstance::circle(GameVariant::Voronoi1D, Objective::Maximize, vec![vec![0.1, 0.7], vec![1.0 / 3.0, 0.9]])
            .unwrap();
        let back = read_instance(&write_instance(&g, Some(1))).unwrap().game.to_f64();
        assert_eq!(back, g);
    }

    #[test]
    fn bad_documents_are_rejected() {
        assert!(matches!(read_instance("{"), Err(IoError::Json(_))));
        let text = r#"{"variant":"one-way","objective":"max","players":[["0.1"],[["0.2","0.3"]]]}"#;
        assert!(matches!(read_instance(text), Err(IoError::Shape { player: 1, .. })));
        let text = r#"{"variant":"one-way","objective":"max","players":[["0.1"],["x"]]}"#;
        assert!(matches!(read_instance(text), Err(IoError::Number { .. })));
        let text = r#"{"variant":"loop","objective":"max","players":[["0.1"]]}"#;
        assert!(read_instance(text).is_err());
    }

    #[test]
    fn distributions_round_trip() {
        let d = read_distribution(r#"{"0": [0.1, "0.9"], "1": ["1/3", "2/3"]}"#, &[2, 2]).unwrap();
        assert_eq!(d.probability(1, 0), &Rational::from_ratio(1, 3));
        assert_eq!(d.probability(0, 0), &Rational::from_ratio(1, 10));
        let again = read_distribution(&write_distribution(&d), &[2, 2]).unwrap();
        assert_eq!(again.rows(), d.rows());
        assert!(read_distribution(r#"{"0": [0.5, 0.4]}"#, &[2]).is_err());
        assert!(read_distribution(r#"{"0": [0.5, 0.5]}"#, &[2, 2]).is_err());
    }

    #[test]
    fn role_sidecar_lists_every_player() {
        let f = Monotone1in3Formula::new(3, vec![[1, 2, 3]]).unwrap();
        let t = build_game(&f, &ReductionOptions::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&write_roles(&t)).unwrap();
        assert_eq!(v["roles"].as_array().unwrap().len(), 13);
        assert_eq!(v["quoted_players"], 12);
    }
}
