//! Voronoi choice games.
//!
//! Each of `n` players picks one of its own candidate points on the unit
//! circle, the unit square or the unit torus, and is paid the measure of the
//! region it owns. The crate covers exact utilities, pure-equilibrium search,
//! expected utilities under independent mixed strategies, a reduction from
//! monotone 1-in-3 SAT, and Monte Carlo checks of bounds for random instances.

pub mod checks;
pub mod equilibrium;
pub mod expectation;
pub mod experiment;
pub mod games;
pub mod hardness;
pub mod io;
pub mod geometry;
pub mod numeric;
pub mod randomgames;

pub use equilibrium::{
    enumerate_pne, multi_start_search, potential_compare, run_best_response, ArcMultiset,
    DynamicsOutcome, DynamicsStatus,
};
pub use games::{build_fig3_instance, GameInstance, GameVariant, Objective, StrategyProfile};
pub use geometry::{PlanarPoint, UnitCirclePosition};
pub use numeric::{Rational, Scalar};
