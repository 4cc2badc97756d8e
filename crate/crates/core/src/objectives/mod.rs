//! Concrete objectives and cost generators.

mod costs;
mod coverage;
mod dominating;
mod modular;
mod movies;

pub use costs::uniform_random_costs;
pub use coverage::WeightedCoverage;
pub use dominating::{dominating_set_value, DominatingSet, Graph};
pub use modular::Modular;
pub use movies::{genre_cost, movie_coverage_value, GenreCostSpec, MovieCoverage, RatingsModel, SparseVector};
