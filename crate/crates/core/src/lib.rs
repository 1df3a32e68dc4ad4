pub mod checks;
pub mod context;
pub mod corpus;
pub mod error;
pub mod io;
pub mod leavitt;
pub mod monoid;
pub mod mpa;
pub mod quiver;
pub mod random;
pub mod samples;
pub mod series;
pub mod structure;
pub mod text;
pub mod tower;

pub use context::{Ctx, LevelAssignment, MixedContext};
pub use error::{Error, Result};
pub use leavitt::{LpaElement, LpaMonomial, SpecialEdgeChoice};
pub use mpa::MpaElement;
pub use quiver::{HereditaryChain, Path, Quiver, VertexSet};
pub use tower::{Tower, TowerElement, TowerSpec};
