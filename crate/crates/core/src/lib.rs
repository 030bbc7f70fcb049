pub mod affine;
pub mod approx;
pub mod complex;
pub mod corpus;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod pa;
pub mod poly;
pub mod polytope;
pub mod rational;
pub mod solver1d;
pub mod verify;

mod dd;
pub mod lower_hull;

pub use error::{Error, Result};
pub use polytope::{convex_hull, Halfspace, Polytope};
pub use rational::{Rational, RationalPoint};
