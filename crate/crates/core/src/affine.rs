use std::fmt;

use num_traits::Zero;

use crate::rational::{dot, Rational, RationalPoint};

/// `x -> <slope, x> + intercept`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffineFunctional {
    pub slope: Vec<Rational>,
    pub intercept: Rational,
}

impl AffineFunctional {
    pub fn new(slope: Vec<Rational>, intercept: Rational) -> Self {
        AffineFunctional { slope, intercept }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        AffineFunctional { slope: vec![Rational::zero(); n], intercept: c }
    }

    pub fn dim(&self) -> usize {
        self.slope.len()
    }

    pub fn eval(&self, x: &RationalPoint) -> Rational {
        dot(&self.slope, x.coords()) + &self.intercept
    }

    pub fn slope_point(&self) -> RationalPoint {
        RationalPoint::new(self.slope.clone())
    }

    pub fn add(&self, other: &AffineFunctional) -> AffineFunctional {
        AffineFunctional {
            slope: self.slope.iter().zip(&other.slope).map(|(a, b)| a + b).collect(),
            intercept: &self.intercept + &other.intercept,
        }
    }

    pub fn scale(&self, t: &Rational) -> AffineFunctional {
        AffineFunctional { slope: self.slope.iter().map(|a| a * t).collect(), intercept: &self.intercept * t }
    }

    /// `x -> self(x + u) - shift`.
    pub fn translate(&self, u: &RationalPoint, shift: &Rational) -> AffineFunctional {
        AffineFunctional { slope: self.slope.clone(), intercept: self.eval(u) - shift }
    }
}

impl fmt::Display for AffineFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, x> + {}", RationalPoint::new(self.slope.clone()), self.intercept)
    }
}
