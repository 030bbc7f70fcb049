//! Piecewise-affine convex functions `h = max_i a_i` on a rational polytope.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;

use crate::affine::AffineFunctional;
use crate::error::{Error, Result};
use crate::lower_hull::{self, intrinsic_coordinates};
use crate::polytope::{Halfspace, Polytope};
use crate::rational::{Rational, RationalPoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAConvexFunction {
    pieces: Vec<AffineFunctional>,
    domain: Polytope,
}

/// Cell of the dual subdivision of the lifted slopes `(m_i, -c_i)`.
#[derive(Clone, Debug)]
pub(crate) struct DualCell {
    /// Piece indices on the lower facet.
    pub pieces: Vec<usize>,
    /// The point where all these pieces agree, present when slopes span `Q^n`.
    pub vertex: Option<RationalPoint>,
}

/// Regular subdivision of the slope configuration. `span` is the dimension of the
/// affine hull of the slopes; with `span == 0` there are no cells.
#[derive(Clone, Debug)]
pub(crate) struct SlopeSubdivision {
    pub span: usize,
    pub cells: Vec<DualCell>,
}

impl PAConvexFunction {
    pub fn new(pieces: Vec<AffineFunctional>, domain: Polytope) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::EmptyInput("a PA function needs at least one piece"));
        }
        if domain.is_empty() {
            return Err(Error::EmptyInput("empty domain"));
        }
        if !domain.is_full_dimensional() {
            return Err(Error::DegenerateDomain);
        }
        let n = domain.ambient_dim();
        if let Some(p) = pieces.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
        }
        Ok(PAConvexFunction { pieces, domain })
    }

    pub(crate) fn from_parts_unchecked(pieces: Vec<AffineFunctional>, domain: Polytope) -> Self {
        PAConvexFunction { pieces, domain }
    }

    pub fn pieces(&self) -> &[AffineFunctional] {
        &self.pieces
    }

    pub fn domain(&self) -> &Polytope {
        &self.domain
    }

    pub fn ambient_dim(&self) -> usize {
        self.domain.ambient_dim()
    }

    pub fn eval(&self, x: &RationalPoint) -> Rational {
        self.pieces.iter().map(|p| p.eval(x)).max().expect("nonempty")
    }

    /// Indices of the pieces attaining the maximum at `x`.
    pub fn active_pieces(&self, x: &RationalPoint) -> Vec<usize> {
        let vals: Vec<Rational> = self.pieces.iter().map(|p| p.eval(x)).collect();
        let m = vals.iter().max().expect("nonempty");
        (0..vals.len()).filter(|&i| &vals[i] == m).collect()
    }

    pub fn is_affine(&self) -> bool {
        self.pieces.len() == 1
    }

    /// Drops pieces whose activity region in the domain is not full-dimensional.
    pub fn canonicalize(&self) -> Result<PAConvexFunction> {
        let mut best: BTreeMap<&[Rational], &Rational> = BTreeMap::new();
        for p in &self.pieces {
            let e = best.entry(p.slope.as_slice()).or_insert(&p.intercept);
            if &p.intercept > *e {
                *e = &p.intercept;
            }
        }
        let distinct: Vec<AffineFunctional> =
            best.into_iter().map(|(s, c)| AffineFunctional::new(s.to_vec(), c.clone())).collect();
        if distinct.len() == 1 {
            return Ok(PAConvexFunction { pieces: distinct, domain: self.domain.clone() });
        }

        let probe = PAConvexFunction { pieces: distinct, domain: self.domain.clone() };
        let sub = probe.slope_subdivision()?;
        let slopes: Vec<RationalPoint> = probe.pieces.iter().map(AffineFunctional::slope_point).collect();
        let (_, proj) = intrinsic_coordinates(&slopes);
        let extreme = lower_hull::cell_vertices(&proj, sub.cells.iter().map(|c| c.pieces.as_slice()))?;
        let candidates: Vec<AffineFunctional> = extreme.iter().map(|&i| probe.pieces[i].clone()).collect();
        let reduced = PAConvexFunction { pieces: candidates, domain: self.domain.clone() };
        if reduced.pieces.len() == 1 {
            return Ok(reduced);
        }

        let regions = reduced.activity_regions()?;
        let kept: Vec<AffineFunctional> = reduced
            .pieces
            .iter()
            .zip(&regions)
            .filter(|(_, r)| r.is_full_dimensional())
            .map(|(p, _)| p.clone())
            .collect();
        if kept.is_empty() {
            return Err(Error::Internal("canonicalization removed every piece".into()));
        }
        Ok(PAConvexFunction { pieces: kept, domain: self.domain.clone() })
    }

    /// For every piece, the closed set of domain points where it attains the maximum.
    /// Pieces must have pairwise distinct slopes and all be extreme in the slope lift.
    pub(crate) fn activity_regions(&self) -> Result<Vec<Polytope>> {
        let n = self.ambient_dim();
        if self.pieces.len() == 1 {
            return Ok(vec![self.domain.clone()]);
        }
        let sub = self.slope_subdivision()?;
        let mut neighbours: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.pieces.len()];
        for cell in &sub.cells {
            for &i in &cell.pieces {
                neighbours[i].extend(cell.pieces.iter().copied().filter(|&j| j != i));
            }
        }
        let domain_hs = self.domain.inequalities();
        neighbours
            .iter()
            .enumerate()
            .map(|(i, nb)| {
                let mut hs = domain_hs.clone();
                let ai = &self.pieces[i];
                for &j in nb {
                    // a_j(x) <= a_i(x)
                    let aj = &self.pieces[j];
                    let normal = aj.slope.iter().zip(&ai.slope).map(|(a, b)| a - b).collect();
                    hs.push(Halfspace::new(normal, &ai.intercept - &aj.intercept));
                }
                Polytope::from_halfspaces(n, &hs)
            })
            .collect()
    }

    /// Dual subdivision of the lifted slopes. Pieces with repeated slopes are not allowed.
    pub(crate) fn slope_subdivision(&self) -> Result<SlopeSubdivision> {
        let n = self.ambient_dim();
        let slopes: Vec<RationalPoint> = self.pieces.iter().map(AffineFunctional::slope_point).collect();
        let (span, proj) = intrinsic_coordinates(&slopes);
        if span == 0 {
            return Ok(SlopeSubdivision { span, cells: Vec::new() });
        }
        let heights: Vec<Rational> = self.pieces.iter().map(|p| -&p.intercept).collect();
        let lower = lower_hull::regular_subdivision(&proj, &heights)?;
        let cells = lower
            .into_iter()
            .map(|c| DualCell {
                vertex: (span == n).then(|| RationalPoint::new(c.slope.clone())),
                pieces: c.points,
            })
            .collect();
        Ok(SlopeSubdivision { span, cells })
    }

    /// `h + g` with all pairwise sums of pieces, canonicalized.
    pub fn add(&self, other: &PAConvexFunction) -> Result<PAConvexFunction> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        let pieces = self
            .pieces
            .iter()
            .flat_map(|a| other.pieces.iter().map(move |b| a.add(b)))
            .collect();
        PAConvexFunction { pieces, domain: self.domain.clone() }.canonicalize()
    }

    pub fn add_affine(&self, a: &AffineFunctional) -> PAConvexFunction {
        PAConvexFunction { pieces: self.pieces.iter().map(|p| p.add(a)).collect(), domain: self.domain.clone() }
    }

    /// `t * h` for `t > 0`.
    pub fn scale(&self, t: &Rational) -> Result<PAConvexFunction> {
        if !t.is_positive() {
            return Err(Error::Invalid("scale factor must be positive".into()));
        }
        Ok(PAConvexFunction { pieces: self.pieces.iter().map(|p| p.scale(t)).collect(), domain: self.domain.clone() })
    }

    /// `x -> h(x + u) - h(u)` on `domain - u`.
    pub fn recentered(&self, u: &RationalPoint) -> PAConvexFunction {
        let hu = self.eval(u);
        PAConvexFunction {
            pieces: self.pieces.iter().map(|p| p.translate(u, &hu)).collect(),
            domain: self.domain.translate(&-u),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    pub(crate) fn aff(slope: &[i64], c: i64) -> AffineFunctional {
        AffineFunctional::new(slope.iter().map(|&s| int(s)).collect(), int(c))
    }

    #[test]
    fn dominated_piece_is_dropped() {
        let h = PAConvexFunction::new(vec![aff(&[1], 0), aff(&[1], -1)], Polytope::cube(1, &int(0), &int(1))).unwrap();
        assert_eq!(h.canonicalize().unwrap().pieces(), &[aff(&[1], 0)]);
    }

    #[test]
    fn piece_active_at_a_single_point_is_dropped() {
        let h = PAConvexFunction::new(vec![aff(&[0], 0), aff(&[1], 0), aff(&[-1], 0)], Polytope::cube(1, &int(-1), &int(1)))
            .unwrap();
        let c = h.canonicalize().unwrap();
        assert_eq!(c.pieces(), &[aff(&[-1], 0), aff(&[1], 0)]);
        for k in -4..=4 {
            let x = RationalPoint::new(vec![crate::rational::rat(k, 4)]);
            assert_eq!(c.eval(&x), h.eval(&x));
        }
    }

    #[test]
    fn single_piece_is_unchanged() {
        let h = PAConvexFunction::new(vec![aff(&[2, 3], 1)], Polytope::cube(2, &int(0), &int(1))).unwrap();
        assert_eq!(h.canonicalize().unwrap(), h);
    }

    #[test]
    fn piece_active_only_outside_domain_is_dropped() {
        // x - 5 wins only for x > 5
        let h = PAConvexFunction::new(vec![aff(&[0], 0), aff(&[2], -10)], Polytope::cube(1, &int(-1), &int(1))).unwrap();
        assert_eq!(h.canonicalize().unwrap().pieces(), &[aff(&[0], 0)]);
    }

    #[test]
    fn empty_piece_list_is_rejected() {
        assert!(PAConvexFunction::new(vec![], Polytope::cube(1, &int(0), &int(1))).is_err());
    }
}
