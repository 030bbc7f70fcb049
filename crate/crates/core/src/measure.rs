//! Real Monge-Ampère measures of PA convex functions.
//!
//! For `h = max_i a_i` the measure is atomic: it charges only the interior vertices `u`
//! of the linearity complex, with mass `vol(∂h(u))`, where the subdifferential `∂h(u)`
//! is the convex hull of the slopes of the pieces active at `u`.
//!
//! Two independent routes compute the subdifferential at a point `x0`:
//!
//! * the convex hull of the active slopes;
//! * the polytope `{p : <v - x0, p> <= h(v) - h(x0)}` over every vertex `v` of the
//!   linearity complex. `h` minus an affine function is again PA on the same complex
//!   and attains its minimum over the domain at a vertex, so these finitely many
//!   constraints are equivalent to the supporting-hyperplane condition on the whole
//!   domain.
//!
//! [`subdifferential`] computes both and fails if they disagree. [`ma_measure`] uses the
//! dual subdivision of the lifted slopes, which yields every vertex together with its
//! active pieces in one pass; [`ma_measure_by_definition`] walks the linearity complex and
//! is kept as the slow reference path.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::affine::AffineFunctional;
use crate::complex::{linearity_complex, PolytopalComplex};
use crate::error::{Error, Result};
use crate::pa::PAConvexFunction;
use crate::polytope::{convex_hull, Halfspace, Polytope};
use crate::rational::{factorial, lcm_of_denominators, Rational, RationalPoint};

/// A finite sum of point masses with strictly positive rational weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomicMeasure {
    n: usize,
    atoms: Vec<(RationalPoint, Rational)>,
    total: Rational,
}

impl AtomicMeasure {
    pub fn empty(n: usize) -> Self {
        AtomicMeasure { n, atoms: Vec::new(), total: Rational::zero() }
    }

    /// Validates positivity and distinctness; atoms are sorted by point.
    pub fn new(n: usize, mut atoms: Vec<(RationalPoint, Rational)>) -> Result<Self> {
        for (p, m) in &atoms {
            if p.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
            }
            if !m.is_positive() {
                return Err(Error::Invalid(format!("atom at {p} has non-positive mass {m}")));
            }
        }
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Invalid("repeated atom location".into()));
        }
        let total = atoms.iter().map(|(_, m)| m).sum();
        Ok(AtomicMeasure { n, atoms, total })
    }

    /// From a signed accumulation; zero masses are dropped, negative ones rejected.
    fn from_signed(n: usize, acc: BTreeMap<RationalPoint, Rational>) -> Result<Self> {
        let mut atoms = Vec::new();
        for (p, m) in acc {
            if m.is_negative() {
                return Err(Error::Internal(format!("negative mass {m} at {p}")));
            }
            if !m.is_zero() {
                atoms.push((p, m));
            }
        }
        AtomicMeasure::new(n, atoms)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[(RationalPoint, Rational)] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> &Rational {
        &self.total
    }

    pub fn mass_at(&self, p: &RationalPoint) -> Rational {
        self.atoms
            .binary_search_by(|a| a.0.cmp(p))
            .map(|i| self.atoms[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    /// Mass of the closed polytope `e`.
    pub fn eval(&self, e: &Polytope) -> Rational {
        self.atoms.iter().filter(|(p, _)| e.contains(p)).map(|(_, m)| m).sum()
    }

    pub fn integrate(&self, f: impl Fn(&RationalPoint) -> Rational) -> Rational {
        self.atoms.iter().map(|(p, m)| m * f(p)).sum()
    }

    pub fn try_integrate<E>(&self, mut f: impl FnMut(&RationalPoint) -> std::result::Result<Rational, E>) -> std::result::Result<Rational, E> {
        let mut acc = Rational::zero();
        for (p, m) in &self.atoms {
            acc += m * f(p)?;
        }
        Ok(acc)
    }

    pub fn scale(&self, t: &Rational) -> Result<AtomicMeasure> {
        if !t.is_positive() {
            return Err(Error::Invalid("measures scale by positive factors".into()));
        }
        AtomicMeasure::new(self.n, self.atoms.iter().map(|(p, m)| (p.clone(), m * t)).collect())
    }
}

/// `mu(E)` for a closed polytope `E`.
pub fn ma_eval(mu: &AtomicMeasure, e: &Polytope) -> Rational {
    mu.eval(e)
}

/// `sum mass * f(point)`.
pub fn integrate(mu: &AtomicMeasure, f: impl Fn(&RationalPoint) -> Rational) -> Rational {
    mu.integrate(f)
}

/// Precomputed vertex data of `h` for repeated subdifferential queries.
pub struct SubdifferentialOracle<'a> {
    h: &'a PAConvexFunction,
    complex: PolytopalComplex,
    vertex_values: Vec<(RationalPoint, Rational)>,
}

impl<'a> SubdifferentialOracle<'a> {
    pub fn new(h: &'a PAConvexFunction) -> Result<Self> {
        let complex = linearity_complex(h)?;
        let vertex_values = complex.vertices().into_iter().map(|v| {
            let hv = h.eval(&v);
            (v, hv)
        }).collect();
        Ok(SubdifferentialOracle { h, complex, vertex_values })
    }

    pub fn complex(&self) -> &PolytopalComplex {
        &self.complex
    }

    fn check_point(&self, x0: &RationalPoint) -> Result<()> {
        let domain = self.h.domain();
        if x0.dim() != domain.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: domain.ambient_dim(), found: x0.dim() });
        }
        if !domain.contains(x0) {
            return Err(Error::OutsideDomain(x0.clone()));
        }
        if !domain.contains_strict(x0) {
            return Err(Error::OnBoundary(x0.clone()));
        }
        Ok(())
    }

    /// The supporting-slope polytope from the vertex constraints.
    pub fn by_vertex_constraints(&self, x0: &RationalPoint) -> Result<Polytope> {
        self.check_point(x0)?;
        let hx = self.h.eval(x0);
        let hs: Vec<Halfspace> = self
            .vertex_values
            .iter()
            .map(|(v, hv)| Halfspace::new((v - x0).into_coords(), hv - &hx))
            .collect();
        Polytope::from_halfspaces(x0.dim(), &hs)
    }

    /// Both characterizations, checked for equality.
    pub fn at(&self, x0: &RationalPoint) -> Result<Polytope> {
        let by_constraints = self.by_vertex_constraints(x0)?;
        let by_slopes = active_slope_hull(self.h, x0)?;
        if by_constraints != by_slopes {
            return Err(Error::Internal(format!("subdifferential routes disagree at {x0}")));
        }
        Ok(by_slopes)
    }
}

/// `conv{slope_i : a_i(x0) = h(x0)}`.
pub fn active_slope_hull(h: &PAConvexFunction, x0: &RationalPoint) -> Result<Polytope> {
    let slopes: Vec<RationalPoint> = h.active_pieces(x0).into_iter().map(|i| h.pieces()[i].slope_point()).collect();
    convex_hull(&slopes)
}

/// The gradient image `∂h(x0)` at a point of the open domain.
pub fn subdifferential(h: &PAConvexFunction, x0: &RationalPoint) -> Result<Polytope> {
    SubdifferentialOracle::new(h)?.at(x0)
}

fn distinct_slopes(h: &PAConvexFunction) -> PAConvexFunction {
    let mut best: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
    for p in h.pieces() {
        let e = best.entry(p.slope.clone()).or_insert_with(|| p.intercept.clone());
        if p.intercept > *e {
            *e = p.intercept.clone();
        }
    }
    let pieces = best.into_iter().map(|(s, c)| AffineFunctional::new(s, c)).collect();
    PAConvexFunction::from_parts_unchecked(pieces, h.domain().clone())
}

/// The Monge-Ampère measure `E -> vol(∂h(E))` of a PA convex function.
pub fn ma_measure(h: &PAConvexFunction) -> Result<AtomicMeasure> {
    let n = h.ambient_dim();
    let h = distinct_slopes(h);
    let sub = h.slope_subdivision()?;
    if sub.span < n {
        return Ok(AtomicMeasure::empty(n));
    }
    let mut atoms = Vec::new();
    for cell in &sub.cells {
        let u = cell.vertex.as_ref().expect("full span gives vertices");
        if !h.domain().contains_strict(u) {
            continue;
        }
        let slopes: Vec<RationalPoint> = cell.pieces.iter().map(|&i| h.pieces()[i].slope_point()).collect();
        let mass = convex_hull(&slopes)?.volume();
        if mass.is_positive() {
            atoms.push((u.clone(), mass));
        }
    }
    AtomicMeasure::new(n, atoms)
}

/// Whether every vertex of `max_i a_i`, taken over all of `Q^n`, lies in the open domain.
/// Then the subdifferentials at the atoms tile `conv{slopes}`.
pub fn all_vertices_interior(h: &PAConvexFunction) -> Result<bool> {
    let h = distinct_slopes(h);
    let sub = h.slope_subdivision()?;
    Ok(sub.cells.iter().all(|c| c.vertex.as_ref().map_or(true, |u| h.domain().contains_strict(u))))
}

/// Reference computation straight from the definition: interior vertices of the
/// linearity complex, each weighted by the volume of its (doubly checked) subdifferential.
pub fn ma_measure_by_definition(h: &PAConvexFunction) -> Result<AtomicMeasure> {
    let oracle = SubdifferentialOracle::new(h)?;
    let mut atoms = Vec::new();
    for u in oracle.complex().interior_vertices() {
        let mass = oracle.at(&u)?.volume();
        if mass.is_positive() {
            atoms.push((u, mass));
        }
    }
    AtomicMeasure::new(h.ambient_dim(), atoms)
}

/// Mixed Monge-Ampère measure by inclusion-exclusion over partial sums:
/// `(1/n!) sum_k (-1)^(n-k) sum_{|S| = k} MA(sum_{i in S} h_i)`.
pub fn mixed_ma(hs: &[PAConvexFunction]) -> Result<AtomicMeasure> {
    let first = hs.first().ok_or(Error::EmptyInput("mixed_ma needs functions"))?;
    let n = first.ambient_dim();
    if hs.len() != n {
        return Err(Error::WrongCount { expected: n, found: hs.len() });
    }
    if hs.iter().any(|h| h.domain() != first.domain()) {
        return Err(Error::DomainMismatch);
    }
    let mut acc: BTreeMap<RationalPoint, Rational> = BTreeMap::new();
    for mask in 1usize..(1 << n) {
        let mut members = (0..n).filter(|i| mask >> i & 1 == 1);
        let mut sum = hs[members.next().expect("nonempty subset")].clone();
        for i in members {
            sum = sum.add(&hs[i])?;
        }
        let k = mask.count_ones() as usize;
        let sign = if (n - k) % 2 == 0 { Rational::one() } else { -Rational::one() };
        for (p, m) in ma_measure(&sum)?.atoms() {
            *acc.entry(p.clone()).or_insert_with(Rational::zero) += &sign * m;
        }
    }
    let inv = Rational::new(BigInt::one(), factorial(n));
    for m in acc.values_mut() {
        *m *= &inv;
    }
    AtomicMeasure::from_signed(n, acc)
}

/// Vertex mass expressed as a toric intersection degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeReport {
    pub vertex: RationalPoint,
    pub subdifferential: Polytope,
    pub ma_mass: Rational,
    /// `deg_s * n! * ma_mass`.
    pub toric_degree: Rational,
    pub deg_s: u64,
    /// Least common denominator of the slopes; `rescale * h` has integral slopes.
    pub rescale: BigInt,
    /// Degree for `rescale * h`, i.e. `rescale^n * toric_degree`. An integer.
    pub integral_degree: BigInt,
    /// `∂h(u) = ∂(h(. + u) - h(u))(0)` was checked.
    pub translation_verified: bool,
}

/// The degree `deg_s * n! * MA(h)({u})` at an interior vertex `u`.
pub fn toric_degree(h: &PAConvexFunction, u: &RationalPoint, deg_s: u64) -> Result<DegreeReport> {
    if deg_s == 0 {
        return Err(Error::Invalid("deg_s must be a positive integer".into()));
    }
    let n = h.ambient_dim();
    let oracle = SubdifferentialOracle::new(h)?;
    oracle.check_point(u)?;
    if !oracle.complex().interior_vertices().contains(u) {
        return Err(Error::NotAVertex(u.clone()));
    }
    let sub = oracle.at(u)?;
    let ma_mass = sub.volume();
    let deg = Rational::from_integer(deg_s.into());
    let toric = &deg * sub.normalized_volume();
    if toric != &deg * Rational::from_integer(factorial(n)) * &ma_mass {
        return Err(Error::Internal("degree identity failed".into()));
    }

    let centred = h.recentered(u);
    let at_origin = subdifferential(&centred, &RationalPoint::origin(n))?;
    if at_origin != sub {
        return Err(Error::Internal(format!("translated subdifferential differs at {u}")));
    }

    let rescale = lcm_of_denominators(h.canonicalize()?.pieces().iter().flat_map(|p| p.slope.iter()));
    let scaled = &toric * Rational::from_integer(num_traits::pow(rescale.clone(), n));
    if !scaled.is_integer() {
        return Err(Error::Internal(format!("rescaled degree {scaled} is not integral")));
    }
    Ok(DegreeReport {
        vertex: u.clone(),
        subdifferential: sub,
        ma_mass,
        toric_degree: toric,
        deg_s,
        rescale,
        integral_degree: scaled.to_integer(),
        translation_verified: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn aff(slope: &[i64], c: i64) -> AffineFunctional {
        AffineFunctional::new(slope.iter().map(|&s| int(s)).collect(), int(c))
    }

    fn pt(c: &[i64]) -> RationalPoint {
        RationalPoint::from_ints(c)
    }

    fn tropical_square() -> PAConvexFunction {
        PAConvexFunction::new(
            vec![aff(&[0, 0], 0), aff(&[1, 0], 0), aff(&[0, 1], 0), aff(&[1, 1], 0)],
            Polytope::cube(2, &int(-1), &int(1)),
        )
        .unwrap()
    }

    #[test]
    fn kink_subdifferential_is_a_segment() {
        let h = PAConvexFunction::new(vec![aff(&[0], 0), aff(&[1], 0)], Polytope::cube(1, &int(-1), &int(1))).unwrap();
        let s = subdifferential(&h, &pt(&[0])).unwrap();
        assert_eq!(s.vertices(), &[pt(&[0]), pt(&[1])]);
    }

    #[test]
    fn tropical_square_subdifferential() {
        let s = subdifferential(&tropical_square(), &pt(&[0, 0])).unwrap();
        assert_eq!(s, Polytope::cube(2, &int(0), &int(1)));
    }

    #[test]
    fn affine_subdifferential_is_its_slope() {
        let h = PAConvexFunction::new(vec![aff(&[2, -3], 1)], Polytope::cube(2, &int(-1), &int(1))).unwrap();
        let s = subdifferential(&h, &RationalPoint::from_fracs(&[(1, 3), (-1, 5)])).unwrap();
        assert_eq!(s.vertices(), &[pt(&[2, -3])]);
    }

    #[test]
    fn boundary_and_outside_points_are_rejected() {
        let h = tropical_square();
        assert!(matches!(subdifferential(&h, &pt(&[1, 0])), Err(Error::OnBoundary(_))));
        assert!(matches!(subdifferential(&h, &pt(&[2, 0])), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn measures_of_hand_examples() {
        let mu = ma_measure(&tropical_square()).unwrap();
        assert_eq!(mu.atoms(), &[(pt(&[0, 0]), int(1))]);
        let affine = PAConvexFunction::new(vec![aff(&[1, 1], 0)], Polytope::cube(2, &int(-1), &int(1))).unwrap();
        assert!(ma_measure(&affine).unwrap().is_empty());
        let two = PAConvexFunction::new(vec![aff(&[0], 0), aff(&[1], -1), aff(&[-1], -1)], Polytope::cube(1, &int(-2), &int(2)))
            .unwrap();
        let mu2 = ma_measure(&two).unwrap();
        assert_eq!(mu2.atoms(), &[(pt(&[-1]), int(1)), (pt(&[1]), int(1))]);
        assert_eq!(mu2, ma_measure_by_definition(&two).unwrap());
        assert_eq!(mu2.eval(&Polytope::cube(1, &int(0), &int(2))), int(1));
    }

    #[test]
    fn eval_and_integrate() {
        let mu = AtomicMeasure::new(2, vec![(pt(&[0, 0]), int(1)), (pt(&[1, 0]), int(2))]).unwrap();
        assert_eq!(mu.eval(&Polytope::cube(2, &rat(-1, 2), &rat(1, 2))), int(1));
        assert_eq!(mu.eval(&Polytope::cube(2, &int(3), &int(4))), int(0));
        assert_eq!(mu.integrate(|p| p[0].clone()), int(2));
        assert_eq!(mu.integrate(|_| int(1)), *mu.total_mass());
        assert_eq!(AtomicMeasure::empty(2).integrate(|_| int(1)), int(0));
        assert!(AtomicMeasure::new(1, vec![(pt(&[0]), int(0))]).is_err());
    }

    #[test]
    fn mixed_of_coordinate_kinks() {
        let d = Polytope::cube(2, &int(-1), &int(1));
        let h1 = PAConvexFunction::new(vec![aff(&[0, 0], 0), aff(&[1, 0], 0)], d.clone()).unwrap();
        let h2 = PAConvexFunction::new(vec![aff(&[0, 0], 0), aff(&[0, 1], 0)], d.clone()).unwrap();
        let mixed = mixed_ma(&[h1.clone(), h2.clone()]).unwrap();
        assert_eq!(mixed.atoms(), &[(pt(&[0, 0]), rat(1, 2))]);
        let flat = PAConvexFunction::new(vec![aff(&[1, 2], 3)], d).unwrap();
        assert!(mixed_ma(&[h1.clone(), flat]).unwrap().is_empty());
        assert!(matches!(mixed_ma(&[h1]), Err(Error::WrongCount { .. })));
    }

    #[test]
    fn mixed_diagonal_is_ma() {
        let h = tropical_square();
        assert_eq!(mixed_ma(&[h.clone(), h.clone()]).unwrap(), ma_measure(&h).unwrap());
    }

    #[test]
    fn degree_of_simplex_corner() {
        let h = PAConvexFunction::new(vec![aff(&[0, 0], 0), aff(&[1, 0], 0), aff(&[0, 1], 0)], Polytope::cube(2, &int(-1), &int(1)))
            .unwrap();
        let r = toric_degree(&h, &pt(&[0, 0]), 1).unwrap();
        assert_eq!(r.subdifferential, Polytope::standard_simplex(2));
        assert_eq!(r.toric_degree, int(1));
        let r2 = toric_degree(&h, &pt(&[0, 0]), 2).unwrap();
        assert_eq!(r2.toric_degree, int(2));
        assert!(matches!(toric_degree(&h, &RationalPoint::from_fracs(&[(1, 2), (0, 1)]), 1), Err(Error::NotAVertex(_))));
        assert!(toric_degree(&h, &pt(&[0, 0]), 0).is_err());
    }

    #[test]
    fn degree_of_dilated_square() {
        let h = PAConvexFunction::new(
            vec![aff(&[0, 0], 0), aff(&[3, 0], 0), aff(&[0, 3], 0), aff(&[3, 3], 0)],
            Polytope::cube(2, &int(-1), &int(1)),
        )
        .unwrap();
        let r = toric_degree(&h, &pt(&[0, 0]), 1).unwrap();
        assert_eq!(r.ma_mass, int(9));
        assert_eq!(r.toric_degree, int(18));
    }

    #[test]
    fn rational_slopes_report_rescaling() {
        let h = PAConvexFunction::new(
            vec![aff(&[0, 0], 0), AffineFunctional::new(vec![rat(1, 2), int(0)], int(0)), AffineFunctional::new(vec![int(0), rat(1, 3)], int(0))],
            Polytope::cube(2, &int(-1), &int(1)),
        )
        .unwrap();
        let r = toric_degree(&h, &pt(&[0, 0]), 1).unwrap();
        assert_eq!(r.toric_degree, rat(1, 6));
        assert_eq!(r.rescale, BigInt::from(6));
        assert_eq!(r.integral_degree, BigInt::from(6));
    }
}
