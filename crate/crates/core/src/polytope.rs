//! Polytopes with exact rational vertices and facet inequalities.
//!
//! A [`Polytope`] always carries both representations in canonical form: sorted
//! irredundant vertices, and the facet inequalities of its affine hull together with
//! the equations cutting out that hull. Two polytopes are equal iff their vertex sets are.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::dd;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{dot, factorial, lcm_of_denominators, primitive_integer_vector, Rational, RationalPoint};

/// `normal . x <= offset` (or `=` when used as an equation).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Halfspace {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl Halfspace {
    pub fn new(normal: Vec<Rational>, offset: Rational) -> Self {
        Halfspace { normal, offset }
    }

    /// `offset - normal . x`, non-negative inside.
    pub fn slack(&self, x: &RationalPoint) -> Rational {
        &self.offset - x.dot(&self.normal)
    }

    /// Rescales so the normal is a primitive integer vector.
    fn canonical(self) -> Self {
        let prim = primitive_integer_vector(&self.normal);
        let Some(k) = self.normal.iter().zip(&prim).find(|(a, _)| !a.is_zero()) else {
            return self;
        };
        let factor = Rational::from_integer(k.1.clone()) / k.0;
        Halfspace {
            normal: prim.into_iter().map(Rational::from_integer).collect(),
            offset: self.offset * factor,
        }
    }

    fn negated(&self) -> Self {
        Halfspace { normal: self.normal.iter().map(|a| -a).collect(), offset: -&self.offset }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polytope {
    ambient: usize,
    vertices: Vec<RationalPoint>,
    facets: Vec<Halfspace>,
    equations: Vec<Halfspace>,
    dim: Option<usize>,
}

impl Polytope {
    pub fn empty(ambient: usize) -> Self {
        Polytope { ambient, vertices: Vec::new(), facets: Vec::new(), equations: Vec::new(), dim: None }
    }

    /// Axis-aligned box `[lo_1, hi_1] x ... x [lo_n, hi_n]`.
    pub fn cuboid(lo: &[Rational], hi: &[Rational]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        let n = lo.len();
        let mut pts = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            let c = (0..n)
                .map(|i| if mask >> i & 1 == 1 { hi[i].clone() } else { lo[i].clone() })
                .collect();
            pts.push(RationalPoint::new(c));
        }
        convex_hull(&pts)
    }

    /// The cube `[lo, hi]^n`.
    pub fn cube(n: usize, lo: &Rational, hi: &Rational) -> Self {
        Self::cuboid(&vec![lo.clone(); n], &vec![hi.clone(); n]).expect("cube is well formed")
    }

    /// `conv{0, e_1, ..., e_n}`.
    pub fn standard_simplex(n: usize) -> Self {
        let mut pts = vec![RationalPoint::origin(n)];
        for i in 0..n {
            let mut c = vec![Rational::zero(); n];
            c[i] = Rational::from_integer(1.into());
            pts.push(RationalPoint::new(c));
        }
        convex_hull(&pts).expect("simplex is well formed")
    }

    /// Intersection of the halfspaces `normal . x <= offset` in `Q^ambient`.
    pub fn from_halfspaces(ambient: usize, halfspaces: &[Halfspace]) -> Result<Self> {
        for h in halfspaces {
            if h.normal.len() != ambient {
                return Err(Error::DimensionMismatch { expected: ambient, found: h.normal.len() });
            }
        }
        // Homogenize: (t, x) with t >= 0 and offset*t - normal.x >= 0.
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(halfspaces.len() + 1);
        let mut t_row = vec![BigInt::zero(); ambient + 1];
        t_row[0] = BigInt::from(1);
        rows.push(t_row);
        for h in halfspaces {
            let mut r = Vec::with_capacity(ambient + 1);
            r.push(h.offset.clone());
            r.extend(h.normal.iter().map(|a| -a));
            let l = lcm_of_denominators(&r);
            rows.push(r.iter().map(|x| (x * &l).to_integer()).collect());
        }
        let rays = dd::extreme_rays(&rows)?;
        let mut verts = Vec::with_capacity(rays.len());
        for ray in rays {
            if ray[0].is_zero() {
                return Err(Error::Unbounded);
            }
            let t = Rational::from_integer(ray[0].clone());
            verts.push(RationalPoint::new(
                ray[1..].iter().map(|x| Rational::from_integer(x.clone()) / &t).collect(),
            ));
        }
        if verts.is_empty() {
            return Ok(Polytope::empty(ambient));
        }
        convex_hull(&verts)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Intrinsic dimension; `None` for the empty polytope.
    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dim.is_none()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == Some(self.ambient)
    }

    pub fn vertices(&self) -> &[RationalPoint] {
        &self.vertices
    }

    /// Facet inequalities within the affine hull.
    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    /// Equations `normal . x = offset` cutting out the affine hull.
    pub fn equations(&self) -> &[Halfspace] {
        &self.equations
    }

    /// Full inequality description: facets plus both sides of every equation.
    pub fn inequalities(&self) -> Vec<Halfspace> {
        let mut out = self.facets.clone();
        for e in &self.equations {
            out.push(e.clone());
            out.push(e.negated());
        }
        out
    }

    pub fn contains(&self, x: &RationalPoint) -> bool {
        !self.is_empty()
            && x.dim() == self.ambient
            && self.equations.iter().all(|e| e.slack(x).is_zero())
            && self.facets.iter().all(|f| !f.slack(x).is_negative())
    }

    /// Membership in the relative interior.
    pub fn contains_strict(&self, x: &RationalPoint) -> bool {
        !self.is_empty()
            && x.dim() == self.ambient
            && self.equations.iter().all(|e| e.slack(x).is_zero())
            && self.facets.iter().all(|f| f.slack(x).is_positive())
    }

    pub fn is_subset_of(&self, other: &Polytope) -> bool {
        self.vertices.iter().all(|v| other.contains(v))
    }

    pub fn vertex_centroid(&self) -> Option<RationalPoint> {
        let first = self.vertices.first()?;
        let mut acc = RationalPoint::origin(first.dim());
        for v in &self.vertices {
            acc = &acc + v;
        }
        Some(acc.scale(&Rational::new(1.into(), BigInt::from(self.vertices.len()))))
    }

    /// Componentwise bounds of the vertex set.
    pub fn bounding_box(&self) -> Option<(Vec<Rational>, Vec<Rational>)> {
        let first = self.vertices.first()?;
        let mut lo = first.coords().to_vec();
        let mut hi = lo.clone();
        for v in &self.vertices[1..] {
            for i in 0..self.ambient {
                if v[i] < lo[i] {
                    lo[i] = v[i].clone();
                }
                if v[i] > hi[i] {
                    hi[i] = v[i].clone();
                }
            }
        }
        Some((lo, hi))
    }

    /// Each facet as a polytope of dimension `dim - 1`.
    pub fn facet_polytopes(&self) -> Vec<Polytope> {
        self.facets
            .iter()
            .map(|f| {
                let on: Vec<RationalPoint> =
                    self.vertices.iter().filter(|v| f.slack(v).is_zero()).cloned().collect();
                convex_hull(&on).expect("facet has vertices")
            })
            .collect()
    }

    /// All nonempty faces, including the polytope itself.
    pub fn faces(&self) -> Vec<Polytope> {
        let mut seen: BTreeMap<Vec<RationalPoint>, Polytope> = BTreeMap::new();
        let mut stack = vec![self.clone()];
        while let Some(p) = stack.pop() {
            if p.is_empty() || seen.contains_key(&p.vertices) {
                continue;
            }
            stack.extend(p.facet_polytopes());
            seen.insert(p.vertices.clone(), p);
        }
        seen.into_values().collect()
    }

    pub fn intersection(&self, other: &Polytope) -> Result<Polytope> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: other.ambient });
        }
        if self.is_empty() || other.is_empty() {
            return Ok(Polytope::empty(self.ambient));
        }
        let mut hs = self.inequalities();
        hs.extend(other.inequalities());
        Polytope::from_halfspaces(self.ambient, &hs)
    }

    pub fn minkowski_sum(&self, other: &Polytope) -> Result<Polytope> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: other.ambient });
        }
        if self.is_empty() || other.is_empty() {
            return Ok(Polytope::empty(self.ambient));
        }
        let sums: Vec<RationalPoint> = self
            .vertices
            .iter()
            .flat_map(|a| other.vertices.iter().map(move |b| a + b))
            .collect();
        convex_hull(&sums)
    }

    pub fn translate(&self, v: &RationalPoint) -> Polytope {
        self.map_points(|p| p + v)
    }

    pub fn scale(&self, t: &Rational) -> Polytope {
        self.map_points(|p| p.scale(t))
    }

    /// Image under `x -> M x + shift`.
    pub fn affine_image(&self, matrix: &[Vec<Rational>], shift: &RationalPoint) -> Polytope {
        self.map_points(|p| {
            let c = matrix.iter().zip(shift.coords()).map(|(row, s)| dot(row, p.coords()) + s).collect();
            RationalPoint::new(c)
        })
    }

    fn map_points(&self, f: impl Fn(&RationalPoint) -> RationalPoint) -> Polytope {
        if self.is_empty() {
            return self.clone();
        }
        let pts: Vec<RationalPoint> = self.vertices.iter().map(f).collect();
        convex_hull(&pts).expect("image of a polytope")
    }

    /// Pulling triangulation: cone from the lexicographically smallest (or largest)
    /// vertex over a recursive triangulation of the facets avoiding it.
    pub fn triangulate(&self, from_largest: bool) -> Vec<Vec<RationalPoint>> {
        match self.dim {
            None => Vec::new(),
            Some(0) => vec![vec![self.vertices[0].clone()]],
            Some(_) => {
                let base = if from_largest { self.vertices.last() } else { self.vertices.first() }
                    .expect("nonempty")
                    .clone();
                let mut out = Vec::new();
                for (facet, f) in self.facet_polytopes().into_iter().zip(&self.facets) {
                    if f.slack(&base).is_zero() {
                        continue;
                    }
                    for mut s in facet.triangulate(from_largest) {
                        s.push(base.clone());
                        out.push(s);
                    }
                }
                out
            }
        }
    }

    /// Lebesgue measure in `Q^ambient`; zero unless full-dimensional.
    pub fn volume(&self) -> Rational {
        if !self.is_full_dimensional() {
            return Rational::zero();
        }
        if self.ambient == 0 {
            return Rational::from_integer(1.into());
        }
        let total: Rational = self.triangulate(false).iter().map(simplex_volume).sum();
        total
    }

    /// `n! * volume`, the lattice-normalized volume.
    pub fn normalized_volume(&self) -> Rational {
        self.volume() * Rational::from_integer(factorial(self.ambient))
    }
}

/// Volume `|det(v_i - v_0)| / n!` of a full simplex given by `n + 1` points.
pub fn simplex_volume(s: &Vec<RationalPoint>) -> Rational {
    let n = s[0].dim();
    if s.len() != n + 1 {
        return Rational::zero();
    }
    let base = &s[0];
    let m: Vec<Vec<Rational>> = s[1..].iter().map(|p| (p - base).into_coords()).collect();
    linalg::det(&m).abs() / Rational::from_integer(factorial(n))
}

/// Convex hull with irredundant vertices and matching inequality description.
pub fn convex_hull(points: &[RationalPoint]) -> Result<Polytope> {
    let n = points.first().ok_or(Error::EmptyInput("convex_hull needs at least one point"))?.dim();
    if let Some(p) = points.iter().find(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
    }
    let pts: Vec<RationalPoint> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let v0 = pts[0].clone();
    let diffs: Vec<Vec<Rational>> = pts[1..].iter().map(|p| (p - &v0).into_coords()).collect();
    let (reduced, pivots) = if diffs.is_empty() { (Vec::new(), Vec::new()) } else { linalg::rref(diffs) };
    let d = pivots.len();

    let mut equations: Vec<Halfspace> = linalg::nullspace(&reduced, n)
        .into_iter()
        .map(|a| {
            let off = v0.dot(&a);
            Halfspace::new(a, off).canonical()
        })
        .collect();
    equations.sort();

    if d == 0 {
        return Ok(Polytope { ambient: n, vertices: vec![v0], facets: Vec::new(), equations, dim: Some(0) });
    }

    let project = |p: &RationalPoint| -> Vec<Rational> { pivots.iter().map(|&c| p[c].clone()).collect() };

    // Facet cone {(a, beta) : beta - a.x_i >= 0}.
    let rows: Vec<Vec<BigInt>> = pts
        .iter()
        .map(|p| {
            let mut r: Vec<Rational> = project(p).into_iter().map(|x| -x).collect();
            r.push(Rational::from_integer(1.into()));
            let l = lcm_of_denominators(&r);
            r.iter().map(|x| (x * &l).to_integer()).collect()
        })
        .collect();
    let rays = dd::extreme_rays(&rows)?;

    let mut facets = Vec::new();
    let mut facet_proj_normals = Vec::new();
    for ray in rays {
        if ray[..d].iter().all(Zero::is_zero) {
            continue;
        }
        let mut normal = vec![Rational::zero(); n];
        for (k, &c) in pivots.iter().enumerate() {
            normal[c] = Rational::from_integer(ray[k].clone());
        }
        let hs = Halfspace::new(normal, Rational::from_integer(ray[d].clone())).canonical();
        facet_proj_normals.push(project(&RationalPoint::new(hs.normal.clone())));
        facets.push(hs);
    }

    let vertices: Vec<RationalPoint> = pts
        .into_iter()
        .filter(|p| {
            let tight: Vec<Vec<Rational>> = facets
                .iter()
                .zip(&facet_proj_normals)
                .filter(|(f, _)| f.slack(p).is_zero())
                .map(|(_, pn)| pn.clone())
                .collect();
            tight.len() >= d && linalg::rank(&tight) == d
        })
        .collect();

    let mut order: Vec<usize> = (0..facets.len()).collect();
    order.sort_by(|&a, &b| facets[a].cmp(&facets[b]));
    let facets = order.into_iter().map(|i| facets[i].clone()).collect();
    Ok(Polytope { ambient: n, vertices, facets, equations, dim: Some(d) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn p(c: &[(i64, i64)]) -> RationalPoint {
        RationalPoint::from_fracs(c)
    }

    fn unit_square() -> Polytope {
        Polytope::cube(2, &int(0), &int(1))
    }

    #[test]
    fn hull_drops_interior_point() {
        let h = convex_hull(&[p(&[(0, 1), (0, 1)]), p(&[(1, 1), (0, 1)]), p(&[(0, 1), (1, 1)]), p(&[(1, 1), (1, 1)]), p(&[(1, 2), (1, 2)])])
            .unwrap();
        assert_eq!(h.vertices().len(), 4);
        assert_eq!(h.facets().len(), 4);
        assert_eq!(h.dim(), Some(2));
    }

    #[test]
    fn hull_of_single_point() {
        let h = convex_hull(&[RationalPoint::from_ints(&[0, 0])]).unwrap();
        assert_eq!(h.dim(), Some(0));
        assert_eq!(h.vertices().len(), 1);
        assert_eq!(h.equations().len(), 2);
    }

    #[test]
    fn hull_drops_point_on_edge() {
        let pts = [[0, 0], [2, 0], [0, 2], [1, 1]].map(|c| RationalPoint::from_ints(&c));
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.vertices().len(), 3);
        // (1,1) lies on the segment (2,0)-(0,2): x + y = 2 there.
        assert!(h.contains(&pts[3]) && !h.contains_strict(&pts[3]));
    }

    #[test]
    fn hull_dimension_mismatch() {
        let r = convex_hull(&[RationalPoint::from_ints(&[0, 0]), RationalPoint::from_ints(&[1])]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn lower_dimensional_hull() {
        let seg = convex_hull(&[RationalPoint::from_ints(&[0, 0, 0]), RationalPoint::from_ints(&[1, 1, 1])]).unwrap();
        assert_eq!(seg.dim(), Some(1));
        assert_eq!(seg.equations().len(), 2);
        assert_eq!(seg.facets().len(), 2);
        assert!(seg.contains_strict(&p(&[(1, 2), (1, 2), (1, 2)])));
        assert!(!seg.contains(&p(&[(1, 2), (1, 2), (0, 1)])));
        assert_eq!(seg.volume(), int(0));
    }

    #[test]
    fn volumes() {
        assert_eq!(unit_square().volume(), int(1));
        assert_eq!(Polytope::standard_simplex(2).volume(), rat(1, 2));
        assert_eq!(Polytope::standard_simplex(3).volume(), rat(1, 6));
        assert_eq!(unit_square().scale(&int(3)).volume(), int(9));
        assert_eq!(Polytope::empty(2).volume(), int(0));
    }

    #[test]
    fn normalized_volumes() {
        for n in 1..=4 {
            assert_eq!(Polytope::standard_simplex(n).normalized_volume(), int(1));
        }
        assert_eq!(Polytope::standard_simplex(2).scale(&int(3)).normalized_volume(), int(9));
        assert_eq!(unit_square().normalized_volume(), int(2));
    }

    #[test]
    fn containment() {
        let sq = unit_square();
        let c = p(&[(1, 2), (1, 2)]);
        assert!(sq.contains(&c) && sq.contains_strict(&c));
        let b = p(&[(1, 1), (1, 2)]);
        assert!(sq.contains(&b) && !sq.contains_strict(&b));
        assert!(!sq.contains(&RationalPoint::from_ints(&[2, 0])));
    }

    #[test]
    fn minkowski() {
        let e1 = convex_hull(&[RationalPoint::from_ints(&[0, 0]), RationalPoint::from_ints(&[1, 0])]).unwrap();
        let e2 = convex_hull(&[RationalPoint::from_ints(&[0, 0]), RationalPoint::from_ints(&[0, 1])]).unwrap();
        assert_eq!(e1.minkowski_sum(&e2).unwrap(), unit_square());
        let pt = convex_hull(&[RationalPoint::from_ints(&[3, -1])]).unwrap();
        assert_eq!(unit_square().minkowski_sum(&pt).unwrap(), unit_square().translate(&RationalPoint::from_ints(&[3, -1])));
        let big = unit_square().minkowski_sum(&unit_square()).unwrap();
        assert_eq!(big.volume(), int(4));
        assert_eq!(big.vertices().len(), 4);
    }

    #[test]
    fn halfspace_round_trip() {
        let sq = unit_square();
        let back = Polytope::from_halfspaces(2, sq.facets()).unwrap();
        assert_eq!(back, sq);
        let unbounded = Polytope::from_halfspaces(2, &[Halfspace::new(vec![int(1), int(0)], int(1))]);
        assert!(matches!(unbounded, Err(Error::Unbounded)));
        let empty = Polytope::from_halfspaces(
            1,
            &[Halfspace::new(vec![int(1)], int(-1)), Halfspace::new(vec![int(-1)], int(-1))],
        )
        .unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn intersections() {
        let a = unit_square();
        let b = unit_square().translate(&p(&[(1, 2), (1, 2)]));
        let i = a.intersection(&b).unwrap();
        assert_eq!(i.volume(), rat(1, 4));
        let c = unit_square().translate(&RationalPoint::from_ints(&[1, 0]));
        let edge = a.intersection(&c).unwrap();
        assert_eq!(edge.dim(), Some(1));
    }

    #[test]
    fn faces_of_cube() {
        let cube = Polytope::cube(3, &int(0), &int(1));
        let faces = cube.faces();
        // 8 vertices, 12 edges, 6 squares, 1 cube
        assert_eq!(faces.len(), 27);
    }

    #[test]
    fn two_triangulations_agree() {
        let pts = [[0, 0, 0], [2, 0, 0], [0, 3, 0], [0, 0, 1], [1, 1, 2], [2, 2, 0]].map(|c| RationalPoint::from_ints(&c));
        let poly = convex_hull(&pts).unwrap();
        let a: Rational = poly.triangulate(false).iter().map(simplex_volume).sum();
        let b: Rational = poly.triangulate(true).iter().map(simplex_volume).sum();
        assert_eq!(a, b);
    }
}
