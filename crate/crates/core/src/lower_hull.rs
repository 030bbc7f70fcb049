//! Regular subdivisions: lower hulls of lifted point sets, by exact gift wrapping.
//!
//! Points in `Q^k` (affinely spanning) are lifted by rational heights. Every lower facet
//! of the lifted set projects to a cell of the regular subdivision. Facets are found by
//! rotating a supporting hyperplane about each ridge until it hits another point.
//! Coordinates are rescaled to integers and all wrapping arithmetic is checked `i128`;
//! an overflow is reported as [`Error::Overflow`], never rounded.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::linalg;
use crate::polytope::convex_hull;
use crate::rational::{lcm_of_denominators, primitive_integer_vector, Rational, RationalPoint};

/// One cell of a regular subdivision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerCell {
    /// Indices of all input points lying on the lower facet, sorted.
    pub points: Vec<usize>,
    /// The facet as a graph `height = <slope, x> + intercept`.
    pub slope: Vec<Rational>,
    pub intercept: Rational,
}

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

fn add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow)
}

fn sub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

fn to_i128(x: &BigInt) -> Result<i128> {
    i128::try_from(x).map_err(|_| Error::Overflow)
}

fn idot(a: &[i128], b: &[i128]) -> Result<i128> {
    let mut acc = 0i128;
    for (x, y) in a.iter().zip(b) {
        acc = add(acc, mul(*x, *y)?)?;
    }
    Ok(acc)
}

/// Supporting hyperplane `c*W - a.X - b >= 0` over the scaled lifted points, `c > 0`.
#[derive(Clone, Debug)]
struct Plane {
    a: Vec<i128>,
    b: i128,
    c: i128,
}

impl Plane {
    fn slack(&self, x: &[i128], w: i128) -> Result<i128> {
        sub(sub(mul(self.c, w)?, idot(&self.a, x)?)?, self.b)
    }

    /// `tau * self - sigma * (nu . X - beta)`, then reduced by the common gcd.
    fn rotate(&self, nu: &[i128], beta: i128, sigma: i128, tau: i128) -> Result<Plane> {
        let mut a = Vec::with_capacity(self.a.len());
        for (ai, ni) in self.a.iter().zip(nu) {
            a.push(add(mul(tau, *ai)?, mul(sigma, *ni)?)?);
        }
        let b = sub(mul(tau, self.b)?, mul(sigma, beta)?)?;
        let c = mul(tau, self.c)?;
        let g = a.iter().fold(b.gcd(&c), |acc, x| acc.gcd(x));
        let g = if g == 0 { 1 } else { g };
        Ok(Plane { a: a.into_iter().map(|x| x / g).collect(), b: b / g, c: c / g })
    }
}

struct Lifted {
    xs: Vec<Vec<i128>>,
    ws: Vec<i128>,
    scale_x: BigInt,
    scale_w: BigInt,
}

impl Lifted {
    fn slacks(&self, plane: &Plane) -> Result<Vec<i128>> {
        self.xs.iter().zip(&self.ws).map(|(x, &w)| plane.slack(x, w)).collect()
    }

    fn zero_set(&self, plane: &Plane) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, (x, &w)) in self.xs.iter().zip(&self.ws).enumerate() {
            if plane.slack(x, w)? == 0 {
                out.push(i);
            }
        }
        Ok(out)
    }

    fn rationals(&self, idx: &[usize]) -> Vec<RationalPoint> {
        idx.iter()
            .map(|&i| RationalPoint::new(self.xs[i].iter().map(|&v| Rational::from_integer(v.into())).collect()))
            .collect()
    }

    /// Rotates `plane` about the face `nu . X = beta` towards `nu . X > beta`.
    /// Returns `None` when no point lies beyond.
    fn wrap(&self, plane: &Plane, slack: &[i128], nu: &[i128], beta: i128) -> Result<Option<Plane>> {
        let mut best: Option<(i128, i128)> = None;
        for (q, x) in self.xs.iter().enumerate() {
            let t = sub(idot(nu, x)?, beta)?;
            if t <= 0 {
                continue;
            }
            let s = slack[q];
            best = match best {
                None => Some((s, t)),
                // s/t < bs/bt
                Some((bs, bt)) if mul(s, bt)? < mul(bs, t)? => Some((s, t)),
                keep => keep,
            };
        }
        match best {
            None => Ok(None),
            Some((sigma, tau)) => Ok(Some(plane.rotate(nu, beta, sigma, tau)?)),
        }
    }

    fn to_cell(&self, plane: &Plane, points: Vec<usize>) -> LowerCell {
        let denom = Rational::from_integer(BigInt::from(plane.c) * &self.scale_w);
        let sx = Rational::from_integer(self.scale_x.clone());
        LowerCell {
            points,
            slope: plane.a.iter().map(|&a| Rational::from_integer(a.into()) * &sx / &denom).collect(),
            intercept: Rational::from_integer(plane.b.into()) / &denom,
        }
    }
}

fn integer_vector(v: &[Rational]) -> Result<Vec<i128>> {
    primitive_integer_vector(v).iter().map(to_i128).collect()
}

/// Lower facets of `{(x_i, h_i)}`. The points must affinely span `Q^k`, `k >= 1`.
pub fn regular_subdivision(points: &[RationalPoint], heights: &[Rational]) -> Result<Vec<LowerCell>> {
    let k = points.first().ok_or(Error::EmptyInput("regular_subdivision needs points"))?.dim();
    if points.len() != heights.len() {
        return Err(Error::Invalid("one height per point required".into()));
    }
    if k == 0 {
        return Err(Error::Invalid("points must span at least a line".into()));
    }
    let scale_x = lcm_of_denominators(points.iter().flat_map(|p| p.coords()));
    let scale_w = lcm_of_denominators(heights);
    let xs = points
        .iter()
        .map(|p| p.coords().iter().map(|c| to_i128(&(c * &scale_x).to_integer())).collect())
        .collect::<Result<Vec<Vec<i128>>>>()?;
    let ws = heights.iter().map(|h| to_i128(&(h * &scale_w).to_integer())).collect::<Result<Vec<i128>>>()?;
    let lifted = Lifted { xs, ws, scale_x, scale_w };

    let first = initial_facet(&lifted, k)?;
    let mut known: HashSet<Vec<usize>> = HashSet::new();
    let mut done_ridges: HashSet<Vec<usize>> = HashSet::new();
    let mut queue = VecDeque::new();
    let first_set = lifted.zero_set(&first)?;
    known.insert(first_set.clone());
    queue.push_back((first, first_set));

    let mut cells = Vec::new();
    while let Some((plane, set)) = queue.pop_front() {
        let slack = lifted.slacks(&plane)?;
        let cell_hull = convex_hull(&lifted.rationals(&set))?;
        if cell_hull.dim() != Some(k) {
            return Err(Error::Internal("lower facet is not full-dimensional".into()));
        }
        for ridge in cell_hull.facets() {
            let nu = integer_vector(&ridge.normal)?;
            // normal is primitive integral and points are integral, so beta is integral
            let beta = to_i128(&ridge.offset.to_integer())?;
            let mut ridge_set = Vec::new();
            for &q in &set {
                if idot(&nu, &lifted.xs[q])? == beta {
                    ridge_set.push(q);
                }
            }
            if !done_ridges.insert(ridge_set) {
                continue;
            }
            if let Some(next) = lifted.wrap(&plane, &slack, &nu, beta)? {
                let next_set = lifted.zero_set(&next)?;
                if known.insert(next_set.clone()) {
                    queue.push_back((next, next_set));
                }
            }
        }
        cells.push(lifted.to_cell(&plane, set));
    }
    cells.sort_by(|a, b| a.points.cmp(&b.points));
    Ok(cells)
}

/// Tilts the horizontal plane under the lowest point until it touches a full facet.
fn initial_facet(lifted: &Lifted, k: usize) -> Result<Plane> {
    let wmin = *lifted.ws.iter().min().expect("nonempty");
    let mut plane = Plane { a: vec![0; k], b: wmin, c: 1 };
    loop {
        let touching = lifted.zero_set(&plane)?;
        let base = &lifted.xs[touching[0]];
        let diffs: Vec<Vec<Rational>> = touching[1..]
            .iter()
            .map(|&q| lifted.xs[q].iter().zip(base).map(|(a, b)| Rational::from_integer((a - b).into())).collect())
            .collect();
        let reduced = if diffs.is_empty() { Vec::new() } else { linalg::rref(diffs).0 };
        if reduced.len() == k {
            return Ok(plane);
        }
        let slack = lifted.slacks(&plane)?;
        let mut rotated = None;
        'dirs: for dir in linalg::nullspace(&reduced, k) {
            let nu = integer_vector(&dir)?;
            let beta = idot(&nu, base)?;
            for sign in [1i128, -1] {
                let nu_s: Vec<i128> = nu.iter().map(|x| x * sign).collect();
                if let Some(p) = lifted.wrap(&plane, &slack, &nu_s, beta * sign)? {
                    rotated = Some(p);
                    break 'dirs;
                }
            }
        }
        plane = rotated.ok_or_else(|| Error::Internal("points do not span the space".into()))?;
    }
}

/// Indices of points that are vertices of some cell.
pub fn cell_vertices<'a>(
    points: &[RationalPoint],
    cells: impl IntoIterator<Item = &'a [usize]>,
) -> Result<BTreeSet<usize>> {
    let mut out = BTreeSet::new();
    for cell in cells {
        let pts: Vec<RationalPoint> = cell.iter().map(|&i| points[i].clone()).collect();
        let hull = convex_hull(&pts)?;
        for &i in cell {
            if hull.vertices().binary_search(&points[i]).is_ok() {
                out.insert(i);
            }
        }
    }
    Ok(out)
}

/// Intrinsic coordinates on the affine hull of `points`: returns the hull dimension and
/// the points projected onto a coordinate subspace on which the projection is injective.
pub fn intrinsic_coordinates(points: &[RationalPoint]) -> (usize, Vec<RationalPoint>) {
    let Some(base) = points.first() else {
        return (0, Vec::new());
    };
    let diffs: Vec<Vec<Rational>> = points[1..].iter().map(|p| (p - base).into_coords()).collect();
    let pivots = if diffs.is_empty() { Vec::new() } else { linalg::rref(diffs).1 };
    let proj = points
        .iter()
        .map(|p| RationalPoint::new(pivots.iter().map(|&c| p[c].clone()).collect()))
        .collect();
    (pivots.len(), proj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn square_with_flat_lift_is_one_cell() {
        let pts: Vec<RationalPoint> = [[0, 0], [1, 0], [0, 1], [1, 1]].iter().map(|c| RationalPoint::from_ints(c)).collect();
        let cells = regular_subdivision(&pts, &[int(0), int(0), int(0), int(0)]).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].points, vec![0, 1, 2, 3]);
    }

    #[test]
    fn square_lifted_on_a_diagonal() {
        // raising (1,0) and (0,1) splits along the 0-3 diagonal
        let pts: Vec<RationalPoint> = [[0, 0], [1, 0], [0, 1], [1, 1]].iter().map(|c| RationalPoint::from_ints(c)).collect();
        let cells = regular_subdivision(&pts, &[int(0), int(1), int(1), int(0)]).unwrap();
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0].points, vec![0, 1, 3]);
        assert_eq!(cells[1].points, vec![0, 2, 3]);
        // plane through (0,0,0),(1,0,1),(1,1,0): w = x - y... check on all three points
        for c in &cells {
            for &i in &c.points {
                let h = pts[i].dot(&c.slope) + &c.intercept;
                assert_eq!(h, [int(0), int(1), int(1), int(0)][i]);
            }
        }
    }

    #[test]
    fn one_dimensional_parabola() {
        let pts: Vec<RationalPoint> = (-2..=2).map(|i| RationalPoint::from_ints(&[i])).collect();
        let hs: Vec<Rational> = (-2..=2i64).map(|i| rat(i * i, 2)).collect();
        let cells = regular_subdivision(&pts, &hs).unwrap();
        assert_eq!(cells.len(), 4);
        assert!(cells.iter().all(|c| c.points.len() == 2));
    }

    #[test]
    fn points_above_the_hull_are_skipped() {
        let pts: Vec<RationalPoint> = [[0], [1], [2]].iter().map(|c| RationalPoint::from_ints(c)).collect();
        let cells = regular_subdivision(&pts, &[int(0), int(5), int(0)]).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].points, vec![0, 2]);
    }
}
