//! Polytopal complexes: face-closed families of polytopes subdividing a domain.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::pa::PAConvexFunction;
use crate::polytope::Polytope;
use crate::rational::{Rational, RationalPoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopalComplex {
    domain: Polytope,
    /// Every cell and every face of every cell, ordered by dimension then vertex list.
    cells: Vec<Polytope>,
    maximal: Vec<usize>,
    /// Proper faces of each cell, as indices into `cells`.
    faces: Vec<Vec<usize>>,
}

impl PolytopalComplex {
    /// Builds and validates the complex generated by `maximal` cells.
    pub fn new(domain: Polytope, maximal: Vec<Polytope>) -> Result<Self> {
        let c = Self::from_maximal_cells(domain, maximal);
        c.validate()?;
        Ok(c)
    }

    /// Face closure of `maximal` without validation.
    pub fn from_maximal_cells(domain: Polytope, maximal: Vec<Polytope>) -> Self {
        let mut by_vertices: BTreeMap<(usize, Vec<RationalPoint>), Polytope> = BTreeMap::new();
        let mut max_keys = Vec::with_capacity(maximal.len());
        for cell in &maximal {
            if cell.is_empty() {
                continue;
            }
            max_keys.push((cell.dim().unwrap_or(0), cell.vertices().to_vec()));
            for f in cell.faces() {
                by_vertices.entry((f.dim().unwrap_or(0), f.vertices().to_vec())).or_insert(f);
            }
        }
        let keys: Vec<(usize, Vec<RationalPoint>)> = by_vertices.keys().cloned().collect();
        let index: BTreeMap<&(usize, Vec<RationalPoint>), usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let cells: Vec<Polytope> = by_vertices.into_values().collect();
        let faces = cells
            .iter()
            .map(|c| {
                let mut f: Vec<usize> = c
                    .faces()
                    .iter()
                    .filter(|g| g.vertices() != c.vertices())
                    .map(|g| index[&(g.dim().unwrap_or(0), g.vertices().to_vec())])
                    .collect();
                f.sort_unstable();
                f
            })
            .collect();
        let mut maximal_idx: Vec<usize> = max_keys.iter().map(|k| index[k]).collect();
        maximal_idx.sort_unstable();
        maximal_idx.dedup();
        PolytopalComplex { domain, cells, maximal: maximal_idx, faces }
    }

    pub fn domain(&self) -> &Polytope {
        &self.domain
    }

    pub fn cells(&self) -> &[Polytope] {
        &self.cells
    }

    pub fn maximal_cells(&self) -> impl Iterator<Item = &Polytope> {
        self.maximal.iter().map(move |&i| &self.cells[i])
    }

    pub fn maximal_indices(&self) -> &[usize] {
        &self.maximal
    }

    /// Proper faces of cell `i`.
    pub fn faces_of(&self, i: usize) -> &[usize] {
        &self.faces[i]
    }

    /// Vertex lists of the maximal cells, sorted; two complexes with the same
    /// signature have the same cells.
    pub fn signature(&self) -> Vec<Vec<RationalPoint>> {
        let mut s: Vec<Vec<RationalPoint>> = self.maximal_cells().map(|c| c.vertices().to_vec()).collect();
        s.sort();
        s
    }

    /// All 0-dimensional cells.
    pub fn vertices(&self) -> Vec<RationalPoint> {
        self.cells.iter().filter(|c| c.dim() == Some(0)).map(|c| c.vertices()[0].clone()).collect()
    }

    /// 0-cells in the interior of the domain.
    pub fn interior_vertices(&self) -> Vec<RationalPoint> {
        self.vertices().into_iter().filter(|v| self.domain.contains_strict(v)).collect()
    }

    fn index_of(&self, p: &Polytope) -> Option<usize> {
        let key = (p.dim().unwrap_or(0), p.vertices().to_vec());
        self.cells
            .binary_search_by(|c| (c.dim().unwrap_or(0), c.vertices()).cmp(&(key.0, key.1.as_slice())))
            .ok()
    }

    /// Checks coverage of the domain and that maximal cells meet in common faces.
    pub fn validate(&self) -> Result<()> {
        let n = self.domain.ambient_dim();
        let mut total = Rational::zero();
        for cell in self.maximal_cells() {
            if !cell.is_full_dimensional() {
                return Err(Error::Invalid(format!("maximal cell of dimension {:?} in ambient {n}", cell.dim())));
            }
            if !cell.is_subset_of(&self.domain) {
                return Err(Error::Invalid("cell leaves the domain".into()));
            }
            total += cell.volume();
        }
        if total != self.domain.volume() {
            return Err(Error::Invalid(format!("cells cover volume {total}, domain has {}", self.domain.volume())));
        }
        let boxes: Vec<(Vec<Rational>, Vec<Rational>)> =
            self.maximal_cells().map(|c| c.bounding_box().expect("nonempty")).collect();
        for (a_pos, &a) in self.maximal.iter().enumerate() {
            for (b_pos, &b) in self.maximal.iter().enumerate().skip(a_pos + 1) {
                let (alo, ahi) = &boxes[a_pos];
                let (blo, bhi) = &boxes[b_pos];
                if (0..n).any(|i| ahi[i] < blo[i] || bhi[i] < alo[i]) {
                    continue;
                }
                let meet = self.cells[a].intersection(&self.cells[b])?;
                if meet.is_empty() {
                    continue;
                }
                let ok = self
                    .index_of(&meet)
                    .is_some_and(|k| self.faces[a].contains(&k) && self.faces[b].contains(&k));
                if !ok {
                    return Err(Error::Invalid(format!(
                        "cells {a} and {b} meet in a set that is not a common face"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Complex whose maximal cells are the full-dimensional intersections `a ∩ b`.
    pub fn common_refinement(&self, other: &PolytopalComplex) -> Result<PolytopalComplex> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        let n = self.domain.ambient_dim();
        let other_boxes: Vec<(Vec<Rational>, Vec<Rational>)> =
            other.maximal_cells().map(|c| c.bounding_box().expect("nonempty")).collect();
        let mut cells = Vec::new();
        for a in self.maximal_cells() {
            let (alo, ahi) = a.bounding_box().expect("nonempty");
            for (b, (blo, bhi)) in other.maximal_cells().zip(&other_boxes) {
                if (0..n).any(|i| ahi[i] <= blo[i] || bhi[i] <= alo[i]) {
                    continue;
                }
                let meet = a.intersection(b)?;
                if meet.is_full_dimensional() {
                    cells.push(meet);
                }
            }
        }
        Ok(PolytopalComplex::from_maximal_cells(self.domain.clone(), cells))
    }
}

/// The subdivision of the domain into the maximal regions where `h` is affine.
pub fn linearity_complex(h: &PAConvexFunction) -> Result<PolytopalComplex> {
    let canon = h.canonicalize()?;
    let regions = canon.activity_regions()?;
    Ok(PolytopalComplex::from_maximal_cells(canon.domain().clone(), regions))
}

/// 0-cells of `complex` strictly inside its domain.
pub fn interior_vertices(complex: &PolytopalComplex) -> Vec<RationalPoint> {
    complex.interior_vertices()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::AffineFunctional;
    use crate::rational::{int, rat};

    fn aff(slope: &[i64], c: i64) -> AffineFunctional {
        AffineFunctional::new(slope.iter().map(|&s| int(s)).collect(), int(c))
    }

    fn square() -> Polytope {
        Polytope::cube(2, &int(-1), &int(1))
    }

    fn quadrants() -> PolytopalComplex {
        let q = |x0: i64, y0: i64| {
            Polytope::cuboid(&[int(x0), int(y0)], &[int(x0 + 1), int(y0 + 1)]).unwrap()
        };
        PolytopalComplex::new(square(), vec![q(-1, -1), q(0, -1), q(-1, 0), q(0, 0)]).unwrap()
    }

    #[test]
    fn kink_in_one_dimension() {
        let h = PAConvexFunction::new(vec![aff(&[0], 0), aff(&[1], 0)], Polytope::cube(1, &int(-1), &int(1))).unwrap();
        let c = linearity_complex(&h).unwrap();
        c.validate().unwrap();
        let sig = c.signature();
        assert_eq!(sig.len(), 2);
        assert_eq!(sig[0], vec![RationalPoint::from_ints(&[-1]), RationalPoint::from_ints(&[0])]);
        assert_eq!(c.vertices().len(), 3);
        assert_eq!(c.interior_vertices(), vec![RationalPoint::from_ints(&[0])]);
    }

    #[test]
    fn tropical_square_gives_four_quadrants() {
        let h = PAConvexFunction::new(vec![aff(&[0, 0], 0), aff(&[1, 0], 0), aff(&[0, 1], 0), aff(&[1, 1], 0)], square())
            .unwrap();
        let c = linearity_complex(&h).unwrap();
        c.validate().unwrap();
        assert_eq!(c.signature(), quadrants().signature());
        assert_eq!(c.interior_vertices(), vec![RationalPoint::from_ints(&[0, 0])]);
    }

    #[test]
    fn affine_function_has_one_cell() {
        let h = PAConvexFunction::new(vec![aff(&[3, -2], 5)], square()).unwrap();
        let c = linearity_complex(&h).unwrap();
        assert_eq!(c.signature(), vec![square().vertices().to_vec()]);
        assert!(c.interior_vertices().is_empty());
    }

    #[test]
    fn refinement_of_splits() {
        let vertical = PolytopalComplex::new(
            square(),
            vec![
                Polytope::cuboid(&[int(-1), int(-1)], &[int(0), int(1)]).unwrap(),
                Polytope::cuboid(&[int(0), int(-1)], &[int(1), int(1)]).unwrap(),
            ],
        )
        .unwrap();
        let horizontal = PolytopalComplex::new(
            square(),
            vec![
                Polytope::cuboid(&[int(-1), int(-1)], &[int(1), int(0)]).unwrap(),
                Polytope::cuboid(&[int(-1), int(0)], &[int(1), int(1)]).unwrap(),
            ],
        )
        .unwrap();
        let r = vertical.common_refinement(&horizontal).unwrap();
        r.validate().unwrap();
        assert_eq!(r.signature(), quadrants().signature());
        assert_eq!(vertical.common_refinement(&vertical).unwrap().signature(), vertical.signature());
    }

    #[test]
    fn refinement_requires_same_domain() {
        let other = PolytopalComplex::new(Polytope::cube(2, &int(0), &int(1)), vec![Polytope::cube(2, &int(0), &int(1))]).unwrap();
        assert!(matches!(quadrants().common_refinement(&other), Err(Error::DomainMismatch)));
    }

    #[test]
    fn overlapping_cells_are_rejected() {
        let a = Polytope::cuboid(&[int(-1), int(-1)], &[int(1), rat(1, 2)]).unwrap();
        let b = Polytope::cuboid(&[int(-1), int(0)], &[int(1), int(1)]).unwrap();
        assert!(PolytopalComplex::new(square(), vec![a, b]).is_err());
    }

    #[test]
    fn non_face_to_face_is_rejected() {
        // left half against two right quarters: the edge x = 0 is split on one side only
        let left = Polytope::cuboid(&[int(-1), int(-1)], &[int(0), int(1)]).unwrap();
        let rl = Polytope::cuboid(&[int(0), int(-1)], &[int(1), int(0)]).unwrap();
        let ru = Polytope::cuboid(&[int(0), int(0)], &[int(1), int(1)]).unwrap();
        assert!(PolytopalComplex::new(square(), vec![left, rl, ru]).is_err());
    }

    #[test]
    fn interior_vertices_of_shifted_tropical_function() {
        let half = rat(1, 2);
        let h = PAConvexFunction::new(
            vec![
                AffineFunctional::new(vec![int(0), int(0)], int(0)),
                AffineFunctional::new(vec![int(1), int(0)], -half.clone()),
                AffineFunctional::new(vec![int(0), int(1)], -half.clone()),
                AffineFunctional::new(vec![int(1), int(1)], int(-1)),
            ],
            Polytope::cube(2, &int(0), &int(2)),
        )
        .unwrap();
        let c = linearity_complex(&h).unwrap();
        c.validate().unwrap();
        assert_eq!(c.interior_vertices(), vec![RationalPoint::new(vec![half.clone(), half])]);
    }
}
