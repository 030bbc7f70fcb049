//! JSON schemas for every artifact. Rationals travel as `"p/q"` strings.

use num_bigint::BigInt;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::affine::AffineFunctional;
use crate::approx::{ConvergenceReport, StudyRow};
use crate::complex::PolytopalComplex;
use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure, DegreeReport};
use crate::pa::PAConvexFunction;
use crate::poly::{PiecewisePolynomial, Polynomial};
use crate::polytope::{convex_hull, Halfspace, Polytope};
use crate::rational::{format_rational, parse_rational, Rational, RationalPoint};
use crate::solver1d::{Anchor, Solution1D};

/// Conversion to and from a serde-friendly mirror type.
pub trait JsonArtifact: Sized {
    type Repr: Serialize + DeserializeOwned;

    fn to_repr(&self) -> Self::Repr;
    fn from_repr(repr: Self::Repr) -> Result<Self>;

    /// Pretty JSON with a trailing newline.
    fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_repr()).expect("repr serializes");
        s.push('\n');
        s
    }

    fn from_json(s: &str) -> Result<Self> {
        let repr: Self::Repr = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_repr(repr)
    }
}

fn q(r: &Rational) -> String {
    format_rational(r)
}

fn qs(v: &[Rational]) -> Vec<String> {
    v.iter().map(q).collect()
}

fn parse_all(v: &[String]) -> Result<Vec<Rational>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

fn parse_point(v: &[String]) -> Result<RationalPoint> {
    parse_all(v).map(RationalPoint::new)
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceRepr {
    pub normal: Vec<String>,
    pub offset: String,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct PolytopeRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub facets: Vec<HalfspaceRepr>,
}

impl JsonArtifact for Polytope {
    type Repr = PolytopeRepr;

    fn to_repr(&self) -> PolytopeRepr {
        PolytopeRepr {
            n: self.is_empty().then_some(self.ambient_dim()),
            vertices: Some(self.vertices().iter().map(|v| qs(v.coords())).collect()),
            facets: self
                .inequalities()
                .iter()
                .map(|h| HalfspaceRepr { normal: qs(&h.normal), offset: q(&h.offset) })
                .collect(),
        }
    }

    /// With vertices present the polytope is their hull and facets are recomputed;
    /// otherwise it is the intersection of the listed halfspaces.
    fn from_repr(r: PolytopeRepr) -> Result<Polytope> {
        match r.vertices {
            Some(vs) if !vs.is_empty() => {
                let pts = vs.iter().map(|v| parse_point(v)).collect::<Result<Vec<_>>>()?;
                let p = convex_hull(&pts)?;
                if let Some(n) = r.n {
                    if n != p.ambient_dim() {
                        return Err(Error::DimensionMismatch { expected: n, found: p.ambient_dim() });
                    }
                }
                Ok(p)
            }
            _ => {
                let n = r.n.or_else(|| r.facets.first().map(|h| h.normal.len())).ok_or(Error::EmptyInput("polytope"))?;
                if r.facets.is_empty() {
                    return Ok(Polytope::empty(n));
                }
                let hs = r
                    .facets
                    .iter()
                    .map(|h| Ok(Halfspace::new(parse_all(&h.normal)?, parse_rational(&h.offset)?)))
                    .collect::<Result<Vec<_>>>()?;
                Polytope::from_halfspaces(n, &hs)
            }
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct PieceRepr {
    pub slope: Vec<String>,
    pub intercept: String,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct PARepr {
    pub domain: PolytopeRepr,
    pub pieces: Vec<PieceRepr>,
}

impl JsonArtifact for PAConvexFunction {
    type Repr = PARepr;

    fn to_repr(&self) -> PARepr {
        PARepr {
            domain: self.domain().to_repr(),
            pieces: self.pieces().iter().map(|p| PieceRepr { slope: qs(&p.slope), intercept: q(&p.intercept) }).collect(),
        }
    }

    fn from_repr(r: PARepr) -> Result<PAConvexFunction> {
        let domain = Polytope::from_repr(r.domain)?;
        let pieces = r
            .pieces
            .iter()
            .map(|p| Ok(AffineFunctional::new(parse_all(&p.slope)?, parse_rational(&p.intercept)?)))
            .collect::<Result<Vec<_>>>()?;
        PAConvexFunction::new(pieces, domain)
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct ComplexRepr {
    pub domain: PolytopeRepr,
    pub cells: Vec<PolytopeRepr>,
}

impl JsonArtifact for PolytopalComplex {
    type Repr = ComplexRepr;

    fn to_repr(&self) -> ComplexRepr {
        ComplexRepr { domain: self.domain().to_repr(), cells: self.maximal_cells().map(|c| c.to_repr()).collect() }
    }

    fn from_repr(r: ComplexRepr) -> Result<PolytopalComplex> {
        let domain = Polytope::from_repr(r.domain)?;
        let cells = r.cells.into_iter().map(Polytope::from_repr).collect::<Result<Vec<_>>>()?;
        PolytopalComplex::new(domain, cells)
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct AtomRepr {
    pub point: Vec<String>,
    pub mass: String,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct MeasureRepr {
    pub n: usize,
    pub atoms: Vec<AtomRepr>,
}

impl JsonArtifact for AtomicMeasure {
    type Repr = MeasureRepr;

    fn to_repr(&self) -> MeasureRepr {
        MeasureRepr {
            n: self.ambient_dim(),
            atoms: self.atoms().iter().map(|(p, m)| AtomRepr { point: qs(p.coords()), mass: q(m) }).collect(),
        }
    }

    fn from_repr(r: MeasureRepr) -> Result<AtomicMeasure> {
        let atoms =
            r.atoms.iter().map(|a| Ok((parse_point(&a.point)?, parse_rational(&a.mass)?))).collect::<Result<Vec<_>>>()?;
        AtomicMeasure::new(r.n, atoms)
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct DegreeRepr {
    pub vertex: Vec<String>,
    pub subdifferential: PolytopeRepr,
    pub ma_mass: String,
    pub toric_degree: String,
    pub deg_s: u64,
    pub rescale: String,
    pub integral_degree: String,
    pub translation_verified: bool,
}

fn parse_int(s: &str) -> Result<BigInt> {
    let r = parse_rational(s)?;
    if !r.is_integer() {
        return Err(Error::Parse(format!("expected an integer, got {s:?}")));
    }
    Ok(r.to_integer())
}

impl JsonArtifact for DegreeReport {
    type Repr = DegreeRepr;

    fn to_repr(&self) -> DegreeRepr {
        DegreeRepr {
            vertex: qs(self.vertex.coords()),
            subdifferential: self.subdifferential.to_repr(),
            ma_mass: q(&self.ma_mass),
            toric_degree: q(&self.toric_degree),
            deg_s: self.deg_s,
            rescale: self.rescale.to_string(),
            integral_degree: self.integral_degree.to_string(),
            translation_verified: self.translation_verified,
        }
    }

    fn from_repr(r: DegreeRepr) -> Result<DegreeReport> {
        Ok(DegreeReport {
            vertex: parse_point(&r.vertex)?,
            subdifferential: Polytope::from_repr(r.subdifferential)?,
            ma_mass: parse_rational(&r.ma_mass)?,
            toric_degree: parse_rational(&r.toric_degree)?,
            deg_s: r.deg_s,
            rescale: parse_int(&r.rescale)?,
            integral_degree: parse_int(&r.integral_degree)?,
            translation_verified: r.translation_verified,
        })
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseRepr {
    pub breakpoints: Vec<String>,
    pub pieces: Vec<Vec<String>>,
}

impl JsonArtifact for PiecewisePolynomial {
    type Repr = PiecewiseRepr;

    fn to_repr(&self) -> PiecewiseRepr {
        PiecewiseRepr {
            breakpoints: qs(self.breakpoints()),
            // the zero polynomial is written as ["0"]
            pieces: self.pieces().iter().map(|p| if p.is_zero() { vec!["0".into()] } else { qs(p.coeffs()) }).collect(),
        }
    }

    fn from_repr(r: PiecewiseRepr) -> Result<PiecewisePolynomial> {
        let pieces = r.pieces.iter().map(|c| parse_all(c).map(Polynomial::new)).collect::<Result<Vec<_>>>()?;
        PiecewisePolynomial::new(parse_all(&r.breakpoints)?, pieces)
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct AnchorRepr {
    pub point: String,
    pub value: String,
    pub slope: String,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct SolutionRepr {
    pub deg_s: u64,
    pub anchor: AnchorRepr,
    pub phi: PiecewiseRepr,
}

impl JsonArtifact for Solution1D {
    type Repr = SolutionRepr;

    fn to_repr(&self) -> SolutionRepr {
        SolutionRepr {
            deg_s: self.deg_s,
            anchor: AnchorRepr { point: q(&self.anchor.point), value: q(&self.anchor.value), slope: q(&self.anchor.slope) },
            phi: self.phi.to_repr(),
        }
    }

    fn from_repr(r: SolutionRepr) -> Result<Solution1D> {
        Ok(Solution1D {
            phi: PiecewisePolynomial::from_repr(r.phi)?,
            deg_s: r.deg_s,
            anchor: Anchor::new(
                parse_rational(&r.anchor.point)?,
                parse_rational(&r.anchor.value)?,
                parse_rational(&r.anchor.slope)?,
            ),
        })
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct StudyRowRepr {
    pub step: String,
    pub error: String,
    pub oscillation_bound: String,
    pub pieces: usize,
    pub atoms: usize,
    pub integrals: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceRepr {
    pub tests: Vec<String>,
    pub rows: Vec<StudyRowRepr>,
}

impl JsonArtifact for ConvergenceReport {
    type Repr = ConvergenceRepr;

    fn to_repr(&self) -> ConvergenceRepr {
        ConvergenceRepr {
            tests: self.test_names.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| StudyRowRepr {
                    step: q(&r.step),
                    error: q(&r.error),
                    oscillation_bound: q(&r.oscillation_bound),
                    pieces: r.pieces,
                    atoms: r.atoms,
                    integrals: qs(&r.integrals),
                })
                .collect(),
        }
    }

    fn from_repr(r: ConvergenceRepr) -> Result<ConvergenceReport> {
        let rows = r
            .rows
            .iter()
            .map(|row| {
                if row.integrals.len() != r.tests.len() {
                    return Err(Error::WrongCount { expected: r.tests.len(), found: row.integrals.len() });
                }
                Ok(StudyRow {
                    step: parse_rational(&row.step)?,
                    error: parse_rational(&row.error)?,
                    oscillation_bound: parse_rational(&row.oscillation_bound)?,
                    pieces: row.pieces,
                    atoms: row.atoms,
                    integrals: parse_all(&row.integrals)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConvergenceReport { test_names: r.tests, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn round_trip<T: JsonArtifact + PartialEq + std::fmt::Debug>(x: &T) {
        let s = x.to_json();
        let back = T::from_json(&s).unwrap();
        assert_eq!(&back, x);
        assert_eq!(back.to_json(), s);
    }

    #[test]
    fn polytope_schema() {
        let p = Polytope::cube(2, &int(0), &rat(1, 2));
        round_trip(&p);
        let v: serde_json::Value = serde_json::from_str(&p.to_json()).unwrap();
        assert_eq!(v["vertices"][3], serde_json::json!(["1/2", "1/2"]));
        assert!(v.get("n").is_none());
        round_trip(&Polytope::empty(3));
        let seg = convex_hull(&[RationalPoint::from_ints(&[0, 0]), RationalPoint::from_ints(&[1, 1])]).unwrap();
        round_trip(&seg);
    }

    #[test]
    fn polytope_from_facets_only() {
        let s = r#"{"facets":[{"normal":["-1"],"offset":"0"},{"normal":["1"],"offset":"3/2"}]}"#;
        let p = Polytope::from_json(s).unwrap();
        assert_eq!(p, Polytope::cube(1, &int(0), &rat(3, 2)));
    }

    #[test]
    fn measure_schema() {
        let s = r#"{"n":2,"atoms":[{"point":["0","0"],"mass":"1"}]}"#;
        let mu = AtomicMeasure::from_json(s).unwrap();
        assert_eq!(mu.total_mass(), &int(1));
        round_trip(&mu);
        round_trip(&AtomicMeasure::empty(2));
        assert!(AtomicMeasure::from_json(r#"{"n":1,"atoms":[{"point":["0"],"mass":"-1"}]}"#).is_err());
    }

    #[test]
    fn piecewise_schema() {
        let s = r#"{"breakpoints":["0","1/2","1"],"pieces":[["0"],["1"]]}"#;
        let f = PiecewisePolynomial::from_json(s).unwrap();
        assert_eq!(f.eval(&rat(3, 4)), Some(int(1)));
        round_trip(&f);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(Polytope::from_json("{"), Err(Error::Parse(_))));
        assert!(matches!(Polytope::from_json(r#"{"vertices":[["x"]]}"#), Err(Error::Parse(_))));
        assert!(matches!(Polytope::from_json(r#"{"vertices":[],"bogus":1}"#), Err(Error::Parse(_))));
    }
}
