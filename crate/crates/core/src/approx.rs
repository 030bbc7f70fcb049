//! Rational PA approximation of convex functions and weak convergence of the induced
//! Monge-Ampère measures.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::affine::AffineFunctional;
use crate::error::{Error, Result};
use crate::lower_hull::regular_subdivision;
use crate::measure::ma_measure;
use crate::pa::PAConvexFunction;
use crate::polytope::Polytope;
use crate::rational::{int, lcm_of_denominators, Rational, RationalPoint};

type EvalFn = Arc<dyn Fn(&RationalPoint) -> Rational + Send + Sync>;

/// A caller-supplied function, assumed convex on `domain`.
#[derive(Clone)]
pub struct ConvexEvaluator {
    domain: Polytope,
    eval: EvalFn,
}

impl fmt::Debug for ConvexEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexEvaluator").field("domain", &self.domain).finish_non_exhaustive()
    }
}

impl ConvexEvaluator {
    pub fn new(domain: Polytope, eval: impl Fn(&RationalPoint) -> Rational + Send + Sync + 'static) -> Self {
        ConvexEvaluator { domain, eval: Arc::new(eval) }
    }

    pub fn from_pa(h: PAConvexFunction) -> Self {
        let domain = h.domain().clone();
        ConvexEvaluator::new(domain, move |x| h.eval(x))
    }

    /// `x -> 1/2 x^T Q x + <b, x> + c`. `Q` should be positive semidefinite.
    pub fn quadratic(domain: Polytope, q: Vec<Vec<Rational>>, b: Vec<Rational>, c: Rational) -> Self {
        ConvexEvaluator::new(domain, move |x| {
            let xs = x.coords();
            let mut acc = c.clone();
            for (i, row) in q.iter().enumerate() {
                for (j, qij) in row.iter().enumerate() {
                    if !qij.is_zero() {
                        acc += qij * &xs[i] * &xs[j] / int(2);
                    }
                }
            }
            acc + x.dot(&b)
        })
    }

    /// `1/2 |x|^2` on `domain`.
    pub fn half_square_norm(domain: Polytope) -> Self {
        ConvexEvaluator::new(domain, |x| x.coords().iter().map(|c| c * c).sum::<Rational>() / int(2))
    }

    pub fn domain(&self) -> &Polytope {
        &self.domain
    }

    pub fn eval(&self, x: &RationalPoint) -> Rational {
        (self.eval)(x)
    }
}

/// A named test function for weak-convergence studies.
#[derive(Clone)]
pub struct TestFunction {
    pub name: String,
    eval: EvalFn,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction").field("name", &self.name).finish_non_exhaustive()
    }
}

impl TestFunction {
    pub fn new(name: impl Into<String>, eval: impl Fn(&RationalPoint) -> Rational + Send + Sync + 'static) -> Self {
        TestFunction { name: name.into(), eval: Arc::new(eval) }
    }

    pub fn eval(&self, x: &RationalPoint) -> Rational {
        (self.eval)(x)
    }

    /// Indicator of a closed polytope.
    pub fn indicator(name: impl Into<String>, e: Polytope) -> Self {
        TestFunction::new(name, move |x| if e.contains(x) { int(1) } else { int(0) })
    }
}

/// Indicator of the half-size box centred in the bounding box of `domain`, the linear
/// function `1 + x_1 + 2 x_2 + ...` clipped to that box, and the product of coordinates.
pub fn default_tests(domain: &Polytope) -> Vec<TestFunction> {
    let (lo, hi) = domain.bounding_box().expect("nonempty domain");
    let quarter = Rational::new(1.into(), 4.into());
    let (wlo, whi): (Vec<Rational>, Vec<Rational>) = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| {
            let w = (h - l) * &quarter;
            (l + &w, h - &w)
        })
        .unzip();
    let window = Polytope::cuboid(&wlo, &whi).expect("matching dimensions");
    let clip = window.clone();
    vec![
        TestFunction::indicator("box", window),
        TestFunction::new("clipped_linear", move |p| {
            if clip.contains(p) {
                p.coords().iter().enumerate().fold(int(1), |acc, (i, c)| acc + c * int(i as i64 + 1))
            } else {
                Rational::zero()
            }
        }),
        TestFunction::new("product", |p| p.coords().iter().fold(int(1), |acc, c| acc * c)),
    ]
}

/// Multi-indices `k` with `k * step` inside `domain`.
fn lattice_indices(domain: &Polytope, step: &Rational) -> Vec<Vec<BigInt>> {
    let (lo, hi) = domain.bounding_box().expect("nonempty domain");
    let ranges: Vec<(BigInt, BigInt)> = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| ((l / step).ceil().to_integer(), (h / step).floor().to_integer()))
        .collect();
    let mut out = Vec::new();
    let mut cur: Vec<BigInt> = ranges.iter().map(|r| r.0.clone()).collect();
    if ranges.iter().any(|(a, b)| a > b) {
        return out;
    }
    loop {
        let p = RationalPoint::new(cur.iter().map(|k| Rational::from_integer(k.clone()) * step).collect());
        if domain.contains(&p) {
            out.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i == cur.len() {
                return out;
            }
            cur[i] += 1;
            if cur[i] <= ranges[i].1 {
                break;
            }
            cur[i] = ranges[i].0.clone();
            i += 1;
        }
    }
}

fn lattice_points(domain: &Polytope, step: &Rational) -> Vec<RationalPoint> {
    lattice_indices(domain, step)
        .into_iter()
        .map(|k| RationalPoint::new(k.into_iter().map(|c| Rational::from_integer(c) * step).collect()))
        .collect()
}

/// Midpoint convexity on axis-neighbour triples of the sample lattice and on pairs of
/// domain vertices.
fn check_midpoint_convexity(f: &ConvexEvaluator, samples: &BTreeSet<RationalPoint>, step: &Rational) -> Result<()> {
    let violation = |a: &RationalPoint, b: &RationalPoint, mid: &RationalPoint, fm: &Rational| Error::NotConvex {
        a: a.clone(),
        b: b.clone(),
        mid: mid.clone(),
        f_mid: fm.to_string(),
    };
    let n = f.domain().ambient_dim();
    for p in samples {
        for i in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[i] = step.clone();
            let e = RationalPoint::new(e);
            let mid = p + &e;
            let far = &mid + &e;
            if !samples.contains(&far) {
                continue;
            }
            let fm = f.eval(&mid);
            if fm.clone() * int(2) > f.eval(p) + f.eval(&far) {
                return Err(violation(p, &far, &mid, &fm));
            }
        }
    }
    let verts = f.domain().vertices();
    for (i, a) in verts.iter().enumerate() {
        for b in &verts[i + 1..] {
            let mid = (a + b).scale(&Rational::new(1.into(), 2.into()));
            let fm = f.eval(&mid);
            if fm.clone() * int(2) > f.eval(a) + f.eval(b) {
                return Err(violation(a, b, &mid, &fm));
            }
        }
    }
    Ok(())
}

/// Lower convex interpolant of `f` on the lattice `step * Z^n` (plus the domain vertices).
pub fn pa_from_grid(f: &ConvexEvaluator, step: &Rational) -> Result<PAConvexFunction> {
    if !step.is_positive() {
        return Err(Error::Invalid("step must be positive".into()));
    }
    let domain = f.domain();
    if !domain.is_full_dimensional() {
        return Err(Error::DegenerateDomain);
    }
    let mut samples: BTreeSet<RationalPoint> = lattice_points(domain, step).into_iter().collect();
    samples.extend(domain.vertices().iter().cloned());
    if samples.is_empty() {
        return Err(Error::EmptyInput("no sample points"));
    }
    check_midpoint_convexity(f, &samples, step)?;
    let samples: Vec<RationalPoint> = samples.into_iter().collect();
    let values: Vec<Rational> = samples.iter().map(|p| f.eval(p)).collect();
    let cells = regular_subdivision(&samples, &values)?;
    let mut pieces: Vec<AffineFunctional> =
        cells.into_iter().map(|c| AffineFunctional::new(c.slope, c.intercept)).collect();
    pieces.sort();
    pieces.dedup();
    // each lower facet projects onto a full-dimensional cell of the domain
    Ok(PAConvexFunction::from_parts_unchecked(pieces, domain.clone()))
}

/// Exact evaluation of a PA function on the lattice `step * Z^n` in integer arithmetic.
struct LatticeEvaluator {
    rows: Vec<(Vec<i128>, i128)>,
    num: i128,
    denom: Rational,
}

impl LatticeEvaluator {
    fn new(h: &PAConvexFunction, step: &Rational) -> Option<Self> {
        let l = lcm_of_denominators(h.pieces().iter().flat_map(|p| p.slope.iter().chain(std::iter::once(&p.intercept))));
        let num = i128::try_from(step.numer()).ok()?;
        let den = step.denom().clone();
        let mut rows = Vec::with_capacity(h.pieces().len());
        for p in h.pieces() {
            let m: Option<Vec<i128>> = p.slope.iter().map(|s| i128::try_from((s * &l).to_integer()).ok()).collect();
            let c = i128::try_from((&p.intercept * &l).to_integer() * &den).ok()?;
            rows.push((m?, c));
        }
        Some(LatticeEvaluator { rows, num, denom: Rational::from_integer(l * den) })
    }

    /// First maximizing piece and `h(k * step)`, or `None` on overflow.
    fn eval(&self, k: &[i128]) -> Option<(usize, Rational)> {
        let mut best: Option<(usize, i128)> = None;
        for (i, (m, c)) in self.rows.iter().enumerate() {
            let mut acc: i128 = 0;
            for (mi, ki) in m.iter().zip(k) {
                acc = acc.checked_add(mi.checked_mul(*ki)?)?;
            }
            let v = acc.checked_mul(self.num)?.checked_add(*c)?;
            if best.map_or(true, |(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        let (i, v) = best?;
        Some((i, Rational::from_integer(v.into()) / &self.denom))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformError {
    /// `max |f - h|` over the probe lattice: a lower estimate of the sup norm.
    pub probe_max: Rational,
    pub witness: Option<RationalPoint>,
    /// Largest oscillation of `f` over the probe points sharing an active piece of `h`;
    /// bounds `|f - h|` on each linearity cell for convex `f`.
    pub oscillation_bound: Rational,
    pub probes: usize,
}

/// Probes `|f - h|` on the lattice `probe_step * Z^n` inside the domain.
pub fn uniform_error(f: &ConvexEvaluator, h: &PAConvexFunction, probe_step: &Rational) -> Result<UniformError> {
    if !probe_step.is_positive() {
        return Err(Error::Invalid("probe step must be positive".into()));
    }
    let fast = LatticeEvaluator::new(h, probe_step);
    let idx = lattice_indices(h.domain(), probe_step);
    let mut probe_max = Rational::zero();
    let mut witness = None;
    // per active piece: (min f, max f)
    let mut ranges: Vec<Option<(Rational, Rational)>> = vec![None; h.pieces().len()];
    for k in &idx {
        let x = RationalPoint::new(k.iter().map(|c| Rational::from_integer(c.clone()) * probe_step).collect());
        let ki: Option<Vec<i128>> = k.iter().map(|c| i128::try_from(c).ok()).collect();
        let (piece, hx) = ki.as_deref().and_then(|ki| fast.as_ref().and_then(|fe| fe.eval(ki))).unwrap_or_else(|| {
            let vals: Vec<Rational> = h.pieces().iter().map(|p| p.eval(&x)).collect();
            let best = (0..vals.len()).fold(0, |b, i| if vals[i] > vals[b] { i } else { b });
            (best, vals[best].clone())
        });
        let fx = f.eval(&x);
        let err = (&fx - &hx).abs();
        if err > probe_max || witness.is_none() {
            probe_max = err;
            witness = Some(x.clone());
        }
        let r = &mut ranges[piece];
        *r = Some(match r.take() {
            None => (fx.clone(), fx),
            Some((lo, hi)) => (lo.min(fx.clone()), hi.max(fx)),
        });
    }
    let oscillation_bound = ranges.into_iter().flatten().map(|(lo, hi)| hi - lo).max().unwrap_or_else(Rational::zero);
    Ok(UniformError { probe_max, witness, oscillation_bound, probes: idx.len() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StudyRow {
    pub step: Rational,
    pub error: Rational,
    pub oscillation_bound: Rational,
    pub pieces: usize,
    pub atoms: usize,
    pub integrals: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub test_names: Vec<String>,
    pub rows: Vec<StudyRow>,
}

impl ConvergenceReport {
    /// `|I_k - I_{k-1}|` per test function, one entry per consecutive pair of steps.
    pub fn cauchy_differences(&self) -> Vec<Vec<Rational>> {
        (0..self.test_names.len())
            .map(|t| self.rows.windows(2).map(|w| (&w[1].integrals[t] - &w[0].integrals[t]).abs()).collect())
            .collect()
    }
}

/// For each step: grid approximant, its MA measure, and the integrals of `tests`.
/// The uniform error is probed on the half-step lattice.
pub fn convergence_study(f: &ConvexEvaluator, steps: &[Rational], tests: &[TestFunction]) -> Result<ConvergenceReport> {
    if steps.is_empty() {
        return Err(Error::EmptyInput("no steps"));
    }
    if steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Invalid("steps must be strictly decreasing".into()));
    }
    let half = Rational::new(1.into(), 2.into());
    let mut rows = Vec::with_capacity(steps.len());
    for step in steps {
        let h = pa_from_grid(f, step)?;
        let mu = ma_measure(&h)?;
        let err = uniform_error(f, &h, &(step * &half))?;
        rows.push(StudyRow {
            step: step.clone(),
            error: err.probe_max,
            oscillation_bound: err.oscillation_bound,
            pieces: h.pieces().len(),
            atoms: mu.atoms().len(),
            integrals: tests.iter().map(|t| mu.integrate(|x| t.eval(x))).collect(),
        });
    }
    Ok(ConvergenceReport { test_names: tests.iter().map(|t| t.name.clone()).collect(), rows })
}

/// Reciprocal-power step sequence `1/base, 1/base^2, ...`, handy for studies.
pub fn dyadic_steps(first_denominator: u64, count: usize) -> Vec<Rational> {
    (0..count)
        .map(|i| Rational::new(BigInt::from(1), BigInt::from(first_denominator) * BigInt::from(2u64).pow(i as u32)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn interval() -> Polytope {
        Polytope::cube(1, &int(-1), &int(1))
    }

    fn x(v: Rational) -> RationalPoint {
        RationalPoint::new(vec![v])
    }

    #[test]
    fn affine_input_gives_one_piece() {
        let f = ConvexEvaluator::new(Polytope::cube(2, &int(0), &int(1)), |p| &p[0] * int(3) - &p[1] + int(2));
        let h = pa_from_grid(&f, &rat(1, 4)).unwrap();
        assert_eq!(h.pieces(), &[AffineFunctional::new(vec![int(3), int(-1)], int(2))]);
    }

    #[test]
    fn secant_interpolant_of_parabola() {
        let f = ConvexEvaluator::new(interval(), |p| &p[0] * &p[0]);
        let h = pa_from_grid(&f, &int(1)).unwrap();
        assert_eq!(h.pieces(), &[AffineFunctional::new(vec![int(-1)], int(0)), AffineFunctional::new(vec![int(1)], int(0))]);
        let e = uniform_error(&f, &h, &rat(1, 2)).unwrap();
        assert_eq!(e.probe_max, rat(1, 4));
        assert_eq!(e.witness, Some(x(rat(-1, 2))));
    }

    #[test]
    fn pa_input_is_reproduced() {
        let f = ConvexEvaluator::new(interval(), |p| p[0].clone().max(int(0)));
        let h = pa_from_grid(&f, &rat(1, 2)).unwrap();
        for k in -8..=8 {
            let p = x(rat(k, 8));
            assert_eq!(h.eval(&p), f.eval(&p));
        }
        assert_eq!(uniform_error(&f, &h, &rat(1, 8)).unwrap().probe_max, int(0));
    }

    #[test]
    fn interpolant_matches_samples_and_stays_below() {
        let f = ConvexEvaluator::new(Polytope::cube(2, &int(-1), &int(1)), |p| {
            let s = &p[0] + &p[1] * int(3);
            &s * &s + &p[0] * &p[0]
        });
        let h = pa_from_grid(&f, &rat(1, 2)).unwrap();
        for k in lattice_points(f.domain(), &rat(1, 2)) {
            assert_eq!(h.eval(&k), f.eval(&k));
        }
        for k in lattice_points(f.domain(), &rat(1, 6)) {
            assert!(h.eval(&k) >= f.eval(&k));
        }
    }

    #[test]
    fn error_decreases_under_refinement() {
        let f = ConvexEvaluator::new(interval(), |p| &p[0] * &p[0]);
        let errs: Vec<Rational> = [int(1), rat(1, 2), rat(1, 4)]
            .iter()
            .map(|s| uniform_error(&f, &pa_from_grid(&f, s).unwrap(), &(s / int(2))).unwrap().probe_max)
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }

    #[test]
    fn non_convex_input_is_rejected() {
        let f = ConvexEvaluator::new(interval(), |p| -(&p[0] * &p[0]));
        assert!(matches!(pa_from_grid(&f, &rat(1, 2)), Err(Error::NotConvex { .. })));
    }

    #[test]
    fn study_of_affine_function_has_zero_integrals() {
        let f = ConvexEvaluator::new(Polytope::cube(2, &int(-1), &int(1)), |p| &p[0] - &p[1]);
        let tests = [TestFunction::new("one", |_| int(1))];
        let r = convergence_study(&f, &[rat(1, 2), rat(1, 4)], &tests).unwrap();
        assert!(r.rows.iter().all(|row| row.integrals[0].is_zero()));
    }

    #[test]
    fn study_of_pa_function_is_constant() {
        let h = PAConvexFunction::new(
            vec![AffineFunctional::new(vec![int(0), int(0)], int(0)), AffineFunctional::new(vec![int(1), int(1)], int(0))],
            Polytope::cube(2, &int(-1), &int(1)),
        )
        .unwrap();
        let f = ConvexEvaluator::from_pa(h);
        let tests = [TestFunction::new("x+2", |p| &p[0] + int(2))];
        let r = convergence_study(&f, &[rat(1, 2), rat(1, 4), rat(1, 8)], &tests).unwrap();
        assert!(r.cauchy_differences()[0].iter().all(Zero::is_zero));
    }

    #[test]
    fn steps_must_decrease() {
        let f = ConvexEvaluator::new(interval(), |p| &p[0] * &p[0]);
        assert!(convergence_study(&f, &[rat(1, 4), rat(1, 2)], &[]).is_err());
    }
}
