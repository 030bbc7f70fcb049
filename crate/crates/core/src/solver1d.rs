//! The one-dimensional equation `deg_s * phi'' = f` on an interval.

use num_traits::{One, Signed, Zero};

use crate::approx::{pa_from_grid, ConvexEvaluator};
use crate::error::{Error, Result};
use crate::measure::{ma_measure, AtomicMeasure};
use crate::pa::PAConvexFunction;
use crate::poly::{junction_smoothness, PiecewisePolynomial, Polynomial, Smoothness};
use crate::polytope::Polytope;
use crate::rational::{factorial, format_rational, int, Rational, RationalPoint};

/// Fixes the affine ambiguity: `phi(point) = value`, `phi'(point) = slope`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Anchor {
    pub point: Rational,
    pub value: Rational,
    pub slope: Rational,
}

impl Anchor {
    pub fn new(point: Rational, value: Rational, slope: Rational) -> Self {
        Anchor { point, value, slope }
    }

    pub fn origin() -> Self {
        Anchor::new(Rational::zero(), Rational::zero(), Rational::zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution1D {
    pub phi: PiecewisePolynomial,
    pub deg_s: u64,
    pub anchor: Anchor,
}

/// Checks `f >= 0` piece by piece on the closed intervals.
pub fn check_nonnegative(f: &PiecewisePolynomial) -> Result<()> {
    for (i, p) in f.pieces().iter().enumerate() {
        let (a, b) = f.interval(i);
        if let Some(x) = p.negative_witness(a, b) {
            return Err(Error::NegativeDensity(format_rational(&x), format_rational(&p.eval(&x))));
        }
    }
    Ok(())
}

/// Double antiderivative of `f / deg_s` with value and slope prescribed at the anchor.
pub fn solve_1d(f: &PiecewisePolynomial, deg_s: u64, anchor: &Anchor) -> Result<Solution1D> {
    if deg_s == 0 {
        return Err(Error::Invalid("deg_s must be a positive integer".into()));
    }
    let start = f.piece_index(&anchor.point).ok_or_else(|| Error::OutsideDomain(RationalPoint::new(vec![anchor.point.clone()])))?;
    check_nonnegative(f)?;
    let inv = Rational::one() / int(deg_s as i64);
    let n = f.pieces().len();
    let mut phi: Vec<Option<Polynomial>> = vec![None; n];
    // antiderivative pair through (x0, value, slope)
    let lift = |g: &Polynomial, x0: &Rational, value: &Rational, slope: &Rational| {
        let d1 = g.scale(&inv).integral_from(x0) + Polynomial::constant(slope.clone());
        d1.integral_from(x0) + Polynomial::constant(value.clone())
    };
    phi[start] = Some(lift(&f.pieces()[start], &anchor.point, &anchor.value, &anchor.slope));
    for i in start + 1..n {
        let prev = phi[i - 1].as_ref().unwrap();
        let x = &f.breakpoints()[i];
        phi[i] = Some(lift(&f.pieces()[i], x, &prev.eval(x), &prev.derivative().eval(x)));
    }
    for i in (0..start).rev() {
        let next = phi[i + 1].as_ref().unwrap();
        let x = &f.breakpoints()[i + 1];
        phi[i] = Some(lift(&f.pieces()[i], x, &next.eval(x), &next.derivative().eval(x)));
    }
    let phi = PiecewisePolynomial::new(f.breakpoints().to_vec(), phi.into_iter().map(Option::unwrap).collect())?;
    Ok(Solution1D { phi, deg_s, anchor: anchor.clone() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BreakpointCheck {
    pub x: Rational,
    pub f: Smoothness,
    pub phi: Smoothness,
    /// `phi` is at least two orders smoother than `f` here.
    pub gains_two: bool,
}

/// Second central difference of `phi` at `x` against its exact Taylor expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StencilProbe {
    pub x: Rational,
    pub delta: Rational,
    pub second_difference: Rational,
    /// `sum_j 2 phi^(2j+2)(x) delta^(2j) / (2j+2)!`
    pub taylor: Rational,
    /// `f(x) / deg_s`
    pub expected: Rational,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityReport {
    /// `deg_s * phi'' = f` coefficientwise on every interval.
    pub ode_identity: bool,
    pub convex: bool,
    pub c1: bool,
    pub breakpoints: Vec<BreakpointCheck>,
    pub probes: Vec<StencilProbe>,
}

impl RegularityReport {
    pub fn all_pass(&self) -> bool {
        self.ode_identity
            && self.convex
            && self.c1
            && self.breakpoints.iter().all(|b| b.gains_two)
            && self.probes.iter().all(|p| p.ok)
    }

    /// Breakpoints where `phi''` jumps.
    pub fn second_derivative_jumps(&self) -> Vec<Rational> {
        self.breakpoints.iter().filter(|b| b.phi < Smoothness::Ck(2)).map(|b| b.x.clone()).collect()
    }
}

/// Symbolic smoothness comparison at every breakpoint of `phi` or `f`, plus a stencil probe in
/// the middle of every interval.
pub fn verify_regularity(sol: &Solution1D, f: &PiecewisePolynomial) -> RegularityReport {
    let same_interval = sol.phi.start() == f.start() && sol.phi.end() == f.end();
    let phi = sol.phi.refine(f.breakpoints());
    let fr = f.refine(sol.phi.breakpoints());
    let ds = int(sol.deg_s as i64);
    let ode_identity = same_interval
        && phi.pieces().iter().zip(fr.pieces()).all(|(p, q)| p.nth_derivative(2).scale(&ds) == *q);
    let convex = phi.pieces().iter().enumerate().all(|(i, p)| {
        let (a, b) = phi.interval(i);
        p.nth_derivative(2).negative_witness(a, b).is_none()
    });
    let mut breakpoints = Vec::new();
    for i in 1..phi.pieces().len() {
        let x = &phi.breakpoints()[i];
        let sp = junction_smoothness(&phi.pieces()[i - 1], &phi.pieces()[i], x);
        let sf = if same_interval {
            junction_smoothness(&fr.pieces()[i - 1], &fr.pieces()[i], x)
        } else {
            Smoothness::Discontinuous
        };
        breakpoints.push(BreakpointCheck { x: x.clone(), f: sf, phi: sp, gains_two: sp >= sf.plus_two() });
    }
    let c1 = breakpoints.iter().all(|b| b.phi >= Smoothness::Ck(1));
    let probes = phi
        .pieces()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (a, b) = phi.interval(i);
            let x = (a + b) / int(2);
            let delta = (b - a) / int(4);
            let second_difference =
                (p.eval(&(&x + &delta)) - p.eval(&x) * int(2) + p.eval(&(&x - &delta))) / (&delta * &delta);
            let mut taylor = Rational::zero();
            let mut j = 0usize;
            loop {
                let d = p.nth_derivative(2 * j + 2);
                if d.is_zero() {
                    break;
                }
                let pow = num_traits::pow(delta.clone(), 2 * j);
                taylor += d.eval(&x) * int(2) * pow / Rational::from_integer(factorial(2 * j + 2));
                j += 1;
            }
            let expected = if same_interval { fr.pieces()[i].eval(&x) / &ds } else { Rational::zero() };
            let ok = same_interval && second_difference == taylor && p.nth_derivative(2).eval(&x) == expected;
            StencilProbe { x, delta, second_difference, taylor, expected, ok }
        })
        .collect();
    RegularityReport { ode_identity, convex, c1, breakpoints, probes }
}

/// MA measure of a PA convex function of one variable: one atom per interior kink with
/// mass equal to the slope jump.
pub fn discrete_ma_1d(phi: &PAConvexFunction) -> Result<AtomicMeasure> {
    if phi.ambient_dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: phi.ambient_dim() });
    }
    ma_measure(phi)
}

/// Interval `[a, b]` as a polytope in Q^1.
pub fn interval(a: &Rational, b: &Rational) -> Polytope {
    Polytope::cube(1, a, b)
}

/// Comparison of the discrete MA mass of the step-`step` PA interpolant of `phi`
/// against the exact mass `phi'(b) - phi'(a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassComparison {
    pub step: Rational,
    pub discrete: Rational,
    pub exact: Rational,
    /// `phi'(a + step) - phi'(a) + phi'(b) - phi'(b - step)`; bounds `|discrete - exact|`
    /// for convex `phi` when `step` divides `b - a`.
    pub bound: Rational,
}

impl MassComparison {
    pub fn error(&self) -> Rational {
        (&self.discrete - &self.exact).abs()
    }
}

pub fn compare_with_ma(sol: &Solution1D, step: &Rational) -> Result<MassComparison> {
    let phi = sol.phi.clone();
    let (a, b) = (phi.start().clone(), phi.end().clone());
    let dom = interval(&a, &b);
    let eval_phi = phi.clone();
    let f = ConvexEvaluator::new(dom, move |x| eval_phi.eval(&x[0]).expect("probe inside interval"));
    let h = pa_from_grid(&f, step)?;
    let discrete = discrete_ma_1d(&h)?.total_mass().clone();
    let d = phi.derivative();
    let at = |x: &Rational| d.eval(x).expect("inside interval");
    let exact = at(&b) - at(&a);
    let lo = (&a + step).min(b.clone());
    let hi = (&b - step).max(a.clone());
    let bound = at(&lo) - at(&a) + at(&b) - at(&hi);
    Ok(MassComparison { step: step.clone(), discrete, exact, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::AffineFunctional;
    use crate::rational::rat;

    fn poly(c: &[Rational]) -> Polynomial {
        Polynomial::new(c.to_vec())
    }

    fn unit(p: Polynomial) -> PiecewisePolynomial {
        PiecewisePolynomial::single(int(0), int(1), p).unwrap()
    }

    #[test]
    fn constant_density() {
        let s = solve_1d(&unit(poly(&[int(1)])), 1, &Anchor::origin()).unwrap();
        assert_eq!(s.phi.pieces()[0], poly(&[int(0), int(0), rat(1, 2)]));
    }

    #[test]
    fn linear_density_gives_cube() {
        let s = solve_1d(&unit(poly(&[int(0), int(6)])), 1, &Anchor::origin()).unwrap();
        assert_eq!(s.phi.pieces()[0], poly(&[int(0), int(0), int(0), int(1)]));
    }

    #[test]
    fn multiplier_scales() {
        let s = solve_1d(&unit(poly(&[int(2)])), 2, &Anchor::origin()).unwrap();
        assert_eq!(s.phi.pieces()[0], poly(&[int(0), int(0), rat(1, 2)]));
    }

    #[test]
    fn anchors_differ_by_affine() {
        let f = PiecewisePolynomial::new(
            vec![int(0), rat(1, 3), int(1)],
            vec![poly(&[int(1), int(1)]), poly(&[int(0), int(0), int(3)])],
        )
        .unwrap();
        let s1 = solve_1d(&f, 3, &Anchor::origin()).unwrap();
        let s2 = solve_1d(&f, 3, &Anchor::new(rat(2, 3), int(5), rat(-1, 2))).unwrap();
        let diff = s1.phi.add(&s2.phi.scale(&int(-1))).unwrap().simplified();
        assert_eq!(diff.pieces().len(), 1);
        assert!(diff.pieces()[0].degree().unwrap_or(0) <= 1);
        assert_eq!(s2.phi.eval(&rat(2, 3)), Some(int(5)));
        assert_eq!(s2.phi.derivative().eval(&rat(2, 3)), Some(rat(-1, 2)));
    }

    #[test]
    fn rejects_negative_density_and_bad_anchor() {
        let f = unit(poly(&[rat(-1, 2), int(1)]));
        assert!(matches!(solve_1d(&f, 1, &Anchor::origin()), Err(Error::NegativeDensity(..))));
        let g = unit(poly(&[int(1)]));
        assert!(matches!(solve_1d(&g, 1, &Anchor::new(int(2), int(0), int(0))), Err(Error::OutsideDomain(_))));
        assert!(solve_1d(&g, 0, &Anchor::origin()).is_err());
    }

    #[test]
    fn regularity_of_smooth_solution() {
        let f = unit(poly(&[int(1)]));
        let s = solve_1d(&f, 1, &Anchor::origin()).unwrap();
        let r = verify_regularity(&s, &f);
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn jump_density_keeps_c1() {
        let f = PiecewisePolynomial::new(vec![int(0), rat(1, 2), int(1)], vec![Polynomial::zero(), poly(&[int(1)])]).unwrap();
        let s = solve_1d(&f, 1, &Anchor::origin()).unwrap();
        let r = verify_regularity(&s, &f);
        assert!(r.all_pass(), "{r:?}");
        assert!(r.c1);
        assert_eq!(r.second_derivative_jumps(), vec![rat(1, 2)]);
        assert_eq!(r.breakpoints[0].phi, Smoothness::Ck(1));
    }

    #[test]
    fn kink_fails_c1() {
        let f = unit(poly(&[int(1)]));
        let mut s = solve_1d(&f, 1, &Anchor::origin()).unwrap();
        let kink = PiecewisePolynomial::new(vec![int(0), rat(1, 2), int(1)], vec![Polynomial::zero(), poly(&[rat(-1, 2), int(1)])]).unwrap();
        s.phi = s.phi.add(&kink).unwrap();
        let r = verify_regularity(&s, &f);
        assert!(!r.c1);
        assert!(!r.all_pass());
        assert_eq!(r.breakpoints[0].phi, Smoothness::Ck(0));
    }

    #[test]
    fn stencil_is_exact_for_quartics() {
        let f = unit(poly(&[int(0), int(0), int(12)]));
        let s = solve_1d(&f, 1, &Anchor::origin()).unwrap();
        let r = verify_regularity(&s, &f);
        assert!(r.probes.iter().all(|p| p.ok));
        // x^4 has a nonzero fourth-order stencil term
        assert_ne!(r.probes[0].second_difference, r.probes[0].expected);
    }

    #[test]
    fn discrete_ma_examples() {
        let dom = interval(&int(-1), &int(1));
        let relu = PAConvexFunction::new(
            vec![AffineFunctional::new(vec![int(0)], int(0)), AffineFunctional::new(vec![int(1)], int(0))],
            dom.clone(),
        )
        .unwrap();
        let mu = discrete_ma_1d(&relu).unwrap();
        assert_eq!(mu.atoms(), &[(RationalPoint::new(vec![int(0)]), int(1))]);
        let affine = PAConvexFunction::new(vec![AffineFunctional::new(vec![int(3)], int(1))], dom).unwrap();
        assert!(discrete_ma_1d(&affine).unwrap().is_empty());
    }

    #[test]
    fn interpolant_of_half_square() {
        let f = unit(poly(&[int(1)]));
        let s = solve_1d(&f, 1, &Anchor::origin()).unwrap();
        for m in [4i64, 8, 64] {
            let c = compare_with_ma(&s, &rat(1, m)).unwrap();
            assert_eq!(c.discrete, rat(m - 1, m));
            assert_eq!(c.exact, int(1));
            assert!(c.error() <= c.bound);
        }
    }
}
