//! Univariate polynomials over Q and piecewise polynomials on an interval.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational};

/// Coefficients in ascending degree; no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![] }
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Polynomial::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * int(k as i64)).collect())
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    /// Antiderivative vanishing at `x0`.
    pub fn integral_from(&self, x0: &Rational) -> Self {
        let mut v = vec![Rational::zero()];
        v.extend(self.coeffs.iter().enumerate().map(|(k, c)| c / int(k as i64 + 1)));
        let p = Polynomial::new(v);
        let c = p.eval(x0);
        p - Polynomial::constant(c)
    }

    pub fn scale(&self, t: &Rational) -> Self {
        Polynomial::new(self.coeffs.iter().map(|c| c * t).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Rational::one() / self.leading()))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![Rational::zero(); r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap() / &lead;
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] -= &c * dc;
            }
            q[k] = c;
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        (Polynomial::new(q), Polynomial::new(r))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's algorithm: monic square-free `a_1, a_2, ...` with `self = c * prod a_i^i`.
    pub fn square_free_decomposition(&self) -> Vec<Polynomial> {
        if self.degree().unwrap_or(0) == 0 {
            return vec![];
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.divrem(&a0).0;
        let mut c = df.divrem(&a0).0;
        let mut d = c - b.derivative();
        let mut out = Vec::new();
        loop {
            let a = b.gcd(&d);
            b = b.divrem(&a).0;
            c = d.divrem(&a).0;
            out.push(a);
            if b.degree() == Some(0) {
                break;
            }
            d = c - b.derivative();
        }
        out
    }

    /// Sturm chain of a square-free polynomial.
    fn sturm_chain(&self) -> Vec<Polynomial> {
        let mut chain = vec![self.clone(), self.derivative()];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let r = chain[n - 2].divrem(&chain[n - 1]).1;
            chain.push(-r);
        }
        chain.pop();
        chain
    }

    /// Number of distinct real roots in the open interval `(a, b)`.
    pub fn count_roots(&self, a: &Rational, b: &Rational) -> usize {
        if self.degree().unwrap_or(0) == 0 || a >= b {
            return 0;
        }
        let g = self.divrem(&self.gcd(&self.derivative())).0;
        let chain = g.sturm_chain();
        let variations = |x: &Rational| {
            let signs: Vec<bool> =
                chain.iter().map(|p| p.eval(x)).filter(|v| !v.is_zero()).map(|v| v.is_positive()).collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        // the classical count is over (a, b]
        let half_open = variations(a) - variations(b);
        half_open - usize::from(g.eval(b).is_zero())
    }

    /// Product of the odd-multiplicity square-free factors: the sign-changing part.
    pub fn odd_part(&self) -> Polynomial {
        self.square_free_decomposition()
            .into_iter()
            .enumerate()
            .filter(|(i, _)| i % 2 == 0)
            .fold(Polynomial::constant(int(1)), |acc, (_, p)| acc * p)
    }

    /// A point of `[a, b]` where the polynomial is negative, if any.
    pub fn negative_witness(&self, a: &Rational, b: &Rational) -> Option<Rational> {
        if self.is_zero() {
            return None;
        }
        for x in [a, b] {
            if self.eval(x).is_negative() {
                return Some(x.clone());
            }
        }
        if a >= b {
            return None;
        }
        let deg = self.degree().unwrap();
        let width = b - a;
        if self.odd_part().count_roots(a, b) == 0 {
            // constant sign on (a, b): probe a point off the finitely many roots
            for k in 1..=deg + 1 {
                let x = a + &width * Rational::new((k as i64).into(), (deg as i64 + 2).into());
                let v = self.eval(&x);
                if !v.is_zero() {
                    return v.is_negative().then_some(x);
                }
            }
            unreachable!("nonzero polynomial vanishing at deg + 1 points");
        }
        // a sign change inside: the negative set is a nonempty open set, refine until hit
        let mut parts: i64 = 2;
        loop {
            for k in 1..parts {
                let x = a + &width * Rational::new(k.into(), parts.into());
                if self.eval(&x).is_negative() {
                    return Some(x);
                }
            }
            parts *= 2;
        }
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, o: Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = Rational::zero();
        Polynomial::new(
            (0..n).map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z)).collect(),
        )
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, o: Polynomial) -> Polynomial {
        self + (-o)
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, o: Polynomial) -> Polynomial {
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero();
        }
        let mut v = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Polynomial::new(v)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                write!(f, "{}", if neg { "-" } else { "" })?;
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = a.is_one() && k > 0;
            if !unit {
                write!(f, "{}", format_rational(&a))?;
            }
            match k {
                0 => {}
                1 => write!(f, "{}x", if unit { "" } else { "*" })?,
                _ => write!(f, "{}x^{k}", if unit { "" } else { "*" })?,
            }
        }
        Ok(())
    }
}

/// Smoothness of a piecewise polynomial at a breakpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Smoothness {
    Discontinuous,
    /// Derivatives of order `0..=k` agree from both sides, order `k + 1` does not.
    Ck(usize),
    /// Same polynomial on both sides.
    Smooth,
}

impl Smoothness {
    /// Two orders smoother; `Discontinuous` counts as order -1.
    pub fn plus_two(self) -> Smoothness {
        match self {
            Smoothness::Discontinuous => Smoothness::Ck(1),
            Smoothness::Ck(k) => Smoothness::Ck(k + 2),
            Smoothness::Smooth => Smoothness::Smooth,
        }
    }
}

impl fmt::Display for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Smoothness::Discontinuous => write!(f, "discontinuous"),
            Smoothness::Ck(k) => write!(f, "C^{k}"),
            Smoothness::Smooth => write!(f, "C^inf"),
        }
    }
}

/// Smoothness across `x` of `left` (used to the left) and `right`.
pub fn junction_smoothness(left: &Polynomial, right: &Polynomial, x: &Rational) -> Smoothness {
    if left == right {
        return Smoothness::Smooth;
    }
    let top = left.coeffs.len().max(right.coeffs.len());
    let (mut l, mut r) = (left.clone(), right.clone());
    let mut order = None;
    for k in 0..top {
        if l.eval(x) != r.eval(x) {
            break;
        }
        order = Some(k);
        l = l.derivative();
        r = r.derivative();
    }
    match order {
        None => Smoothness::Discontinuous,
        Some(k) => Smoothness::Ck(k),
    }
}

/// Polynomials in the absolute variable `x` on consecutive intervals.
/// Values at breakpoints need not agree; `eval` uses the piece to the right
/// except at the right end of the interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<Rational>,
    pieces: Vec<Polynomial>,
}

impl PiecewisePolynomial {
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Polynomial>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::EmptyInput("pieces"));
        }
        if breakpoints.len() != pieces.len() + 1 {
            return Err(Error::WrongCount { expected: pieces.len() + 1, found: breakpoints.len() });
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("breakpoints must be strictly increasing".into()));
        }
        Ok(PiecewisePolynomial { breakpoints, pieces })
    }

    /// One polynomial on `[a, b]`.
    pub fn single(a: Rational, b: Rational, p: Polynomial) -> Result<Self> {
        PiecewisePolynomial::new(vec![a, b], vec![p])
    }

    pub fn constant(a: Rational, b: Rational, c: Rational) -> Result<Self> {
        PiecewisePolynomial::single(a, b, Polynomial::constant(c))
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    pub fn start(&self) -> &Rational {
        &self.breakpoints[0]
    }

    pub fn end(&self) -> &Rational {
        self.breakpoints.last().unwrap()
    }

    /// Interval `[x_i, x_{i+1}]` of piece `i`.
    pub fn interval(&self, i: usize) -> (&Rational, &Rational) {
        (&self.breakpoints[i], &self.breakpoints[i + 1])
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.pieces.iter().filter_map(Polynomial::degree).max()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.start() <= x && x <= self.end()
    }

    /// Index of the piece used for `x`.
    pub fn piece_index(&self, x: &Rational) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let i = self.breakpoints.partition_point(|b| b <= x);
        Some(i.saturating_sub(1).min(self.pieces.len() - 1))
    }

    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        self.piece_index(x).map(|i| self.pieces[i].eval(x))
    }

    pub fn derivative(&self) -> Self {
        PiecewisePolynomial {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(Polynomial::derivative).collect(),
        }
    }

    pub fn scale(&self, t: &Rational) -> Self {
        PiecewisePolynomial { breakpoints: self.breakpoints.clone(), pieces: self.pieces.iter().map(|p| p.scale(t)).collect() }
    }

    /// Same function over the union of both breakpoint sets.
    pub fn refine(&self, extra: &[Rational]) -> Self {
        let mut bps: Vec<Rational> =
            self.breakpoints.iter().chain(extra.iter().filter(|x| self.start() < *x && *x < self.end())).cloned().collect();
        bps.sort();
        bps.dedup();
        let pieces = bps
            .windows(2)
            .map(|w| {
                let i = self.breakpoints.partition_point(|b| b <= &w[0]) - 1;
                self.pieces[i].clone()
            })
            .collect();
        PiecewisePolynomial { breakpoints: bps, pieces }
    }

    /// Pointwise sum; both must live on the same interval.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.start() != other.start() || self.end() != other.end() {
            return Err(Error::DomainMismatch);
        }
        let a = self.refine(&other.breakpoints);
        let b = other.refine(&self.breakpoints);
        Ok(PiecewisePolynomial {
            breakpoints: a.breakpoints,
            pieces: a.pieces.into_iter().zip(b.pieces).map(|(p, q)| p + q).collect(),
        })
    }

    /// Smoothness at each interior breakpoint.
    pub fn smoothness(&self) -> Vec<(Rational, Smoothness)> {
        (1..self.pieces.len())
            .map(|i| {
                let x = &self.breakpoints[i];
                (x.clone(), junction_smoothness(&self.pieces[i - 1], &self.pieces[i], x))
            })
            .collect()
    }

    pub fn is_continuous(&self) -> bool {
        self.smoothness().iter().all(|(_, s)| *s != Smoothness::Discontinuous)
    }

    /// Merges neighbouring pieces carrying the same polynomial.
    pub fn simplified(&self) -> Self {
        let mut bps = vec![self.breakpoints[0].clone()];
        let mut pieces: Vec<Polynomial> = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            if pieces.last() == Some(p) {
                *bps.last_mut().unwrap() = self.breakpoints[i + 1].clone();
            } else {
                pieces.push(p.clone());
                bps.push(self.breakpoints[i + 1].clone());
            }
        }
        PiecewisePolynomial { breakpoints: bps, pieces }
    }
}

impl fmt::Display for PiecewisePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pieces.iter().enumerate() {
            let (a, b) = self.interval(i);
            writeln!(f, "[{}, {}]: {}", format_rational(a), format_rational(b), p)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::new(c.iter().map(|&v| int(v)).collect())
    }

    #[test]
    fn arithmetic() {
        let a = p(&[1, 1]);
        let b = p(&[-1, 1]);
        assert_eq!(a.clone() * b.clone(), p(&[-1, 0, 1]));
        assert_eq!(a.clone() + b.clone(), p(&[0, 2]));
        assert_eq!(a - b, p(&[2]));
        assert_eq!(p(&[0, 0, 3]).derivative(), p(&[0, 6]));
        assert_eq!(p(&[0, 6]).integral_from(&int(1)), p(&[-3, 0, 3]));
        assert_eq!(p(&[1, 2, 3]).eval(&int(2)), int(17));
    }

    #[test]
    fn division_and_gcd() {
        let f = p(&[-1, 0, 0, 1]);
        let (q, r) = f.divrem(&p(&[-1, 1]));
        assert_eq!(q, p(&[1, 1, 1]));
        assert!(r.is_zero());
        assert_eq!(p(&[-1, 0, 1]).gcd(&p(&[2, 2])), p(&[1, 1]));
    }

    #[test]
    fn yun_decomposition() {
        // (x-1)(x+2)^2 x^3
        let f = p(&[-1, 1]) * p(&[2, 1]) * p(&[2, 1]) * p(&[0, 1]) * p(&[0, 1]) * p(&[0, 1]);
        let parts = f.square_free_decomposition();
        assert_eq!(parts, vec![p(&[-1, 1]), p(&[2, 1]), p(&[0, 1])]);
        assert_eq!(f.odd_part(), p(&[-1, 1]) * p(&[0, 1]));
    }

    #[test]
    fn sturm_counts() {
        let f = p(&[0, -1, 0, 1]); // x^3 - x
        assert_eq!(f.count_roots(&int(-2), &int(2)), 3);
        assert_eq!(f.count_roots(&int(-1), &int(1)), 1);
        assert_eq!(f.count_roots(&rat(1, 2), &int(1)), 0);
        assert_eq!(p(&[1, 0, 1]).count_roots(&int(-5), &int(5)), 0);
        assert_eq!((p(&[0, 1]) * p(&[0, 1])).count_roots(&int(-1), &int(1)), 1);
    }

    #[test]
    fn negativity() {
        assert_eq!(p(&[0, 1]).negative_witness(&int(0), &int(1)), None);
        assert!(p(&[0, 1]).negative_witness(&int(-1), &int(1)).is_some());
        // (x - 1/2)^2 touches zero but stays nonnegative
        let sq = Polynomial::new(vec![rat(1, 4), int(-1), int(1)]);
        assert_eq!(sq.negative_witness(&int(0), &int(1)), None);
        // negative only on a tiny window
        let tiny = sq - Polynomial::constant(rat(1, 1_000_000));
        let w = tiny.negative_witness(&int(0), &int(1)).unwrap();
        assert!(tiny.eval(&w).is_negative());
    }

    #[test]
    fn piecewise_refine_and_add() {
        let f = PiecewisePolynomial::new(vec![int(0), rat(1, 2), int(1)], vec![p(&[0]), p(&[1])]).unwrap();
        let g = PiecewisePolynomial::single(int(0), int(1), p(&[0, 1])).unwrap();
        let s = f.add(&g).unwrap();
        assert_eq!(s.breakpoints(), &[int(0), rat(1, 2), int(1)]);
        assert_eq!(s.eval(&rat(3, 4)), Some(rat(7, 4)));
        assert_eq!(s.eval(&int(1)), Some(int(2)));
        assert_eq!(s.eval(&int(2)), None);
        assert_eq!(f.smoothness(), vec![(rat(1, 2), Smoothness::Discontinuous)]);
        assert_eq!(g.refine(&[rat(1, 3)]).simplified(), g);
    }

    #[test]
    fn junction_orders() {
        let x = int(0);
        assert_eq!(junction_smoothness(&p(&[0]), &p(&[0, 0, 1]), &x), Smoothness::Ck(1));
        assert_eq!(junction_smoothness(&p(&[0]), &p(&[0, 1]), &x), Smoothness::Ck(0));
        assert_eq!(junction_smoothness(&p(&[0, 0, 0, 1]), &p(&[0]), &x), Smoothness::Ck(2));
        assert_eq!(junction_smoothness(&p(&[1]), &p(&[1]), &x), Smoothness::Smooth);
    }

    #[test]
    fn display() {
        assert_eq!(Polynomial::new(vec![int(0), int(-1), rat(1, 2)]).to_string(), "1/2*x^2 - x");
        assert_eq!(Polynomial::zero().to_string(), "0");
    }
}
