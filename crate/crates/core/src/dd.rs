//! Double description method: extreme rays of a pointed cone `{y : A y >= 0}`.

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{primitive_integer_vector, Rational};

struct Ray {
    v: Vec<BigInt>,
    zeros: FixedBitSet,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

fn normalize(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        v
    } else {
        v.into_iter().map(|x| x / &g).collect()
    }
}

/// Extreme rays of `{y in Q^D : row . y >= 0 for every row}` as primitive integer vectors.
///
/// The row matrix must have full column rank (the cone is pointed); otherwise the cone
/// has a lineality space and `Error::Unbounded` is returned.
pub(crate) fn extreme_rays(rows: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
    let Some(d) = rows.first().map(Vec::len) else {
        return Err(Error::Unbounded);
    };
    let m = rows.len();

    // Greedy choice of d independent rows for the initial simplicial cone.
    let mut basis: Vec<usize> = Vec::with_capacity(d);
    let mut echelon: Vec<Vec<Rational>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut cand = echelon.clone();
        cand.push(row.iter().map(|x| Rational::from_integer(x.clone())).collect());
        let (reduced, pivots) = linalg::rref(cand);
        if pivots.len() > echelon.len() {
            echelon = reduced;
            basis.push(i);
            if basis.len() == d {
                break;
            }
        }
    }
    if basis.len() < d {
        return Err(Error::Unbounded);
    }

    let mat: Vec<Vec<Rational>> = basis
        .iter()
        .map(|&i| rows[i].iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    let mut rays: Vec<Ray> = Vec::with_capacity(d);
    for j in 0..d {
        let mut e = vec![Rational::zero(); d];
        e[j] = Rational::one();
        let col = linalg::solve(&mat, &e).ok_or_else(|| Error::Internal("singular basis".into()))?;
        let mut zeros = FixedBitSet::with_capacity(m);
        for (k, &bi) in basis.iter().enumerate() {
            if k != j {
                zeros.insert(bi);
            }
        }
        rays.push(Ray { v: primitive_integer_vector(&col), zeros });
    }

    let mut in_basis = FixedBitSet::with_capacity(m);
    for &b in &basis {
        in_basis.insert(b);
    }
    let min_common = d.saturating_sub(2);

    for (ri, row) in rows.iter().enumerate() {
        if in_basis.contains(ri) {
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|r| dot(row, &r.v)).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        if neg.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if vals[k].is_zero() {
                    r.zeros.insert(ri);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();

        let mut created = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let mut common = rays[p].zeros.clone();
                common.intersect_with(&rays[n].zeros);
                if common.count_ones(..) < min_common {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(q, r)| q == p || q == n || !common.is_subset(&r.zeros));
                if !adjacent {
                    continue;
                }
                let vp = &vals[p];
                let vn = &vals[n];
                let v: Vec<BigInt> = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(a, b)| vp * a - vn * b)
                    .collect();
                common.insert(ri);
                created.push(Ray { v: normalize(v), zeros: common });
            }
        }

        let mut next = Vec::with_capacity(rays.len() + created.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if vals[k].is_negative() {
                continue;
            }
            if vals[k].is_zero() {
                r.zeros.insert(ri);
            }
            next.push(r);
        }
        next.extend(created);
        rays = next;
    }
    Ok(rays.into_iter().map(|r| r.v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(r: &[&[i64]]) -> Vec<Vec<BigInt>> {
        r.iter().map(|x| x.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    #[test]
    fn positive_orthant() {
        let r = extreme_rays(&rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])).unwrap();
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn square_cone() {
        // homogenized unit square: t>=0, x>=0, y>=0, t-x>=0, t-y>=0
        let r = extreme_rays(&rows(&[
            &[1, 0, 0],
            &[0, 1, 0],
            &[0, 0, 1],
            &[1, -1, 0],
            &[1, 0, -1],
        ]))
        .unwrap();
        let mut got: Vec<Vec<i64>> = r
            .iter()
            .map(|v| v.iter().map(|x| i64::try_from(x).unwrap()).collect())
            .collect();
        got.sort();
        assert_eq!(got, vec![vec![1, 0, 0], vec![1, 0, 1], vec![1, 1, 0], vec![1, 1, 1]]);
    }

    #[test]
    fn lineality_is_rejected() {
        assert!(matches!(extreme_rays(&rows(&[&[1, 0]])), Err(Error::Unbounded)));
    }
}
