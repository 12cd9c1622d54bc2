//! Exact number crunching for the counting pipelines.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// `sum z_t p^t`.
pub fn forward_eval(p: &BigRational, z: &[BigUint]) -> BigRational {
    let mut acc = BigRational::zero();
    for zt in z.iter().rev() {
        acc = acc * p + BigRational::from_integer(BigInt::from(zt.clone()));
    }
    acc
}

/// Recovers `z_0..z_m` from `s = sum z_t p^t`, assuming nonnegative integers
/// with `p > sum z_t`. Works from the top digit down: `z_i` is the floor of
/// what remains divided by `p^i`. If the assumption fails the output is
/// meaningless, though a negative remainder is reported as an error.
pub fn digit_extract(p: &BigRational, m: usize, s: &BigRational) -> Result<Vec<BigUint>> {
    let mut rem = s.clone();
    let mut z = vec![BigUint::zero(); m + 1];
    for i in (0..=m).rev() {
        let pi = num_traits::pow(p.clone(), i);
        let zi = (&rem / &pi).floor().to_integer();
        if zi.is_negative() {
            return Err(Error::NegativeIntermediate);
        }
        rem -= &pi * BigRational::from_integer(zi.clone());
        z[i] = zi.to_biguint().expect("nonnegative");
    }
    if rem.is_negative() {
        return Err(Error::NegativeIntermediate);
    }
    Ok(z)
}

/// Smallest `r >= 1` with `num^r > den^r * bound`.
pub fn smallest_exponent(num: u64, den: u64, bound: &BigUint) -> usize {
    assert!(num > den, "ratio must exceed 1");
    let (n, d) = (BigUint::from(num), BigUint::from(den));
    let mut r = 1;
    let (mut np, mut dp) = (n.clone(), d.clone());
    while np <= &dp * bound {
        np *= &n;
        dp *= &d;
        r += 1;
    }
    r
}

/// Solves `sum_t z_t points[i]^t = values[i]` exactly. Rows are scaled to
/// integers and reduced by fraction-free (Bareiss) elimination; the
/// triangular system is then solved over the rationals.
pub fn vandermonde_solve(points: &[BigRational], values: &[BigRational]) -> Result<Vec<BigRational>> {
    let n = points.len();
    if values.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: values.len(),
        });
    }
    for i in 0..n {
        if points[i + 1..].contains(&points[i]) {
            return Err(Error::DuplicatePoints);
        }
    }
    // integer augmented matrix
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row: Vec<BigRational> = Vec::with_capacity(n + 1);
        let mut pw = BigRational::one();
        for _ in 0..n {
            row.push(pw.clone());
            pw *= &points[i];
        }
        row.push(values[i].clone());
        let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        a.push(
            row.iter()
                .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
                .collect(),
        );
    }
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n)
            .find(|&i| !a[i][k].is_zero())
            .ok_or_else(|| Error::Invariant("singular Vandermonde system".into()))?;
        a.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let mut z = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = BigRational::from_integer(a[i][n].clone());
        for j in i + 1..n {
            acc -= BigRational::from_integer(a[i][j].clone()) * &z[j];
        }
        z[i] = acc / BigRational::from_integer(a[i][i].clone());
    }
    Ok(z)
}

/// Converts a rational that must be a nonnegative integer.
pub(crate) fn to_natural(x: &BigRational) -> Result<BigUint> {
    if !x.is_integer() || x.is_negative() {
        return Err(Error::Invariant(format!("{x} is not a nonnegative integer")));
    }
    Ok(x.to_integer().to_biguint().expect("nonnegative"))
}

pub(crate) fn ratio(num: u64, den: u64, r: usize) -> BigRational {
    num_traits::pow(
        BigRational::new(BigInt::from(num), BigInt::from(den)),
        r,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn nat(xs: &[u32]) -> Vec<BigUint> {
        xs.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn digits() {
        assert_eq!(digit_extract(&q(5, 1), 3, &q(132, 1)).unwrap(), nat(&[2, 1, 0, 1]));
        assert_eq!(digit_extract(&q(256, 81), 2, &q(92833, 6561)).unwrap(), nat(&[1, 1, 1]));
        assert_eq!(digit_extract(&q(10, 1), 2, &q(0, 1)).unwrap(), nat(&[0, 0, 0]));
        assert_eq!(digit_extract(&q(10, 1), 2, &q(-3, 1)), Err(Error::NegativeIntermediate));
    }

    #[test]
    fn exponents() {
        assert_eq!(smallest_exponent(4, 3, &BigUint::from(8u8)), 8);
        assert_eq!(smallest_exponent(2, 1, &BigUint::from(8u8)), 4);
    }

    #[test]
    fn vandermonde() {
        assert_eq!(vandermonde_solve(&[q(1, 1), q(2, 1)], &[q(3, 1), q(5, 1)]).unwrap(), vec![q(1, 1), q(2, 1)]);
        assert_eq!(vandermonde_solve(&[q(1, 1)], &[q(7, 1)]).unwrap(), vec![q(7, 1)]);
        let pts = [q(4, 3), q(16, 9), q(64, 27)];
        let z = nat(&[1, 0, 2]);
        let vals: Vec<_> = pts.iter().map(|p| forward_eval(p, &z)).collect();
        let got = vandermonde_solve(&pts, &vals).unwrap();
        assert_eq!(got, vec![q(1, 1), q(0, 1), q(2, 1)]);
        assert_eq!(vandermonde_solve(&[q(1, 1), q(1, 1)], &[q(1, 1), q(2, 1)]), Err(Error::DuplicatePoints));
    }
}
