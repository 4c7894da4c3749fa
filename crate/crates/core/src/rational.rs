//! Exact rational helpers: parsing, formatting and small dense solves.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Parses `"p/q"`, an integer string, or a finite decimal string such as `"-0.125"`.
pub fn parse(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {t:?}")))?;
        let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {t:?}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {t:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, fracpart)) = t.split_once('.') {
        let neg = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !fracpart.chars().all(|c| c.is_ascii_digit())
            || !whole_digits.chars().all(|c| c.is_ascii_digit())
            || (whole_digits.is_empty() && fracpart.is_empty())
        {
            return Err(Error::Parse(format!("bad decimal {t:?}")));
        }
        let digits = format!("{whole_digits}{fracpart}");
        let mag: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().unwrap() };
        let den = num_traits::pow(BigInt::from(10), fracpart.len());
        let r = Rational::new(mag, den);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = t.parse().map_err(|_| Error::Parse(format!("bad rational {t:?}")))?;
    Ok(Rational::from_integer(n))
}

/// Canonical text form: `"p/q"` in lowest terms, or the bare integer.
pub fn format(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// Determinant by Gaussian elimination over the rationals.
pub fn det(mut a: Vec<Vec<Rational>>) -> Rational {
    let n = a.len();
    let mut d = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            d = -d;
        }
        let p = a[col][col].clone();
        d *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &p;
            for c in col..n {
                let sub = &f * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    d
}

/// Solves the square system `a x = b`; `None` when `a` is singular.
pub fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        b.swap(piv, col);
        let p = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &p;
            for c in col..n {
                let sub = &f * &a[col][c];
                a[r][c] -= sub;
            }
            let sub = &f * &b[col];
            b[r] -= sub;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Rank of a (possibly rectangular) rational matrix.
pub fn rank(mut a: Vec<Vec<Rational>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut r = 0;
    for col in 0..cols {
        let Some(piv) = (r..rows).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(piv, r);
        let p = a[r][col].clone();
        for i in r + 1..rows {
            if a[i][col].is_zero() {
                continue;
            }
            let f = &a[i][col] / &p;
            for c in col..cols {
                let sub = &f * &a[r][c];
                a[i][c] -= sub;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

pub fn is_nonneg(r: &Rational) -> bool {
    !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse("3/2").unwrap(), frac(3, 2));
        assert_eq!(parse("-6/4").unwrap(), frac(-3, 2));
        assert_eq!(parse("7").unwrap(), int(7));
        assert_eq!(parse("0.125").unwrap(), frac(1, 8));
        assert_eq!(parse("-1.5").unwrap(), frac(-3, 2));
        assert_eq!(parse(".5").unwrap(), frac(1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("1.2.3").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format(&frac(4, 2)), "2");
        assert_eq!(format(&frac(-2, 6)), "-1/3");
    }

    #[test]
    fn det_and_solve() {
        let a = vec![vec![int(1), int(2)], vec![int(3), int(4)]];
        assert_eq!(det(a.clone()), int(-2));
        let x = solve(a, vec![int(5), int(6)]).unwrap();
        assert_eq!(x, vec![int(-4), frac(9, 2)]);
        assert!(solve(vec![vec![int(1), int(2)], vec![int(2), int(4)]], vec![int(0), int(0)]).is_none());
        assert_eq!(rank(vec![vec![int(1), int(2)], vec![int(2), int(4)]]), 1);
    }
}
