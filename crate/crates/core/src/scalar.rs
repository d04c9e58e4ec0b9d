use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Numeric field the function-level algorithms are generic over.
///
/// Exact types (rationals) make the cohomological and martingale identities
/// hold with equality; floating types trade that for speed.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// Whether arithmetic in this type is exact.
    const EXACT: bool;

    fn from_real(x: f64) -> Self;
    fn to_real(&self) -> f64;

    fn from_int(x: i64) -> Self {
        Self::from_real(x as f64)
    }

    fn from_bigint(x: &BigInt) -> Self {
        Self::from_real(x.to_f64().unwrap_or(f64::INFINITY))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_real(x: f64) -> Self {
        x
    }
    fn to_real(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_real(x: f64) -> Self {
        x as f32
    }
    fn to_real(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    /// Exact binary expansion of `x`; non-finite input maps to zero.
    fn from_real(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(0.into()))
    }
    fn to_real(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // numerator/denominator too large for a direct conversion
            let n = self.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }
    fn from_int(x: i64) -> Self {
        <BigRational as FromPrimitive>::from_i64(x).expect("i64 is representable")
    }
    fn from_bigint(x: &BigInt) -> Self {
        BigRational::from_integer(x.clone())
    }
}

/// Parse `"p/q"`, `"p"` or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q == BigInt::from(0) {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(n));
    }
    // decimal: split on the point so 0.3 becomes exactly 3/10
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s),
    };
    let (int, frac) = body.split_once('.')?;
    if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() && int.is_empty() {
        return None;
    }
    let digits: BigInt = format!("{}{}", if int.is_empty() { "0" } else { int }, frac)
        .parse()
        .ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(digits * sign, denom))
}

/// `"p/q"` rendering used by every serialized rational.
pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings() {
        let x = parse_rational("-3/6").unwrap();
        assert_eq!(format_rational(&x), "-1/2");
        assert_eq!(parse_rational("0.3").unwrap(), BigRational::new(3.into(), 10.into()));
        assert_eq!(parse_rational("-1.25").unwrap(), BigRational::new((-5).into(), 4.into()));
        assert_eq!(parse_rational("7").unwrap(), BigRational::from_integer(7.into()));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("abc").is_none());
    }

    #[test]
    fn float_round_trip_is_exact() {
        let x = <BigRational as Scalar>::from_real(0.1);
        assert_eq!(Scalar::to_real(&x), 0.1);
        assert_eq!(<f64 as Scalar>::from_int(-4), -4.0);
    }
}
