//! Exact scalars: arbitrary-precision rationals and the quadratic field Q(√3).
//!
//! Every matrix entry handled by this crate is an element `a + b·√3` with
//! rational `a`, `b`. Since √3 is irrational the pair `(a, b)` is unique, so
//! structural equality is numeric equality. Entries such as `1/√3` are always
//! stored rationalized, i.e. as `(1/3)·√3`.
//!
//! The textual scalar grammar shared by dataset and trace files:
//!
//! ```text
//! scalar   := term | term sign term
//! term     := rational | rational "*" "sqrt3" | "sqrt3" | "-" "sqrt3"
//! rational := ["-"] digits | ["-"] digits "/" digits
//! sign     := "+" | "-"
//! ```
//!
//! Whitespace inside a scalar is ignored and `sqrt3` may occur at most once.
//! The canonical formatter ([`fmt::Display`]) never emits whitespace, so
//! canonical scalars can be used as whitespace-separated tokens.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always normalized (`gcd = 1`, denominator > 0).
pub type Rational = num_rational::BigRational;

/// Errors from exact scalar arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
}

/// A scalar that failed to parse, with the byte offset where parsing stopped.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at position {position}")]
pub struct ScalarParseError {
    pub position: usize,
    pub message: String,
}

impl ScalarParseError {
    pub(crate) fn new(position: usize, message: impl Into<String>) -> Self {
        Self {
            position,
            message: message.into(),
        }
    }
}

/// Builds a rational from a numerator/denominator pair of machine integers.
///
/// Panics if `den` is zero.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// The real number `a + b·√3`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct QuadExt {
    a: Rational,
    b: Rational,
}

impl QuadExt {
    pub fn new(a: Rational, b: Rational) -> Self {
        Self { a, b }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `√3` itself.
    pub fn sqrt3() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(Rational::from_integer(n.into()), Rational::zero())
    }

    pub fn from_rational(a: Rational) -> Self {
        Self::new(a, Rational::zero())
    }

    /// `num/den` as a rational element.
    pub fn frac(num: i64, den: i64) -> Self {
        Self::from_rational(rat(num, den))
    }

    /// `(num/den)·√3`.
    pub fn frac_sqrt3(num: i64, den: i64) -> Self {
        Self::new(Rational::zero(), rat(num, den))
    }

    /// Rational part.
    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    /// Coefficient of √3.
    pub fn sqrt3_part(&self) -> &Rational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Galois conjugate `a − b·√3`.
    pub fn conjugate(&self) -> Self {
        Self::new(self.a.clone(), -&self.b)
    }

    /// Field norm `a² − 3b²`; zero only for the zero element.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - Rational::from_integer(3.into()) * &self.b * &self.b
    }

    pub fn inv(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let norm = self.norm();
        Ok(Self::new(&self.a / &norm, -&self.b / &norm))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ArithError> {
        Ok(self * &rhs.inv()?)
    }

    /// Division by a nonzero machine integer.
    pub fn div_int(&self, k: i64) -> Self {
        assert!(k != 0, "division by zero");
        let k = Rational::from_integer(k.into());
        Self::new(&self.a / &k, &self.b / &k)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(&self.a * r, &self.b * r)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Sign of the real number `a + b·√3`: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sa == 0 || sb == 0 || sa == sb {
            return if sa != 0 { sa } else { sb };
        }
        // Opposite signs: compare a² with 3b².
        let lhs = &self.a * &self.a;
        let rhs = Rational::from_integer(3.into()) * &self.b * &self.b;
        if lhs > rhs {
            sa
        } else {
            sb
        }
    }

    /// Nearest double, within one unit in the last place.
    ///
    /// The value is evaluated with big-integer square roots at a working
    /// precision that is raised until at least 64 significant bits survive
    /// any cancellation between `a` and `b·√3`.
    pub fn to_f64(&self) -> f64 {
        if self.b.is_zero() {
            return self.a.to_f64().unwrap_or(f64::NAN);
        }
        // x = (num + rad·√3) / den
        let (p, q) = (self.a.numer(), self.a.denom());
        let (r, s) = (self.b.numer(), self.b.denom());
        let num = p * s;
        let rad = r * q;
        let den = q * s;
        let rad_sign = rad.sign();
        let rad_sq3 = BigInt::from(3) * &rad * &rad;

        let magnitude = num.bits().max(rad.bits() + 1) as i64;
        let mut shift = 66 + den.bits() as i64 - magnitude;
        loop {
            let (scaled_num, scaled_rad_sq3, scaled_den) = if shift >= 0 {
                let sh = shift as usize;
                (&num << sh, &rad_sq3 << (2 * sh), den.clone())
            } else {
                let sh = (-shift) as usize;
                (num.clone(), rad_sq3.clone(), &den << sh)
            };
            let root = scaled_rad_sq3.sqrt();
            let signed_root = if rad_sign == Sign::Minus { -root } else { root };
            let total = scaled_num + signed_root;
            let quotient = total.div_floor(&scaled_den);
            if quotient.bits() >= 64 {
                let mantissa = quotient.to_f64().unwrap_or(f64::NAN);
                return mul_pow2(mantissa, -shift);
            }
            shift += 64;
        }
    }
}

fn sign_of(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn mul_pow2(mut x: f64, mut exp: i64) -> f64 {
    while exp > 1000 {
        x *= 2f64.powi(1000);
        exp -= 1000;
    }
    while exp < -1000 {
        x *= 2f64.powi(-1000);
        exp += 1000;
    }
    x * 2f64.powi(exp as i32)
}

fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

fn fmt_sqrt3_term(b: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if b.is_one() {
        f.write_str("sqrt3")
    } else if (-b).is_one() {
        f.write_str("-sqrt3")
    } else {
        fmt_rational(b, f)?;
        f.write_str("*sqrt3")
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => fmt_rational(&self.a, f),
            (true, false) => fmt_sqrt3_term(&self.b, f),
            (false, false) => {
                fmt_rational(&self.a, f)?;
                if self.b.is_positive() {
                    f.write_str("+")?;
                    fmt_sqrt3_term(&self.b, f)
                } else {
                    f.write_str("-")?;
                    fmt_sqrt3_term(&-&self.b, f)
                }
            }
        }
    }
}

impl std::str::FromStr for QuadExt {
    type Err = ScalarParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_scalar(s)
    }
}

/// Parses a full scalar per the module-level grammar.
pub fn parse_scalar(text: &str) -> Result<QuadExt, ScalarParseError> {
    let mut cur = Cursor::new(text);
    let value = cur.scalar()?;
    cur.skip_ws();
    if !cur.at_end() {
        return Err(ScalarParseError::new(cur.pos, "unexpected trailing input"));
    }
    Ok(value)
}

/// Byte cursor over ASCII-oriented input, shared with the trace-expression parser.
pub(crate) struct Cursor<'a> {
    src: &'a [u8],
    pub(crate) pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Self {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    /// Next non-whitespace byte, without consuming it.
    pub(crate) fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    pub(crate) fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn looking_at(&mut self, kw: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(kw.as_bytes())
    }

    pub(crate) fn expect(&mut self, byte: u8) -> Result<(), ScalarParseError> {
        if self.eat(byte) {
            Ok(())
        } else {
            Err(ScalarParseError::new(
                self.pos,
                format!("expected '{}'", byte as char),
            ))
        }
    }

    pub(crate) fn digits(&mut self) -> Result<BigInt, ScalarParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ScalarParseError::new(start, "expected digits"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digit string parses"))
    }

    /// `["-"] digits ["/" digits]`, the optional sign already consumed by the caller.
    fn unsigned_rational(&mut self) -> Result<Rational, ScalarParseError> {
        let numer = self.digits()?;
        if self.eat(b'/') {
            let at = self.pos;
            let denom = self.digits()?;
            if denom.is_zero() {
                return Err(ScalarParseError::new(at, "zero denominator"));
            }
            Ok(Rational::new(numer, denom))
        } else {
            Ok(Rational::from_integer(numer))
        }
    }

    /// One `term`; returns the value and whether it carried `sqrt3`.
    pub(crate) fn term(&mut self) -> Result<(QuadExt, bool), ScalarParseError> {
        let negative = self.eat(b'-');
        if self.eat_keyword("sqrt3") {
            let b = if negative {
                -Rational::one()
            } else {
                Rational::one()
            };
            return Ok((QuadExt::new(Rational::zero(), b), true));
        }
        let mut r = self.unsigned_rational()?;
        if negative {
            r = -r;
        }
        let save = self.pos;
        if self.eat(b'*') {
            if self.eat_keyword("sqrt3") {
                return Ok((QuadExt::new(Rational::zero(), r), true));
            }
            // '*' belongs to the enclosing grammar (e.g. "2*Tr(...)").
            self.pos = save;
        }
        Ok((QuadExt::from_rational(r), false))
    }

    pub(crate) fn scalar(&mut self) -> Result<QuadExt, ScalarParseError> {
        let (first, first_radical) = self.term()?;
        let sign_pos = self.pos;
        let negate = match self.peek() {
            Some(b'+') => false,
            Some(b'-') => true,
            _ => return Ok(first),
        };
        self.pos += 1;
        let (second, second_radical) = self.term()?;
        if first_radical && second_radical {
            return Err(ScalarParseError::new(
                sign_pos,
                "sqrt3 may appear at most once",
            ));
        }
        Ok(if negate {
            first - second
        } else {
            first + second
        })
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                (&self).$method(rhs)
            }
        }
        impl $trait<QuadExt> for &QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: &QuadExt) -> QuadExt {
        QuadExt::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl Sub<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: &QuadExt) -> QuadExt {
        QuadExt::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl Mul<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    // (a + b√3)(c + d√3) = (ac + 3bd) + (ad + bc)√3
    fn mul(self, rhs: &QuadExt) -> QuadExt {
        let three = Rational::from_integer(3.into());
        QuadExt::new(
            &self.a * &rhs.a + three * &self.b * &rhs.b,
            &self.a * &rhs.b + &self.b * &rhs.a,
        )
    }
}

impl Div<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    /// Panics on a zero divisor; see [`QuadExt::checked_div`].
    fn div(self, rhs: &QuadExt) -> QuadExt {
        self.checked_div(rhs).expect("division by zero")
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt::new(-self.a, -self.b)
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt::new(-&self.a, -&self.b)
    }
}

impl AddAssign<&QuadExt> for QuadExt {
    fn add_assign(&mut self, rhs: &QuadExt) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl SubAssign<&QuadExt> for QuadExt {
    fn sub_assign(&mut self, rhs: &QuadExt) {
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}

impl MulAssign<&QuadExt> for QuadExt {
    fn mul_assign(&mut self, rhs: &QuadExt) {
        *self = &*self * rhs;
    }
}

impl From<i64> for QuadExt {
    fn from(n: i64) -> Self {
        QuadExt::from_int(n)
    }
}

impl From<Rational> for QuadExt {
    fn from(r: Rational) -> Self {
        QuadExt::from_rational(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQRT_3: f64 = 1.7320508075688772;

    fn q(s: &str) -> QuadExt {
        parse_scalar(s).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let x = q("1+sqrt3");
        let y = q("1-sqrt3");
        assert_eq!(&x * &y, QuadExt::from_int(-2));
    }

    #[test]
    fn inverse_of_sqrt3_is_rationalized() {
        let inv = QuadExt::one().checked_div(&QuadExt::sqrt3()).unwrap();
        assert_eq!(inv, QuadExt::frac_sqrt3(1, 3));
    }

    #[test]
    fn square_of_two_thirds_sqrt3() {
        let x = QuadExt::frac_sqrt3(2, 3);
        assert_eq!(&x * &x, QuadExt::frac(4, 3));
        // 1/3 + 4/3 + 1 is the printed 8/3 diagonal entry
        assert_eq!(
            QuadExt::frac(1, 3) + &x * &x + QuadExt::one(),
            QuadExt::frac(8, 3)
        );
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            QuadExt::one().checked_div(&QuadExt::zero()),
            Err(ArithError::DivisionByZero)
        );
    }

    #[test]
    fn parses_generator_and_normalized_entries() {
        assert_eq!(q("sqrt3"), QuadExt::sqrt3());
        assert_eq!(q("-2/3*sqrt3"), QuadExt::frac_sqrt3(-2, 3));
        assert_eq!(q("8/3"), QuadExt::frac(8, 3));
        assert_eq!(q(" 1 - 2/3 * sqrt3 "), q("1-2/3*sqrt3"));
        assert_eq!(q("-sqrt3"), QuadExt::frac_sqrt3(-1, 1));
        assert_eq!(q("sqrt3 + 4/6"), QuadExt::new(rat(2, 3), rat(1, 1)));
        assert_eq!(q("1--2"), QuadExt::from_int(3));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_scalar("sqrt3+sqrt3").unwrap_err();
        assert_eq!(err.position, 5);
        let err = parse_scalar("1/0").unwrap_err();
        assert_eq!(err.position, 2);
        assert!(parse_scalar("").is_err());
        assert!(parse_scalar("2*").is_err());
        assert_eq!(parse_scalar("3 4").unwrap_err().position, 2);
        assert!(parse_scalar("sqrt2").is_err());
    }

    #[test]
    fn canonical_formatting() {
        assert_eq!(QuadExt::zero().to_string(), "0");
        assert_eq!(QuadExt::frac(-8, 3).to_string(), "-8/3");
        assert_eq!(QuadExt::sqrt3().to_string(), "sqrt3");
        assert_eq!((-QuadExt::sqrt3()).to_string(), "-sqrt3");
        assert_eq!(QuadExt::frac_sqrt3(-2, 3).to_string(), "-2/3*sqrt3");
        assert_eq!(q("1-sqrt3").to_string(), "1-sqrt3");
        assert_eq!(q("-1/2+5*sqrt3").to_string(), "-1/2+5*sqrt3");
    }

    #[test]
    fn float_conversion() {
        assert_eq!(QuadExt::zero().to_f64(), 0.0);
        assert_eq!(QuadExt::sqrt3().to_f64(), 1.7320508075688772);
        assert_eq!(QuadExt::frac(10, 3).to_f64(), 3.3333333333333335);
        assert_eq!(q("1+sqrt3").to_f64(), 2.732050807568877);
        assert_eq!(q("-1-sqrt3").to_f64(), -2.732050807568877);
    }

    #[test]
    fn float_conversion_survives_cancellation() {
        // 97 - 56√3 = 1/(97 + 56√3)
        let x = q("97-56*sqrt3");
        let expected = 1.0 / (97.0 + 56.0 * SQRT_3);
        let got = x.to_f64();
        assert!(((got - expected) / expected).abs() < 4.0 * f64::EPSILON);
        // 15√3 - 26 = -1/(26 + 15√3)
        let y = q("-26+15*sqrt3");
        let expected = -1.0 / (26.0 + 15.0 * SQRT_3);
        assert!(((y.to_f64() - expected) / expected).abs() < 4.0 * f64::EPSILON);
    }

    #[test]
    fn signum_matches_float() {
        for s in [
            "97-56*sqrt3",
            "-97+56*sqrt3",
            "2-sqrt3",
            "1-sqrt3",
            "0",
            "-5/7*sqrt3",
        ] {
            let x = q(s);
            let f = x.to_f64();
            let expected = if f > 0.0 {
                1
            } else if f < 0.0 {
                -1
            } else {
                0
            };
            assert_eq!(x.signum(), expected, "{s}");
        }
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_quad() -> impl Strategy<Value = QuadExt> {
        (arb_rational(), arb_rational()).prop_map(|(a, b)| QuadExt::new(a, b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn field_axioms(x in arb_quad(), y in arb_quad(), z in arb_quad()) {
            prop_assert_eq!((&x + &y) + &z, &x + (&y + &z));
            prop_assert_eq!(&x * (&y + &z), &x * &y + &x * &z);
            prop_assert_eq!((&x * &y) * &z, &x * (&y * &z));
            if !x.is_zero() {
                prop_assert_eq!(&x * &x.inv().unwrap(), QuadExt::one());
            }
        }
    }

    proptest! {
        #[test]
        fn formatter_round_trips(x in arb_quad()) {
            prop_assert_eq!(parse_scalar(&x.to_string()).unwrap(), x);
        }

        #[test]
        fn float_product_within_four_ulps(x in arb_quad(), y in arb_quad()) {
            let exact = (&x * &y).to_f64();
            let approx = x.to_f64() * y.to_f64();
            let ulp = f64::EPSILON * exact.abs().max(x.to_f64().abs() * y.to_f64().abs());
            prop_assert!((exact - approx).abs() <= 4.0 * ulp + f64::MIN_POSITIVE,
                "{} vs {}", exact, approx);
        }
    }
}
