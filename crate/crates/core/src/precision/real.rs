use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Smallest precision handed to the backend; small integer constants are
/// exact at this width and never lower the precision of a mixed operation.
const MIN_BITS: usize = 64;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Binary precision used for `digits` decimal digits: ceil(digits·log2 10) + 8 guard bits.
pub fn bits_for_digits(digits: u32) -> usize {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as usize + 8
}

/// Decimal digits carried by a binary precision (inverse of [`bits_for_digits`]).
pub fn digits_for_bits(bits: usize) -> u32 {
    (bits.saturating_sub(8) as f64 / std::f64::consts::LOG2_10).floor() as u32
}

/// `[+-]digits[.digits][(e|E)[+-]digits]`, with at least one mantissa digit.
fn is_decimal_literal(s: &str) -> bool {
    fn digits(s: &str) -> usize {
        s.bytes().take_while(u8::is_ascii_digit).count()
    }
    let s = s.strip_prefix(['+', '-']).unwrap_or(s);
    let int = digits(s);
    let mut rest = &s[int..];
    let mut frac = 0;
    if let Some(r) = rest.strip_prefix('.') {
        frac = digits(r);
        rest = &r[frac..];
    }
    if int + frac == 0 {
        return false;
    }
    match rest.strip_prefix(['e', 'E']) {
        None => rest.is_empty(),
        Some(e) => {
            let e = e.strip_prefix(['+', '-']).unwrap_or(e);
            let n = digits(e);
            n > 0 && n == e.len()
        }
    }
}

/// Arbitrary-precision real number.
///
/// Every value carries its own binary precision. Arithmetic between two
/// values is carried out at the larger of the two precisions, so a
/// computation runs at whatever precision its inputs were built with.
#[derive(Clone)]
pub struct Real(BigFloat);

impl Real {
    fn wrap(x: BigFloat) -> Real {
        debug_assert!(!x.is_nan(), "NaN produced in Real arithmetic");
        Real(x)
    }

    pub fn from_int(n: i64, bits: usize) -> Real {
        Real(BigFloat::from_i64(n, bits.max(MIN_BITS)))
    }

    pub fn zero(bits: usize) -> Real {
        Real::from_int(0, bits)
    }

    pub fn one(bits: usize) -> Real {
        Real::from_int(1, bits)
    }

    /// Exact conversion of a binary double.
    pub fn from_f64(x: f64, bits: usize) -> Real {
        Real(BigFloat::from_f64(x, bits.max(MIN_BITS)))
    }

    /// Parses a decimal literal (`"3"`, `"-1.5e-3"`) rounded to `bits`.
    pub fn parse(s: &str, bits: usize) -> Result<Real> {
        let t = s.trim();
        if !is_decimal_literal(t) {
            return Err(Error::InvalidArgument(format!("not a decimal number: {s:?}")));
        }
        let x = with_consts(|cc| BigFloat::parse(t, Radix::Dec, bits.max(MIN_BITS), RM, cc));
        if x.is_nan() || x.is_inf() {
            return Err(Error::InvalidArgument(format!("not a decimal number: {s:?}")));
        }
        Ok(Real(x))
    }

    /// 10^exp rounded to `bits`.
    pub fn pow10(exp: i32, bits: usize) -> Real {
        Real::parse(&format!("1e{exp}"), bits).expect("power of ten literal")
    }

    pub fn pi(bits: usize) -> Real {
        Real(with_consts(|cc| cc.pi(bits.max(MIN_BITS), RM)))
    }

    pub fn prec(&self) -> usize {
        self.0.precision().unwrap_or(MIN_BITS)
    }

    /// Decimal digits carried by this value's precision.
    pub fn digits(&self) -> u32 {
        digits_for_bits(self.prec())
    }

    /// The same value rounded (or exactly extended) to `bits`.
    pub fn with_prec(&self, bits: usize) -> Real {
        let mut x = self.0.clone();
        x.set_precision(bits.max(MIN_BITS), RM).expect("set_precision");
        Real(x)
    }

    pub fn abs(&self) -> Real {
        Real(self.0.abs())
    }

    pub fn sqrt(&self) -> Real {
        if self.is_zero() {
            return Real::zero(self.prec());
        }
        Real::wrap(self.0.sqrt(self.prec(), RM))
    }

    pub fn sin(&self) -> Real {
        let p = self.prec();
        if self.is_zero() {
            return Real::zero(p);
        }
        Real::wrap(with_consts(|cc| self.0.sin(p, RM, cc)))
    }

    pub fn cos(&self) -> Real {
        let p = self.prec();
        if self.is_zero() {
            return Real::one(p);
        }
        Real::wrap(with_consts(|cc| self.0.cos(p, RM, cc)))
    }

    pub fn acos(&self) -> Real {
        let p = self.prec();
        Real::wrap(with_consts(|cc| self.0.acos(p, RM, cc)))
    }

    pub fn ln(&self) -> Real {
        let p = self.prec();
        Real::wrap(with_consts(|cc| self.0.ln(p, RM, cc)))
    }

    pub fn exp(&self) -> Real {
        let p = self.prec();
        if self.is_zero() {
            return Real::one(p);
        }
        Real::wrap(with_consts(|cc| self.0.exp(p, RM, cc)))
    }

    pub fn square(&self) -> Real {
        self * self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        !self.is_zero() && self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        !self.is_zero() && self.0.is_positive()
    }

    /// -1, 0 or +1; exact on the stored representation.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.0.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Real) -> Real {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Decimal mantissa digits and exponent such that the value is
    /// `0.d1d2d3… × 10^(exp+1)`, i.e. `d1.d2d3… × 10^exp`.
    fn decimal_parts(&self) -> (bool, Vec<u8>, i64) {
        let s = with_consts(|cc| self.0.format(Radix::Dec, RM, cc)).expect("decimal formatting");
        let negative = s.starts_with('-');
        let body = s.trim_start_matches(['-', '+']);
        let (mantissa, exp) = match body.split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i64>().expect("exponent")),
            None => (body, 0),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        let mut digits: Vec<u8> = int_part.bytes().chain(frac_part.bytes()).map(|b| b - b'0').collect();
        let mut exp = exp + int_part.len() as i64 - 1;
        while digits.first() == Some(&0) && digits.len() > 1 {
            digits.remove(0);
            exp -= 1;
        }
        (negative, digits, exp)
    }

    /// Decimal rendering rounded half-up to `sig` significant digits.
    ///
    /// Positional notation for decimal exponents in [-5, 20], scientific
    /// otherwise; trailing zeros are kept so the width is fixed by `sig`.
    pub fn to_sig_string(&self, sig: u32) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let sig = sig.max(1) as usize;
        let (negative, mut digits, mut exp) = self.decimal_parts();
        if digits.len() > sig {
            let round_up = digits[sig] >= 5;
            digits.truncate(sig);
            if round_up {
                let mut i = sig;
                loop {
                    if i == 0 {
                        digits.insert(0, 1);
                        digits.truncate(sig);
                        exp += 1;
                        break;
                    }
                    i -= 1;
                    if digits[i] == 9 {
                        digits[i] = 0;
                    } else {
                        digits[i] += 1;
                        break;
                    }
                }
            }
        }
        digits.resize(sig, 0);
        let text: String = digits.iter().map(|d| char::from(b'0' + d)).collect();
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        if (-5..=20).contains(&exp) {
            if exp < 0 {
                out.push_str("0.");
                out.push_str(&"0".repeat((-exp - 1) as usize));
                out.push_str(&text);
            } else {
                let int_len = exp as usize + 1;
                if int_len >= text.len() {
                    out.push_str(&text);
                    out.push_str(&"0".repeat(int_len - text.len()));
                } else {
                    out.push_str(&text[..int_len]);
                    out.push('.');
                    out.push_str(&text[int_len..]);
                }
            }
        } else {
            out.push_str(&text[..1]);
            if text.len() > 1 {
                out.push('.');
                out.push_str(&text[1..]);
            }
            out.push_str(&format!("e{exp}"));
        }
        out
    }

    /// Nearest double (for plotting and diagnostics only).
    pub fn to_f64(&self) -> f64 {
        self.to_sig_string(20).parse().expect("decimal rendering parses as f64")
    }

    /// Binary exponent e with 2^(e-1) ≤ |x| < 2^e; `None` for zero.
    pub fn exponent(&self) -> Option<i32> {
        if self.is_zero() {
            None
        } else {
            self.0.exponent()
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().map(|p| p as u32).unwrap_or_else(|| self.digits());
        f.write_str(&self.to_sig_string(sig))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_sig_string(self.digits().min(40)))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! real_binop {
    ($tr:ident, $method:ident, $op:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.prec().max(rhs.prec());
                Real::wrap(self.0.$op(&rhs.0, p, RM))
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
        impl $tr<i64> for &Real {
            type Output = Real;
            fn $method(self, rhs: i64) -> Real {
                self.$method(&Real::from_int(rhs, MIN_BITS))
            }
        }
        impl $tr<i64> for Real {
            type Output = Real;
            fn $method(self, rhs: i64) -> Real {
                (&self).$method(&Real::from_int(rhs, MIN_BITS))
            }
        }
        impl $tr<&Real> for i64 {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&Real::from_int(self, MIN_BITS)).$method(rhs)
            }
        }
        impl $tr<Real> for i64 {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&Real::from_int(self, MIN_BITS)).$method(&rhs)
            }
        }
    };
}

real_binop!(Add, add, add);
real_binop!(Sub, sub, sub);
real_binop!(Mul, mul, mul);
real_binop!(Div, div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(BigFloat::neg(&self.0))
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(BigFloat::neg(&self.0))
    }
}
