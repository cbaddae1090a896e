//! Exact parsing and printing of the numeric literals in netlist files.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::scalar::ExactComplex;

/// Parses `12`, `-1.5e-3`, `.25` or `p/q` exactly.
pub fn parse_real(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_decimal(n)?;
        let d = parse_decimal(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    parse_decimal(t)
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let (negative, body) = match text.as_bytes().first()? {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], body[pos + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(digits);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Parses `REAL`, `REAL±REALj` or `REALj`.
pub fn parse_complex(text: &str) -> Option<ExactComplex> {
    let t = text.trim();
    let Some(body) = t.strip_suffix('j') else {
        return Some(Complex::new(parse_real(t)?, BigRational::zero()));
    };
    // Split at the last sign that is not the leading one and not part of an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    match split {
        Some(i) => {
            let re = parse_real(&body[..i])?;
            let im_text = &body[i..];
            let im = match im_text {
                "+" => BigRational::from_integer(1.into()),
                "-" => BigRational::from_integer((-1).into()),
                _ => parse_real(im_text)?,
            };
            Some(Complex::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => BigRational::from_integer(1.into()),
                "-" => BigRational::from_integer((-1).into()),
                _ => parse_real(body)?,
            };
            Some(Complex::new(BigRational::zero(), im))
        }
    }
}

pub fn format_real(v: &BigRational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Text accepted back by [`parse_complex`].
pub fn format_complex(v: &ExactComplex) -> String {
    if v.im.is_zero() {
        return format_real(&v.re);
    }
    let sign = if v.im.is_negative() { '-' } else { '+' };
    format!("{}{}{}j", format_real(&v.re), sign, format_real(&v.im.abs()))
}
