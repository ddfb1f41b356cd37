//! C99-style hexadecimal floating-point text (`%a`), used wherever a binary64
//! value must survive a text round-trip bit for bit.

use std::fmt::Write;

/// Formats `x` as `[-]0x1.<hex>p<exp>` (normal), `[-]0x0.<hex>p-1022`
/// (subnormal), `[-]0x0p+0`, `inf`, `-inf` or `nan`.
pub fn format_hex(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    let mut out = String::new();
    if x.is_sign_negative() {
        out.push('-');
    }
    if x.is_infinite() {
        out.push_str("inf");
        return out;
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let mantissa = bits & ((1u64 << 52) - 1);
    if biased == 0 && mantissa == 0 {
        out.push_str("0x0p+0");
        return out;
    }
    let (lead, exp) = if biased == 0 { (0, -1022) } else { (1, biased - 1023) };
    write!(out, "0x{lead}").unwrap();
    if mantissa != 0 {
        let digits = format!("{mantissa:013x}");
        out.push('.');
        out.push_str(digits.trim_end_matches('0'));
    }
    write!(out, "p{exp:+}").unwrap();
    out
}

/// Parses hexadecimal floating-point text. Accepts the output of
/// [`format_hex`] and general forms like `0x1.8p3`, `-0X.8P-1`, `0x10p0`.
/// Inputs whose value is not exactly representable are rejected rather than
/// rounded.
pub fn parse_hex(s: &str) -> Option<f64> {
    let s = s.trim();
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let signed = |v: f64| if neg { -v } else { v };
    match body {
        "inf" | "infinity" => return Some(signed(f64::INFINITY)),
        "nan" => return Some(f64::NAN),
        _ => {}
    }
    let body = body
        .strip_prefix("0x")
        .or_else(|| body.strip_prefix("0X"))?;
    let (mant_txt, exp_txt) = body.split_once(['p', 'P'])?;
    let exp: i64 = exp_txt.parse().ok()?;
    let (int_txt, frac_txt) = match mant_txt.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant_txt, ""),
    };
    if int_txt.is_empty() && frac_txt.is_empty() {
        return None;
    }
    // accumulate all hex digits into an integer, tracking the binary point
    let mut mant: u128 = 0;
    let mut shift: i64 = 0;
    let mut sticky = false;
    for (i, c) in int_txt.chars().chain(frac_txt.chars()).enumerate() {
        let d = c.to_digit(16)? as u128;
        if i >= int_txt.len() {
            shift -= 4;
        }
        if mant >> 120 != 0 {
            // keep the magnitude, remember discarded nonzero digits
            sticky |= d != 0;
            shift += 4;
            continue;
        }
        mant = (mant << 4) | d;
    }
    if mant == 0 {
        return if sticky { None } else { Some(signed(0.0)) };
    }
    if sticky {
        return None;
    }
    let total_exp = exp.checked_add(shift)?;
    // normalize to 53 significant bits
    let bits = 128 - mant.leading_zeros() as i64;
    let e2 = total_exp + bits - 1; // exponent of the leading bit
    if e2 > 1023 {
        return None;
    }
    let frac_bits: i64 = if e2 >= -1022 { 52 } else { 52 - (-1022 - e2) };
    if frac_bits < 0 {
        return None;
    }
    let drop = bits - 1 - frac_bits;
    if drop > 0 {
        let lost = mant & ((1u128 << drop) - 1);
        if lost != 0 {
            return None;
        }
        mant >>= drop;
    } else {
        mant <<= -drop;
    }
    let value = if e2 >= -1022 {
        let m = (mant as u64) & ((1u64 << 52) - 1);
        f64::from_bits((((e2 + 1023) as u64) << 52) | m)
    } else {
        f64::from_bits(mant as u64)
    };
    Some(signed(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_renderings() {
        assert_eq!(format_hex(1.0), "0x1p+0");
        assert_eq!(format_hex(3.0), "0x1.8p+1");
        assert_eq!(format_hex(-0.5), "-0x1p-1");
        assert_eq!(format_hex(0.0), "0x0p+0");
        assert_eq!(format_hex(-0.0), "-0x0p+0");
        assert_eq!(format_hex(f64::MIN_POSITIVE / 2.0), "0x0.8p-1022");
        assert_eq!(format_hex(0.1), "0x1.999999999999ap-4");
    }

    #[test]
    fn general_forms_parse() {
        assert_eq!(parse_hex("0x1.8p3"), Some(12.0));
        assert_eq!(parse_hex("-0X.8P-1"), Some(-0.25));
        assert_eq!(parse_hex("0x10p0"), Some(16.0));
        assert_eq!(parse_hex("0x0.0000000000001p-1022"), Some(f64::from_bits(1)));
        assert_eq!(parse_hex("1.0"), None);
        assert_eq!(parse_hex("0x1.00000000000001p0"), None);
        assert!(parse_hex("-0x0p+0").unwrap().is_sign_negative());
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(!x.is_nan());
            let back = parse_hex(&format_hex(x)).unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
