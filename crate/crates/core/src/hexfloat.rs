//! C99-style hexadecimal float text (`-0x1.8p-3`), used wherever files must
//! round-trip doubles bit for bit.

/// Format a finite double exactly.
pub fn to_hex(x: f64) -> String {
    let sign = if x.is_sign_negative() { "-" } else { "" };
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 && frac == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, e) = if exp == 0 { (0, -1022) } else { (1, exp - 1023) };
    let mut digits = format!("{frac:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let e_sign = if e < 0 { "-" } else { "+" };
    if digits.is_empty() {
        format!("{sign}0x{lead}p{e_sign}{}", e.abs())
    } else {
        format!("{sign}0x{lead}.{digits}p{e_sign}{}", e.abs())
    }
}

/// Parse the output of [`to_hex`] (and any exactly representable hex float).
pub fn from_hex(s: &str) -> Option<f64> {
    let s = s.trim();
    let (neg, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let rest = rest.strip_prefix("0x").or_else(|| rest.strip_prefix("0X"))?;
    let (mant, exp) = rest.split_once(['p', 'P'])?;
    let exp: i32 = exp.parse().ok()?;
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() || frac.len() > 13 || int.len() > 1 {
        return None;
    }
    let lead = u64::from_str_radix(int, 16).ok()?;
    let frac_bits = if frac.is_empty() {
        0
    } else {
        u64::from_str_radix(frac, 16).ok()? << (4 * (13 - frac.len()))
    };
    if lead > 1 {
        return None;
    }
    let bits = match (lead, exp) {
        (0, _) if frac_bits == 0 => 0,
        (0, -1022) => frac_bits,
        (1, e) if (-1022..=1023).contains(&e) => (((e + 1023) as u64) << 52) | frac_bits,
        _ => return None,
    };
    let v = f64::from_bits(bits);
    Some(if neg { -v } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert_eq!(to_hex(1.0), "0x1p+0");
        assert_eq!(to_hex(-0.375), "-0x1.8p-2");
        assert_eq!(to_hex(0.0), "0x0p+0");
        assert_eq!(to_hex(f64::MIN_POSITIVE / 2.0), "0x0.8p-1022");
        assert_eq!(from_hex("0x1.8p-2"), Some(0.375));
        assert_eq!(from_hex("0x1.4p+0"), Some(1.25));
        assert_eq!(from_hex("1.5"), None);
        assert_eq!(from_hex("0x2p+0"), None);
    }

    proptest! {
        #[test]
        fn round_trip(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let back = from_hex(&to_hex(x)).unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
