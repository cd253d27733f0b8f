use super::Interval;

/// Decimal rendering of an interval with `lo` rounded toward -inf and `hi`
/// toward +inf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutwardDecimal {
    pub lo: String,
    pub hi: String,
}

/// Print `x` with `digits` significant digits, rounding outward.
pub fn format_outward(x: Interval, digits: usize) -> OutwardDecimal {
    let digits = digits.max(1);
    OutwardDecimal {
        lo: directed_decimal(x.lo(), digits, false),
        hi: directed_decimal(x.hi(), digits, true),
    }
}

/// `x` rounded to `digits` significant decimal digits, toward +inf if `up`.
fn directed_decimal(x: f64, digits: usize, up: bool) -> String {
    if x == 0.0 {
        return render(false, &"0".repeat(digits), 0);
    }
    let neg = x < 0.0;
    // Every double has an exact decimal expansion of at most 767 significant digits.
    let exact = format!("{:.800e}", x.abs());
    let (mantissa, exp) = exact.split_once('e').expect("exponent marker");
    let mut exp: i32 = exp.parse().expect("exponent");
    let all: Vec<u8> = mantissa.bytes().filter(u8::is_ascii_digit).map(|b| b - b'0').collect();
    let mut kept: Vec<u8> = all[..digits.min(all.len())].to_vec();
    kept.resize(digits, 0);
    let inexact = all.iter().skip(digits).any(|&d| d != 0);
    // magnitude rounds away from zero when moving outward on that side
    let away = inexact && (up != neg);
    if away {
        let mut i = digits;
        loop {
            if i == 0 {
                kept.insert(0, 1);
                kept.pop();
                exp += 1;
                break;
            }
            i -= 1;
            if kept[i] == 9 {
                kept[i] = 0;
            } else {
                kept[i] += 1;
                break;
            }
        }
    }
    let s: String = kept.iter().map(|d| char::from(b'0' + d)).collect();
    render(neg, &s, exp)
}

/// `digits` is d1 d2 d3 ... meaning d1.d2d3... x 10^exp.
fn render(neg: bool, digits: &str, exp: i32) -> String {
    let sign = if neg { "-" } else { "" };
    let n = digits.len() as i32;
    if !(-7..21).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        return if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        };
    }
    if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    } else if exp + 1 >= n {
        let zeros = "0".repeat((exp + 1 - n) as usize);
        format!("{sign}{digits}{zeros}")
    } else {
        let (int, frac) = digits.split_at((exp + 1) as usize);
        format!("{sign}{int}.{frac}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third() {
        let x = Interval::ratio(1.0, 3.0).unwrap();
        let d = format_outward(x, 4);
        assert_eq!((d.lo.as_str(), d.hi.as_str()), ("0.3333", "0.3334"));
    }

    #[test]
    fn exact_value_is_not_widened() {
        let d = format_outward(Interval::point(2.0), 3);
        assert_eq!((d.lo.as_str(), d.hi.as_str()), ("2.00", "2.00"));
    }

    #[test]
    fn reference_dimension_six_digits() {
        let x = Interval::new(0.538_045_14, 0.538_045_14).unwrap();
        let d = format_outward(x, 6);
        assert!(d.lo.as_str() <= "0.538045");
        assert_eq!(d.lo, "0.538045");
        assert_eq!(d.hi, "0.538046");
    }

    #[test]
    fn negatives_and_carries() {
        let x = Interval::new(-0.399_999_999_9, 9.999_99).unwrap();
        let d = format_outward(x, 3);
        assert_eq!(d.lo, "-0.400");
        assert_eq!(d.hi, "10.0");
        let d = format_outward(Interval::new(-2.5, 1e-9).unwrap(), 2);
        assert_eq!(d.lo, "-2.5");
        // the double nearest 1e-9 lies above it
        assert_eq!(d.hi, "1.1e-9");
        let d = format_outward(Interval::new(2f64.powi(-10), 2f64.powi(70)).unwrap(), 3);
        assert_eq!(d.lo, "0.000976");
        assert_eq!(d.hi, "1.19e21");
    }

    #[test]
    fn round_trip_contains_original() {
        for i in 1..2000 {
            let lo = (i as f64).sqrt() * -0.0173 + 0.37;
            let x = Interval::new(lo, lo + (i as f64) * 1e-9).unwrap();
            for digits in [1, 3, 8, 17] {
                let d = format_outward(x, digits);
                let plo: f64 = d.lo.parse().unwrap();
                let phi: f64 = d.hi.parse().unwrap();
                assert!(plo <= x.lo() && phi >= x.hi(), "{x} -> {d:?}");
            }
        }
    }
}
