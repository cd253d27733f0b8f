//! Ball file format.
//!
//! ```text
//! # feigdim function ball
//! format_version = 1
//! degree_d = 2
//! rho = 0x1.4p+0
//! radius = 0x1.12e0be826d695p-30
//! t_max = 0x1.ff7ced916872bp-1
//! truncation_N = 20
//! provenance = newton_computed
//! assumed_rigorous = true
//! residual_l1 = 0x1.2p-40
//! checksum = sha256:...
//! coefficients
//! 0x1p+0 0x1p+0
//! ...
//! ```
//!
//! Coefficients are `lo hi` hex-float pairs, one per line, c_0 first.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::{BallProvenance, FunctionBall, ProvenanceSource};
use crate::error::{Error, Result};
use crate::hexfloat::{from_hex, to_hex};
use crate::interval::Interval;

const FORMAT_VERSION: u32 = 1;
const HEADER_KEYS: [&str; 10] = [
    "format_version",
    "degree_d",
    "rho",
    "radius",
    "t_max",
    "truncation_N",
    "provenance",
    "assumed_rigorous",
    "residual_l1",
    "checksum",
];

impl FunctionBall {
    pub fn to_text(&self) -> String {
        let p = &self.provenance;
        let mut s = String::from("# feigdim function ball\n");
        s.push_str(&format!("format_version = {FORMAT_VERSION}\n"));
        s.push_str(&format!("degree_d = {}\n", self.degree));
        s.push_str(&format!("rho = {}\n", to_hex(self.rho)));
        s.push_str(&format!("radius = {}\n", to_hex(self.radius)));
        s.push_str(&format!("t_max = {}\n", to_hex(self.t_max)));
        s.push_str(&format!("truncation_N = {}\n", self.truncation()));
        s.push_str(&format!("provenance = {}\n", p.source.as_str()));
        s.push_str(&format!("assumed_rigorous = {}\n", p.assumed_rigorous));
        s.push_str(&format!("residual_l1 = {}\n", to_hex(p.residual_l1)));
        s.push_str(&format!("checksum = {}\n", self.checksum()));
        s.push_str("coefficients\n");
        for c in &self.coeffs {
            s.push_str(&format!("{} {}\n", to_hex(c.lo()), to_hex(c.hi())));
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    /// Parse ball text; `path` is only used for error context.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, field: &str, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            field: field.to_string(),
            msg,
        };

        let mut header: HashMap<&str, (usize, &str)> = HashMap::new();
        let mut coeff_lines: Vec<(usize, &str)> = Vec::new();
        let mut in_coeffs = false;
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if in_coeffs {
                coeff_lines.push((lineno, line));
                continue;
            }
            if line == "coefficients" {
                in_coeffs = true;
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(lineno, line, "expected `key = value`".into()))?;
            let key = key.trim();
            if !HEADER_KEYS.contains(&key) {
                return Err(err(lineno, key, "unknown header field".into()));
            }
            if header.insert(key, (lineno, value.trim())).is_some() {
                return Err(err(lineno, key, "duplicate header field".into()));
            }
        }

        let get = |key: &str| -> Result<(usize, &str)> {
            header
                .get(key)
                .copied()
                .ok_or_else(|| err(0, key, "missing header field".into()))
        };
        let parse_u = |key: &str| -> Result<usize> {
            let (line, v) = get(key)?;
            v.parse()
                .map_err(|_| err(line, key, format!("`{v}` is not a nonnegative integer")))
        };
        let parse_f = |key: &str| -> Result<f64> {
            let (line, v) = get(key)?;
            parse_float(v).ok_or_else(|| err(line, key, format!("`{v}` is not a finite number")))
        };

        let version = parse_u("format_version")?;
        if version != FORMAT_VERSION as usize {
            let (line, _) = get("format_version")?;
            return Err(err(line, "format_version", format!("unsupported version {version}")));
        }
        let degree = parse_u("degree_d")?;
        if degree < 2 {
            let (line, _) = get("degree_d")?;
            return Err(err(line, "degree_d", format!("degree {degree} < 2")));
        }
        let rho = parse_f("rho")?;
        if rho <= 1.0 {
            let (line, _) = get("rho")?;
            return Err(err(line, "rho", format!("rho = {rho} must exceed 1")));
        }
        let radius = parse_f("radius")?;
        if radius < 0.0 {
            let (line, _) = get("radius")?;
            return Err(err(line, "radius", format!("radius = {radius} is negative")));
        }
        let t_max = parse_f("t_max")?;
        if !(t_max > 0.0 && t_max < 1.0) {
            let (line, _) = get("t_max")?;
            return Err(err(line, "t_max", format!("t_max = {t_max} not in (0, 1)")));
        }
        let truncation = parse_u("truncation_N")?;
        let source = match get("provenance")? {
            (_, "newton_computed") => ProvenanceSource::NewtonComputed,
            (_, "loaded_from_file") => ProvenanceSource::LoadedFromFile,
            (line, v) => return Err(err(line, "provenance", format!("unknown source `{v}`"))),
        };
        let assumed_rigorous = match get("assumed_rigorous")? {
            (_, "true") => true,
            (_, "false") => false,
            (line, v) => return Err(err(line, "assumed_rigorous", format!("`{v}` is not a bool"))),
        };
        let residual_l1 = parse_f("residual_l1")?;
        let (_, checksum) = get("checksum")?;

        if coeff_lines.len() != truncation + 1 {
            return Err(err(
                coeff_lines.last().map_or(0, |l| l.0),
                "coefficients",
                format!(
                    "expected {} coefficient lines for truncation_N = {truncation}, found {}",
                    truncation + 1,
                    coeff_lines.len()
                ),
            ));
        }
        let mut coeffs = Vec::with_capacity(coeff_lines.len());
        for (k, (line, text)) in coeff_lines.iter().enumerate() {
            let field = format!("c_{k}");
            let mut parts = text.split_whitespace();
            let (Some(lo), Some(hi), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err(*line, &field, "expected two hex floats `lo hi`".into()));
            };
            let lo = from_hex(lo).ok_or_else(|| err(*line, &field, format!("bad hex float `{lo}`")))?;
            let hi = from_hex(hi).ok_or_else(|| err(*line, &field, format!("bad hex float `{hi}`")))?;
            let c = Interval::new(lo, hi).map_err(|e| err(*line, &field, e.to_string()))?;
            coeffs.push(c);
        }

        let provenance = BallProvenance {
            source,
            residual_l1,
            assumed_rigorous,
        };
        let ball = FunctionBall::new(degree as u32, rho, coeffs, radius, t_max, provenance)
            .map_err(|e| err(0, "ball", e.to_string()))?;
        let actual = ball.checksum();
        if actual != checksum {
            return Err(Error::ChecksumMismatch {
                expected: checksum.to_string(),
                actual,
            });
        }
        Ok(ball)
    }
}

/// Hex float or plain decimal.
fn parse_float(s: &str) -> Option<f64> {
    let v = if s.contains("0x") || s.contains("0X") {
        from_hex(s)?
    } else {
        s.parse::<f64>().ok()?
    };
    v.is_finite().then_some(v)
}

/// Default file name for a degree's ball.
pub fn default_ball_path(degree: u32) -> PathBuf {
    PathBuf::from(format!("ball_d{degree}.txt"))
}
