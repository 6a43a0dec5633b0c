use std::path::Path;

use kmlab_core::field::{parse_rational, Rational};
use kmlab_core::numlat::{FieldJson, HermitianLattice, ImagQuad, LatticeJson, NumberFieldBasis};
use num_complex::Complex64;

use crate::Failure;

fn bad(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

pub fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {}", path.display(), e)))
}

fn json_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| bad(format!("{}: {}", path.display(), e)))
}

pub fn field_file(path: &Path) -> Result<NumberFieldBasis, Failure> {
    let j: FieldJson = json_file(path)?;
    Ok(NumberFieldBasis::from_json(&j)?)
}

pub fn lattice_file(path: &Path) -> Result<HermitianLattice, Failure> {
    let j: LatticeJson = json_file(path)?;
    Ok(HermitianLattice::from_json(&j)?)
}

pub fn ring(s: &str) -> Result<ImagQuad, Failure> {
    match s.trim().to_ascii_lowercase().as_str() {
        "gaussian" | "q(i)" | "z[i]" => Ok(ImagQuad::gaussian()),
        "eisenstein" | "q(sqrt-3)" => Ok(ImagQuad::eisenstein()),
        other => {
            let disc: i64 = other.parse().map_err(|_| bad(format!("unknown ring {:?}", s)))?;
            Ok(ImagQuad::new(disc)?)
        }
    }
}

pub fn rational(s: &str) -> Result<Rational, Failure> {
    parse_rational(s).ok_or_else(|| bad(format!("not a rational number: {:?}", s)))
}

pub fn rational_list(s: &str) -> Result<Vec<Rational>, Failure> {
    s.split(',').map(rational).collect()
}

/// `a`, `bi`, `a+bi`, `a-bi` (also with `j`), or `a,b` is not accepted here to keep lists unambiguous.
pub fn complex(s: &str) -> Result<Complex64, Failure> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || bad(format!("not a complex number: {:?}", s));
    if t.is_empty() {
        return Err(err());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| err());
    };
    // split at the last sign that is not the leading one or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |x: &str| match x {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => x.parse::<f64>().map_err(|_| err()),
    };
    match split {
        Some(k) => Ok(Complex64::new(body[..k].parse().map_err(|_| err())?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

pub fn complex_list(s: &str) -> Result<Vec<Complex64>, Failure> {
    s.split(',').map(complex).collect()
}
