//! Canonical JSON form of exact polynomial-Gaussians.
//!
//! Field elements are 4-tuples of rational strings over `{1, i, sqrt 2, i sqrt 2}`;
//! a coefficient is a list of `{pi, value}` grades.

use serde::{Deserialize, Serialize};

use super::{ExactPG, Monomial};
use crate::error::{KmError, Result};
use crate::field::{parse_rational, Coefficient, QI2};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeJson {
    pub pi: i32,
    pub value: [String; 4],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub monomial: Vec<[u16; 2]>,
    pub coefficient: Vec<GradeJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyGaussianJson {
    pub num_vars: usize,
    pub scales: Vec<[String; 4]>,
    pub terms: Vec<TermJson>,
}

pub fn field_to_json(x: &QI2) -> [String; 4] {
    x.to_tuple().map(|r| r.to_string())
}

pub fn field_from_json(t: &[String; 4]) -> Result<QI2> {
    let mut parts = Vec::with_capacity(4);
    for s in t {
        parts.push(parse_rational(s).ok_or_else(|| KmError::Parse(format!("bad rational {:?}", s)))?);
    }
    let parts: [_; 4] = parts.try_into().expect("four parts");
    Ok(QI2::from_tuple(parts))
}

pub fn coefficient_to_json(c: &Coefficient) -> Vec<GradeJson> {
    c.grades().map(|(pi, v)| GradeJson { pi, value: field_to_json(v) }).collect()
}

pub fn coefficient_from_json(grades: &[GradeJson]) -> Result<Coefficient> {
    let mut entries = Vec::with_capacity(grades.len());
    for g in grades {
        entries.push((g.pi, field_from_json(&g.value)?));
    }
    Ok(Coefficient::from_grades(entries))
}

impl ExactPG {
    pub fn to_json(&self) -> PolyGaussianJson {
        PolyGaussianJson {
            num_vars: self.num_vars,
            scales: self.scales.iter().map(field_to_json).collect(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson {
                    monomial: m.chunks(2).map(|p| [p[0], p[1]]).collect(),
                    coefficient: coefficient_to_json(c),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &PolyGaussianJson) -> Result<Self> {
        if j.scales.len() != j.num_vars {
            return Err(KmError::Parse(format!("{} scales for {} variables", j.scales.len(), j.num_vars)));
        }
        let scales = j.scales.iter().map(field_from_json).collect::<Result<Vec<_>>>()?;
        if scales.iter().any(|c| !c.re_positive()) {
            return Err(KmError::NonIntegrable("a scale has non-positive real part".into()));
        }
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            if t.monomial.len() != j.num_vars {
                return Err(KmError::Parse("monomial length does not match num_vars".into()));
            }
            let mono: Monomial = t.monomial.iter().flat_map(|p| p.iter().copied()).collect();
            terms.push((mono, coefficient_from_json(&t.coefficient)?));
        }
        ExactPG::from_terms(scales, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    #[test]
    fn round_trip() {
        let c = Coefficient::from_grades([(0, QI2::from_rational(rat(-3, 4))), (-1, QI2::i())]);
        let f = ExactPG::monomial(&[(1, 2), (0, 1)], c);
        let text = serde_json::to_string(&f.to_json()).unwrap();
        let back: PolyGaussianJson = serde_json::from_str(&text).unwrap();
        assert_eq!(ExactPG::from_json(&back).unwrap(), f);
    }

    #[test]
    fn rejects_bad_rationals() {
        let j = PolyGaussianJson {
            num_vars: 1,
            scales: [["x", "0", "0", "0"].map(String::from)].to_vec(),
            terms: vec![],
        };
        assert!(matches!(ExactPG::from_json(&j), Err(KmError::Parse(_))));
    }
}
