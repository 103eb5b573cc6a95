//! JSON input schema shared by every CLI command, and report serialisation.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::eltype::{el_validate, ELStructure, ELType};
use crate::error::{Error, Result};
use crate::fixtures::DEFAULT_PRECISION;
use crate::hodgenewton::LeviPartition;
use crate::isocrystal::FCrystal;
use crate::polygon::{parse_rational, ConvexPolygon, KottwitzPoint};
use crate::wittring::{WittElem, WittMatrix, WittRing};

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingHeader {
    pub p: u64,
    pub s: usize,
    #[serde(default = "default_precision")]
    pub precision: u32,
}

impl RingHeader {
    pub fn of(ring: &WittRing) -> Self {
        RingHeader { p: ring.p(), s: ring.s(), precision: ring.precision() }
    }

    pub fn build(&self) -> Result<WittRing> {
        WittRing::new(self.p, self.s, self.precision)
    }
}

/// A Witt coordinate vector; a bare string stands for its constant coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemSpec {
    Coords(Vec<String>),
    Constant(String),
}

/// An integer or a "num/den" string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElSpec {
    pub m: usize,
    pub grading: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeSpec {
    pub d: usize,
    pub f: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub dims: Vec<usize>,
    pub sigma: Vec<usize>,
}

/// Every field is optional at the schema level; each command checks for the
/// fields it needs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingHeader>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<ElemSpec>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crystal: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub el: Option<ElSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<Scalar>>,
    #[serde(default, rename = "type", skip_serializing_if = "Option::is_none")]
    pub el_type: Option<TypeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub types: Option<Vec<TypeSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightSpec>,
}

fn missing(field: &str) -> Error {
    Error::InvalidInput(format!("missing field `{field}`"))
}

/// Parses a decimal integer (optionally negative) modulo p^N.
fn parse_coord(ring: &WittRing, text: &str, field: &str) -> Result<u64> {
    let v: i128 = text
        .trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("{field}: not a decimal integer: {text:?}")))?;
    Ok(v.rem_euclid(ring.modulus_int() as i128) as u64)
}

pub fn parse_elem(ring: &WittRing, spec: &ElemSpec, field: &str) -> Result<WittElem> {
    let texts: Vec<&String> = match spec {
        ElemSpec::Coords(v) => v.iter().collect(),
        ElemSpec::Constant(t) => vec![t],
    };
    if texts.len() > ring.s() || texts.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{field}: expected at most s = {} coordinates, got {}",
            ring.s(),
            texts.len()
        )));
    }
    let mut coords = vec![0u64; ring.s()];
    for (k, t) in texts.iter().enumerate() {
        coords[k] = parse_coord(ring, t, field)?;
    }
    ring.from_coords(coords)
}

pub fn parse_matrix(ring: &WittRing, rows: &[Vec<ElemSpec>]) -> Result<WittMatrix> {
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let mut r = Vec::with_capacity(row.len());
        for (j, e) in row.iter().enumerate() {
            r.push(parse_elem(ring, e, &format!("matrix[{i}][{j}]"))?);
        }
        out.push(r);
    }
    WittMatrix::from_rows(ring, out)
}

pub fn elem_json(x: &WittElem) -> Vec<String> {
    x.coords().iter().map(|c| c.to_string()).collect()
}

pub fn matrix_json(m: &WittMatrix) -> Vec<Vec<Vec<String>>> {
    m.row_vecs().iter().map(|row| row.iter().map(elem_json).collect()).collect()
}

pub fn polygon_json(p: &ConvexPolygon) -> Value {
    json!(p.to_strings())
}

pub fn kottwitz_json(k: &KottwitzPoint) -> Value {
    Value::Array(
        k.factors
            .iter()
            .map(|f| json!({"val_det": f.val_det, "normalized": crate::polygon::format_rational(&f.normalized)}))
            .collect(),
    )
}

/// A crystal as a stand-alone input file, with its grading when m > 1.
pub fn crystal_json(x: &FCrystal, el: Option<(usize, &[usize])>) -> Value {
    let mut v = json!({
        "ring": RingHeader::of(x.ring()),
        "matrix": matrix_json(x.matrix()),
        "crystal": x.is_crystal(),
    });
    if x.shift() != 0 {
        v["shift"] = json!(x.shift());
    }
    if let Some((m, grading)) = el {
        v["el"] = json!({"m": m, "grading": grading});
    }
    v
}

pub fn type_json(t: &ELType) -> Value {
    json!({"d": t.d, "f": t.f})
}

impl InputFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("input does not match the schema: {e}")))
    }

    /// Replaces the ring precision; coordinates are reread at the new precision.
    pub fn override_precision(&mut self, precision: u32) {
        if let Some(r) = self.ring.as_mut() {
            r.precision = precision;
        }
    }

    pub fn ring(&self) -> Result<WittRing> {
        self.ring.as_ref().ok_or_else(|| missing("ring"))?.build()
    }

    pub fn crystal(&self) -> Result<FCrystal> {
        let ring = self.ring()?;
        let rows = self.matrix.as_ref().ok_or_else(|| missing("matrix"))?;
        let b = parse_matrix(&ring, rows)?;
        let shift = self.shift.unwrap_or(0);
        if self.crystal == Some(true) {
            if shift != 0 {
                return Err(Error::InvalidInput("an F-crystal cannot carry a shift".into()));
            }
            FCrystal::new_crystal(b, 1)
        } else {
            FCrystal::with_shift(b, shift)
        }
    }

    /// The EL structure from `el`, or the trivial one (m = 1) when absent.
    pub fn structure(&self) -> Result<ELStructure> {
        let x = self.crystal()?;
        match &self.el {
            Some(spec) => el_validate(&x, spec.m, &spec.grading),
            None => Ok(ELStructure::trivial(x)),
        }
    }

    pub fn partition(&self) -> Result<Option<LeviPartition>> {
        self.partition.as_ref().map(|p| LeviPartition::new(p.clone())).transpose()
    }

    pub fn mu(&self) -> Result<Option<ConvexPolygon>> {
        let Some(items) = &self.mu else { return Ok(None) };
        let slopes = items
            .iter()
            .map(|s| match s {
                Scalar::Int(v) => Ok(crate::polygon::Rational::from_integer(*v)),
                Scalar::Text(t) => parse_rational(t),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(ConvexPolygon::from_slopes(slopes)))
    }

    pub fn el_type(&self) -> Result<Option<ELType>> {
        self.el_type.as_ref().map(|t| ELType::new(t.d, t.f.clone())).transpose()
    }

    pub fn types(&self) -> Result<Option<Vec<ELType>>> {
        self.types
            .as_ref()
            .map(|ts| ts.iter().map(|t| ELType::new(t.d, t.f.clone())).collect::<Result<Vec<_>>>())
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const F4: &str = r#"{"ring":{"p":3,"s":2,"precision":16},
        "matrix":[[["0","0"],["3","0"]],[["1","0"],["0","0"]]],
        "el":{"m":2,"grading":[0,1]}, "partition":[1], "mu":[0,1]}"#;

    #[test]
    fn documented_example_parses() {
        let input = InputFile::parse(F4).unwrap();
        let sx = input.structure().unwrap();
        assert_eq!(sx.crystal(), &fixtures::f4().crystal);
        assert_eq!(input.mu().unwrap().unwrap(), ConvexPolygon::from_integers(&[0, 1]));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = InputFile::parse(r#"{"ring":{"p":3,"s":1},"matrx":[]}"#).unwrap_err();
        assert!(err.to_string().contains("matrx"), "{err}");
        let err = InputFile::parse(r#"{"ring":{"p":3,"s":1,"prec":4}}"#).unwrap_err();
        assert!(err.to_string().contains("prec"), "{err}");
    }

    #[test]
    fn crystal_json_round_trips() {
        for fx in fixtures::all() {
            let v = crystal_json(&fx.crystal, Some((fx.el.m(), fx.el.grading())));
            let back = InputFile::parse(&v.to_string()).unwrap();
            assert_eq!(back.crystal().unwrap().matrix(), fx.crystal.matrix());
            assert_eq!(back.structure().unwrap().grading(), fx.el.grading());
        }
    }

    #[test]
    fn negative_and_constant_entries() {
        let input = InputFile::parse(r#"{"ring":{"p":5,"s":1,"precision":3},"matrix":[["-1"]]}"#).unwrap();
        let x = input.crystal().unwrap();
        assert_eq!(x.matrix().get(0, 0).coords(), &[124]);
    }
}
