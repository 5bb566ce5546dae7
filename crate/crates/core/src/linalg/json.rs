//! JSON literals for matrices: `{"rows": r, "cols": c, "entries": [[...], ...]}`
//! with integers (numbers or decimal strings) or `"p/q"` strings.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use super::matrix::Matrix;
use super::ring::{Rat, Ring, RingKind};

pub fn int_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(x) => Value::from(x),
        None => Value::String(n.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Result<BigInt, String> {
    let q = rat_from_json(v)?;
    if q.is_integer() {
        Ok(q.to_integer())
    } else {
        Err(format!("expected an integer, found {q}"))
    }
}

pub fn rat_to_json(q: &Rat) -> Value {
    if q.is_integer() {
        int_to_json(&q.to_integer())
    } else {
        Value::String(format!("{}/{}", q.numer(), q.denom()))
    }
}

pub fn rat_from_json(v: &Value) -> Result<Rat, String> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rat::from_integer(BigInt::from(i)))
            } else if let Some(u) = n.as_u64() {
                Ok(Rat::from_integer(BigInt::from(u)))
            } else {
                Err(format!("non-integral number {n}; write rationals as \"p/q\""))
            }
        }
        Value::String(s) => parse_rat(s),
        other => Err(format!("expected a number or \"p/q\" string, found {other}")),
    }
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| format!("bad numerator in '{s}'"))?;
    let q: BigInt = q.parse().map_err(|_| format!("bad denominator in '{s}'"))?;
    if q.is_zero() {
        return Err(format!("zero denominator in '{s}'"));
    }
    Ok(Rat::new(p, q))
}

/// Whether a literal entry is written as a non-integral rational.
pub fn is_rational_literal(v: &Value) -> bool {
    matches!(rat_from_json(v), Ok(q) if !q.is_integer())
}

pub fn scalar_to_json<R: Ring>(x: &R) -> Value {
    rat_to_json(&x.to_rat())
}

pub fn scalar_from_json<R: Ring>(v: &Value) -> Result<R, String> {
    let q = rat_from_json(v)?;
    R::from_rat(&q).ok_or_else(|| format!("entry {q} is not in {}", R::KIND))
}

/// Raw matrix literal before the coefficient ring is fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixLiteral {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Value>>,
}

impl MatrixLiteral {
    /// The smallest ring containing every entry, or an error for malformed
    /// entries.
    pub fn natural_ring(&self) -> Result<RingKind, String> {
        let mut kind = RingKind::Z;
        for row in &self.entries {
            for v in row {
                let q = rat_from_json(v)?;
                if !q.is_integer() {
                    kind = RingKind::Q;
                }
            }
        }
        Ok(kind)
    }

    pub fn check_shape(&self) -> Result<(), String> {
        if self.entries.len() != self.rows {
            return Err(format!(
                "declared {} rows but found {}",
                self.rows,
                self.entries.len()
            ));
        }
        for (i, r) in self.entries.iter().enumerate() {
            if r.len() != self.cols {
                return Err(format!(
                    "row {i} has {} entries, expected {}",
                    r.len(),
                    self.cols
                ));
            }
        }
        Ok(())
    }

    pub fn to_matrix<R: Ring>(&self) -> Result<Matrix<R>, String> {
        self.check_shape()?;
        let data = self
            .entries
            .iter()
            .flatten()
            .map(scalar_from_json::<R>)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix::from_vec(self.rows, self.cols, data))
    }

    /// Accepts the literal object or a bare array of rows.
    pub fn from_value(v: &Value) -> Result<Self, String> {
        match v {
            Value::Array(rows) => {
                let entries = rows
                    .iter()
                    .map(|r| r.as_array().cloned().ok_or("matrix rows must be arrays"))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(MatrixLiteral {
                    rows: entries.len(),
                    cols: entries.first().map_or(0, |r| r.len()),
                    entries,
                })
            }
            _ => serde_json::from_value(v.clone()).map_err(|e| e.to_string()),
        }
    }

    pub fn from_matrix<R: Ring>(m: &Matrix<R>) -> Self {
        MatrixLiteral {
            rows: m.rows(),
            cols: m.cols(),
            entries: (0..m.rows())
                .map(|i| m.row(i).iter().map(scalar_to_json).collect())
                .collect(),
        }
    }
}

impl<R: Ring> Serialize for Matrix<R> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixLiteral::from_matrix(self).serialize(s)
    }
}

impl<'de, R: Ring> Deserialize<'de> for Matrix<R> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let lit = MatrixLiteral::deserialize(d)?;
        lit.to_matrix().map_err(D::Error::custom)
    }
}

/// Serializes a vector of scalars as a JSON array.
pub fn vector_to_json<R: Ring>(v: &[R]) -> Value {
    Value::Array(v.iter().map(scalar_to_json).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{IntMat, RatMat};

    #[test]
    fn parses_integer_and_rational_literals() {
        let m: RatMat =
            serde_json::from_str(r#"{"rows":1,"cols":3,"entries":[[1,"3/6","-2"]]}"#).unwrap();
        assert_eq!(m[(0, 1)], Rat::new(1.into(), 2.into()));
        let z: Result<IntMat, _> =
            serde_json::from_str(r#"{"rows":1,"cols":2,"entries":[[1,"1/2"]]}"#);
        assert!(z.is_err());
        let bad: Result<IntMat, _> = serde_json::from_str(r#"{"rows":2,"cols":1,"entries":[[1]]}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn writes_canonical_literals() {
        let m = RatMat::from_vec(1, 2, vec![Rat::new(2.into(), 4.into()), Rat::from_integer(3.into())]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"entries":[["1/2",3]]}"#);
    }
}
