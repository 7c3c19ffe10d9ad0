//! JSON expression trees: `{"op": name, "args": [...]}`.
//!
//! Operators: `const c`, `table [v0, v1, ...]` or `table [[id, v], ...]`,
//! `coord axis`, `dist_to_set [ids]`, `add`/`min`/`max` (variadic), `sub`,
//! `mul`, `scale c f`, `neg f`, `abs f`, `clamp f lo hi`, and the transports
//! `arctan f`, `tan f`, `reciprocal f`, `affine scale shift f`.

use serde_json::Value;

use super::{Field, Transport};
use crate::error::{LipError, Result};

fn bad(message: impl Into<String>) -> LipError {
    LipError::Parse {
        file: "field expression".into(),
        message: message.into(),
    }
}

fn number(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| bad(format!("bad number {n}"))),
        Value::String(s) => match s.as_str() {
            "inf" | "+inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            other => other
                .parse()
                .map_err(|_| bad(format!("expected a number, got {other:?}"))),
        },
        other => Err(bad(format!("expected a number, got {other}"))),
    }
}

fn index(v: &Value) -> Result<usize> {
    v.as_u64()
        .map(|i| i as usize)
        .ok_or_else(|| bad(format!("expected a point id, got {v}")))
}

/// Builds a field from a parsed expression; `n` is the number of points of
/// the host space (needed for tables).
pub fn field_from_json(v: &Value, n: usize) -> Result<Field> {
    // bare numbers are constants
    if v.is_number() {
        return Ok(Field::constant(number(v)?));
    }
    let obj = v
        .as_object()
        .ok_or_else(|| bad(format!("expected an object, got {v}")))?;
    let op = obj
        .get("op")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("missing \"op\""))?;
    let args: Vec<Value> = match obj.get("args") {
        None => Vec::new(),
        Some(Value::Array(a)) => a.clone(),
        Some(single) => vec![single.clone()],
    };
    let arity = |k: usize| -> Result<()> {
        if args.len() == k {
            Ok(())
        } else {
            Err(bad(format!(
                "{op} takes {k} argument(s), got {}",
                args.len()
            )))
        }
    };
    let sub = |i: usize| field_from_json(&args[i], n);
    let all = || {
        args.iter()
            .map(|a| field_from_json(a, n))
            .collect::<Result<Vec<_>>>()
    };

    Ok(match op {
        "const" => {
            arity(1)?;
            Field::constant(number(&args[0])?)
        }
        "table" => {
            arity(1)?;
            let rows = args[0]
                .as_array()
                .ok_or_else(|| bad("table expects an array"))?;
            if rows.iter().all(Value::is_array) {
                let mut entries = Vec::with_capacity(rows.len());
                for row in rows {
                    let pair = row.as_array().unwrap();
                    if pair.len() != 2 {
                        return Err(bad("table entries are [id, value]"));
                    }
                    entries.push((index(&pair[0])?, number(&pair[1])?));
                }
                Field::partial(n, entries)?
            } else {
                let vals = rows.iter().map(number).collect::<Result<Vec<_>>>()?;
                if vals.len() != n {
                    return Err(bad(format!(
                        "table has {} values for {n} points",
                        vals.len()
                    )));
                }
                Field::tabulated(vals)
            }
        }
        "coord" => {
            arity(1)?;
            Field::coordinate(index(&args[0])?)
        }
        "dist_to_set" => {
            arity(1)?;
            let ids = args[0]
                .as_array()
                .ok_or_else(|| bad("dist_to_set expects an array of ids"))?
                .iter()
                .map(index)
                .collect::<Result<Vec<_>>>()?;
            if let Some(&p) = ids.iter().find(|&&p| p >= n) {
                return Err(LipError::PointOutOfRange { id: p, n });
            }
            Field::dist_to_set(&ids)?
        }
        "add" | "sum" => Field::sum(all()?),
        "min" => Field::min_of(all()?),
        "max" => Field::max_of(all()?),
        "sub" => {
            arity(2)?;
            sub(0)?.sub(&sub(1)?)
        }
        "mul" => {
            arity(2)?;
            sub(0)?.mul(&sub(1)?)
        }
        "scale" => {
            arity(2)?;
            sub(1)?.scale(number(&args[0])?)
        }
        "neg" => {
            arity(1)?;
            sub(0)?.neg()
        }
        "abs" => {
            arity(1)?;
            sub(0)?.abs()
        }
        "clamp" => {
            arity(3)?;
            sub(0)?.clamp(number(&args[1])?, number(&args[2])?)
        }
        "arctan" | "tan" | "reciprocal" => {
            arity(1)?;
            let t = match op {
                "arctan" => Transport::Arctan,
                "tan" => Transport::Tan,
                _ => Transport::Reciprocal,
            };
            sub(0)?.transport(t)
        }
        "affine" => {
            arity(3)?;
            sub(2)?.transport(Transport::Affine {
                scale: number(&args[0])?,
                shift: number(&args[1])?,
            })
        }
        other => return Err(bad(format!("unknown op {other:?}"))),
    })
}

pub fn parse_field_json(text: &str, n: usize) -> Result<Field> {
    let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    field_from_json(&v, n)
}
