//! Reading spaces, subsets, values, witnesses and covers from files, and
//! writing value tables. Parse errors name the file and, for CSV, the line.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::error::{LipError, Result};
use crate::local_lipschitz::LocalWitness;
use crate::metric_space::{Edge, MetricSpace, Subset};
use crate::partition_of_unity::{Ball, CozeroCover};
use crate::scalar_field::{field_from_json, Field};

fn parse_err(file: &Path, message: impl Into<String>) -> LipError {
    LipError::Parse {
        file: file.display().to_string(),
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| LipError::Io(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| parse_err(path, format!("line {}: {e}", e.line())))
}

/// Numeric CSV rows with their 1-based line numbers. Blank lines and lines
/// starting with `#` are skipped, as is a first row that is not numeric.
pub fn read_numeric_csv(path: &Path) -> Result<Vec<(usize, Vec<f64>)>> {
    let text = read(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(path, e.to_string()))?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push((line, row)),
            Err(_) if rows.is_empty() && i == 0 => continue,
            Err(e) => return Err(parse_err(path, format!("line {line}: {e}"))),
        }
    }
    Ok(rows)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    nodes: usize,
    edges: Vec<Edge>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    lo: f64,
    hi: f64,
    step: f64,
}

/// Loads a space. JSON files hold a graph `{nodes, edges: [{u, v, w}]}` or
/// a grid `{lo, hi, step}`. CSV files hold a distance matrix or a point
/// cloud `id, x1, .., xk`; a square table with zero diagonal is read as a
/// matrix. The prefixes `matrix:` and `points:` force the CSV reading.
pub fn read_space(arg: &str) -> Result<MetricSpace> {
    let (kind, path) = match arg.split_once(':') {
        Some((k @ ("matrix" | "points"), rest)) => (Some(k), Path::new(rest)),
        _ => (None, Path::new(arg)),
    };
    if path.extension().is_some_and(|e| e == "json") {
        let v = read_json(path)?;
        if v.get("edges").is_some() {
            let g: GraphFile =
                serde_json::from_value(v).map_err(|e| parse_err(path, e.to_string()))?;
            return MetricSpace::graph(g.nodes, &g.edges);
        }
        let g: GridFile = serde_json::from_value(v)
            .map_err(|e| parse_err(path, format!("expected a graph or a grid: {e}")))?;
        return MetricSpace::grid(g.lo, g.hi, g.step);
    }
    let rows = read_numeric_csv(path)?;
    if rows.is_empty() {
        return Err(parse_err(path, "no rows"));
    }
    let n = rows.len();
    let square = rows.iter().all(|(_, r)| r.len() == n)
        && rows.iter().enumerate().all(|(i, (_, r))| r[i] == 0.0);
    let matrix = match kind {
        Some("matrix") => true,
        Some(_) => false,
        None => square,
    };
    if matrix {
        for (line, r) in &rows {
            if r.len() != n {
                return Err(parse_err(
                    path,
                    format!("line {line}: expected {n} entries, found {}", r.len()),
                ));
            }
        }
        return MetricSpace::from_matrix(rows.into_iter().map(|(_, r)| r).collect());
    }
    let dim = rows[0].1.len();
    let mut coords = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    for (line, r) in rows {
        if r.len() != dim || dim < 2 {
            return Err(parse_err(
                path,
                format!(
                    "line {line}: expected id and {} coordinates",
                    dim.max(2) - 1
                ),
            ));
        }
        let id = as_id(path, line, r[0], n)?;
        if seen[id] {
            return Err(parse_err(path, format!("line {line}: duplicate id {id}")));
        }
        seen[id] = true;
        coords[id] = r[1..].to_vec();
    }
    MetricSpace::euclidean(coords)
}

fn as_id(path: &Path, line: usize, v: f64, n: usize) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && (v as usize) < n {
        Ok(v as usize)
    } else {
        Err(parse_err(
            path,
            format!("line {line}: {v} is not a point id below {n}"),
        ))
    }
}

/// A JSON array of point ids.
pub fn read_subset(path: &Path, space: &MetricSpace) -> Result<Subset> {
    let ids: Vec<usize> = serde_json::from_value(read_json(path)?)
        .map_err(|e| parse_err(path, format!("expected an array of ids: {e}")))?;
    space
        .subset(ids)
        .map_err(|e| parse_err(path, e.to_string()))
}

/// `id, value` rows; ids may cover any part of the space but not repeat.
pub fn read_values(path: &Path, n: usize) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    let mut seen = vec![false; n];
    for (line, r) in read_numeric_csv(path)? {
        if r.len() != 2 {
            return Err(parse_err(
                path,
                format!("line {line}: expected `id, value`"),
            ));
        }
        let id = as_id(path, line, r[0], n)?;
        if seen[id] {
            return Err(parse_err(path, format!("line {line}: duplicate id {id}")));
        }
        seen[id] = true;
        out.push((id, r[1]));
    }
    Ok(out)
}

/// Values on every point of the space.
pub fn read_full_values(path: &Path, n: usize) -> Result<Vec<f64>> {
    let mut vals = vec![f64::NAN; n];
    for (id, v) in read_values(path, n)? {
        vals[id] = v;
    }
    if let Some(p) = vals.iter().position(|v| v.is_nan()) {
        return Err(parse_err(path, format!("no value for point {p}")));
    }
    Ok(vals)
}

/// Values on the points of `a`, in the order of its ids.
pub fn read_subset_values(path: &Path, a: &Subset) -> Result<Vec<f64>> {
    let mut vals = vec![f64::NAN; a.len()];
    for (id, v) in read_values(path, a.host_len())? {
        let i = a
            .position(id)
            .ok_or_else(|| parse_err(path, format!("point {id} is not in the subset")))?;
        vals[i] = v;
    }
    if let Some(i) = vals.iter().position(|v| v.is_nan()) {
        return Err(parse_err(
            path,
            format!("no value for subset point {}", a.ids()[i]),
        ));
    }
    Ok(vals)
}

/// A field given either as a value CSV or as a JSON expression tree.
pub fn read_field(path: &Path, n: usize) -> Result<Field> {
    if path.extension().is_some_and(|e| e == "json") {
        field_from_json(&read_json(path)?, n).map_err(|e| parse_err(path, e.to_string()))
    } else {
        Ok(Field::tabulated(read_full_values(path, n)?))
    }
}

/// `[{p, delta, K}, ...]`.
pub fn read_witness(path: &Path, space: &MetricSpace) -> Result<LocalWitness> {
    let w: LocalWitness =
        serde_json::from_value(read_json(path)?).map_err(|e| parse_err(path, e.to_string()))?;
    let w = LocalWitness::new(w.entries().to_vec()).map_err(|e| parse_err(path, e.to_string()))?;
    for e in w.entries() {
        space
            .check_point(e.p)
            .map_err(|err| parse_err(path, err.to_string()))?;
    }
    Ok(w)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoverSet {
    Balls { balls: Vec<Ball> },
    Values { values: Vec<f64> },
    Expr { expr: Value },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoverFile {
    Sets(Vec<CoverSet>),
    Capped {
        #[serde(default = "one")]
        cap: f64,
        sets: Vec<CoverSet>,
    },
}

fn one() -> f64 {
    1.0
}

/// A countable cover as a list of sets, each `{"balls": [{center,
/// radius}]}`, `{"values": [..]}` or `{"expr": ..}`, optionally wrapped
/// as `{"cap": c, "sets": [..]}`. A cover made of ball unions gets the
/// capped ball witnesses; otherwise bounds and budgets are measured.
pub fn read_cover(path: &Path, space: &MetricSpace) -> Result<CozeroCover> {
    let file: CoverFile =
        serde_json::from_value(read_json(path)?).map_err(|e| parse_err(path, e.to_string()))?;
    let (cap, sets) = match file {
        CoverFile::Sets(s) => (1.0, s),
        CoverFile::Capped { cap, sets } => (cap, sets),
    };
    let wrap = |e: LipError| parse_err(path, e.to_string());
    if sets.iter().all(|s| matches!(s, CoverSet::Balls { .. })) {
        let unions: Vec<Vec<Ball>> = sets
            .into_iter()
            .map(|s| match s {
                CoverSet::Balls { balls } => balls,
                _ => unreachable!(),
            })
            .collect();
        return CozeroCover::from_balls(space, &unions, cap).map_err(wrap);
    }
    let mut witnesses = Vec::with_capacity(sets.len());
    for s in sets {
        witnesses.push(match s {
            CoverSet::Balls { balls } => {
                let one = CozeroCover::from_balls(space, &[balls], cap).map_err(wrap)?;
                Field::tabulated(one.table(0).to_vec())
            }
            CoverSet::Values { values } => {
                if values.len() != space.len() {
                    return Err(parse_err(
                        path,
                        format!("{} values for {} points", values.len(), space.len()),
                    ));
                }
                Field::tabulated(values)
            }
            CoverSet::Expr { expr } => field_from_json(&expr, space.len()).map_err(wrap)?,
        });
    }
    CozeroCover::from_witnesses(space, witnesses).map_err(wrap)
}

/// `id,value` rows in shortest round-trip notation.
pub fn write_values(path: &Path, vals: &[f64]) -> Result<()> {
    write_table(
        path,
        &["id", "value"],
        vals.iter().enumerate().map(|(i, v)| vec![i as f64, *v]),
    )
}

/// A CSV table with a header row.
pub fn write_table(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    let mut f =
        fs::File::create(path).map_err(|e| LipError::Io(format!("{}: {e}", path.display())))?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

/// Integers without a fractional part, infinities as `inf`/`-inf`.
pub fn format_number(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p.display().to_string()
    }

    #[test]
    fn reads_each_space_kind() {
        let dir = tempfile::tempdir().unwrap();
        let m = write(&dir, "m.csv", "0,1,2\n1,0,1\n2,1,0\n");
        assert_eq!(read_space(&m).unwrap().dist(0, 2).unwrap(), 2.0);
        let p = write(&dir, "p.csv", "id,x,y\n1,3,4\n0,0,0\n");
        assert_eq!(read_space(&p).unwrap().dist(0, 1).unwrap(), 5.0);
        let g = write(
            &dir,
            "g.json",
            r#"{"nodes":3,"edges":[{"u":0,"v":1,"w":1},{"u":1,"v":2,"w":2}]}"#,
        );
        assert_eq!(read_space(&g).unwrap().dist(0, 2).unwrap(), 3.0);
        let grid = write(&dir, "grid.json", r#"{"lo":0,"hi":2,"step":0.5}"#);
        assert_eq!(read_space(&grid).unwrap().len(), 5);
    }

    #[test]
    fn errors_name_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "bad.csv", "0,0\n1,abc\n");
        let err = read_space(&p).unwrap_err().to_string();
        assert!(err.contains("bad.csv") && err.contains("line 2"), "{err}");
        let s = MetricSpace::grid(0.0, 1.0, 0.5).unwrap();
        let v = write(&dir, "v.csv", "id,value\n0,1\n7,2\n");
        let err = read_values(Path::new(&v), s.len()).unwrap_err().to_string();
        assert!(err.contains("v.csv") && err.contains("line 3"), "{err}");
    }

    #[test]
    fn reads_cover_of_balls_and_tables() {
        let dir = tempfile::tempdir().unwrap();
        let s = MetricSpace::grid(0.0, 2.0, 0.5).unwrap();
        let c = write(
            &dir,
            "c.json",
            r#"[{"balls":[{"center":0,"radius":1.2}]},{"balls":[{"center":4,"radius":1.2}]}]"#,
        );
        let cover = read_cover(Path::new(&c), &s).unwrap();
        assert_eq!(cover.len(), 2);
        let mixed = write(
            &dir,
            "m.json",
            r#"{"cap":2,"sets":[{"values":[1,1,0,0,0]},{"expr":{"op":"dist_to_set","args":[[0]]}}]}"#,
        );
        assert_eq!(read_cover(Path::new(&mixed), &s).unwrap().len(), 2);
    }

    #[test]
    fn number_format_is_stable() {
        assert_eq!(format_number(2.0), "2");
        assert_eq!(format_number(0.1), "0.1");
        assert_eq!(format_number(f64::NEG_INFINITY), "-inf");
    }
}
