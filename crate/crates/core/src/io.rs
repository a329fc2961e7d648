//! CSV and JSON trajectory files, and shape-curve CSV.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planar::ShapeCurve;
use crate::shape::{MassTriple, ShapePoint};
use crate::trajectory::{Dim, Trajectory, Triple};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guess from a file extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads a trajectory. `masses` is required for CSV and overrides the JSON field.
pub fn parse<R: Read>(source: R, format: Format, masses: Option<MassTriple>) -> Result<Trajectory> {
    match format {
        Format::Csv => {
            let masses = masses.ok_or_else(|| parse_err(0, "CSV input needs masses (--masses m1,m2,m3)"))?;
            parse_csv(source, masses)
        }
        Format::Json => parse_json(source, masses),
    }
}

struct Layout {
    dim: usize,
    velocities: bool,
    normals: bool,
}

fn column_names(dim: usize, velocities: bool, normals: bool) -> Vec<String> {
    let axes = &["x", "y", "z"][..dim];
    let mut names = vec!["t".to_string()];
    for prefix in ["q"].into_iter().chain(velocities.then_some("v")) {
        for body in 1..=3 {
            for a in axes {
                names.push(format!("{prefix}{body}{a}"));
            }
        }
    }
    if normals {
        names.extend(["nx", "ny", "nz"].map(String::from));
    }
    names
}

fn layout_of(header: &csv::StringRecord) -> Result<Layout> {
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    for dim in [2, 3] {
        for velocities in [false, true] {
            for normals in [false, true] {
                if normals && dim == 2 {
                    continue;
                }
                if column_names(dim, velocities, normals) == got {
                    return Ok(Layout {
                        dim,
                        velocities,
                        normals,
                    });
                }
            }
        }
    }
    Err(parse_err(
        header.position().map_or(1, |p| p.line()),
        format!(
            "unrecognized header `{}`; expected t,q1x,q1y[,q1z],... with optional v and n columns",
            got.join(",")
        ),
    ))
}

fn number(field: &str, line: u64, name: &str) -> Result<f64> {
    let x: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("column {name}: `{field}` is not a number")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("column {name}: non-finite value")));
    }
    Ok(x)
}

fn parse_csv<R: Read>(source: R, masses: MassTriple) -> Result<Trajectory> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .has_headers(true)
        .from_reader(source);
    let header = reader
        .headers()
        .map_err(|e| parse_err(e.position().map_or(1, |p| p.line()), e.to_string()))?
        .clone();
    let layout = layout_of(&header)?;
    let names = column_names(layout.dim, layout.velocities, layout.normals);
    let mut times = Vec::new();
    let mut positions = Vec::new();
    let mut velocities = Vec::new();
    let mut normals = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != names.len() {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", names.len(), record.len()),
            ));
        }
        let values = record
            .iter()
            .zip(&names)
            .map(|(f, n)| number(f, line, n))
            .collect::<Result<Vec<f64>>>()?;
        let t = values[0];
        if let Some(&prev) = times.last() {
            if t <= prev {
                return Err(parse_err(line, format!("time {t} does not increase (previous {prev})")));
            }
        }
        times.push(t);
        let d = layout.dim;
        let triple = |offset: usize| -> Triple {
            [0, 1, 2].map(|b| {
                let mut v = Vector3::zeros();
                for a in 0..d {
                    v[a] = values[offset + b * d + a];
                }
                v
            })
        };
        positions.push(triple(1));
        if layout.velocities {
            velocities.push(triple(1 + 3 * d));
        }
        if layout.normals {
            let k = values.len() - 3;
            normals.push(Vector3::new(values[k], values[k + 1], values[k + 2]));
        }
    }
    let dim = if layout.dim == 2 { Dim::Planar } else { Dim::Spatial };
    Trajectory::new(
        masses,
        dim,
        times,
        positions,
        layout.velocities.then_some(velocities),
        layout.normals.then_some(normals),
    )
    .map_err(|e| match e {
        Error::TooFewSamples { .. } => parse_err(0, "no samples"),
        other => other,
    })
}

#[derive(Serialize, Deserialize)]
struct JsonSample {
    t: f64,
    q: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<[f64; 3]>,
}

#[derive(Serialize, Deserialize)]
struct JsonTrajectory {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    masses: Option<[f64; 3]>,
    dim: u8,
    samples: Vec<JsonSample>,
}

fn json_triple(rows: &[Vec<f64>], dim: usize, k: usize, what: &str) -> Result<Triple> {
    if rows.len() != 3 || rows.iter().any(|r| r.len() != dim) {
        return Err(parse_err(
            0,
            format!("sample {k}: `{what}` must hold three {dim}-vectors"),
        ));
    }
    let mut out = [Vector3::zeros(); 3];
    for b in 0..3 {
        for a in 0..dim {
            if !rows[b][a].is_finite() {
                return Err(parse_err(0, format!("sample {k}: non-finite `{what}`")));
            }
            out[b][a] = rows[b][a];
        }
    }
    Ok(out)
}

fn parse_json<R: Read>(source: R, masses: Option<MassTriple>) -> Result<Trajectory> {
    let doc: JsonTrajectory = serde_json::from_reader(source).map_err(|e| parse_err(e.line() as u64, e.to_string()))?;
    let masses = match (masses, doc.masses) {
        (Some(m), _) => m,
        (None, Some(m)) => MassTriple::try_from(m)?,
        (None, None) => return Err(parse_err(0, "no masses in file or on the command line")),
    };
    let dim = Dim::try_from(doc.dim).map_err(|e| parse_err(0, e))?;
    let d = dim.value();
    let mut times = Vec::with_capacity(doc.samples.len());
    let mut positions = Vec::with_capacity(doc.samples.len());
    let mut velocities = Vec::new();
    let mut normals = Vec::new();
    let has_v = doc.samples.first().is_some_and(|s| s.v.is_some());
    let has_n = doc.samples.first().is_some_and(|s| s.n.is_some());
    for (k, s) in doc.samples.iter().enumerate() {
        if let Some(&prev) = times.last() {
            if !(s.t > prev) {
                return Err(parse_err(0, format!("sample {k}: time {} does not increase", s.t)));
            }
        }
        times.push(s.t);
        positions.push(json_triple(&s.q, d, k, "q")?);
        match (&s.v, has_v) {
            (Some(v), true) => velocities.push(json_triple(v, d, k, "v")?),
            (None, false) => {}
            _ => {
                return Err(parse_err(
                    0,
                    format!("sample {k}: velocities must be given for all samples or none"),
                ))
            }
        }
        match (s.n, has_n) {
            (Some(n), true) => normals.push(Vector3::from(n)),
            (None, false) => {}
            _ => {
                return Err(parse_err(
                    0,
                    format!("sample {k}: normals must be given for all samples or none"),
                ))
            }
        }
    }
    Trajectory::new(
        masses,
        dim,
        times,
        positions,
        has_v.then_some(velocities),
        has_n.then_some(normals),
    )
}

/// Writes a trajectory; output parses back to the same trajectory bit for bit.
pub fn serialize<W: Write>(traj: &Trajectory, format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(traj, out),
        Format::Json => write_json(traj, out),
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidParameter(format!("write failed: {e}"))
}

fn write_csv<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let d = traj.dim.value();
    let normals = traj.normals.as_ref().filter(|_| traj.dim == Dim::Spatial);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(column_names(d, traj.velocities.is_some(), normals.is_some()))
        .map_err(io_err)?;
    for k in 0..traj.len() {
        let mut row = vec![traj.times[k].to_string()];
        let mut push = |t: &Triple| {
            for v in t {
                row.extend(v.iter().take(d).map(f64::to_string));
            }
        };
        push(&traj.positions[k]);
        if let Some(v) = &traj.velocities {
            push(&v[k]);
        }
        if let Some(n) = normals {
            row.extend(n[k].iter().map(f64::to_string));
        }
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn write_json<W: Write>(traj: &Trajectory, mut out: W) -> Result<()> {
    let d = traj.dim.value();
    let rows = |t: &Triple| t.iter().map(|v| v.iter().take(d).copied().collect()).collect();
    let doc = JsonTrajectory {
        masses: Some(traj.masses.as_array()),
        dim: d as u8,
        samples: (0..traj.len())
            .map(|k| JsonSample {
                t: traj.times[k],
                q: rows(&traj.positions[k]),
                v: traj.velocities.as_ref().map(|v| rows(&v[k])),
                n: traj.normals.as_ref().map(|n| [n[k].x, n[k].y, n[k].z]),
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut out, &doc).map_err(io_err)?;
    writeln!(out).map_err(io_err)
}

/// Shape-curve CSV: `t,w1,w2,w3,xi_unwound`.
pub fn write_shape_curve<W: Write>(curve: &ShapeCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "w1", "w2", "w3", "xi_unwound"]).map_err(io_err)?;
    for k in 0..curve.len() {
        let p = &curve.points[k];
        w.write_record([curve.times[k], p.w1, p.w2, p.w3, curve.unwound_xi[k]].map(|x| x.to_string()))
            .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Reads a shape curve from CSV with columns `t,w1,w2,w3` (any order) and
/// optionally `w4`; other columns are ignored.
pub fn read_shape_curve<R: Read>(source: R) -> Result<ShapeCurve> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(source);
    let header = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let find = |name: &str| header.iter().position(|h| h.trim() == name);
    let column = |n: &str| find(n).ok_or_else(|| parse_err(1, format!("missing column `{n}`")));
    let (ct, c1, c2, c3) = (column("t")?, column("w1")?, column("w2")?, column("w3")?);
    let c4 = find("w4");
    let mut times = Vec::new();
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let get = |c: usize| number(&record[c], line, &header[c]);
        let t = get(ct)?;
        if times.last().is_some_and(|&p| t <= p) {
            return Err(parse_err(line, format!("time {t} does not increase")));
        }
        let (w1, w2, w3) = (get(c1)?, get(c2)?, get(c3)?);
        let w4 = match c4 {
            Some(c) => get(c)?,
            None => (w1 * w1 + w2 * w2 + w3 * w3).sqrt(),
        };
        times.push(t);
        points.push(ShapePoint::new(w1, w2, w3, w4));
    }
    if times.is_empty() {
        return Err(parse_err(0, "no samples"));
    }
    ShapeCurve::new(times, &points, c4.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLANAR: &str = "t,q1x,q1y,q2x,q2y,q3x,q3y\n0,1,0,-0.5,0.8660254037844386,-0.5,-0.8660254037844386\n# comment\n0.5,0,1,-0.8660254037844386,-0.5,0.8660254037844386,-0.5\n1,-1,0,0.5,-0.8660254037844386,0.5,0.8660254037844386\n";

    #[test]
    fn planar_csv_without_velocities() {
        let t = parse(PLANAR.as_bytes(), Format::Csv, Some(MassTriple::equal())).unwrap();
        assert_eq!(t.dim, Dim::Planar);
        assert_eq!(t.len(), 3);
        assert!(t.velocities.is_none());
    }

    #[test]
    fn velocity_columns_are_read() {
        let src = "t,q1x,q1y,q2x,q2y,q3x,q3y,v1x,v1y,v2x,v2y,v3x,v3y\n0,1,0,-1,0,0,0,0,1,0,-1,0,0\n1,1,1,-1,-1,0,0,0,1,0,-1,0,0\n";
        let t = parse(src.as_bytes(), Format::Csv, Some(MassTriple::equal())).unwrap();
        assert_eq!(t.velocities.unwrap()[0][0], Vector3::new(0.0, 1.0, 0.0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let mut src = String::from("t,q1x,q1y,q2x,q2y,q3x,q3y\n");
        for k in 0..5 {
            src.push_str(&format!("{k},1,0,-1,0,0,{}\n", k as f64 * 0.0));
        }
        src.push_str("3,1,0,-1,0,0,0\n");
        let e = parse(src.as_bytes(), Format::Csv, Some(MassTriple::equal())).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 7, .. }), "{e:?}");
        let e = parse(
            "t,q1x,q1y,q2x,q2y,q3x,q3y\n0,1,0\n".as_bytes(),
            Format::Csv,
            Some(MassTriple::equal()),
        )
        .unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse(
            "t,q1x,q1y,q2x,q2y,q3x,q3y\n0,1,0,-1,0,0,NaN\n".as_bytes(),
            Format::Csv,
            Some(MassTriple::equal()),
        )
        .unwrap_err();
        assert!(e.is_parse());
        assert!(parse(PLANAR.as_bytes(), Format::Csv, None).unwrap_err().is_parse());
    }

    #[test]
    fn json_round_trip() {
        let t = parse(
            PLANAR.as_bytes(),
            Format::Csv,
            Some(MassTriple::new(1.0, 2.0, 3.0).unwrap()),
        )
        .unwrap();
        let mut buf = Vec::new();
        serialize(&t, Format::Json, &mut buf).unwrap();
        let back = parse(buf.as_slice(), Format::Json, None).unwrap();
        assert_eq!(back.positions, t.positions);
        assert_eq!(back.masses, t.masses);
    }
}
