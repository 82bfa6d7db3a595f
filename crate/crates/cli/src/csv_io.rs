//! Point CSV input (`x,y,class`) and curve CSV output.

use std::io::{Read, Write};

use segstat::ripley::LCurve;
use segstat::{Point, PointSet, Rect};

use crate::error::{CliError, CliResult};

/// Parsed input: the point set plus the original class tokens, indexed by
/// class id (ids follow first appearance in the file).
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPoints {
    pub points: PointSet,
    pub class_names: Vec<String>,
}

/// Parses `xmin,ymin,xmax,ymax`.
pub fn parse_region(s: &str) -> CliResult<Rect> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Validation(format!("region '{s}' is not four numbers")))?;
    match parts[..] {
        [a, b, c, d] => Ok(Rect::new(a, b, c, d)?),
        _ => Err(CliError::Validation(format!("region '{s}' needs xmin,ymin,xmax,ymax"))),
    }
}

/// Reads labeled points. The region defaults to the bounding box.
pub fn parse_points_csv<R: Read>(input: R, region: Option<Rect>) -> CliResult<ParsedPoints> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| CliError::Validation(format!("cannot read header: {e}")))?
        .clone();
    let names: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    if names.len() != 3 || names[0] != "x" || names[1] != "y" || names[2] != "class" {
        return Err(CliError::Validation(if headers.is_empty() {
            "empty input: expected header x,y,class".to_string()
        } else {
            format!("header must be x,y,class, found {}", names.join(","))
        }));
    }

    let mut coords = Vec::new();
    let mut labels = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Validation(format!("malformed CSV: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 3 {
            return Err(CliError::Validation(format!(
                "line {line}: expected 3 fields, found {}",
                record.len()
            )));
        }
        let num = |i: usize, what: &str| {
            record[i]
                .parse::<f64>()
                .map_err(|_| CliError::Validation(format!("line {line}: {what} '{}' is not a number", &record[i])))
        };
        let (x, y) = (num(0, "x")?, num(1, "y")?);
        if !x.is_finite() || !y.is_finite() {
            return Err(CliError::Validation(format!("line {line}: non-finite coordinate")));
        }
        let token = &record[2];
        if token.is_empty() {
            return Err(CliError::Validation(format!("line {line}: empty class")));
        }
        let id = match class_names.iter().position(|c| c == token) {
            Some(id) => id,
            None => {
                class_names.push(token.to_string());
                class_names.len() - 1
            }
        };
        coords.push(Point::new(x, y));
        labels.push(id);
    }
    if coords.len() < 2 {
        return Err(CliError::Validation(format!(
            "need at least 2 points, found {}",
            coords.len()
        )));
    }
    let region = match region {
        Some(r) => r,
        None => Rect::bounding(&coords)?,
    };
    let points = PointSet::with_classes(coords, labels, class_names.len(), region)?;
    Ok(ParsedPoints { points, class_names })
}

/// Writes `t,l_minus_t,env_low,env_high`; envelope columns stay empty when
/// no envelope was simulated.
pub fn write_curve_csv<W: Write>(out: W, curve: &LCurve) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Runtime(e.to_string());
    w.write_record(["t", "l_minus_t", "env_low", "env_high"]).map_err(io)?;
    for (k, (t, v)) in curve.t.iter().zip(&curve.l_minus_t).enumerate() {
        let (lo, hi) = match &curve.envelope {
            Some(e) => (e.low[k].to_string(), e.high[k].to_string()),
            None => (String::new(), String::new()),
        };
        w.write_record([t.to_string(), v.to_string(), lo, hi]).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
