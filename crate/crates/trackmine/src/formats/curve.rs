//! Outlier curves as `fraction,ami,n,distinguished`; an undefined AMI is an
//! empty field.

use std::path::Path;

use trackmine_core::eval::{CurvePoint, EvaluationCurve};

use crate::error::{Error, Location, Result};

pub const HEADER: &str = "fraction,ami,n,distinguished";

pub fn render_curve(curve: &EvaluationCurve) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for p in &curve.points {
        let ami = p.ami.map(|a| a.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{}\n", p.fraction, ami, p.n, p.distinguished));
    }
    out
}

pub fn write_curve(path: &Path, curve: &EvaluationCurve) -> Result<()> {
    std::fs::write(path, render_curve(curve)).map_err(|e| Error::io(path, e))
}

pub fn read_curve(path: &Path) -> Result<Vec<CurvePoint>> {
    let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = body.lines().enumerate();
    if lines.next().map(|(_, l)| l) != Some(HEADER) {
        return Err(Error::data(path, Some(Location::Line(1)), format!("expected header {HEADER}")));
    }
    let mut points = Vec::new();
    for (i, line) in lines {
        let bad = |what: &str| Error::data(path, Some(Location::Line(i as u64 + 1)), format!("bad {what}"));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(bad("field count"));
        }
        points.push(CurvePoint {
            fraction: f[0].parse().map_err(|_| bad("fraction"))?,
            ami: if f[1].is_empty() { None } else { Some(f[1].parse().map_err(|_| bad("ami"))?) },
            n: f[2].parse().map_err(|_| bad("n"))?,
            distinguished: f[3].parse().map_err(|_| bad("distinguished"))?,
        });
    }
    Ok(points)
}
