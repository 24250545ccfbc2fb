//! `annotations.csv`: `track_id,annotation` with annotation one of
//! `category:<name>`, `unknown` or `tracking_error`.

use std::collections::BTreeSet;
use std::path::Path;

use trackmine_core::Annotation;

use crate::error::{Error, Location, Result};

const HEADER: [&str; 2] = ["track_id", "annotation"];

pub fn parse_annotation(s: &str) -> Result<Annotation, String> {
    match s {
        "unknown" => Ok(Annotation::UnknownValid),
        "tracking_error" => Ok(Annotation::TrackingError),
        _ => match s.strip_prefix("category:") {
            Some("") => Err("empty category name".into()),
            Some(name) => Ok(Annotation::Category(name.into())),
            None => Err(format!("unrecognised annotation {s:?}")),
        },
    }
}

pub fn format_annotation(a: &Annotation) -> String {
    match a {
        Annotation::Category(name) => format!("category:{name}"),
        Annotation::UnknownValid => "unknown".into(),
        Annotation::TrackingError => "tracking_error".into(),
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let at = e.position().map(|p| Location::Line(p.line()));
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        kind => Error::data(path, at, format!("{kind:?}")),
    }
}

/// Rows in file order; duplicate track ids are an error.
pub fn read_annotations(path: &Path) -> Result<Vec<(String, Annotation)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?;
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::data(path, Some(Location::Line(1)), "expected header track_id,annotation"));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let at = Some(Location::Line(rec.position().map_or(0, |p| p.line())));
        let (id, value) = (&rec[0], &rec[1]);
        let annotation = parse_annotation(value).map_err(|m| Error::data(path, at, m))?;
        if !seen.insert(id.to_string()) {
            return Err(Error::data(path, at, format!("duplicate track_id {id}")));
        }
        out.push((id.to_string(), annotation));
    }
    Ok(out)
}

pub fn write_annotations<'a>(path: &Path, rows: impl IntoIterator<Item = (&'a str, &'a Annotation)>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(HEADER).map_err(|e| csv_error(path, e))?;
    for (id, a) in rows {
        w.write_record([id, format_annotation(a).as_str()]).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
