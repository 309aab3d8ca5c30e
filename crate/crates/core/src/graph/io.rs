//! Node/edge list CSV loading and export.
//!
//! Node files carry `id,lat,lon` in decimal degrees; edge files carry
//! `u,v,length,oneway` with lengths in meters and `oneway` in {true,false}.
//! Planar networks flag their coordinate system with a `# metric=planar`
//! comment line ahead of the node header, and reuse `lat,lon` as y,x.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use thiserror::Error;

use super::{BuildError, GeoPoint, Metric, RoadGraph};

/// Tolerance for the cost >= metric-distance check, in meters.
pub const METRIC_TOLERANCE_M: f64 = 1e-6;

const PLANAR_FLAG: &str = "# metric=planar";

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Reject arcs whose cost undercuts the metric distance between their
    /// endpoints instead of leaving them for `metric_violations` to report.
    pub strict: bool,
    /// Force the metric instead of auto-detecting from the planar flag.
    pub metric: Option<Metric>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file} has header {found:?}, expected {expected:?}")]
    BadHeader { file: PathBuf, expected: &'static str, found: String },
    #[error("{file}:{line}: malformed row: {reason}")]
    MalformedRow { file: PathBuf, line: u64, reason: String },
    #[error("edge file line {line}: node id {id} is not in the node file")]
    UnknownEndpoint { line: u64, id: u64 },
    #[error("edge file line {line}: negative length {length}")]
    NegativeCost { line: u64, length: f64 },
    #[error("node file line {line}: duplicate node id {id}")]
    DuplicateNodeId { line: u64, id: u64 },
    #[error(
        "strict mode: arc {from_ext}->{to_ext} has cost {cost} below the metric \
         distance {distance} between its endpoints"
    )]
    MetricViolation { from_ext: u64, to_ext: u64, cost: f64, distance: f64 },
    #[error(transparent)]
    Build(#[from] BuildError),
}

fn read_to_string(path: &FsPath) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_owned(), source })
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn row_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn parse_field<T: std::str::FromStr>(
    file: &FsPath,
    record: &csv::StringRecord,
    idx: usize,
    what: &str,
) -> Result<T, LoadError> {
    let raw = record.get(idx).ok_or_else(|| LoadError::MalformedRow {
        file: file.to_owned(),
        line: row_line(record),
        reason: format!("missing {what} column"),
    })?;
    raw.parse().map_err(|_| LoadError::MalformedRow {
        file: file.to_owned(),
        line: row_line(record),
        reason: format!("cannot parse {what} from {raw:?}"),
    })
}

/// Loads a road network from a node CSV and an edge CSV. One-way rows yield a
/// single arc, two-way rows a pair of opposing arcs; external ids are
/// remapped to dense internal ids in node-file order.
pub fn load_network(
    node_file: &FsPath,
    edge_file: &FsPath,
    options: &LoadOptions,
) -> Result<RoadGraph, LoadError> {
    let node_text = read_to_string(node_file)?;
    let edge_text = read_to_string(edge_file)?;

    let metric = options.metric.unwrap_or_else(|| {
        if node_text.lines().any(|l| l.trim() == PLANAR_FLAG) {
            Metric::Planar
        } else {
            Metric::GreatCircle
        }
    });

    let mut nodes = csv_reader(&node_text);
    check_header(node_file, &mut nodes, "id,lat,lon")?;
    let mut points = Vec::new();
    let mut ext_ids = Vec::new();
    let mut index: HashMap<u64, usize> = HashMap::new();
    for record in nodes.records() {
        let record = record.map_err(|e| LoadError::MalformedRow {
            file: node_file.to_owned(),
            line: e.position().map(|p| p.line()).unwrap_or(0),
            reason: e.to_string(),
        })?;
        if record.len() != 3 {
            return Err(LoadError::MalformedRow {
                file: node_file.to_owned(),
                line: row_line(&record),
                reason: format!("expected 3 columns, found {}", record.len()),
            });
        }
        let id: u64 = parse_field(node_file, &record, 0, "id")?;
        let lat: f64 = parse_field(node_file, &record, 1, "lat")?;
        let lon: f64 = parse_field(node_file, &record, 2, "lon")?;
        if index.insert(id, points.len()).is_some() {
            return Err(LoadError::DuplicateNodeId { line: row_line(&record), id });
        }
        points.push(GeoPoint::new(lat, lon));
        ext_ids.push(id);
    }

    let mut edges = csv_reader(&edge_text);
    check_header(edge_file, &mut edges, "u,v,length,oneway")?;
    let mut arcs = Vec::new();
    for record in edges.records() {
        let record = record.map_err(|e| LoadError::MalformedRow {
            file: edge_file.to_owned(),
            line: e.position().map(|p| p.line()).unwrap_or(0),
            reason: e.to_string(),
        })?;
        if record.len() != 4 {
            return Err(LoadError::MalformedRow {
                file: edge_file.to_owned(),
                line: row_line(&record),
                reason: format!("expected 4 columns, found {}", record.len()),
            });
        }
        let line = row_line(&record);
        let u: u64 = parse_field(edge_file, &record, 0, "u")?;
        let v: u64 = parse_field(edge_file, &record, 1, "v")?;
        let length: f64 = parse_field(edge_file, &record, 2, "length")?;
        let oneway = match record.get(3).unwrap() {
            "true" => true,
            "false" => false,
            other => {
                return Err(LoadError::MalformedRow {
                    file: edge_file.to_owned(),
                    line,
                    reason: format!("oneway must be true or false, found {other:?}"),
                })
            }
        };
        if length < 0.0 {
            return Err(LoadError::NegativeCost { line, length });
        }
        let ui = *index.get(&u).ok_or(LoadError::UnknownEndpoint { line, id: u })?;
        let vi = *index.get(&v).ok_or(LoadError::UnknownEndpoint { line, id: v })?;
        arcs.push((ui, vi, length));
        if !oneway {
            arcs.push((vi, ui, length));
        }
    }

    let graph = RoadGraph::build(points, ext_ids, metric, arcs)?;
    if options.strict {
        if let Some(v) = graph.metric_violations(METRIC_TOLERANCE_M).first() {
            return Err(LoadError::MetricViolation {
                from_ext: graph.external_id(v.from),
                to_ext: graph.external_id(v.to),
                cost: v.cost,
                distance: v.metric_distance,
            });
        }
    }
    Ok(graph)
}

fn check_header(
    file: &FsPath,
    reader: &mut csv::Reader<&[u8]>,
    expected: &'static str,
) -> Result<(), LoadError> {
    let headers = reader.headers().map_err(|e| LoadError::MalformedRow {
        file: file.to_owned(),
        line: 1,
        reason: e.to_string(),
    })?;
    let found = headers.iter().collect::<Vec<_>>().join(",");
    if found != expected {
        return Err(LoadError::BadHeader { file: file.to_owned(), expected, found });
    }
    Ok(())
}

/// Writes the two CSVs back out in deterministic order (rows sorted by
/// internal id). Opposing arcs of equal cost merge into a single two-way row.
pub fn export_network(
    g: &RoadGraph,
    node_file: &FsPath,
    edge_file: &FsPath,
) -> Result<(), std::io::Error> {
    let mut nodes = String::new();
    if g.metric() == Metric::Planar {
        nodes.push_str(PLANAR_FLAG);
        nodes.push('\n');
    }
    nodes.push_str("id,lat,lon\n");
    for n in g.node_ids() {
        let p = g.point(n);
        nodes.push_str(&format!("{},{},{}\n", g.external_id(n), p.lat, p.lon));
    }

    let mut edges = String::from("u,v,length,oneway\n");
    for arc in g.arcs() {
        let reverse = g.arc(arc.to, arc.from).map(|r| r.cost);
        let two_way = reverse == Some(arc.cost);
        if two_way && arc.from > arc.to {
            continue; // the partner arc emits this edge
        }
        edges.push_str(&format!(
            "{},{},{},{}\n",
            g.external_id(arc.from),
            g.external_id(arc.to),
            arc.cost,
            if two_way { "false" } else { "true" }
        ));
    }

    fs::File::create(node_file)?.write_all(nodes.as_bytes())?;
    fs::File::create(edge_file)?.write_all(edges.as_bytes())?;
    Ok(())
}
