//! Text and vector output formats.
//!
//! Snakelet records are one line per snakelet of space-separated
//! `key=value` fields:
//!
//! ```text
//! id=4 source=1 parent=2 state=reached grow_head=0 grow_tail=1 points=10.000,4.500;12.000,4.750
//! ```
//!
//! `parent` is `-` for snakelets without one.

use std::fmt::Write;

use snakelet_core::eval::Metrics;
use snakelet_core::{Point, Snakelet, SnakeletSet, SnakeletState, VectorField};

pub fn format_record(s: &Snakelet) -> String {
    let parent = s.parent.map_or_else(|| "-".to_string(), |p| p.to_string());
    let points: Vec<String> = s.points.iter().map(|p| format!("{:.3},{:.3}", p.x, p.y)).collect();
    format!(
        "id={} source={} parent={} state={} grow_head={} grow_tail={} points={}",
        s.id,
        s.source_id,
        parent,
        s.state.as_str(),
        u8::from(s.grow_head),
        u8::from(s.grow_tail),
        points.join(";")
    )
}

pub fn format_records(set: &SnakeletSet) -> String {
    let mut out = String::new();
    for s in &set.snakelets {
        out.push_str(&format_record(s));
        out.push('\n');
    }
    out
}

/// Inverse of [`format_record`].
pub fn parse_record(line: &str) -> Result<Snakelet, String> {
    let mut id = None;
    let mut source = None;
    let mut parent = None;
    let mut state = None;
    let mut head = None;
    let mut tail = None;
    let mut points = None;
    for field in line.split_whitespace() {
        let (k, v) = field.split_once('=').ok_or_else(|| format!("field without '=': {field}"))?;
        let flag = |v: &str| match v {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(format!("bad flag {v}")),
        };
        match k {
            "id" => id = Some(v.parse::<u32>().map_err(|e| e.to_string())?),
            "source" => source = Some(v.parse::<u32>().map_err(|e| e.to_string())?),
            "parent" => parent = Some(if v == "-" { None } else { Some(v.parse::<u32>().map_err(|e| e.to_string())?) }),
            "state" => state = Some(SnakeletState::parse(v).ok_or_else(|| format!("bad state {v}"))?),
            "grow_head" => head = Some(flag(v)?),
            "grow_tail" => tail = Some(flag(v)?),
            "points" => {
                let mut pts = Vec::new();
                for pair in v.split(';') {
                    let (x, y) = pair.split_once(',').ok_or_else(|| format!("bad point {pair}"))?;
                    let x = x.parse::<f64>().map_err(|e| e.to_string())?;
                    let y = y.parse::<f64>().map_err(|e| e.to_string())?;
                    pts.push(Point::new(x, y));
                }
                points = Some(pts);
            }
            _ => return Err(format!("unknown field {k}")),
        }
    }
    let missing = |name: &str| format!("missing field {name}");
    let mut s = Snakelet::new(
        id.ok_or_else(|| missing("id"))?,
        source.ok_or_else(|| missing("source"))?,
        points.ok_or_else(|| missing("points"))?,
        head.ok_or_else(|| missing("grow_head"))?,
        tail.ok_or_else(|| missing("grow_tail"))?,
    )
    .map_err(|e| e.to_string())?;
    s.parent = parent.ok_or_else(|| missing("parent"))?;
    s.state = state.ok_or_else(|| missing("state"))?;
    Ok(s)
}

/// SVG 1.1 document with one polyline per entry. Coordinates are shifted
/// by half a pixel so that pixel centers line up with the raster.
pub fn format_svg(width: usize, height: usize, polylines: &[(String, &[Point])]) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    for (id, pts) in polylines {
        let coords: Vec<String> = pts.iter().map(|p| format!("{:.3},{:.3}", p.x + 0.5, p.y + 0.5)).collect();
        let _ = writeln!(
            out,
            "<polyline id=\"{id}\" fill=\"none\" stroke=\"red\" stroke-width=\"1\" points=\"{}\"/>",
            coords.join(" ")
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn snakelet_svg(set: &SnakeletSet) -> String {
    let lines: Vec<(String, &[Point])> = set
        .snakelets
        .iter()
        .map(|s| (format!("s{}", s.id), s.points.as_slice()))
        .collect();
    format_svg(set.width, set.height, &lines)
}

pub fn chain_svg(set: &SnakeletSet) -> String {
    let chains = set.merged_chains();
    let lines: Vec<(String, &[Point])> = chains
        .iter()
        .enumerate()
        .map(|(i, c)| (format!("c{i}"), c.as_slice()))
        .collect();
    format_svg(set.width, set.height, &lines)
}

/// `key: value` report, one metric per line.
pub fn format_metrics(m: &Metrics, extra: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in extra {
        let _ = writeln!(out, "{k}: {v}");
    }
    let _ = writeln!(out, "precision: {:.6}", m.precision);
    let _ = writeln!(out, "recall: {:.6}", m.recall);
    let _ = writeln!(out, "f1: {:.6}", m.f1);
    let _ = writeln!(out, "gap_closure_rate: {:.6}", m.gap_closure_rate);
    let _ = writeln!(out, "mean_contour_distance: {:.6}", m.mean_contour_distance);
    out
}

/// Field component in `[-1, 1]` as display bytes, 128 at zero.
pub fn field_bytes(component: &[f64]) -> Vec<u8> {
    component
        .iter()
        .map(|&u| (128.0 + 127.0 * u.clamp(-1.0, 1.0)).round() as u8)
        .collect()
}

pub fn field_components(field: &VectorField) -> (Vec<u8>, Vec<u8>) {
    (field_bytes(&field.u), field_bytes(&field.v))
}
