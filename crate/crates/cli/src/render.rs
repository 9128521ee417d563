//! Deterministic SVG rendering of box representations. Two dimensions draw
//! one labeled rectangle per vertex; one dimension draws an interval
//! diagram with one row per vertex.

use std::fmt::Write;

use anyhow::{bail, Result};

use boxkit_core::geometry::BoxRepresentation;
use boxkit_core::graph::Graph;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

const MARGIN: i64 = 20;
/// Boxes are padded by a quarter unit per side so degenerate (point or
/// segment) boxes stay visible.
const PAD_NUM: i64 = 1;
const PAD_DEN: i64 = 4;

pub fn render_svg(g: &Graph, rep: &BoxRepresentation, unit: u32) -> Result<String> {
    if rep.n() < g.n() as usize {
        bail!("representation covers {} vertices, graph has {}", rep.n(), g.n());
    }
    match rep.d() {
        1 => render_1d(g, rep, i64::from(unit)),
        2 => render_2d(g, rep, i64::from(unit)),
        d => bail!("rendering supports d <= 2, got d = {d}"),
    }
}

fn pad(unit: i64) -> i64 {
    (unit * PAD_NUM / PAD_DEN).max(2)
}

fn render_2d(g: &Graph, rep: &BoxRepresentation, unit: i64) -> Result<String> {
    let boxes = rep.boxes();
    let min_x = boxes.iter().map(|b| b.interval(0).lo()).min().unwrap();
    let max_x = boxes.iter().map(|b| b.interval(0).hi()).max().unwrap();
    let min_y = boxes.iter().map(|b| b.interval(1).lo()).min().unwrap();
    let max_y = boxes.iter().map(|b| b.interval(1).hi()).max().unwrap();
    let p = pad(unit);
    let width = (max_x - min_x) * unit + 2 * (MARGIN + p);
    let height = (max_y - min_y) * unit + 2 * (MARGIN + p);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )?;
    for v in g.vertices() {
        let b = rep.get(v)?;
        // SVG's y axis grows downward; flip so larger coordinates render
        // higher.
        let x = (b.interval(0).lo() - min_x) * unit + MARGIN;
        let y = (max_y - b.interval(1).hi()) * unit + MARGIN;
        let w = (b.interval(0).hi() - b.interval(0).lo()) * unit + 2 * p;
        let h = (b.interval(1).hi() - b.interval(1).lo()) * unit + 2 * p;
        let color = PALETTE[v as usize % PALETTE.len()];
        writeln!(
            out,
            r#"  <rect x="{x}" y="{y}" width="{w}" height="{h}" fill="{color}" fill-opacity="0.25" stroke="{color}" stroke-width="2"/>"#
        )?;
        writeln!(
            out,
            r#"  <text x="{}" y="{}" font-family="monospace" font-size="12" fill="{color}">{}</text>"#,
            x + 3,
            y + 13,
            vertex_name(g, v)
        )?;
    }
    writeln!(out, "</svg>")?;
    Ok(out)
}

fn render_1d(g: &Graph, rep: &BoxRepresentation, unit: i64) -> Result<String> {
    let boxes = rep.boxes();
    let min_x = boxes.iter().map(|b| b.interval(0).lo()).min().unwrap();
    let max_x = boxes.iter().map(|b| b.interval(0).hi()).max().unwrap();
    let row = 24i64;
    let p = pad(unit);
    let width = (max_x - min_x) * unit + 2 * (MARGIN + p);
    let height = row * g.n() as i64 + 2 * MARGIN;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )?;
    for v in g.vertices() {
        let b = rep.get(v)?;
        let x1 = (b.interval(0).lo() - min_x) * unit + MARGIN - p;
        let x2 = (b.interval(0).hi() - min_x) * unit + MARGIN + p;
        let y = row * v as i64 + MARGIN + row / 2;
        let color = PALETTE[v as usize % PALETTE.len()];
        writeln!(
            out,
            r#"  <line x1="{x1}" y1="{y}" x2="{x2}" y2="{y}" stroke="{color}" stroke-width="4"/>"#
        )?;
        writeln!(
            out,
            r#"  <text x="{}" y="{}" font-family="monospace" font-size="12" fill="{color}">{}</text>"#,
            x2 + 5,
            y + 4,
            vertex_name(g, v)
        )?;
    }
    writeln!(out, "</svg>")?;
    Ok(out)
}

/// Prefer the gadget label when the vertex has one.
fn vertex_name(g: &Graph, v: u32) -> String {
    g.labels()
        .find(|&(_, w)| w == v)
        .map(|(l, _)| l.to_string())
        .unwrap_or_else(|| v.to_string())
}
