// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Frame and report serialization. Numbers use the shortest decimal that
//! reads back to the same binary64 value, so output is byte-stable.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::domain::Domain;
use crate::flow::{Frame, StepReport, TraceSink};
use crate::network::LabeledNetwork;
use crate::scalar::Scalar;
use crate::scene::fmt_real;

pub const CSV_HEADER: &str = "t,edge_id,x0,y0,x1,y1,label_left,label_right";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameFormat {
    Csv,
    Svg,
}

impl FrameFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Svg => "svg",
        }
    }
}

/// Serializes one frame.
pub fn emit_frame<T: Scalar>(net: &LabeledNetwork<T>, t: T, format: FrameFormat) -> Vec<u8> {
    match format {
        FrameFormat::Csv => frame_csv(net, t).into_bytes(),
        FrameFormat::Svg => frame_svg(net, t).into_bytes(),
    }
}

/// One row per segment; on the torus the second endpoint is the image
/// nearest the first.
pub fn frame_csv<T: Scalar>(net: &LabeledNetwork<T>, t: T) -> String {
    let mut s = String::with_capacity(64 * (net.segment_count() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    let ts = fmt_real(t);
    for (e, a, b) in net.segments() {
        let (p, q) = net.segment(a, b);
        let edge = &net.edges[e];
        let _ = writeln!(
            s,
            "{ts},{e},{},{},{},{},{},{}",
            fmt_real(p.x),
            fmt_real(p.y),
            fmt_real(q.x),
            fmt_real(q.y),
            edge.left,
            edge.right
        );
    }
    s
}

/// One `polyline` per edge with class `l{left}-r{right}`; y points up.
pub fn frame_svg<T: Scalar>(net: &LabeledNetwork<T>, t: T) -> String {
    let (x0, y0, x1, y1) = match &net.domain {
        Domain::Plane { bbox } => (bbox.min.x, bbox.min.y, bbox.max.x, bbox.max.y),
        Domain::Torus => (T::zero(), T::zero(), T::one(), T::one()),
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" data-t=\"{}\">",
        fmt_real(x0),
        fmt_real(-y1),
        fmt_real(x1 - x0),
        fmt_real(y1 - y0),
        fmt_real(t)
    );
    s.push_str("<g transform=\"scale(1,-1)\" fill=\"none\" stroke=\"black\" stroke-width=\"0.005\">\n");
    for edge in &net.edges {
        let _ = write!(s, "<polyline class=\"l{}-r{}\" points=\"", edge.left, edge.right);
        let mut prev = net.vertices[edge.vertices[0]];
        for (k, &v) in edge.vertices.iter().enumerate() {
            // Follow the chain continuously across the torus seams.
            let p = if k == 0 { prev } else { prev + net.domain.delta(net.vertices[edge.vertices[k - 1]], net.vertices[v]) };
            prev = p;
            if k > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{},{}", fmt_real(p.x), fmt_real(p.y));
        }
        s.push_str("\"/>\n");
    }
    s.push_str("</g>\n</svg>\n");
    s
}

/// Line in the step report file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRecord<'a> {
    pub step: usize,
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub deformation_decrease: f64,
    pub deformation_mass_ok: bool,
    pub energy_balance_ok: bool,
    pub mass_growth_ok: bool,
    pub violations: &'a [String],
    pub detail: &'a StepReport,
}

impl<'a> ReportRecord<'a> {
    pub fn new(r: &'a StepReport) -> Self {
        Self {
            step: r.step,
            t: r.time,
            mass: r.mass_post,
            energy: r.energy,
            deformation_decrease: r.deformation_decrease,
            deformation_mass_ok: r.deformation_mass.holds,
            energy_balance_ok: r.energy_balance.holds,
            mass_growth_ok: r.mass_growth.holds,
            violations: &r.violations,
            detail: r,
        }
    }
}

/// Appends one JSON line per step and flushes it, so an interrupted run
/// leaves a readable prefix.
pub struct ReportWriter<W: Write> {
    out: W,
}

impl<W: Write> ReportWriter<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }

    pub fn write(&mut self, r: &StepReport) -> io::Result<()> {
        serde_json::to_writer(&mut self.out, &ReportRecord::new(r))?;
        self.out.write_all(b"\n")?;
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// Writes frames as `frame_{step:06}.{ext}` and reports to `report.jsonl`
/// inside a directory. The first I/O error stops further writes and is
/// kept for the caller.
pub struct DirectorySink {
    dir: PathBuf,
    formats: Vec<FrameFormat>,
    report: ReportWriter<BufWriter<File>>,
    pub frames_written: usize,
    pub error: Option<io::Error>,
}

impl DirectorySink {
    pub fn create(dir: &Path, formats: &[FrameFormat]) -> io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        let report = ReportWriter::new(BufWriter::new(File::create(dir.join("report.jsonl"))?));
        Ok(Self { dir: dir.to_path_buf(), formats: formats.to_vec(), report, frames_written: 0, error: None })
    }

    pub fn frame_path(&self, step: usize, format: FrameFormat) -> PathBuf {
        self.dir.join(format!("frame_{step:06}.{}", format.extension()))
    }
}

impl<T: Scalar> TraceSink<T> for DirectorySink {
    fn frame(&mut self, f: &Frame<T>) {
        if self.error.is_some() {
            return;
        }
        for &fmt in &self.formats {
            if let Err(e) = std::fs::write(self.frame_path(f.step, fmt), emit_frame(&f.network, f.time, fmt)) {
                self.error = Some(e);
                return;
            }
        }
        self.frames_written += 1;
    }

    fn report(&mut self, r: &StepReport) {
        if self.error.is_none() {
            if let Err(e) = self.report.write(r) {
                self.error = Some(e);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BBox;
    use crate::geometry::Vec2;

    fn unit_segment() -> LabeledNetwork<f64> {
        let mut net = LabeledNetwork::new(Domain::Plane { bbox: BBox::new(Vec2::new(0.0, -1.0), Vec2::new(1.0, 1.0)) }, 2);
        net.add_polyline(&[Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)], false, 1, 2);
        net
    }

    #[test]
    fn unit_segment_row() {
        let csv = frame_csv(&unit_segment(), 0.0);
        assert_eq!(csv, format!("{CSV_HEADER}\n0,0,0,0,1,0,1,2\n"));
    }

    #[test]
    fn empty_network_is_header_only() {
        let net: LabeledNetwork<f64> = LabeledNetwork::new(Domain::Torus, 1);
        assert_eq!(frame_csv(&net, 0.5), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_values_read_back_exactly() {
        let mut net = LabeledNetwork::new(Domain::Torus, 2);
        let p = Vec2::new(0.1 + 0.2, 1.0 / 3.0);
        net.add_polyline(&[p, Vec2::new(0.7, 0.9), Vec2::new(0.2, 0.6)], true, 1, 2);
        let csv = frame_csv(&net, 1e-4 * 3.0);
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[0].parse::<f64>().unwrap(), 1e-4 * 3.0);
        assert_eq!(row[2].parse::<f64>().unwrap(), p.x);
        assert_eq!(row[3].parse::<f64>().unwrap(), p.y);
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn svg_has_one_polyline_per_edge() {
        let net = crate::scene::generate::voronoi::<f64>(8, 42).unwrap();
        let svg = frame_svg(&net, 0.0);
        assert_eq!(svg.matches("<polyline").count(), net.edges.len());
        assert_eq!(svg, frame_svg(&net.clone(), 0.0));
    }

    #[test]
    fn report_lines_are_flushed_json() {
        let rep = StepReport {
            step: 1,
            time: 1e-4,
            mass_pre: 1.0,
            mass_deformed: 1.0,
            mass_moved: 0.9,
            mass_post: 0.9,
            deformation_decrease: 0.0,
            curvature_change: -0.1,
            remesh_change: 0.0,
            energy: 2.0,
            max_displacement: 1e-4,
            moves: Default::default(),
            areas: vec![Some(0.5), None],
            deformation_mass: crate::flow::StepCheck { lhs: 1.0, bound: 1.0, holds: true },
            energy_balance: crate::flow::StepCheck { lhs: 0.0, bound: 1.0, holds: true },
            mass_growth: crate::flow::StepCheck { lhs: 0.9, bound: 1.0, holds: true },
            violations: vec![],
        };
        let mut w = ReportWriter::new(Vec::new());
        w.write(&rep).unwrap();
        w.write(&rep).unwrap();
        let text = String::from_utf8(w.into_inner()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let v: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(v["step"], 1);
        assert_eq!(v["mass"], 0.9);
        assert_eq!(v["energy_balance_ok"], true);
    }
}
