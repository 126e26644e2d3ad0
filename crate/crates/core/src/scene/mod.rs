// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Line-oriented scene files.
//!
//! Each non-empty line is a directive followed by `key=value` pairs; `#`
//! starts a comment. Values are numbers, words, points `(x,y)` or lists of
//! points separated by spaces or `;`.
//!
//! ```text
//! domain torus                      | domain plane [box=(x0,y0,x1,y1)]
//! labels N
//! omega const|exp
//! line y=Y left=L right=R [n=64]    | line x=X ...
//! circle center=(x,y) radius=R inside=L outside=L [n=256]
//! cross at=(x,y) arms=A [n=16]
//! triple at=(x,y) arms=A [n=16]
//! generator voronoi seeds=S rng=SEED
//! generator honeycomb cols=C rows=R
//! edge left=L right=R [closed=0|1] points=(x,y) (x,y) ...
//! ```

pub mod generate;

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::domain::{BBox, Domain};
use crate::error::SceneError;
use crate::geometry::Vec2;
use crate::network::{validate_partition, Label, LabeledNetwork, ValidationConfig};
use crate::scalar::Scalar;
use crate::weights::WeightFunction;

/// Weight requested by a scene header.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmegaKind {
    Const,
    Exp,
}

impl OmegaKind {
    pub fn weight<T: Scalar>(self) -> WeightFunction<T> {
        match self {
            Self::Const => WeightFunction::One,
            Self::Exp => WeightFunction::exp_decay(),
        }
    }
}

/// Parsed scene: the network and the header fields it does not encode.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene<T> {
    pub network: LabeledNetwork<T>,
    pub omega: Option<OmegaKind>,
}

#[derive(Clone, Debug, PartialEq)]
enum Value {
    Num(f64),
    Word(String),
    Points(Vec<Vec<f64>>),
}

#[derive(Clone, Debug)]
struct Pair {
    key: String,
    value: Value,
    column: usize,
}

#[derive(Clone, Debug)]
struct Directive {
    line: usize,
    name: String,
    /// Bare word or number right after the name.
    arg: Option<(Value, usize)>,
    pairs: Vec<Pair>,
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    _src: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        let body = src.split('#').next().unwrap_or("");
        Self { chars: body.chars().collect(), pos: 0, line, _src: src }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn err(&self, expected: &str) -> SceneError {
        SceneError::Syntax { line: self.line, column: self.column(), expected: expected.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn word(&mut self) -> Option<String> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn number(&mut self) -> Result<f64, SceneError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E') || (c.is_ascii_alphabetic() && self.pos > start) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => {
                self.pos = start;
                Err(self.err("a finite number"))
            }
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SceneError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("'{c}'")))
        }
    }

    fn tuple(&mut self) -> Result<Vec<f64>, SceneError> {
        self.expect('(')?;
        let mut out = vec![self.number()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                    out.push(self.number()?);
                }
                Some(')') => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.err("',' or ')'")),
            }
        }
    }

    fn value(&mut self) -> Result<Value, SceneError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                let mut pts = vec![self.tuple()?];
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(';') => {
                            self.pos += 1;
                            pts.push(self.tuple()?);
                        }
                        Some('(') => pts.push(self.tuple()?),
                        _ => break,
                    }
                }
                Ok(Value::Points(pts))
            }
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') => Ok(Value::Num(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => Ok(Value::Word(self.word().unwrap())),
            _ => Err(self.err("a value")),
        }
    }

    fn directive(mut self) -> Result<Option<Directive>, SceneError> {
        if self.at_end() {
            return Ok(None);
        }
        let name = self.word().ok_or_else(|| self.err("a directive"))?;
        let mut d = Directive { line: self.line, name, arg: None, pairs: Vec::new() };
        loop {
            if self.at_end() {
                return Ok(Some(d));
            }
            let col = self.column();
            let save = self.pos;
            // A bare value is allowed once, before any pair.
            let key = self.word();
            self.skip_ws();
            if let (Some(key), Some('=')) = (key.clone(), self.peek()) {
                self.pos += 1;
                let value = self.value()?;
                d.pairs.push(Pair { key, value, column: col });
                continue;
            }
            if d.arg.is_some() || !d.pairs.is_empty() {
                self.pos = save;
                return Err(self.err("key=value"));
            }
            self.pos = save;
            d.arg = Some((self.value()?, col));
        }
    }
}

/// Accessors that turn pair lookups into positioned errors.
struct Args<'d> {
    d: &'d Directive,
    used: Vec<bool>,
}

impl<'d> Args<'d> {
    fn new(d: &'d Directive) -> Self {
        Self { d, used: vec![false; d.pairs.len()] }
    }

    fn semantic(&self, column: usize, message: impl Into<String>) -> SceneError {
        SceneError::Semantic { line: self.d.line, column, message: message.into() }
    }

    fn find(&mut self, key: &str) -> Option<&'d Pair> {
        let i = self.d.pairs.iter().position(|p| p.key == key)?;
        self.used[i] = true;
        Some(&self.d.pairs[i])
    }

    fn end_column(&self) -> usize {
        self.d.pairs.last().map_or(self.d.name.len() + 1, |p| p.column)
    }

    fn num(&mut self, key: &str) -> Result<Option<(f64, usize)>, SceneError> {
        match self.find(key) {
            None => Ok(None),
            Some(Pair { value: Value::Num(v), column, .. }) => Ok(Some((*v, *column))),
            Some(p) => Err(SceneError::Syntax {
                line: self.d.line,
                column: p.column + key.len() + 1,
                expected: format!("a number for {key}"),
            }),
        }
    }

    fn req_num(&mut self, key: &str) -> Result<(f64, usize), SceneError> {
        self.num(key)?.ok_or_else(|| SceneError::Syntax {
            line: self.d.line,
            column: self.end_column(),
            expected: format!("{key}="),
        })
    }

    fn count(&mut self, key: &str, default: usize) -> Result<usize, SceneError> {
        match self.num(key)? {
            None => Ok(default),
            Some((v, c)) if v >= 1.0 && v.fract() == 0.0 && v <= 1e7 => {
                let _ = c;
                Ok(v as usize)
            }
            Some((_, c)) => Err(self.semantic(c, format!("{key} must be a positive integer"))),
        }
    }

    fn req_count(&mut self, key: &str) -> Result<(usize, usize), SceneError> {
        let (v, c) = self.req_num(key)?;
        if v >= 0.0 && v.fract() == 0.0 && v <= 1e12 {
            Ok((v as usize, c))
        } else {
            Err(self.semantic(c, format!("{key} must be a non-negative integer")))
        }
    }

    fn points(&mut self, key: &str, dim: usize) -> Result<Option<(Vec<Vec<f64>>, usize)>, SceneError> {
        match self.find(key) {
            None => Ok(None),
            Some(Pair { value: Value::Points(p), column, .. }) => {
                if let Some(bad) = p.iter().find(|t| t.len() != dim) {
                    let _ = bad;
                    return Err(SceneError::Syntax {
                        line: self.d.line,
                        column: *column + key.len() + 1,
                        expected: format!("tuples of {dim} numbers"),
                    });
                }
                Ok(Some((p.clone(), *column)))
            }
            Some(p) => Err(SceneError::Syntax {
                line: self.d.line,
                column: p.column + key.len() + 1,
                expected: "'('".into(),
            }),
        }
    }

    fn point(&mut self, key: &str) -> Result<(Vec2<f64>, usize), SceneError> {
        match self.points(key, 2)? {
            Some((p, c)) if p.len() == 1 => Ok((Vec2::new(p[0][0], p[0][1]), c)),
            Some((_, c)) => Err(SceneError::Syntax { line: self.d.line, column: c, expected: "a single point".into() }),
            None => Err(SceneError::Syntax { line: self.d.line, column: self.end_column(), expected: format!("{key}=") }),
        }
    }

    /// Rejects pairs that no accessor asked for.
    fn finish(self) -> Result<(), SceneError> {
        for (p, used) in self.d.pairs.iter().zip(&self.used) {
            if !used {
                return Err(SceneError::Semantic {
                    line: self.d.line,
                    column: p.column,
                    message: format!("unknown key '{}' for {}", p.key, self.d.name),
                });
            }
        }
        Ok(())
    }
}

/// Geometry collected before the domain is fixed.
enum Item {
    Line { vertical: bool, at: f64, left: (Label, usize), right: (Label, usize), n: usize, line: usize },
    Polyline { pts: Vec<Vec2<f64>>, closed: bool, left: (Label, usize), right: (Label, usize), line: usize },
    Net(LabeledNetwork<f64>, usize),
}

/// Parses a scene and validates the resulting partition.
pub fn parse_scene<T: Scalar>(text: &str) -> Result<LabeledNetwork<T>, SceneError> {
    parse_scene_file(text).map(|s| s.network)
}

/// Parses a scene with its header fields.
pub fn parse_scene_file<T: Scalar>(text: &str) -> Result<Scene<T>, SceneError> {
    parse_scene_seeded(text, None)
}

/// Like [`parse_scene_file`], with `seed` replacing the `rng=` value of
/// every random generator.
pub fn parse_scene_seeded<T: Scalar>(text: &str, seed: Option<u64>) -> Result<Scene<T>, SceneError> {
    let mut domain: Option<(bool, Option<BBox<f64>>, usize)> = None;
    let mut labels: Option<(u32, usize, usize)> = None;
    let mut omega = None;
    let mut items: Vec<Item> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let Some(d) = Lexer::new(raw, line).directive()? else {
            continue;
        };
        let mut a = Args::new(&d);
        let arg_word = |d: &Directive, what: &str| -> Result<(String, usize), SceneError> {
            match &d.arg {
                Some((Value::Word(w), c)) => Ok((w.clone(), *c)),
                Some((_, c)) => Err(SceneError::Syntax { line: d.line, column: *c, expected: what.into() }),
                None => Err(SceneError::Syntax { line: d.line, column: d.name.len() + 2, expected: what.into() }),
            }
        };
        let no_arg = |d: &Directive| -> Result<(), SceneError> {
            match &d.arg {
                Some((_, c)) => Err(SceneError::Syntax { line: d.line, column: *c, expected: "key=value".into() }),
                None => Ok(()),
            }
        };
        let label = |a: &mut Args<'_>, key: &str| -> Result<(Label, usize), SceneError> {
            let (v, c) = a.req_num(key)?;
            if v >= 1.0 && v.fract() == 0.0 && v < u32::MAX as f64 {
                Ok((v as Label, c))
            } else {
                Err(a.semantic(c, format!("{key} must be a label, counted from 1")))
            }
        };
        match d.name.as_str() {
            "domain" => {
                let (kind, c) = arg_word(&d, "torus or plane")?;
                if domain.is_some() {
                    return Err(SceneError::Semantic { line, column: 1, message: "domain given twice".into() });
                }
                match kind.as_str() {
                    "torus" => domain = Some((true, None, line)),
                    "plane" => {
                        let bbox = match a.points("box", 4)? {
                            Some((p, c)) => {
                                let b = &p[0];
                                if p.len() != 1 || !(b[0] < b[2] && b[1] < b[3]) {
                                    return Err(a.semantic(c, "box must be (xmin,ymin,xmax,ymax) with min < max"));
                                }
                                Some(BBox::new(Vec2::new(b[0], b[1]), Vec2::new(b[2], b[3])))
                            }
                            None => None,
                        };
                        domain = Some((false, bbox, line));
                    }
                    _ => return Err(SceneError::Syntax { line, column: c, expected: "torus or plane".into() }),
                }
            }
            "labels" => {
                let (v, c) = match &d.arg {
                    Some((Value::Num(v), c)) => (*v, *c),
                    Some((_, c)) => return Err(SceneError::Syntax { line, column: *c, expected: "a label count".into() }),
                    None => return Err(SceneError::Syntax { line, column: d.name.len() + 2, expected: "a label count".into() }),
                };
                if !(v >= 1.0 && v.fract() == 0.0 && v < 1e6) {
                    return Err(a.semantic(c, "label count must be a positive integer"));
                }
                labels = Some((v as u32, line, c));
            }
            "omega" => {
                let (w, c) = arg_word(&d, "const or exp")?;
                omega = Some(match w.as_str() {
                    "const" => OmegaKind::Const,
                    "exp" => OmegaKind::Exp,
                    _ => return Err(SceneError::Syntax { line, column: c, expected: "const or exp".into() }),
                });
            }
            "line" => {
                no_arg(&d)?;
                let (vertical, at) = match (a.num("x")?, a.num("y")?) {
                    (Some((x, _)), None) => (true, x),
                    (None, Some((y, _))) => (false, y),
                    _ => return Err(SceneError::Syntax { line, column: 6, expected: "exactly one of x= or y=".into() }),
                };
                let left = label(&mut a, "left")?;
                let right = label(&mut a, "right")?;
                let n = a.count("n", 64)?;
                items.push(Item::Line { vertical, at, left, right, n, line });
            }
            "circle" => {
                no_arg(&d)?;
                let (c, _) = a.point("center")?;
                let (r, rc) = a.req_num("radius")?;
                if !(r > 0.0) {
                    return Err(a.semantic(rc, "radius must be positive"));
                }
                let inside = label(&mut a, "inside")?;
                let outside = label(&mut a, "outside")?;
                let n = a.count("n", 256)?;
                if n < 3 {
                    return Err(a.semantic(1, "a circle needs n >= 3"));
                }
                let pts: Vec<Vec2<f64>> = (0..n)
                    .map(|i| c + Vec2::from_angle(core::f64::consts::TAU * i as f64 / n as f64) * r)
                    .collect();
                items.push(Item::Polyline { pts, closed: true, left: inside, right: outside, line });
            }
            "cross" | "triple" => {
                no_arg(&d)?;
                let (c, _) = a.point("at")?;
                let (arm, ac) = a.req_num("arms")?;
                if !(arm > 0.0) {
                    return Err(a.semantic(ac, "arms must be positive"));
                }
                let n = a.count("n", 16)?;
                let net = if d.name == "cross" { generate::cross(c, arm, n) } else { generate::triple(c, arm, n) };
                items.push(Item::Net(net, line));
            }
            "generator" => {
                let (kind, c) = arg_word(&d, "voronoi or honeycomb")?;
                let net = match kind.as_str() {
                    "voronoi" => {
                        let (seeds, sc) = a.req_count("seeds")?;
                        let (rng, _) = a.req_count("rng")?;
                        generate::voronoi(seeds, seed.unwrap_or(rng as u64))
                            .ok_or_else(|| a.semantic(sc, "voronoi needs at least 3 seeds"))?
                    }
                    "honeycomb" => {
                        let cols = a.count("cols", 2)?;
                        let rows = a.count("rows", 2)?;
                        generate::honeycomb(cols, rows)
                            .ok_or_else(|| a.semantic(c, "honeycomb needs an even cols >= 2 and rows >= 2"))?
                    }
                    _ => return Err(SceneError::Syntax { line, column: c, expected: "voronoi or honeycomb".into() }),
                };
                items.push(Item::Net(net, line));
            }
            "edge" => {
                no_arg(&d)?;
                let left = label(&mut a, "left")?;
                let right = label(&mut a, "right")?;
                let closed = match a.num("closed")? {
                    None => false,
                    Some((v, _)) if v == 0.0 => false,
                    Some((v, _)) if v == 1.0 => true,
                    Some((_, c)) => return Err(a.semantic(c, "closed must be 0 or 1")),
                };
                let (pts, pc) = a
                    .points("points", 2)?
                    .ok_or_else(|| SceneError::Syntax { line, column: a.end_column(), expected: "points=".into() })?;
                if pts.len() < 2 || (closed && pts.len() < 3) {
                    return Err(a.semantic(pc, "too few points"));
                }
                let pts = pts.into_iter().map(|p| Vec2::new(p[0], p[1])).collect();
                items.push(Item::Polyline { pts, closed, left, right, line });
            }
            _ => return Err(SceneError::Syntax { line, column: 1, expected: "a directive".into() }),
        }
        a.finish()?;
    }
    build(domain, labels, omega, items)
}

fn build<T: Scalar>(
    domain: Option<(bool, Option<BBox<f64>>, usize)>,
    labels: Option<(u32, usize, usize)>,
    omega: Option<OmegaKind>,
    items: Vec<Item>,
) -> Result<Scene<T>, SceneError> {
    let sem = |line: usize, column: usize, message: String| SceneError::Semantic { line, column, message };
    // Generated networks decide the domain when none was declared.
    let generated_torus = items.iter().find_map(|it| match it {
        Item::Net(n, line) => Some((n.domain.is_torus(), *line)),
        _ => None,
    });
    let (torus, declared_box) = match (domain, generated_torus) {
        (Some((t, b, _)), _) => (t, b),
        (None, Some((t, _))) => (t, None),
        (None, None) => (false, None),
    };
    let mut n_labels = labels.map(|l| l.0);
    let mut bbox = declared_box;
    for it in &items {
        if let Item::Net(n, line) = it {
            if n.domain.is_torus() != torus {
                let kind = if torus { "torus" } else { "plane" };
                return Err(sem(*line, 1, format!("generator does not fit a {kind} domain")));
            }
            match (n_labels, labels) {
                (None, _) => n_labels = Some(n.n_labels),
                (Some(k), Some((_, _, _))) if k < n.n_labels => {
                    return Err(sem(*line, 1, format!("generator needs {} labels but only {k} are declared", n.n_labels)));
                }
                (Some(k), _) => n_labels = Some(k.max(n.n_labels)),
            }
            if let (false, Some(b), None) = (torus, n.domain.bbox(), declared_box) {
                bbox = Some(match bbox {
                    Some(o) => BBox::new(
                        Vec2::new(o.min.x.min(b.min.x), o.min.y.min(b.min.y)),
                        Vec2::new(o.max.x.max(b.max.x), o.max.y.max(b.max.y)),
                    ),
                    None => b,
                });
            }
        }
    }
    let n_labels = n_labels.ok_or_else(|| sem(1, 1, "missing 'labels N'".into()))?;
    let check = |(l, c): (Label, usize), line: usize| -> Result<Label, SceneError> {
        if l > n_labels {
            Err(sem(line, c, format!("unknown label {l}; the scene declares {n_labels}")))
        } else {
            Ok(l)
        }
    };
    if !torus && bbox.is_none() {
        // Window: the bounding box of the explicit geometry, grown by one
        // when every boundary is closed.
        let mut pts = Vec::new();
        let mut open = false;
        for it in &items {
            match it {
                Item::Polyline { pts: p, closed, .. } => {
                    pts.extend(p.iter().copied());
                    open |= !closed;
                }
                Item::Line { line, .. } => {
                    return Err(sem(*line, 1, "a plane line needs domain plane box=(...)".into()));
                }
                Item::Net(..) => {}
            }
        }
        bbox = BBox::of_points(pts).map(|b| if open { b } else { b.inflate(1.0) });
    }
    let dom64 = match (torus, bbox) {
        (true, _) => Domain::Torus,
        (false, Some(b)) => Domain::Plane { bbox: b },
        (false, None) => Domain::Plane { bbox: BBox::new(Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0)) },
    };
    let mut net: LabeledNetwork<f64> = LabeledNetwork::new(dom64, n_labels);
    for it in items {
        match it {
            Item::Line { vertical, at, left, right, n, line } => {
                let (l, r) = (check(left, line)?, check(right, line)?);
                let (p0, p1) = match (&net.domain, vertical) {
                    (Domain::Torus, false) => (Vec2::new(0.0, at), Vec2::new(1.0, at)),
                    (Domain::Torus, true) => (Vec2::new(at, 0.0), Vec2::new(at, 1.0)),
                    (Domain::Plane { bbox }, false) => (Vec2::new(bbox.min.x, at), Vec2::new(bbox.max.x, at)),
                    (Domain::Plane { bbox }, true) => (Vec2::new(at, bbox.min.y), Vec2::new(at, bbox.max.y)),
                };
                let pts: Vec<Vec2<f64>> = (0..=n).map(|i| p0.lerp(p1, i as f64 / n as f64)).collect();
                if torus {
                    net.add_polyline(&pts[..n], true, l, r);
                } else {
                    net.add_polyline(&pts, false, l, r);
                }
            }
            Item::Polyline { pts, closed, left, right, line } => {
                let (l, r) = (check(left, line)?, check(right, line)?);
                net.add_polyline(&pts, closed, l, r);
            }
            Item::Net(g, _) => {
                let base = net.vertices.len();
                net.vertices.extend(g.vertices.iter().copied());
                for e in g.edges {
                    net.add_edge(e.vertices.iter().map(|v| v + base).collect(), e.left, e.right);
                }
            }
        }
    }
    weld_exact(&mut net);
    let report = validate_partition(&net, &ValidationConfig::new(1e-9));
    if !report.is_ok() {
        return Err(SceneError::Invalid(report));
    }
    Ok(Scene { network: net.cast(), omega })
}

/// Merges vertices with bit-identical coordinates, so junctions written as
/// repeated points become shared.
fn weld_exact(net: &mut LabeledNetwork<f64>) {
    let mut map: HashMap<(u64, u64), usize> = HashMap::new();
    let mut remap = Vec::with_capacity(net.vertices.len());
    for (i, p) in net.vertices.iter().enumerate() {
        let key = (p.x.to_bits(), p.y.to_bits());
        remap.push(*map.entry(key).or_insert(i));
    }
    for e in &mut net.edges {
        for v in &mut e.vertices {
            *v = remap[*v];
        }
    }
    net.compact();
}

/// Renumbers vertices in order of first use along the edges and drops the
/// unused ones. Parsing an emitted scene reproduces this form.
pub fn canonicalize<T: Scalar>(net: &LabeledNetwork<T>) -> LabeledNetwork<T> {
    let mut out = LabeledNetwork::new(net.domain, net.n_labels);
    let mut map = vec![usize::MAX; net.vertices.len()];
    for e in &net.edges {
        let mut ids = Vec::with_capacity(e.vertices.len());
        for &v in &e.vertices {
            if map[v] == usize::MAX {
                map[v] = out.vertices.len();
                out.vertices.push(net.vertices[v]);
            }
            ids.push(map[v]);
        }
        out.edges.push(crate::network::Edge::new(ids, e.left, e.right));
    }
    out
}

/// Shortest decimal that reads back to the same binary64 value.
pub fn fmt_real<T: Scalar>(v: T) -> String {
    let x = v.to_f64_lossy();
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

/// Writes `net` as explicit `edge` directives.
pub fn emit_scene<T: Scalar>(net: &LabeledNetwork<T>, omega: Option<OmegaKind>) -> String {
    let mut s = String::new();
    match &net.domain {
        Domain::Torus => s.push_str("domain torus\n"),
        Domain::Plane { bbox } => {
            let _ = writeln!(
                s,
                "domain plane box=({},{},{},{})",
                fmt_real(bbox.min.x),
                fmt_real(bbox.min.y),
                fmt_real(bbox.max.x),
                fmt_real(bbox.max.y)
            );
        }
    }
    let _ = writeln!(s, "labels {}", net.n_labels);
    match omega {
        Some(OmegaKind::Const) => s.push_str("omega const\n"),
        Some(OmegaKind::Exp) => s.push_str("omega exp\n"),
        None => {}
    }
    for e in &net.edges {
        let closed = e.is_closed();
        let ids = if closed { &e.vertices[..e.vertices.len() - 1] } else { &e.vertices[..] };
        let _ = write!(s, "edge left={} right={} closed={} points=", e.left, e.right, u8::from(closed));
        for (k, &v) in ids.iter().enumerate() {
            let p = net.vertices[v];
            if k > 0 {
                s.push(' ');
            }
            let _ = write!(s, "({},{})", fmt_real(p.x), fmt_real(p.y));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests;
