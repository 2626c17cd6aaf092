//! Coxeter–Vinberg diagrams: data model, text format and Gram matrices.
//!
//! The text format is line oriented with `#` comments:
//!
//! ```text
//! nodes 6
//! angle 1 2 7          # dihedral angle π/7
//! parallel 2 3         # tangent walls, entry −1
//! dashed 3 4 sqrt(2)   # diverging walls, entry −sqrt(2)
//! ```

mod expr;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::algfield::{FieldElement, FieldError, FieldTower};
use crate::exactlin::{signature, Signature, SymMatrix};

pub use expr::{BinOp, ExprError, WeightExpr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    /// Dihedral angle `π/m`, `m >= 3`.
    Angle(u32),
    Parallel,
    /// Distance-type weight `w > 1`; the Gram entry is `−w`.
    Dashed(WeightExpr),
}

/// An edge between nodes `i < j` (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{}{msg}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Validation { line: Option<usize>, msg: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl DiagramError {
    fn validation(line: Option<usize>, msg: impl Into<String>) -> DiagramError {
        DiagramError::Validation {
            line,
            msg: msg.into(),
        }
    }
}

/// A labeled graph of walls; pairs without an edge meet at a right angle.
#[derive(Clone, Debug)]
pub struct CoxeterDiagram {
    nodes: usize,
    edges: Vec<Edge>,
    /// Source line of each edge, when parsed from text.
    lines: Vec<Option<usize>>,
}

impl CoxeterDiagram {
    pub fn new(nodes: usize) -> CoxeterDiagram {
        CoxeterDiagram {
            nodes,
            edges: Vec::new(),
            lines: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize, j: usize) -> Option<&Edge> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.edges.iter().find(|e| e.i == i && e.j == j)
    }

    /// Add an edge between 0-based nodes; checks ranges, duplicates and angle labels.
    pub fn add_edge(&mut self, i: usize, j: usize, kind: EdgeKind) -> Result<(), DiagramError> {
        self.push_edge(i, j, kind, None)
    }

    fn push_edge(
        &mut self,
        i: usize,
        j: usize,
        kind: EdgeKind,
        line: Option<usize>,
    ) -> Result<(), DiagramError> {
        if i >= self.nodes || j >= self.nodes {
            return Err(DiagramError::validation(
                line,
                format!("node index out of range 1..{}", self.nodes),
            ));
        }
        if i == j {
            return Err(DiagramError::validation(
                line,
                "an edge needs two distinct nodes",
            ));
        }
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        if self.edge(i, j).is_some() {
            return Err(DiagramError::validation(
                line,
                format!("duplicate edge {} {}", i + 1, j + 1),
            ));
        }
        if let EdgeKind::Angle(m) = kind {
            if m < 3 {
                return Err(DiagramError::validation(
                    line,
                    format!("angle label {m} must be at least 3"),
                ));
            }
        }
        self.edges.push(Edge { i, j, kind });
        self.lines.push(line);
        Ok(())
    }

    /// A copy with node `k` renamed to `perm[k]`.
    pub fn relabeled(&self, perm: &[usize]) -> CoxeterDiagram {
        assert_eq!(perm.len(), self.nodes);
        let mut d = CoxeterDiagram::new(self.nodes);
        for e in &self.edges {
            d.add_edge(perm[e.i], perm[e.j], e.kind.clone())
                .expect("relabeling is a bijection");
        }
        d
    }

    /// Conductor `N` of the base field `Q(2cos(2π/N))` that holds every cosine.
    pub fn conductor(&self) -> u64 {
        let mut angles = Vec::new();
        let mut exprs = Vec::new();
        for e in &self.edges {
            match &e.kind {
                EdgeKind::Angle(m) => angles.push(*m as u64),
                EdgeKind::Parallel => {}
                EdgeKind::Dashed(w) => exprs.push(w),
            }
        }
        expr::conductor_for(&angles, &exprs)
    }

    /// Serialize in the text format (1-based node indices).
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl PartialEq for CoxeterDiagram {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for CoxeterDiagram {}

impl fmt::Display for CoxeterDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes {}", self.nodes)?;
        for e in &self.edges {
            match &e.kind {
                EdgeKind::Angle(m) => writeln!(f, "angle {} {} {}", e.i + 1, e.j + 1, m)?,
                EdgeKind::Parallel => writeln!(f, "parallel {} {}", e.i + 1, e.j + 1)?,
                EdgeKind::Dashed(w) => writeln!(f, "dashed {} {} {}", e.i + 1, e.j + 1, w)?,
            }
        }
        Ok(())
    }
}

struct Cursor<'a> {
    line: &'a str,
    pos: usize,
    lineno: usize,
}

impl<'a> Cursor<'a> {
    fn error(&self, at: usize, msg: impl Into<String>) -> DiagramError {
        DiagramError::Parse {
            line: self.lineno,
            col: self.line[..at].chars().count() + 1,
            msg: msg.into(),
        }
    }

    /// Next whitespace-delimited word and its byte offset.
    fn word(&mut self) -> Option<(usize, &'a str)> {
        let rest = &self.line[self.pos..];
        let skip = rest.len() - rest.trim_start().len();
        let start = self.pos + skip;
        let len = self.line[start..]
            .find(char::is_whitespace)
            .unwrap_or(self.line.len() - start);
        self.pos = start + len;
        (len > 0).then(|| (start, &self.line[start..start + len]))
    }

    fn number(&mut self, what: &str) -> Result<(usize, u64), DiagramError> {
        match self.word() {
            Some((at, w)) => w
                .parse::<u64>()
                .map(|v| (at, v))
                .map_err(|_| self.error(at, format!("expected {what}, found '{w}'"))),
            None => Err(self.error(self.line.len(), format!("expected {what}"))),
        }
    }

    fn node(&mut self, nodes: usize) -> Result<usize, DiagramError> {
        let (at, v) = self.number("a node index")?;
        if v == 0 || v as usize > nodes {
            return Err(self.error(at, format!("node index {v} out of range 1..{nodes}")));
        }
        Ok(v as usize - 1)
    }

    fn finish(&mut self) -> Result<(), DiagramError> {
        match self.word() {
            Some((at, w)) => Err(self.error(at, format!("unexpected '{w}'"))),
            None => Ok(()),
        }
    }
}

/// Parse and validate a diagram; dashed weights are evaluated and must exceed 1.
pub fn parse_diagram(text: &str) -> Result<CoxeterDiagram, DiagramError> {
    let d = parse_syntax(text)?;
    assemble_gram(&d)?;
    Ok(d)
}

fn parse_syntax(text: &str) -> Result<CoxeterDiagram, DiagramError> {
    let mut diagram: Option<CoxeterDiagram> = None;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = raw.split('#').next().unwrap_or("");
        let mut c = Cursor {
            line,
            pos: 0,
            lineno,
        };
        let Some((at, keyword)) = c.word() else {
            continue;
        };
        let Some(d) = diagram.as_mut() else {
            if keyword != "nodes" {
                return Err(c.error(at, "expected 'nodes <count>' before any edge"));
            }
            let (at, n) = c.number("a node count")?;
            if n == 0 {
                return Err(c.error(at, "a diagram needs at least one node"));
            }
            c.finish()?;
            diagram = Some(CoxeterDiagram::new(n as usize));
            continue;
        };
        let nodes = d.nodes;
        let kind_at = at;
        let (i, j, kind) = match keyword {
            "angle" => {
                let i = c.node(nodes)?;
                let j = c.node(nodes)?;
                let (at, m) = c.number("an angle label")?;
                if m < 3 {
                    return Err(c.error(at, format!("angle label {m} must be at least 3")));
                }
                let m = u32::try_from(m).map_err(|_| c.error(at, "angle label too large"))?;
                c.finish()?;
                (i, j, EdgeKind::Angle(m))
            }
            "parallel" => {
                let i = c.node(nodes)?;
                let j = c.node(nodes)?;
                c.finish()?;
                (i, j, EdgeKind::Parallel)
            }
            "dashed" => {
                let i = c.node(nodes)?;
                let j = c.node(nodes)?;
                let start = c.pos;
                let src = &line[start..];
                if src.trim().is_empty() {
                    return Err(c.error(line.len(), "expected a weight expression"));
                }
                let w = WeightExpr::parse(src).map_err(|e| c.error(start + e.offset, e.msg))?;
                (i, j, EdgeKind::Dashed(w))
            }
            "nodes" => return Err(c.error(kind_at, "node count given twice")),
            other => return Err(c.error(kind_at, format!("unknown keyword '{other}'"))),
        };
        d.push_edge(i, j, kind, Some(lineno))?;
    }
    diagram.ok_or_else(|| DiagramError::Parse {
        line: last_line.max(1),
        col: 1,
        msg: "missing 'nodes <count>'".into(),
    })
}

/// The Gram matrix: `1` on the diagonal, `−cos(π/m)` for angles, `−1` for
/// parallel walls, `−w` for dashed weights and `0` for right angles.
pub fn assemble_gram(d: &CoxeterDiagram) -> Result<(Arc<FieldTower>, SymMatrix), DiagramError> {
    let n = d.conductor();
    let mut tower = FieldTower::cyclotomic(n);
    let mut values = Vec::with_capacity(d.edges.len());
    for (e, line) in d.edges.iter().zip(&d.lines) {
        let v = match &e.kind {
            EdgeKind::Angle(m) => FieldElement::cos_pi(&tower, 1, *m as i64).neg(),
            EdgeKind::Parallel => FieldElement::from_int(&tower, -1),
            EdgeKind::Dashed(w) => {
                let v = w.eval(&mut tower)?;
                if v.sub(&FieldElement::one(&tower)).sign() <= 0 {
                    return Err(DiagramError::validation(
                        *line,
                        format!("dashed weight {w} must exceed 1"),
                    ));
                }
                v.neg()
            }
        };
        values.push(v);
    }
    let mut m = SymMatrix::identity(&tower, d.nodes);
    for (e, v) in d.edges.iter().zip(values) {
        m.set(e.i, e.j, v);
    }
    Ok((tower, m))
}

/// True iff `m` has signature `(d, 1, dim − d − 1)`.
pub fn lorentz_check(m: &SymMatrix, d: usize) -> bool {
    d < m.dim() && signature(m) == Signature::new(d, 1, m.dim() - d - 1)
}
