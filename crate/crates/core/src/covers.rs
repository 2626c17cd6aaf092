//! Colorings of the faces of `L_n` by nonzero vectors of `F₂³`, which define
//! degree-8 manifold covers when the colors at every vertex are independent.

use std::fmt;

use thiserror::Error;

use crate::interval::Interval;
use crate::lobell::{systole_candidate, FaceLattice};

/// The colors `e₁, e₂, e₃, e₁+e₂+e₃` as bit masks; covers colored from this set are orientable.
pub const ORIENTABLE_COLORS: [u8; 4] = [0b001, 0b010, 0b100, 0b111];

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CoverError {
    #[error("coloring has {found} faces, lattice has {expected}")]
    IncompleteColoring { expected: usize, found: usize },
    #[error("face {0} has the zero color")]
    ZeroColor(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A color per face; bit `i` of a color is its `e_{i+1}` coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub colors: Vec<u8>,
}

fn color_bits(c: u8) -> String {
    (0..3)
        .map(|i| if c >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl Coloring {
    /// Parse lines `face <index> <c1><c2><c3>`; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Coloring, CoverError> {
        let mut entries: Vec<(usize, u8)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| CoverError::Parse { line: idx + 1, msg };
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [kw, index, bits] = parts[..] else {
                return Err(err(format!(
                    "expected 'face <index> <bits>', found '{line}'"
                )));
            };
            if kw != "face" {
                return Err(err(format!("unknown keyword '{kw}'")));
            }
            let index: usize = index
                .parse()
                .map_err(|_| err(format!("bad face index '{index}'")))?;
            if bits.len() != 3 || !bits.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(err(format!(
                    "bad color '{bits}', expected three binary digits"
                )));
            }
            let c = bits
                .bytes()
                .enumerate()
                .fold(0u8, |acc, (i, b)| acc | ((b - b'0') << i));
            if entries.iter().any(|&(f, _)| f == index) {
                return Err(err(format!("face {index} colored twice")));
            }
            entries.push((index, c));
        }
        let n = entries.len();
        let mut colors = vec![0u8; n];
        for (f, c) in entries {
            if f >= n {
                return Err(CoverError::Parse {
                    line: 0,
                    msg: format!("face index {f} out of range 0..{n}"),
                });
            }
            colors[f] = c;
        }
        Ok(Coloring { colors })
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &c) in self.colors.iter().enumerate() {
            writeln!(f, "face {i} {}", color_bits(c))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverReport {
    pub valid: bool,
    pub orientable: bool,
    pub top_equals_bottom: bool,
    /// `2δ_n`, present for valid colorings with equal top and bottom colors.
    pub geodesic_candidate_length: Option<Interval>,
}

/// Three nonzero vectors of `F₂³` are independent iff distinct with nonzero sum.
pub fn independent(a: u8, b: u8, c: u8) -> bool {
    a != 0 && b != 0 && c != 0 && a != b && b != c && a != c && a ^ b ^ c != 0
}

/// Check a coloring; the geodesic length is certified to `digits` decimals.
pub fn verify_coloring(
    fl: &FaceLattice,
    c: &Coloring,
    digits: usize,
) -> Result<CoverReport, CoverError> {
    if c.colors.len() != fl.face_count() {
        return Err(CoverError::IncompleteColoring {
            expected: fl.face_count(),
            found: c.colors.len(),
        });
    }
    if let Some(f) = c.colors.iter().position(|&x| x == 0 || x > 7) {
        return Err(CoverError::ZeroColor(f));
    }
    let valid = fl
        .vertices
        .iter()
        .all(|v| independent(c.colors[v[0]], c.colors[v[1]], c.colors[v[2]]));
    let orientable = c.colors.iter().all(|x| ORIENTABLE_COLORS.contains(x));
    let top_equals_bottom = match (fl.top(), fl.bottom()) {
        (Some(t), Some(b)) => c.colors[t] == c.colors[b],
        _ => false,
    };
    let geodesic_candidate_length = if valid && top_equals_bottom {
        let n = fl.top().map(|t| fl.face_size(t) as u64).unwrap_or(0);
        systole_candidate(n, digits).ok()
    } else {
        None
    };
    Ok(CoverReport {
        valid,
        orientable,
        top_equals_bottom,
        geodesic_candidate_length,
    })
}

struct Search<'a> {
    fl: &'a FaceLattice,
    /// Faces forced to share a color with another face (top and bottom).
    twin: Vec<Option<usize>>,
    colors: Vec<u8>,
}

impl Search<'_> {
    fn allowed(&self, f: usize, c: u8) -> bool {
        let clash = |g: usize| self.fl.adjacency[g].iter().any(|&h| self.colors[h] == c);
        !clash(f) && self.twin[f].is_none_or(|t| !clash(t))
    }

    fn saturation(&self, f: usize) -> (usize, usize) {
        let mut seen = 0u8;
        let mut free = 0;
        let faces = std::iter::once(f).chain(self.twin[f]);
        for g in faces {
            for &h in &self.fl.adjacency[g] {
                if self.colors[h] != 0 {
                    seen |= 1
                        << ORIENTABLE_COLORS
                            .iter()
                            .position(|&x| x == self.colors[h])
                            .unwrap();
                } else {
                    free += 1;
                }
            }
        }
        (seen.count_ones() as usize, free)
    }

    /// Uncolored face with the most distinct neighbouring colors, then the most
    /// uncolored neighbours, then the lowest index.
    fn pick(&self) -> Option<usize> {
        (0..self.colors.len())
            .filter(|&f| self.colors[f] == 0)
            .max_by(|&a, &b| self.saturation(a).cmp(&self.saturation(b)).then(b.cmp(&a)))
    }

    fn run(&mut self, used: usize) -> bool {
        let Some(f) = self.pick() else {
            return true;
        };
        // colors are interchangeable, so one fresh color stands for all unused ones
        for (k, &c) in ORIENTABLE_COLORS.iter().enumerate().take((used + 1).min(4)) {
            if !self.allowed(f, c) {
                continue;
            }
            self.colors[f] = c;
            if let Some(t) = self.twin[f] {
                self.colors[t] = c;
            }
            if self.run(used.max(k + 1)) {
                return true;
            }
            self.colors[f] = 0;
            if let Some(t) = self.twin[f] {
                self.colors[t] = 0;
            }
        }
        false
    }
}

/// Backtracking search for an orientable coloring (a proper coloring of the
/// face graph from [`ORIENTABLE_COLORS`]); `None` means none exists.
pub fn find_coloring(fl: &FaceLattice, require_top_eq_bottom: bool) -> Option<Coloring> {
    let f = fl.face_count();
    let mut twin = vec![None; f];
    if require_top_eq_bottom {
        let (t, b) = (fl.top()?, fl.bottom()?);
        if fl.adjacent(t, b) {
            return None;
        }
        twin[t] = Some(b);
        twin[b] = Some(t);
    }
    let mut s = Search {
        fl,
        twin,
        colors: vec![0; f],
    };
    s.run(0).then_some(Coloring { colors: s.colors })
}
