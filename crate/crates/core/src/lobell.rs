//! The Löbell family: slice diagrams `T_n`, their contractions `P_{n,k}`, face
//! lattices of `L_n` and closed-form quantities.

use std::sync::Arc;

use thiserror::Error;

use crate::algfield::{FieldElement, FieldError, FieldTower};
use crate::diagram::{BinOp, CoxeterDiagram, EdgeKind, WeightExpr};
use crate::interval::{acosh, cos_pi_ratio, refine_to_digits, sin_pi_ratio, Interval};
use crate::poly::euler_phi;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LobellError {
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn require_n(n: u64) -> Result<(), LobellError> {
    if n < 5 {
        return Err(LobellError::Domain(format!(
            "n = {n}: the Löbell family needs n >= 5"
        )));
    }
    Ok(())
}

/// `cos(π/n) / cos(2π/n)`
pub fn d_expr(n: u64) -> WeightExpr {
    WeightExpr::bin(
        BinOp::Div,
        WeightExpr::Cos(1, n as i64),
        WeightExpr::Cos(2, n as i64),
    )
}

/// `sqrt(1 + 1/(2cos(2π/n)))`
pub fn a_expr(n: u64) -> WeightExpr {
    let two_cos = WeightExpr::bin(BinOp::Mul, WeightExpr::int(2), WeightExpr::Cos(2, n as i64));
    let inner = WeightExpr::bin(
        BinOp::Add,
        WeightExpr::int(1),
        WeightExpr::bin(BinOp::Div, WeightExpr::int(1), two_cos),
    );
    WeightExpr::sqrt(inner)
}

/// The slice `T_n`: six walls, angles `π/n`, `π/4`, `π/4` and dashed weights `d_n`, `a_n`, `a_n`.
pub fn tn_diagram(n: u64) -> Result<CoxeterDiagram, LobellError> {
    pnk_diagram(n, 2)
}

/// `P_{n,k}`: the slice diagram with both `π/4` labels replaced by `π/(2k)`.
pub fn pnk_diagram(n: u64, k: u64) -> Result<CoxeterDiagram, LobellError> {
    require_n(n)?;
    if k < 2 {
        return Err(LobellError::Domain(format!(
            "k = {k}: contractions need k >= 2"
        )));
    }
    let label =
        |m: u64| u32::try_from(m).map_err(|_| LobellError::Domain(format!("label {m} too large")));
    let mut d = CoxeterDiagram::new(6);
    let edges = [
        (0, 1, EdgeKind::Angle(label(n)?)),
        (0, 5, EdgeKind::Angle(label(2 * k)?)),
        (1, 4, EdgeKind::Angle(label(2 * k)?)),
        (2, 3, EdgeKind::Dashed(d_expr(n))),
        (2, 5, EdgeKind::Dashed(a_expr(n))),
        (3, 4, EdgeKind::Dashed(a_expr(n))),
    ];
    for (i, j, kind) in edges {
        d.add_edge(i, j, kind).expect("fixed edge list is valid");
    }
    Ok(d)
}

/// Role of a face of `L_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceRole {
    Top,
    Bottom,
    /// Pentagon `index` in row 0 (touching the top) or row 1 (touching the bottom).
    Lateral {
        index: usize,
        row: usize,
    },
}

/// Combinatorics of a simple 3-polytope given by its faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceLattice {
    pub roles: Vec<FaceRole>,
    /// Sorted neighbour lists.
    pub adjacency: Vec<Vec<usize>>,
    /// Triples `a < b < c` of mutually adjacent faces.
    pub vertices: Vec<[usize; 3]>,
}

impl FaceLattice {
    pub fn face_count(&self) -> usize {
        self.roles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.face_count() as i64 - self.edge_count() as i64 + self.vertex_count() as i64
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn top(&self) -> Option<usize> {
        self.roles.iter().position(|r| *r == FaceRole::Top)
    }

    pub fn bottom(&self) -> Option<usize> {
        self.roles.iter().position(|r| *r == FaceRole::Bottom)
    }

    /// Number of vertices on face `f`.
    pub fn face_size(&self, f: usize) -> usize {
        self.vertices.iter().filter(|v| v.contains(&f)).count()
    }
}

/// Faces of `L_n`: top (0), bottom (1), the upper row `U_i` (`2 + i`) and the
/// lower row `W_i` (`2 + n + i`). `U_i` meets `W_i` and `W_{i+1}`.
pub fn lobell_faces(n: u64) -> Result<FaceLattice, LobellError> {
    require_n(n)?;
    let n = n as usize;
    let f = 2 * n + 2;
    let u = |i: usize| 2 + i % n;
    let w = |i: usize| 2 + n + i % n;
    let mut roles = vec![FaceRole::Top, FaceRole::Bottom];
    roles.extend((0..n).map(|index| FaceRole::Lateral { index, row: 0 }));
    roles.extend((0..n).map(|index| FaceRole::Lateral { index, row: 1 }));
    let mut adjacency = vec![Vec::new(); f];
    let mut link = |a: usize, b: usize| {
        adjacency[a].push(b);
        adjacency[b].push(a);
    };
    for i in 0..n {
        link(0, u(i));
        link(1, w(i));
        link(u(i), u(i + 1));
        link(w(i), w(i + 1));
        link(u(i), w(i));
        link(u(i), w(i + 1));
    }
    for a in &mut adjacency {
        a.sort_unstable();
    }
    let mut vertices = Vec::new();
    for a in 0..f {
        for &b in adjacency[a].iter().filter(|&&b| b > a) {
            for &c in adjacency[b].iter().filter(|&&c| c > b) {
                if adjacency[a].binary_search(&c).is_ok() {
                    vertices.push([a, b, c]);
                }
            }
        }
    }
    Ok(FaceLattice {
        roles,
        adjacency,
        vertices,
    })
}

/// `a_n` and `d_n` as exact elements, with the tower holding them.
pub fn slice_weights(n: u64) -> Result<(Arc<FieldTower>, FieldElement, FieldElement), LobellError> {
    require_n(n)?;
    let d = d_expr(n);
    let a = a_expr(n);
    let mut tower = FieldTower::cyclotomic(2 * num_integer::lcm(n, 4));
    let dv = d.eval(&mut tower)?;
    let av = a.eval(&mut tower)?;
    Ok((tower.clone(), av.lift_to(&tower), dv.lift_to(&tower)))
}

/// Closed-form data of `L_n`.
#[derive(Clone, Debug)]
pub struct LobellQuantities {
    pub n: u64,
    pub a_n: FieldElement,
    pub d_n: FieldElement,
    pub delta_n: Interval,
    pub systole_candidate: Interval,
    pub field_degree: u64,
}

pub fn lobell_quantities(n: u64, digits: usize) -> Result<LobellQuantities, LobellError> {
    let (_, a_n, d_n) = slice_weights(n)?;
    let delta = delta_n(n, digits + 1)?;
    let systole_candidate = systole_candidate(n, digits)?;
    Ok(LobellQuantities {
        n,
        a_n,
        d_n,
        delta_n: delta,
        systole_candidate,
        field_degree: euler_phi(n) / 2,
    })
}

fn delta_at(n: u64, prec: u64) -> Interval {
    let wp = prec + 16;
    let c1 = cos_pi_ratio(1, n as i64, wp);
    let c2 = cos_pi_ratio(2, n as i64, wp);
    acosh(&c1.div(&c2, wp), prec)
}

/// `δ_n = arccosh(cos(π/n) / cos(2π/n))`, the distance between top and bottom.
pub fn delta_n(n: u64, digits: usize) -> Result<Interval, LobellError> {
    require_n(n)?;
    Ok(refine_to_digits(digits, |p| delta_at(n, p)))
}

/// `2δ_n`, reported as the systole candidate.
pub fn systole_candidate(n: u64, digits: usize) -> Result<Interval, LobellError> {
    require_n(n)?;
    Ok(refine_to_digits(digits, |p| delta_at(n, p).mul_pow2(1)))
}

/// `(1 + sin(π/n)) / cos(π/n)`
pub fn antiprism_ratio(n: u64, digits: usize) -> Result<Interval, LobellError> {
    if n < 3 {
        return Err(LobellError::Domain(format!(
            "n = {n}: the ratio needs n >= 3"
        )));
    }
    Ok(refine_to_digits(digits, |p| {
        let wp = p + 16;
        let s = sin_pi_ratio(1, n as i64, wp).add(&Interval::from_i64(1), wp);
        s.div(&cos_pi_ratio(1, n as i64, wp), p)
    }))
}

/// Degree of the adjoint trace field `Q(cos 2π/n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceFieldFacts {
    pub n: u64,
    pub field_degree: u64,
}

pub fn trace_field_facts(n: u64) -> Result<TraceFieldFacts, LobellError> {
    require_n(n)?;
    Ok(TraceFieldFacts {
        n,
        field_degree: euler_phi(n) / 2,
    })
}

/// A note when the trace fields of `L_p` and `L_q` have different degrees.
pub fn incommensurability_note(p: u64, q: u64) -> Result<Option<String>, LobellError> {
    let (a, b) = (trace_field_facts(p)?, trace_field_facts(q)?);
    Ok((a.field_degree != b.field_degree).then(|| {
        format!(
            "incommensurable: field degrees differ ({} for n = {p}, {} for n = {q})",
            a.field_degree, b.field_degree
        )
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{assemble_gram, parse_diagram};

    #[test]
    fn test_tn_text_matches_canonical_file() {
        let d = tn_diagram(7).unwrap();
        let text =
            "nodes 6\nangle 1 2 7\nangle 1 6 4\nangle 2 5 4\ndashed 3 4 cos(pi*1/7)/cos(pi*2/7)\n\
                    dashed 3 6 sqrt(1+1/(2*cos(pi*2/7)))\ndashed 4 5 sqrt(1+1/(2*cos(pi*2/7)))\n";
        assert_eq!(d.to_text(), text);
        assert_eq!(parse_diagram(text).unwrap(), d);
    }

    #[test]
    fn test_domain_errors() {
        assert!(matches!(tn_diagram(4), Err(LobellError::Domain(_))));
        assert!(matches!(pnk_diagram(5, 1), Err(LobellError::Domain(_))));
        assert!(lobell_faces(4).is_err());
        assert!(antiprism_ratio(2, 5).is_err());
        assert!(antiprism_ratio(3, 5).is_ok());
    }

    #[test]
    fn test_pnk() {
        assert_eq!(pnk_diagram(9, 2).unwrap(), tn_diagram(9).unwrap());
        let d = pnk_diagram(6, 3).unwrap();
        assert_eq!(d.edge(0, 5).unwrap().kind, EdgeKind::Angle(6));
        assert_eq!(d.edge(1, 4).unwrap().kind, EdgeKind::Angle(6));
    }

    #[test]
    fn test_faces_dodecahedron() {
        let fl = lobell_faces(5).unwrap();
        assert_eq!(
            (fl.face_count(), fl.edge_count(), fl.vertex_count()),
            (12, 30, 20)
        );
        assert!((0..12).all(|f| fl.face_size(f) == 5));
        let fl = lobell_faces(6).unwrap();
        assert_eq!(
            (fl.face_count(), fl.edge_count(), fl.vertex_count()),
            (14, 36, 24)
        );
        assert_eq!(fl.face_size(0), 6);
        assert_eq!(fl.face_size(2), 5);
    }

    #[test]
    fn test_golden_weights() {
        let (t, a, d) = slice_weights(5).unwrap();
        assert!((a.to_f64() - 1.618_033_988_749_895).abs() < 1e-12);
        assert!((d.to_f64() - 2.618_033_988_749_895).abs() < 1e-12);
        let one = FieldElement::one(&t);
        let a2 = a.square();
        let rhs = a2.add(&a2).sub(&one).mul(&a2.sub(&one));
        assert_eq!(d.square(), rhs);
    }

    #[test]
    fn test_tn_gram_entries() {
        let (t, g) = assemble_gram(&tn_diagram(12).unwrap()).unwrap();
        let expect = FieldElement::cos_pi(&t, 1, 12).neg();
        assert_eq!(g.get(0, 1), &expect);
        assert!((g.get(0, 1).to_f64() + 2f64.sqrt() * (1.0 + 3f64.sqrt()) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn test_delta_values() {
        let d6 = delta_n(6, 30).unwrap();
        assert!(d6.to_decimal(25).starts_with("1.14621583478058884"));
        let d5 = delta_n(5, 10).unwrap();
        assert!((d5.to_f64() - 2.618_033_988_749_895f64.acosh()).abs() < 1e-12);
        assert!(systole_candidate(6, 10)
            .unwrap()
            .to_decimal(7)
            .starts_with("2.2924317"));
        assert!((antiprism_ratio(12, 10).unwrap().to_f64() - 1.303_225_372_841_206).abs() < 1e-9);
    }

    #[test]
    fn test_trace_field_facts() {
        assert_eq!(trace_field_facts(7).unwrap().field_degree, 3);
        assert_eq!(trace_field_facts(12).unwrap().field_degree, 2);
        assert!(incommensurability_note(5, 7).unwrap().is_some());
        assert!(incommensurability_note(5, 10).unwrap().is_none());
    }
}
