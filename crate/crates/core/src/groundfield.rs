//! Cyclic products of a Gram matrix and the ground field they generate.
//!
//! Every cyclic product `g_{i1 i2} g_{i2 i3} … g_{ik i1}` is a product of edge
//! squares and fundamental-cycle products of a spanning forest of the support
//! graph, so those finitely many elements generate the ground field.

use std::collections::VecDeque;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::algfield::{
    apply_embedding, embedding_fixes, is_algebraic_integer, FieldElement, FieldTower, RealEmbedding,
};
use crate::exactlin::SymMatrix;

/// Support edges and fundamental cycles of the off-diagonal support graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSet {
    /// All unordered pairs `i < j` with `g_ij != 0`.
    pub edge_pairs: Vec<(usize, usize)>,
    /// Vertex sequences of fundamental cycles (closing edge implied).
    pub fundamental_cycles: Vec<Vec<usize>>,
    /// Parent of each vertex in the BFS forest (`None` at roots).
    pub parents: Vec<Option<usize>>,
    pub components: usize,
}

/// A closed walk and the product of the entries along it.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleProduct {
    pub walk: Vec<usize>,
    pub value: FieldElement,
}

impl CycleProduct {
    /// 1-based rendering such as `3-4-3` or `1-2-5-1`.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.walk.iter().map(|v| (v + 1).to_string()).collect();
        parts.push((self.walk[0] + 1).to_string());
        parts.join("-")
    }
}

fn adjacency(m: &SymMatrix) -> Vec<Vec<usize>> {
    let n = m.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && !m.get(i, j).is_zero())
                .collect()
        })
        .collect()
}

/// Breadth-first spanning forest, lowest index first, and its fundamental cycles.
pub fn cycle_set(m: &SymMatrix) -> CycleSet {
    let n = m.dim();
    let adj = adjacency(m);
    let mut parents = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut components = 0;
    for root in 0..n {
        if depth[root] != usize::MAX {
            continue;
        }
        components += 1;
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if depth[v] == usize::MAX {
                    depth[v] = depth[u] + 1;
                    parents[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
    }
    let mut edge_pairs = Vec::new();
    let mut fundamental_cycles = Vec::new();
    for i in 0..n {
        for &j in adj[i].iter().filter(|&&j| j > i) {
            edge_pairs.push((i, j));
            if parents[j] == Some(i) || parents[i] == Some(j) {
                continue;
            }
            // tree paths i → lca and j → lca
            let (mut a, mut b) = (i, j);
            let mut left = vec![a];
            let mut right = vec![b];
            while a != b {
                if depth[a] >= depth[b] {
                    a = parents[a].unwrap();
                    left.push(a);
                } else {
                    b = parents[b].unwrap();
                    right.push(b);
                }
            }
            right.pop();
            left.extend(right.into_iter().rev());
            fundamental_cycles.push(left);
        }
    }
    CycleSet {
        edge_pairs,
        fundamental_cycles,
        parents,
        components,
    }
}

fn walk_product(m: &SymMatrix, walk: &[usize]) -> FieldElement {
    let k = walk.len();
    (0..k).fold(FieldElement::one(m.tower()), |acc, t| {
        acc.mul(m.get(walk[t], walk[(t + 1) % k]))
    })
}

/// Edge squares followed by fundamental-cycle products, with their walks.
pub fn cycle_products(m: &SymMatrix) -> Vec<CycleProduct> {
    let cs = cycle_set(m);
    let mut out: Vec<CycleProduct> = cs
        .edge_pairs
        .iter()
        .map(|&(i, j)| CycleProduct {
            walk: vec![i, j],
            value: m.get(i, j).square(),
        })
        .collect();
    for c in cs.fundamental_cycles {
        let value = walk_product(m, &c);
        out.push(CycleProduct { walk: c, value });
    }
    out
}

/// Generators of the ground field: edge squares and fundamental-cycle products.
pub fn cycle_generators(m: &SymMatrix) -> Vec<FieldElement> {
    cycle_products(m).into_iter().map(|c| c.value).collect()
}

/// Incremental row echelon form over the rationals.
#[derive(Clone, Debug, Default)]
struct Echelon {
    rows: Vec<(usize, Vec<BigRational>)>,
}

impl Echelon {
    fn reduce(&self, mut v: Vec<BigRational>) -> Vec<BigRational> {
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row).skip(*p) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        v
    }

    /// Insert `v`; false if it was already in the span.
    fn insert(&mut self, v: Vec<BigRational>) -> bool {
        let v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        let row = v.into_iter().map(|x| x * &inv).collect();
        self.rows.push((p, row));
        true
    }
}

/// A subfield given as the rational span of products of generators.
#[derive(Clone, Debug)]
pub struct SubfieldDesc {
    tower: Arc<FieldTower>,
    pub generators: Vec<FieldElement>,
    /// Rational basis, starting with 1.
    pub basis: Vec<FieldElement>,
    echelon: Echelon,
}

impl SubfieldDesc {
    pub fn degree(&self) -> usize {
        self.basis.len()
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn contains(&self, a: &FieldElement) -> bool {
        let a = a.lift_to(&self.tower);
        self.echelon.reduce(a.coords()).iter().all(|x| x.is_zero())
    }
}

/// Smallest unital subspace containing `gens` and closed under multiplication.
///
/// The span is grown by multiplying new basis vectors with the generators; the
/// result is the algebra `Q[gens]`, which is a field.
pub fn subfield_closure(tower: &Arc<FieldTower>, gens: &[FieldElement]) -> SubfieldDesc {
    let gens: Vec<FieldElement> = gens.iter().map(|g| g.lift_to(tower)).collect();
    let mut echelon = Echelon::default();
    let one = FieldElement::one(tower);
    echelon.insert(one.coords());
    let mut basis = vec![one];
    let mut next = 0;
    while next < basis.len() {
        let b = basis[next].clone();
        next += 1;
        for g in &gens {
            let p = b.mul(g);
            if echelon.insert(p.coords()) {
                basis.push(p);
            }
        }
    }
    SubfieldDesc {
        tower: tower.clone(),
        generators: gens,
        basis,
        echelon,
    }
}

/// True iff `σ` fixes every generator of `k`.
pub fn embedding_restricts_to_identity(sigma: &RealEmbedding, k: &SubfieldDesc) -> bool {
    k.generators.iter().all(|g| embedding_fixes(sigma, g))
}

/// A cyclic product of `2G` that is not an algebraic integer.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralityWitness {
    /// Closed walk, 1-based, e.g. `3-6-3`.
    pub cycle: String,
    pub value: FieldElement,
    /// Value to 30 decimal places.
    pub decimal: String,
}

/// Whether every cyclic product of `2M` is an algebraic integer; generators of
/// `Cyc(2M)` suffice since integrality is closed under products.
pub fn cyc2_integrality(m: &SymMatrix, k: &SubfieldDesc) -> (bool, Vec<IntegralityWitness>) {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut witnesses = Vec::new();
    for c in cycle_products(m) {
        let value = c.value.scale(&num_traits::pow(two.clone(), c.walk.len()));
        debug_assert!(k.contains(&value));
        if !is_algebraic_integer(&value) {
            let decimal = apply_embedding(&RealEmbedding::identity(m.tower()), &value, 32)
                .mid()
                .to_decimal(30);
            witnesses.push(IntegralityWitness {
                cycle: c.describe(),
                value,
                decimal,
            });
        }
    }
    (witnesses.is_empty(), witnesses)
}

/// Diagonal scaling `t` along the spanning forest with `t_child = t_parent · g_{parent,child}`.
pub fn forest_scaling(m: &SymMatrix) -> Vec<FieldElement> {
    let cs = cycle_set(m);
    let n = m.dim();
    let mut t: Vec<Option<FieldElement>> = vec![None; n];
    // parents precede children in BFS order of discovery; resolve lazily
    fn resolve(
        v: usize,
        m: &SymMatrix,
        parents: &[Option<usize>],
        t: &mut Vec<Option<FieldElement>>,
    ) -> FieldElement {
        if let Some(x) = &t[v] {
            return x.clone();
        }
        let x = match parents[v] {
            None => FieldElement::one(m.tower()),
            Some(p) => resolve(p, m, parents, t).mul(m.get(p, v)),
        };
        t[v] = Some(x.clone());
        x
    }
    (0..n).map(|v| resolve(v, m, &cs.parents, &mut t)).collect()
}

/// The congruent matrix `B = D G D` with `D = diag(forest_scaling)`; its entries
/// are products of cyclic products and so lie in the ground field.
pub fn ground_form(m: &SymMatrix) -> SymMatrix {
    m.diagonal_congruence(&forest_scaling(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{assemble_gram, parse_diagram};

    fn path3() -> SymMatrix {
        let t = FieldTower::cyclotomic(2);
        let h = FieldElement::from_ratio(&t, -1, 2);
        SymMatrix::from_fn(&t, 3, |i, j| {
            if i == j {
                FieldElement::one(&t)
            } else if j == i + 1 {
                h.clone()
            } else {
                FieldElement::zero(&t)
            }
        })
    }

    #[test]
    fn test_path_generators() {
        let m = path3();
        let g = cycle_generators(&m);
        let quarter = FieldElement::from_ratio(m.tower(), 1, 4);
        assert_eq!(g, vec![quarter.clone(), quarter]);
        assert_eq!(subfield_closure(m.tower(), &g).degree(), 1);
    }

    #[test]
    fn test_diagonal_has_no_generators() {
        let t = FieldTower::cyclotomic(12);
        let m = SymMatrix::identity(&t, 4);
        assert!(cycle_generators(&m).is_empty());
        let k = subfield_closure(&t, &[]);
        assert_eq!(k.degree(), 1);
        assert!(!k.contains(&FieldElement::theta(&t)));
        assert!(cyc2_integrality(&m, &k).0);
    }

    #[test]
    fn test_triangle_cycle() {
        let d = parse_diagram("nodes 3\nangle 1 2 3\nangle 2 3 3\nangle 1 3 4").unwrap();
        let (_, m) = assemble_gram(&d).unwrap();
        let cs = cycle_set(&m);
        assert_eq!(cs.edge_pairs.len(), 3);
        assert_eq!(cs.fundamental_cycles, vec![vec![1, 0, 2]]);
        let prods = cycle_products(&m);
        assert_eq!(prods[3].describe(), "2-1-3-2");
        // (−1/2)(−1/2)(−√2/2)
        let expect =
            FieldElement::cos_pi(m.tower(), 1, 4).scale(&BigRational::new((-1).into(), 4.into()));
        assert_eq!(prods[3].value, expect);
        let k = subfield_closure(m.tower(), &cycle_generators(&m));
        assert_eq!(k.degree(), 2);
    }

    #[test]
    fn test_ground_form_entries_in_ground_field() {
        let d = parse_diagram("nodes 4\nangle 1 2 5\ndashed 2 3 sqrt(3)\nangle 3 4 4\nangle 1 4 3")
            .unwrap();
        let (t, m) = assemble_gram(&d).unwrap();
        let k = subfield_closure(&t, &cycle_generators(&m));
        let b = ground_form(&m);
        for i in 0..4 {
            for j in 0..4 {
                assert!(k.contains(b.get(i, j)), "entry {i},{j}");
            }
        }
    }
}
