//! Independent oracles shared by the property and acceptance suites.
#![allow(dead_code, clippy::needless_range_loop)]

use std::sync::Arc;

use astro_float::{BigFloat, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use vinberg::algfield::{FieldElement, FieldTower};
use vinberg::covers::{independent, ORIENTABLE_COLORS};
use vinberg::diagram::{CoxeterDiagram, EdgeKind, WeightExpr};
use vinberg::exactlin::{Signature, SymMatrix};
use vinberg::lobell::FaceLattice;

pub const PREC: usize = 512;
pub const RM: RoundingMode = RoundingMode::ToEven;

/// `Q(√3)(√2)`, with `√3 = 2cos(π/6)` and `√2` the adjoined root.
pub fn q_sqrt2_sqrt3() -> Arc<FieldTower> {
    let base = FieldTower::cyclotomic(12);
    base.adjoin_sqrt(&FieldElement::from_int(&base, 2))
        .unwrap()
        .0
}

/// `a + b√2 + c√3 + d√6` in the tower.
pub fn quad_exact(t: &Arc<FieldTower>, c: [i64; 4]) -> FieldElement {
    let s3 = FieldElement::theta(t);
    let s2 = t.sqrt_generator(0);
    let s6 = s2.mul(&s3);
    let q = |v: i64| FieldElement::from_int(t, v);
    q(c[0])
        .add(&q(c[1]).mul(&s2))
        .add(&q(c[2]).mul(&s3))
        .add(&q(c[3]).mul(&s6))
}

/// `a ± b√2 ± c√3 + d(±√2)(±√3)` as a float, the signs choosing the embedding.
pub fn quad_float(c: [i64; 4], s2: i64, s3: i64) -> BigFloat {
    let f = |v: i64| BigFloat::from_i64(v, PREC);
    let r2 = f(2).sqrt(PREC, RM).mul(&f(s2), PREC, RM);
    let r3 = f(3).sqrt(PREC, RM).mul(&f(s3), PREC, RM);
    let r6 = r2.mul(&r3, PREC, RM);
    f(c[0])
        .add(&f(c[1]).mul(&r2, PREC, RM), PREC, RM)
        .add(&f(c[2]).mul(&r3, PREC, RM), PREC, RM)
        .add(&f(c[3]).mul(&r6, PREC, RM), PREC, RM)
}

/// Integer data of `A·D·Aᵀ` with `A` of size `dim × rank` over `Z[√2,√3]`.
pub struct LowRank {
    pub a: Vec<Vec<[i64; 4]>>,
    pub d: Vec<[i64; 4]>,
}

impl LowRank {
    pub fn random(rng: &mut impl Rng, dim: usize, rank: usize) -> LowRank {
        let mut coeffs = || -> [i64; 4] { std::array::from_fn(|_| rng.gen_range(-3..=3)) };
        let a = (0..dim)
            .map(|_| (0..rank).map(|_| coeffs()).collect())
            .collect();
        let d = (0..rank).map(|_| coeffs()).collect();
        LowRank { a, d }
    }

    pub fn exact(&self, t: &Arc<FieldTower>) -> SymMatrix {
        let dim = self.a.len();
        let a: Vec<Vec<FieldElement>> = self
            .a
            .iter()
            .map(|r| r.iter().map(|&c| quad_exact(t, c)).collect())
            .collect();
        let d: Vec<FieldElement> = self.d.iter().map(|&c| quad_exact(t, c)).collect();
        SymMatrix::from_fn(t, dim, |i, j| {
            (0..d.len()).fold(FieldElement::zero(t), |acc, k| {
                acc.add(&a[i][k].mul(&d[k]).mul(&a[j][k]))
            })
        })
    }

    pub fn float(&self, s2: i64, s3: i64) -> Vec<Vec<BigFloat>> {
        let dim = self.a.len();
        let a: Vec<Vec<BigFloat>> = self
            .a
            .iter()
            .map(|r| r.iter().map(|&c| quad_float(c, s2, s3)).collect())
            .collect();
        let d: Vec<BigFloat> = self.d.iter().map(|&c| quad_float(c, s2, s3)).collect();
        (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        (0..d.len()).fold(BigFloat::from_i64(0, PREC), |acc, k| {
                            acc.add(
                                &a[i][k].mul(&d[k], PREC, RM).mul(&a[j][k], PREC, RM),
                                PREC,
                                RM,
                            )
                        })
                    })
                    .collect()
            })
            .collect()
    }
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(m: &[Vec<BigFloat>]) -> Vec<BigFloat> {
    let n = m.len();
    let mut a: Vec<Vec<BigFloat>> = m.to_vec();
    let one = BigFloat::from_i64(1, PREC);
    let two = BigFloat::from_i64(2, PREC);
    let tiny = BigFloat::parse(
        "1e-140",
        astro_float::Radix::Dec,
        PREC,
        RM,
        &mut astro_float::Consts::new().unwrap(),
    );
    for _sweep in 0..100 {
        let mut off = BigFloat::from_i64(0, PREC);
        for p in 0..n {
            for q in p + 1..n {
                off = off.add(&a[p][q].abs(), PREC, RM);
            }
        }
        if off.cmp(&tiny).unwrap() < 0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].is_zero() || a[p][q].abs().cmp(&tiny).unwrap() < 0 {
                    continue;
                }
                let theta =
                    a[q][q]
                        .sub(&a[p][p], PREC, RM)
                        .div(&two.mul(&a[p][q], PREC, RM), PREC, RM);
                let root = theta
                    .mul(&theta, PREC, RM)
                    .add(&one, PREC, RM)
                    .sqrt(PREC, RM);
                let mut t = one.div(&theta.abs().add(&root, PREC, RM), PREC, RM);
                if theta.is_negative() {
                    t = t.neg();
                }
                let c = one.div(
                    &t.mul(&t, PREC, RM).add(&one, PREC, RM).sqrt(PREC, RM),
                    PREC,
                    RM,
                );
                let s = t.mul(&c, PREC, RM);
                for k in 0..n {
                    let akp = a[k][p].clone();
                    let akq = a[k][q].clone();
                    a[k][p] = c.mul(&akp, PREC, RM).sub(&s.mul(&akq, PREC, RM), PREC, RM);
                    a[k][q] = s.mul(&akp, PREC, RM).add(&c.mul(&akq, PREC, RM), PREC, RM);
                }
                for k in 0..n {
                    let apk = a[p][k].clone();
                    let aqk = a[q][k].clone();
                    a[p][k] = c.mul(&apk, PREC, RM).sub(&s.mul(&aqk, PREC, RM), PREC, RM);
                    a[q][k] = s.mul(&apk, PREC, RM).add(&c.mul(&aqk, PREC, RM), PREC, RM);
                }
            }
        }
    }
    (0..n).map(|i| a[i][i].clone()).collect()
}

/// Signature from eigenvalues, counting those below `threshold` in absolute value as zero.
pub fn eigen_signature(eigs: &[BigFloat], threshold: &BigFloat) -> Signature {
    let mut s = Signature::new(0, 0, 0);
    for e in eigs {
        if e.abs().cmp(threshold).unwrap() < 0 {
            s.r += 1;
        } else if e.is_negative() {
            s.q += 1;
        } else {
            s.p += 1;
        }
    }
    s
}

pub fn threshold_1e25() -> BigFloat {
    BigFloat::parse(
        "1e-25",
        astro_float::Radix::Dec,
        PREC,
        RM,
        &mut astro_float::Consts::new().unwrap(),
    )
}

/// Smallest nonzero-classified eigenvalue gap: the least `|λ|` over eigenvalues above the threshold.
pub fn min_nonzero_abs(eigs: &[BigFloat], threshold: &BigFloat) -> Option<BigFloat> {
    eigs.iter()
        .map(|e| e.abs())
        .filter(|e| e.cmp(threshold).unwrap() >= 0)
        .min_by(|a, b| a.cmp(b).unwrap().cmp(&0))
}

/// Naive face-order backtracking over all orientable colors.
pub fn brute_force_coloring(fl: &FaceLattice, require_top_eq_bottom: bool) -> Option<Vec<u8>> {
    fn go(fl: &FaceLattice, tb: Option<(usize, usize)>, colors: &mut Vec<u8>, f: usize) -> bool {
        if f == colors.len() {
            return tb.is_none_or(|(t, b)| colors[t] == colors[b]);
        }
        for c in ORIENTABLE_COLORS {
            if fl.adjacency[f].iter().any(|&g| g < f && colors[g] == c) {
                continue;
            }
            if let Some((t, b)) = tb {
                if f == b.max(t) && colors[b.min(t)] != c {
                    continue;
                }
            }
            colors[f] = c;
            if go(fl, tb, colors, f + 1) {
                return true;
            }
        }
        colors[f] = 0;
        false
    }
    let tb = if require_top_eq_bottom {
        Some((fl.top()?, fl.bottom()?))
    } else {
        None
    };
    let mut colors = vec![0u8; fl.face_count()];
    go(fl, tb, &mut colors, 0).then_some(colors)
}

/// Independence at every vertex, checked directly.
pub fn coloring_is_valid(fl: &FaceLattice, colors: &[u8]) -> bool {
    fl.vertices
        .iter()
        .all(|v| independent(colors[v[0]], colors[v[1]], colors[v[2]]))
}

/// Every simple cycle of length at least 3, once each: it starts at its least
/// vertex and its second vertex is smaller than its last.
pub fn simple_cycles(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    fn extend(
        adj: &[Vec<usize>],
        path: &mut Vec<usize>,
        on: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let start = path[0];
        let last = *path.last().unwrap();
        for &w in &adj[last] {
            if w == start && path.len() >= 3 && path[1] < last {
                out.push(path.clone());
            }
            if w > start && !on[w] {
                on[w] = true;
                path.push(w);
                extend(adj, path, on, out);
                path.pop();
                on[w] = false;
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..adj.len() {
        let mut on = vec![false; adj.len()];
        on[s] = true;
        extend(adj, &mut vec![s], &mut on, &mut out);
    }
    out
}

pub fn support_adjacency(m: &SymMatrix) -> Vec<Vec<usize>> {
    let n = m.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && !m.get(i, j).is_zero())
                .collect()
        })
        .collect()
}

/// Product of the Gram entries around a closed vertex sequence.
pub fn walk_product(m: &SymMatrix, walk: &[usize]) -> FieldElement {
    let mut p = FieldElement::one(m.tower());
    for (k, &v) in walk.iter().enumerate() {
        p = p.mul(m.get(v, walk[(k + 1) % walk.len()]));
    }
    p
}

/// Diagram with random angle, parallel and dashed edges on `nodes` vertices,
/// with labels keeping the conductor a divisor of 24.
pub fn random_diagram(rng: &mut impl Rng, nodes: usize, density: f64) -> CoxeterDiagram {
    let mut d = CoxeterDiagram::new(nodes);
    for i in 0..nodes {
        for j in i + 1..nodes {
            if !rng.gen_bool(density) {
                continue;
            }
            let kind = match rng.gen_range(0..6) {
                0 => EdgeKind::Parallel,
                1 => EdgeKind::Dashed(
                    WeightExpr::parse(&format!("{}/2", rng.gen_range(3..9))).unwrap(),
                ),
                2 => EdgeKind::Dashed(
                    WeightExpr::parse(&format!("sqrt({})", [2, 3, 5, 7][rng.gen_range(0..4)]))
                        .unwrap(),
                ),
                3 => EdgeKind::Dashed(
                    WeightExpr::parse(&format!("1/cos(pi/{})", [3, 4, 6][rng.gen_range(0..3)]))
                        .unwrap(),
                ),
                _ => EdgeKind::Angle([3, 4, 6, 12][rng.gen_range(0..4)]),
            };
            d.add_edge(i, j, kind).unwrap();
        }
    }
    d
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Towers exercised by the field-axiom checks.
pub fn property_towers() -> Vec<(&'static str, Arc<FieldTower>)> {
    let b12 = FieldTower::cyclotomic(12);
    let s3 = FieldElement::theta(&b12);
    let k12 = vinberg::algfield::make_tower(
        12,
        &[
            FieldElement::from_int(&b12, 2),
            s3.add(&FieldElement::from_int(&b12, 3)),
        ],
    )
    .unwrap();
    let b14 = FieldTower::cyclotomic(14);
    let t7 = b14
        .adjoin_sqrt(&FieldElement::theta(&b14).add(&FieldElement::from_int(&b14, 1)))
        .unwrap()
        .0;
    vec![
        ("Q(sqrt5)", FieldTower::cyclotomic(5)),
        ("Q(cos 2pi/7)", FieldTower::cyclotomic(7)),
        ("Q(sqrt2, sqrt3)", q_sqrt2_sqrt3()),
        ("K_12", k12),
        ("Q(cos pi/7)(sqrt(1 + 2cos pi/7))", t7),
    ]
}

/// Element with coordinates `coords[i].0 / coords[i].1`; extra entries are ignored.
pub fn element(t: &Arc<FieldTower>, coords: &[(i64, i64)]) -> FieldElement {
    let c: Vec<BigRational> = (0..t.dimension())
        .map(|i| rational(coords[i].0, coords[i].1))
        .collect();
    FieldElement::from_coords(t, &c)
}

pub fn random_coords(rng: &mut impl Rng, len: usize, den: i64) -> Vec<(i64, i64)> {
    (0..len)
        .map(|_| (rng.gen_range(-20..=20), rng.gen_range(1..=den)))
        .collect()
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

pub fn field_axioms_hold(
    a: &FieldElement,
    b: &FieldElement,
    c: &FieldElement,
) -> Result<(), String> {
    ensure!(
        a.add(b).add(c) == a.add(&b.add(c)),
        "addition not associative"
    );
    ensure!(a.add(b) == b.add(a), "addition not commutative");
    ensure!(
        a.mul(b).mul(c) == a.mul(&b.mul(c)),
        "multiplication not associative"
    );
    ensure!(a.mul(b) == b.mul(a), "multiplication not commutative");
    ensure!(
        a.mul(&b.add(c)) == a.mul(b).add(&a.mul(c)),
        "not distributive"
    );
    ensure!(a.sub(a).is_zero(), "a - a != 0");
    ensure!(a.mul(&FieldElement::one(a.tower())) == *a, "a * 1 != a");
    if c.is_zero() {
        ensure!(c.inv().is_err(), "0 has an inverse");
    } else {
        ensure!(
            c.mul(&c.inv().unwrap()).is_one(),
            "c * c^-1 != 1 for c = {c}"
        );
        ensure!(a.mul(c).div(c).unwrap() == *a, "(a c) / c != a");
    }
    Ok(())
}

/// Exact signatures of a random `A·D·Aᵀ` under all four embeddings of
/// `Q(√2,√3)` against Jacobi eigenvalues at 512 bits with zero threshold `1e-25`.
pub fn signature_agrees(seed: u64, dim: usize, rank: usize) -> Result<(), String> {
    use rand::SeedableRng;
    use vinberg::algfield::real_embeddings;
    use vinberg::exactlin::{charpoly, signature_of_charpoly};

    let t = q_sqrt2_sqrt3();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let lr = LowRank::random(&mut rng, dim, rank);
    let cp = charpoly(&lr.exact(&t));
    let thr = threshold_1e25();
    let emb = real_embeddings(&t);
    ensure!(
        emb.embeddings.len() == 4,
        "Q(√2,√3) has {} real embeddings",
        emb.embeddings.len()
    );
    for sigma in &emb.embeddings {
        let s2 = sigma.sign(&t.sqrt_generator(0)) as i64;
        let s3 = sigma.sign(&FieldElement::theta(&t)) as i64;
        let exact = signature_of_charpoly(&cp, sigma);
        let oracle = eigen_signature(&jacobi_eigenvalues(&lr.float(s2, s3)), &thr);
        ensure!(exact == oracle, "seed {seed} dim {dim} rank {rank} (√2 {s2:+}, √3 {s3:+}): exact {exact}, oracle {oracle}");
        ensure!(exact.r >= dim - rank, "rank bound violated for seed {seed}");
    }
    Ok(())
}

/// Ground field from fundamental cycles and edge squares against the field of all
/// simple-cycle products, and V3 from generators against V3 over all simple cycles.
pub fn cycle_closure_agrees(d: &CoxeterDiagram) -> Result<(), String> {
    use vinberg::algfield::is_algebraic_integer;
    use vinberg::groundfield::{cyc2_integrality, cycle_generators, cycle_set, subfield_closure};

    let (t, g) = vinberg::diagram::assemble_gram(d).map_err(|e| e.to_string())?;
    let cs = cycle_set(&g);
    ensure!(
        cs.fundamental_cycles.len() + g.dim() == cs.edge_pairs.len() + cs.components,
        "cycle rank mismatch"
    );
    let mut brute = Vec::new();
    for &(i, j) in &cs.edge_pairs {
        brute.push((2, walk_product(&g, &[i, j])));
    }
    for c in simple_cycles(&support_adjacency(&g)) {
        brute.push((c.len(), walk_product(&g, &c)));
    }
    let k = subfield_closure(&t, &cycle_generators(&g));
    let kb = subfield_closure(
        &t,
        &brute.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>(),
    );
    ensure!(
        k.degree() == kb.degree(),
        "degree {} from generators, {} from simple cycles",
        k.degree(),
        kb.degree()
    );
    ensure!(
        brute.iter().all(|(_, v)| k.contains(v)),
        "a simple-cycle product lies outside the closure"
    );
    let two = rational(2, 1);
    let brute_integral = brute
        .iter()
        .all(|(len, v)| is_algebraic_integer(&v.scale(&num_traits::pow(two.clone(), *len))));
    ensure!(
        cyc2_integrality(&g, &k).0 == brute_integral,
        "V3 disagrees with simple-cycle integrality"
    );
    Ok(())
}

/// Fixed corpus: seeded random diagrams on 1 to 7 nodes plus the slices and contractions.
pub fn diagram_corpus() -> Vec<CoxeterDiagram> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    for nodes in 1..=7 {
        for k in 0..30 {
            out.push(random_diagram(&mut rng, nodes, 0.15 + 0.025 * k as f64));
        }
    }
    for n in 5..=12 {
        out.push(vinberg::lobell::tn_diagram(n).unwrap());
    }
    for (n, k) in [(6, 3), (8, 3), (9, 4), (12, 5)] {
        out.push(vinberg::lobell::pnk_diagram(n, k).unwrap());
    }
    out
}
