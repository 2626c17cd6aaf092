//! Real embeddings of a tower and certified evaluation.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{rational_charpoly, FieldElement, FieldTower};
use crate::interval::{refine_to_digits, start_precision, Dyadic, Interval};
use crate::poly::{IntPoly, Sturm};

/// A real embedding: a real root of the base polynomial plus a sign for every
/// adjoined square root.
#[derive(Clone)]
pub struct RealEmbedding {
    pub(crate) tower: Arc<FieldTower>,
    pub(crate) root_index: usize,
    pub(crate) signs: Vec<i8>,
}

impl fmt::Debug for RealEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealEmbedding")
            .field("root_index", &self.root_index)
            .field("galois_index", &self.galois_index())
            .field("signs", &self.signs)
            .finish()
    }
}

impl PartialEq for RealEmbedding {
    fn eq(&self, other: &Self) -> bool {
        self.tower.same_as(&other.tower)
            && self.root_index == other.root_index
            && self.signs == other.signs
    }
}

struct EvalCtx {
    prec: u64,
    theta: Interval,
    gens: Vec<Interval>,
}

impl RealEmbedding {
    /// The designated embedding: root `2cos(2π/N)` and all square roots positive.
    pub fn identity(tower: &Arc<FieldTower>) -> RealEmbedding {
        RealEmbedding {
            tower: tower.clone(),
            root_index: tower.designated_root_index(),
            signs: vec![1; tower.level_count()],
        }
    }

    /// Construct an embedding directly; `None` if some radicand is not positive under it.
    pub fn new(
        tower: &Arc<FieldTower>,
        root_index: usize,
        signs: Vec<i8>,
    ) -> Option<RealEmbedding> {
        assert!(root_index < tower.base_degree() && signs.len() == tower.level_count());
        assert!(signs.iter().all(|&s| s == 1 || s == -1));
        for j in 0..signs.len() {
            if partial_sign(tower, root_index, &signs[..j], &tower.levels[j].scaled) <= 0 {
                return None;
            }
        }
        Some(RealEmbedding {
            tower: tower.clone(),
            root_index,
            signs,
        })
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn root_index(&self) -> usize {
        self.root_index
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// The `m` with `σ(2cos(2π/N)) = 2cos(2πm/N)`.
    pub fn galois_index(&self) -> u64 {
        self.tower.base.roots[self.root_index].galois_index
    }

    pub fn is_identity(&self) -> bool {
        self.root_index == self.tower.designated_root_index() && self.signs.iter().all(|&s| s == 1)
    }

    /// Isolating intervals of width at most `2^-bits` for `σ(θ)` and every `σ(√r_i)`.
    pub fn root_intervals(&self, bits: u64) -> Vec<Interval> {
        let ctx = context(&self.tower, self.root_index, &self.signs, bits + 8);
        let mut out = vec![ctx.theta.clone()];
        for (j, g) in ctx.gens.iter().enumerate() {
            out.push(g.div_int(&self.tower.levels[j].scale, bits + 8));
        }
        out
    }

    /// Evaluate at a fixed working precision (deterministic).
    pub fn eval(&self, a: &FieldElement, prec: u64) -> Interval {
        assert!(
            a.tower.is_prefix_of(&self.tower),
            "embedding does not belong to the element's tower"
        );
        let ctx = context(&self.tower, self.root_index, &self.signs, prec);
        let j = a.level();
        let len = self.tower.base_degree() << j;
        eval_coords(&ctx, j, &a.num[..len]).div_int(&a.den, prec)
    }

    /// Exact sign of `σ(a)`.
    pub fn sign(&self, a: &FieldElement) -> i32 {
        if a.is_zero() {
            return 0;
        }
        let mut prec = start_precision();
        loop {
            if let Some(s) = self.eval(a, prec).sign() {
                return s as i32;
            }
            prec *= 2;
        }
    }
}

fn context(tower: &FieldTower, root_index: usize, signs: &[i8], prec: u64) -> EvalCtx {
    let theta = tower.base.root_interval(root_index, prec);
    let mut ctx = EvalCtx {
        prec,
        theta,
        gens: Vec::with_capacity(signs.len()),
    };
    for (j, &s) in signs.iter().enumerate() {
        let v = eval_coords(&ctx, j, &tower.levels[j].scaled);
        let g = v.sqrt(prec);
        ctx.gens.push(if s < 0 { g.neg() } else { g });
    }
    ctx
}

fn horner(ctx: &EvalCtx, coeffs: &[BigInt]) -> Interval {
    let Some(top) = coeffs.iter().rposition(|c| !c.is_zero()) else {
        return Interval::from_i64(0);
    };
    let mut acc = Interval::from_bigint(&coeffs[top], ctx.prec);
    for c in coeffs[..top].iter().rev() {
        acc = acc.mul(&ctx.theta, ctx.prec);
        if !c.is_zero() {
            acc = acc.add(&Interval::from_bigint(c, ctx.prec), ctx.prec);
        }
    }
    acc
}

fn eval_coords(ctx: &EvalCtx, j: usize, coords: &[BigInt]) -> Interval {
    if j == 0 {
        return horner(ctx, coords);
    }
    let h = coords.len() / 2;
    let (lo, hi) = coords.split_at(h);
    let a = eval_coords(ctx, j - 1, lo);
    if hi.iter().all(|c| c.is_zero()) {
        return a;
    }
    let b = eval_coords(ctx, j - 1, hi).mul(&ctx.gens[j - 1], ctx.prec);
    a.add(&b, ctx.prec)
}

/// Sign of an integral coordinate vector at level `signs.len()` under a partial embedding.
fn partial_sign(tower: &FieldTower, root_index: usize, signs: &[i8], coords: &[BigInt]) -> i32 {
    if coords.iter().all(|c| c.is_zero()) {
        return 0;
    }
    let mut prec = start_precision();
    loop {
        let ctx = context(tower, root_index, signs, prec);
        if let Some(s) = eval_coords(&ctx, signs.len(), coords).sign() {
            return s as i32;
        }
        prec *= 2;
    }
}

/// Result of [`real_embeddings`].
#[derive(Clone, Debug)]
pub struct EmbeddingEnumeration {
    pub embeddings: Vec<RealEmbedding>,
    pub totally_real: bool,
    /// Description of the first branch that failed to be real.
    pub witness: Option<String>,
}

/// All real embeddings, in ascending base-root order and with sign vectors
/// ordered `+` before `-` level by level.
pub fn real_embeddings(tower: &Arc<FieldTower>) -> EmbeddingEnumeration {
    let mut out = EmbeddingEnumeration {
        embeddings: Vec::new(),
        totally_real: true,
        witness: None,
    };
    for root in 0..tower.base_degree() {
        let mut signs = Vec::new();
        descend(tower, root, &mut signs, &mut out);
    }
    out
}

fn descend(
    tower: &Arc<FieldTower>,
    root: usize,
    signs: &mut Vec<i8>,
    out: &mut EmbeddingEnumeration,
) {
    let j = signs.len();
    if j == tower.level_count() {
        out.embeddings.push(RealEmbedding {
            tower: tower.clone(),
            root_index: root,
            signs: signs.clone(),
        });
        return;
    }
    if partial_sign(tower, root, signs, &tower.levels[j].scaled) < 0 {
        if out.totally_real {
            let m = tower.base.roots[root].galois_index;
            let sv: String = signs
                .iter()
                .map(|&s| if s > 0 { '+' } else { '-' })
                .collect();
            out.witness = Some(format!(
                "θ ↦ 2cos(2π·{m}/{}), signs [{sv}]: radicand {} = {} becomes negative",
                tower.conductor(),
                j + 1,
                tower.levels[j].radicand
            ));
        }
        out.totally_real = false;
        return;
    }
    for s in [1i8, -1] {
        signs.push(s);
        descend(tower, root, signs, out);
        signs.pop();
    }
}

/// `σ(a)` as an interval of width at most `10^-digits`.
pub fn apply_embedding(sigma: &RealEmbedding, a: &FieldElement, digits: usize) -> Interval {
    refine_to_digits(digits, |p| sigma.eval(a, p))
}

/// Exact test of `σ(a) = a` (with `a` read through the designated embedding).
pub fn embedding_fixes(sigma: &RealEmbedding, a: &FieldElement) -> bool {
    if sigma.is_identity() || a.is_rational() {
        return true;
    }
    let id = RealEmbedding::identity(&sigma.tower);
    let mut prec = start_precision();
    for _ in 0..3 {
        if sigma.eval(a, prec).is_disjoint(&id.eval(a, prec)) {
            return false;
        }
        prec *= 2;
    }
    if a.in_base() {
        return base_conjugate(a, sigma.galois_index()) == a.block(0);
    }
    // Both values are roots of the squarefree part of the rational characteristic
    // polynomial; once the hull of the two enclosures holds a single root they agree.
    let cp = rational_charpoly(a);
    let den = cp.iter().fold(BigInt::from(1), |l, c| {
        num_integer::Integer::lcm(&l, c.denom())
    });
    let ip = IntPoly::new(
        cp.iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect(),
    );
    let sturm = Sturm::new(&ip.squarefree());
    loop {
        let s = sigma.eval(a, prec);
        let i = id.eval(a, prec);
        if s.is_disjoint(&i) {
            return false;
        }
        let h = s.hull(&i);
        let lo = h.lo().sub(&Dyadic::pow2(-(prec as i64) - 8));
        if sturm.count_in(&lo, h.hi()) == 1 {
            return true;
        }
        prec *= 2;
    }
}

/// `τ_m(a)` for a base-field element: substitute `θ ↦ V_m(θ)`.
pub(crate) fn base_conjugate(a: &FieldElement, m: u64) -> FieldElement {
    let b = a.block(0);
    let base = b.tower.clone();
    let v = FieldElement::two_cos(&base, m as i64);
    let mut acc = FieldElement::zero(&base);
    for c in b.num.iter().rev() {
        acc = acc.mul(&v);
        if !c.is_zero() {
            acc = acc.add(&FieldElement::from_rational(
                &base,
                &BigRational::from_integer(c.clone()),
            ));
        }
    }
    acc.scale(&BigRational::new(BigInt::from(1), b.den.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algfield::make_tower;

    fn k12() -> (Arc<FieldTower>, FieldElement) {
        let base = FieldTower::cyclotomic(12);
        let s3 = FieldElement::theta(&base);
        let r = &FieldElement::from_int(&base, 3) + &s3;
        (
            make_tower(12, &[FieldElement::from_int(&base, 2), r]).unwrap(),
            s3,
        )
    }

    #[test]
    fn test_sqrt5_embeddings() {
        let t = FieldTower::cyclotomic(5);
        let e = real_embeddings(&t);
        assert!(e.totally_real);
        assert_eq!(e.embeddings.len(), 2);
        let s5 = &FieldElement::from_int(&t, 1)
            + &FieldElement::theta(&t).scale(&BigRational::from_integer(2.into()));
        assert_eq!(s5.square(), FieldElement::from_int(&t, 5));
        let signs: Vec<i32> = e.embeddings.iter().map(|s| s.sign(&s5)).collect();
        assert_eq!(signs, [-1, 1]);
    }

    #[test]
    fn test_k12_embeddings() {
        let (t, _) = k12();
        let e = real_embeddings(&t);
        assert!(e.totally_real);
        assert_eq!(e.embeddings.len(), 8);
        for s in &e.embeddings {
            for (j, r) in t.radicands().iter().enumerate() {
                assert!(
                    s.eval(r, 64).sign() == Some(std::cmp::Ordering::Greater),
                    "radicand {j}"
                );
            }
        }
    }

    #[test]
    fn test_not_totally_real() {
        let base = FieldTower::cyclotomic(12);
        let r = &FieldElement::theta(&base) - &FieldElement::from_int(&base, 3);
        // √3 − 3 is negative at the designated root, so use 3 + √3 ↦ 3 − √3 instead
        let e = real_embeddings(&make_tower(12, &[r.neg()]).unwrap());
        assert!(e.totally_real);
        let t = base
            .adjoin_sqrt(&FieldElement::from_int(&base, 2))
            .unwrap()
            .0;
        let x = &t.sqrt_generator(0) - &FieldElement::from_ratio(&t, 7, 5);
        let e = real_embeddings(&make_tower(12, &[FieldElement::from_int(&base, 2), x]).unwrap());
        assert!(!e.totally_real);
        assert!(e.witness.unwrap().contains("negative"));
        assert_eq!(e.embeddings.len(), 4);
        assert!(matches!(
            base.adjoin_sqrt(&r),
            Err(super::super::FieldError::NonRealRadicand(_))
        ));
    }

    #[test]
    fn test_apply_embedding() {
        let t = FieldTower::cyclotomic(5);
        let e = real_embeddings(&t).embeddings;
        let theta = FieldElement::theta(&t);
        let id = RealEmbedding::identity(&t);
        let v = apply_embedding(&id, &theta, 20);
        assert!(v.width_below_decimal(20));
        assert!((v.to_f64() - 0.618_033_988_749_895).abs() < 1e-15);
        let s2 = e.iter().find(|s| s.galois_index() == 2).unwrap();
        let c = apply_embedding(s2, &theta.scale(&BigRational::new(1.into(), 2.into())), 15);
        assert!((c.to_f64() + 0.809_016_994_374_947).abs() < 1e-14);
        let seven = apply_embedding(s2, &FieldElement::from_int(&t, 7), 10);
        assert_eq!(seven.lo(), seven.hi());
    }

    #[test]
    fn test_embedding_fixes() {
        let t = FieldTower::cyclotomic(5);
        let s5 = &FieldElement::from_int(&t, 1)
            + &FieldElement::theta(&t).scale(&BigRational::from_integer(2.into()));
        let e = real_embeddings(&t).embeddings;
        let other = e.iter().find(|s| !s.is_identity()).unwrap();
        assert!(!embedding_fixes(other, &s5));
        assert!(embedding_fixes(&RealEmbedding::identity(&t), &s5));

        let (k, s3) = k12();
        let r = &FieldElement::from_int(&k, 3) + &s3.lift_to(&k);
        let flip2 = RealEmbedding::new(&k, k.designated_root_index(), vec![-1, 1]).unwrap();
        assert!(embedding_fixes(&flip2, &r));
        assert!(!embedding_fixes(&flip2, &k.sqrt_generator(0)));
        let g1 = k.sqrt_generator(1);
        assert!(!embedding_fixes(
            &RealEmbedding::new(&k, k.designated_root_index(), vec![1, -1]).unwrap(),
            &g1
        ));
    }
}
