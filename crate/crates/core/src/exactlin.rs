//! Exact symmetric linear algebra over a field tower: characteristic
//! polynomials, signatures and semidefiniteness under real embeddings.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algfield::{FieldElement, FieldTower, RealEmbedding};

/// Symmetric matrix stored as its upper triangle, row by row.
#[derive(Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    tower: Arc<FieldTower>,
    entries: Vec<FieldElement>,
}

fn packed_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * i.saturating_sub(1) / 2 + (j - i)
}

impl SymMatrix {
    pub fn zero(tower: &Arc<FieldTower>, dim: usize) -> SymMatrix {
        let entries = vec![FieldElement::zero(tower); dim * (dim + 1) / 2];
        SymMatrix {
            dim,
            tower: tower.clone(),
            entries,
        }
    }

    pub fn identity(tower: &Arc<FieldTower>, dim: usize) -> SymMatrix {
        let mut m = SymMatrix::zero(tower, dim);
        for i in 0..dim {
            m.set(i, i, FieldElement::one(tower));
        }
        m
    }

    /// Build from a function evaluated on the upper triangle `i <= j`.
    pub fn from_fn(
        tower: &Arc<FieldTower>,
        dim: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> SymMatrix {
        let mut m = SymMatrix::zero(tower, dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.entries[packed_index(self.dim, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        let v = v.lift_to(&self.tower);
        let k = packed_index(self.dim, i, j);
        self.entries[k] = v;
    }

    pub fn neg(&self) -> SymMatrix {
        SymMatrix {
            dim: self.dim,
            tower: self.tower.clone(),
            entries: self.entries.iter().map(|e| e.neg()).collect(),
        }
    }

    /// The same matrix over an extension tower.
    pub fn lift_to(&self, tower: &Arc<FieldTower>) -> SymMatrix {
        SymMatrix {
            dim: self.dim,
            tower: tower.clone(),
            entries: self.entries.iter().map(|e| e.lift_to(tower)).collect(),
        }
    }

    /// `D M D` for the diagonal matrix `D = diag(d)`.
    pub fn diagonal_congruence(&self, d: &[FieldElement]) -> SymMatrix {
        assert_eq!(d.len(), self.dim);
        SymMatrix::from_fn(&self.tower, self.dim, |i, j| {
            d[i].mul(self.get(i, j)).mul(&d[j])
        })
    }

    /// Reorder rows and columns: entry `(i, j)` of the result is `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> SymMatrix {
        SymMatrix::from_fn(&self.tower, self.dim, |i, j| {
            self.get(perm[i], perm[j]).clone()
        })
    }

    pub fn is_symmetric_unit_diagonal(&self) -> bool {
        (0..self.dim).all(|i| self.get(i, i).is_one())
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SymMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Counts of positive, negative and zero eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 3]", into = "[usize; 3]")]
pub struct Signature {
    pub p: usize,
    pub q: usize,
    pub r: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize, r: usize) -> Signature {
        Signature { p, q, r }
    }

    pub fn dim(&self) -> usize {
        self.p + self.q + self.r
    }

    /// The signature of the negated matrix.
    pub fn negated(&self) -> Signature {
        Signature {
            p: self.q,
            q: self.p,
            r: self.r,
        }
    }
}

impl From<[usize; 3]> for Signature {
    fn from(a: [usize; 3]) -> Self {
        Signature {
            p: a[0],
            q: a[1],
            r: a[2],
        }
    }
}

impl From<Signature> for [usize; 3] {
    fn from(s: Signature) -> Self {
        [s.p, s.q, s.r]
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.q, self.r)
    }
}

/// Coefficients of `det(λI − M)`, lowest degree first (the last one is 1).
///
/// Berkowitz's division-free recurrence: peeling off the first row and column,
/// `χ_A = T · χ_{A₁}` with `T` lower-triangular Toeplitz on
/// `(1, −a, −RC, −RA₁C, …, −RA₁^{m−1}C)`.
pub fn charpoly(m: &SymMatrix) -> Vec<FieldElement> {
    let n = m.dim;
    let tower = &m.tower;
    if n == 0 {
        return vec![FieldElement::one(tower)];
    }
    // descending coefficients of the trailing principal submatrix
    let mut q = vec![FieldElement::one(tower), m.get(n - 1, n - 1).neg()];
    for k in (0..n - 1).rev() {
        let size = n - k - 1;
        let mut col = Vec::with_capacity(size + 2);
        col.push(FieldElement::one(tower));
        col.push(m.get(k, k).neg());
        let mut v: Vec<FieldElement> = (k + 1..n).map(|i| m.get(i, k).clone()).collect();
        for step in 0..size {
            let dot = (0..size).fold(FieldElement::zero(tower), |acc, i| {
                acc.add(&m.get(k, k + 1 + i).mul(&v[i]))
            });
            col.push(dot.neg());
            if step + 1 < size {
                v = (0..size)
                    .map(|i| {
                        (0..size).fold(FieldElement::zero(tower), |acc, j| {
                            acc.add(&m.get(k + 1 + i, k + 1 + j).mul(&v[j]))
                        })
                    })
                    .collect();
            }
        }
        let next: Vec<FieldElement> = (0..size + 2)
            .map(|i| {
                (0..=i.min(size)).fold(FieldElement::zero(tower), |acc, j| {
                    acc.add(&col[i - j].mul(&q[j]))
                })
            })
            .collect();
        q = next;
    }
    q.reverse();
    q
}

/// Signature from the signs of the characteristic polynomial's coefficients
/// (lowest degree first). All roots are real, so Descartes' rule is exact.
pub fn signature_from_signs(signs: &[i32]) -> Signature {
    let n = signs.len() - 1;
    let r = signs.iter().take_while(|&&s| s == 0).count();
    let mut p = 0;
    let mut last = 0;
    for &s in &signs[r..] {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            p += 1;
        }
        last = s;
    }
    Signature { p, q: n - r - p, r }
}

/// Signature of `M^σ` from a precomputed characteristic polynomial.
pub fn signature_of_charpoly(cp: &[FieldElement], sigma: &RealEmbedding) -> Signature {
    let signs: Vec<i32> = cp.iter().map(|c| sigma.sign(c)).collect();
    signature_from_signs(&signs)
}

/// Signature at the designated embedding.
pub fn signature(m: &SymMatrix) -> Signature {
    signature_under(m, &RealEmbedding::identity(&m.tower))
}

/// Signature of `M^σ`.
pub fn signature_under(m: &SymMatrix, sigma: &RealEmbedding) -> Signature {
    signature_of_charpoly(&charpoly(m), sigma)
}

/// Whether `M^σ` is positive semidefinite, with its signature as witness.
pub fn is_psd(m: &SymMatrix, sigma: &RealEmbedding) -> (bool, Signature) {
    let s = signature_under(m, sigma);
    (s.q == 0, s)
}

/// Determinant by Bareiss elimination with row exchanges.
pub fn determinant(m: &SymMatrix) -> FieldElement {
    let n = m.dim;
    let tower = &m.tower;
    let mut a: Vec<Vec<FieldElement>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).clone()).collect())
        .collect();
    let mut prev = FieldElement::one(tower);
    let mut negate = false;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return FieldElement::zero(tower);
        };
        if piv != k {
            a.swap(piv, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = num.div(&prev).expect("Bareiss pivot is nonzero");
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        det.neg()
    } else {
        det
    }
}
