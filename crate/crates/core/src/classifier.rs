//! Vinberg's criterion: totally real field (V1), semidefinite conjugates off the
//! ground field (V2) and integral cyclic products (V3).

use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algfield::{
    apply_embedding, embedding_fixes, real_embeddings, FieldElement, RealEmbedding,
};
use crate::diagram::{assemble_gram, CoxeterDiagram, DiagramError};
use crate::exactlin::{charpoly, signature_of_charpoly, Signature, SymMatrix};
use crate::groundfield::{
    cyc2_integrality, cycle_generators, embedding_restricts_to_identity, ground_form,
    subfield_closure,
};
use crate::lobell::{pnk_diagram, LobellError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Arithmetic,
    ProperlyQuasiArithmetic,
    NotQuasiArithmetic,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Arithmetic => "arithmetic",
            Verdict::ProperlyQuasiArithmetic => "properly-quasi-arithmetic",
            Verdict::NotQuasiArithmetic => "not-quasi-arithmetic",
        }
    }

    /// One-letter code used in tables: `A`, `PQ`, `N`.
    pub fn short(&self) -> &'static str {
        match self {
            Verdict::Arithmetic => "A",
            Verdict::ProperlyQuasiArithmetic => "PQ",
            Verdict::NotQuasiArithmetic => "N",
        }
    }

    pub fn is_quasi_arithmetic(&self) -> bool {
        *self != Verdict::NotQuasiArithmetic
    }

    /// The verdict implied by the three conditions.
    pub fn from_conditions(v1: bool, v2: bool, v3: bool) -> Verdict {
        match (v1 && v2, v3) {
            (true, true) => Verdict::Arithmetic,
            (true, false) => Verdict::ProperlyQuasiArithmetic,
            (false, _) => Verdict::NotQuasiArithmetic,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct V1Report {
    pub totally_real: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GroundFieldReport {
    pub degree: usize,
    pub generator_count: usize,
}

/// One real embedding of the field generated by the Gram entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EmbeddingReport {
    pub index: usize,
    /// `m` with `θ ↦ 2cos(2πm/N)`.
    pub galois_index: u64,
    pub signs: Vec<i8>,
    pub fixes_ground_field: bool,
    pub signature: Signature,
}

/// A real embedding of the base field applied to the congruent ground form,
/// available when that form has entries in the base field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GroundEmbeddingReport {
    pub galois_index: u64,
    pub restricts_to_identity: bool,
    pub signature: Signature,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WitnessReport {
    pub cycle: String,
    /// Exact value in the weight-expression grammar.
    pub value: String,
    pub decimal: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct V3Report {
    pub all_integral: bool,
    pub witnesses: Vec<WitnessReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassificationReport {
    pub conductor: u64,
    pub field_dimension: usize,
    /// Signature of the Gram matrix at the designated embedding.
    pub gram_signature: Signature,
    pub v1: V1Report,
    pub ground_field: GroundFieldReport,
    pub embeddings: Vec<EmbeddingReport>,
    pub ground_embeddings: Vec<GroundEmbeddingReport>,
    pub v3: V3Report,
    pub verdict: Verdict,
}

impl ClassificationReport {
    /// V2: every embedding that moves the ground field gives a semidefinite matrix.
    pub fn v2_holds(&self) -> bool {
        self.embeddings
            .iter()
            .filter(|e| !e.fixes_ground_field)
            .all(|e| e.signature.q == 0)
    }

    /// The verdict re-derived from the other fields.
    pub fn derived_verdict(&self) -> Verdict {
        Verdict::from_conditions(self.v1.totally_real, self.v2_holds(), self.v3.all_integral)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("Gram matrix has signature {0}, not (d,1,r)")]
    NotLorentzian(Signature),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Lobell(#[from] LobellError),
}

fn ground_embeddings(g: &SymMatrix, gens: &[FieldElement]) -> Vec<GroundEmbeddingReport> {
    let b = ground_form(g);
    let n = b.dim();
    let in_base =
        (0..n).all(|i| (i..n).all(|j| b.get(i, j).in_base())) && gens.iter().all(|x| x.in_base());
    if !in_base {
        return Vec::new();
    }
    let base = g.tower().truncated(0);
    let b = SymMatrix::from_fn(&base, n, |i, j| b.get(i, j).block(0));
    let gens: Vec<FieldElement> = gens.iter().map(|x| x.block(0)).collect();
    let cp = charpoly(&b);
    let indices = base.base_galois_indices();
    (0..base.base_degree())
        .map(|root| {
            let tau =
                RealEmbedding::new(&base, root, Vec::new()).expect("base embeddings are real");
            GroundEmbeddingReport {
                galois_index: indices[root],
                restricts_to_identity: gens.iter().all(|x| embedding_fixes(&tau, x)),
                signature: signature_of_charpoly(&cp, &tau),
            }
        })
        .collect()
}

/// Classify a diagram; every embedding is evaluated even after a failure.
pub fn classify(d: &CoxeterDiagram) -> Result<ClassificationReport, ClassifyError> {
    classify_with_digits(d, 30)
}

/// As [`classify`], with witness previews rendered to `digits` decimals.
pub fn classify_with_digits(
    d: &CoxeterDiagram,
    digits: usize,
) -> Result<ClassificationReport, ClassifyError> {
    let (tower, g) = assemble_gram(d)?;
    let cp = charpoly(&g);
    let identity = RealEmbedding::identity(&tower);
    let gram_signature = signature_of_charpoly(&cp, &identity);
    if gram_signature.q != 1 || gram_signature.p == 0 {
        return Err(ClassifyError::NotLorentzian(gram_signature));
    }
    let enumeration = real_embeddings(&tower);
    let gens = cycle_generators(&g);
    let k = subfield_closure(&tower, &gens);
    let embeddings = enumeration
        .embeddings
        .iter()
        .enumerate()
        .map(|(index, sigma)| EmbeddingReport {
            index,
            galois_index: sigma.galois_index(),
            signs: sigma.signs().to_vec(),
            fixes_ground_field: embedding_restricts_to_identity(sigma, &k),
            signature: signature_of_charpoly(&cp, sigma),
        })
        .collect();
    let (all_integral, witnesses) = cyc2_integrality(&g, &k);
    let v3 = V3Report {
        all_integral,
        witnesses: witnesses
            .into_iter()
            .map(|w| {
                let decimal = if digits == 30 {
                    w.decimal
                } else {
                    apply_embedding(&identity, &w.value, digits + 2)
                        .mid()
                        .to_decimal(digits)
                };
                WitnessReport {
                    cycle: w.cycle,
                    value: w.value.to_string(),
                    decimal,
                }
            })
            .collect(),
    };
    let mut report = ClassificationReport {
        conductor: tower.conductor(),
        field_dimension: tower.dimension(),
        gram_signature,
        v1: V1Report {
            totally_real: enumeration.totally_real,
            witness: enumeration.witness,
        },
        ground_field: GroundFieldReport {
            degree: k.degree(),
            generator_count: gens.len(),
        },
        embeddings,
        ground_embeddings: ground_embeddings(&g, &gens),
        v3,
        verdict: Verdict::NotQuasiArithmetic,
    };
    report.verdict = report.derived_verdict();
    Ok(report)
}

/// Diagram families that can be classified over a range of `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// The slices `T_n`.
    Slice,
    /// The contractions `P_{n,k}`.
    Contraction(u64),
}

impl Family {
    pub fn diagram(&self, n: u64) -> Result<CoxeterDiagram, LobellError> {
        match *self {
            Family::Slice => pnk_diagram(n, 2),
            Family::Contraction(k) => pnk_diagram(n, k),
        }
    }
}

/// How rows of a range are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rows fan out over the rayon pool; falls back to sequential without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TableRow {
    pub n: u64,
    pub verdict: Verdict,
    pub field_degree: usize,
    pub report: ClassificationReport,
}

fn row(family: Family, n: u64) -> Result<TableRow, ClassifyError> {
    let report = classify(&family.diagram(n)?)?;
    Ok(TableRow {
        n,
        verdict: report.verdict,
        field_degree: report.ground_field.degree,
        report,
    })
}

/// Classify every member of `family` in `range`; rows come back ordered by `n`.
pub fn classify_range(
    family: Family,
    range: RangeInclusive<u64>,
) -> Result<Vec<TableRow>, ClassifyError> {
    classify_range_with(family, range, Execution::default())
}

pub fn classify_range_with(
    family: Family,
    range: RangeInclusive<u64>,
    exec: Execution,
) -> Result<Vec<TableRow>, ClassifyError> {
    let ns: Vec<u64> = range.collect();
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            ns.par_iter().map(|&n| row(family, n)).collect()
        }
        _ => ns.iter().map(|&n| row(family, n)).collect(),
    }
}
