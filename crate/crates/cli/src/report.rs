//! JSON and plain-text rendering of reports.

use serde::{Deserialize, Serialize};
use vinberg::classifier::{ClassificationReport, TableRow};
use vinberg::covers::CoverReport;
use vinberg::exactlin::Signature;

pub const SCHEMA_VERSION: &str = "1";

/// A classification report tagged with the schema version.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportJson {
    pub schema_version: String,
    #[serde(flatten)]
    pub report: ClassificationReport,
}

impl ReportJson {
    pub fn new(report: ClassificationReport) -> ReportJson {
        ReportJson {
            schema_version: SCHEMA_VERSION.to_string(),
            report,
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn signs_str(signs: &[i8]) -> String {
    signs
        .iter()
        .map(|&s| if s > 0 { '+' } else { '-' })
        .collect()
}

pub fn classification_text(r: &ClassificationReport) -> String {
    let mut s = String::new();
    s += &format!("verdict: {}\n", r.verdict);
    s += &format!("gram signature: {}\n", r.gram_signature);
    s += &format!(
        "field: conductor {}, dimension {}\n",
        r.conductor, r.field_dimension
    );
    s += &format!("V1 totally real: {}\n", yes_no(r.v1.totally_real));
    if let Some(w) = &r.v1.witness {
        s += &format!("  {w}\n");
    }
    s += &format!(
        "ground field: degree {} ({} generators)\n",
        r.ground_field.degree, r.ground_field.generator_count
    );
    s += &format!(
        "V2 semidefinite off the ground field: {}\n",
        yes_no(r.v2_holds())
    );
    s += "embeddings:\n";
    for e in &r.embeddings {
        s += &format!(
            "  #{:<3} m={:<4} signs [{}] fixes k: {:<3} signature {}\n",
            e.index,
            e.galois_index,
            signs_str(&e.signs),
            yes_no(e.fixes_ground_field),
            e.signature
        );
    }
    if !r.ground_embeddings.is_empty() {
        s += "ground form under base embeddings:\n";
        for e in &r.ground_embeddings {
            s += &format!(
                "  m={:<4} identity on k: {:<3} signature {}\n",
                e.galois_index,
                yes_no(e.restricts_to_identity),
                e.signature
            );
        }
    }
    s += &format!("V3 integral: {}\n", yes_no(r.v3.all_integral));
    for w in &r.v3.witnesses {
        s += &format!("  cycle {}: {} = {}\n", w.cycle, w.value, w.decimal);
    }
    s
}

/// Embedding classes `ℓ` of the ground field (with `ℓ ≡ ±m mod n`) that move it, with signatures.
pub fn nonidentity_classes(row: &TableRow) -> Vec<(u64, Signature)> {
    let n = row.n;
    let mut out: Vec<(u64, Signature)> = Vec::new();
    for e in row
        .report
        .ground_embeddings
        .iter()
        .filter(|e| !e.restricts_to_identity)
    {
        let l = e.galois_index % n;
        let l = l.min(n - l);
        if !out.iter().any(|(x, _)| *x == l) {
            out.push((l, e.signature));
        }
    }
    out.sort_by_key(|(l, _)| *l);
    out
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TableRowJson {
    pub n: u64,
    pub verdict: String,
    pub field_degree: usize,
    pub nonidentity_embeddings: Vec<EmbeddingClassJson>,
}

#[derive(Serialize)]
pub struct EmbeddingClassJson {
    pub l: u64,
    pub signature: Signature,
    pub psd: bool,
}

pub fn table_row_json(row: &TableRow) -> TableRowJson {
    TableRowJson {
        n: row.n,
        verdict: row.verdict.to_string(),
        field_degree: row.field_degree,
        nonidentity_embeddings: nonidentity_classes(row)
            .into_iter()
            .map(|(l, signature)| EmbeddingClassJson {
                l,
                signature,
                psd: signature.q == 0,
            })
            .collect(),
    }
}

pub fn table_text(rows: &[TableRow]) -> String {
    let mut s = format!(
        "{:>4}  {:>3}  {:<26}  {}\n",
        "n", "deg", "verdict", "nonidentity embeddings of k (l: signature)"
    );
    for row in rows {
        let classes = nonidentity_classes(row);
        let desc = if classes.is_empty() {
            "none".to_string()
        } else {
            classes
                .iter()
                .map(|(l, sig)| format!("{l}: {sig}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        s += &format!(
            "{:>4}  {:>3}  {:<26}  {}\n",
            row.n,
            row.field_degree,
            row.verdict.as_str(),
            desc
        );
    }
    s
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverReportJson {
    pub valid: bool,
    pub orientable: bool,
    pub top_equals_bottom: bool,
    pub geodesic_candidate_length: Option<String>,
}

pub fn cover_json(r: &CoverReport, digits: usize) -> CoverReportJson {
    CoverReportJson {
        valid: r.valid,
        orientable: r.orientable,
        top_equals_bottom: r.top_equals_bottom,
        geodesic_candidate_length: r
            .geodesic_candidate_length
            .as_ref()
            .map(|g| g.to_decimal(digits)),
    }
}

pub fn cover_text(r: &CoverReport, digits: usize) -> String {
    let mut s = format!(
        "valid: {}\norientable: {}\ntop equals bottom: {}\n",
        yes_no(r.valid),
        yes_no(r.orientable),
        yes_no(r.top_equals_bottom)
    );
    if let Some(g) = &r.geodesic_candidate_length {
        s += &format!(
            "closed geodesic candidate length 2*delta: {}\n",
            g.to_decimal(digits)
        );
    }
    s
}
