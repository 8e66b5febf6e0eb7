//! JSON report records and their plain-text renderings. Reports carry no
//! timings, so repeated runs print identical bytes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use unikit_core::{
    annihilation_residual, enumerate_basis, invariant_vector, lie_basis, ClassificationResult, ClosureResult, Evidence,
    Family, FormType, GroupId, OracleEvidence, SectorDescriptor, Verdict,
};

use crate::Result;

pub const SCHEMA: &str = "unikit.report.v1";

/// Amplitudes below this are omitted from invariant listings.
const AMPLITUDE_CUTOFF: f64 = 1e-14;

fn schema() -> String {
    SCHEMA.to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema: String,
    pub kind: String,
    pub sector: SectorDescriptor,
    pub family: Family,
    pub extension: String,
    pub verdict: Verdict,
    pub evidence: Evidence,
    pub oracle: Option<OracleEvidence>,
}

impl ClassificationReport {
    pub fn new(sector: SectorDescriptor, family: Family, extension: &str, result: ClassificationResult) -> Self {
        Self {
            schema: schema(),
            kind: "classification".into(),
            sector,
            family,
            extension: extension.into(),
            verdict: result.verdict,
            oracle: result.evidence.oracle.clone(),
            evidence: result.evidence,
        }
    }

    pub fn render(&self) -> String {
        let e = &self.evidence;
        let mut out = String::new();
        line(&mut out, "sector", &self.sector);
        line(&mut out, "family", &self.family);
        line(&mut out, "extension", &self.extension);
        line(&mut out, "verdict", &self.verdict);
        line(&mut out, "sector dim", &e.sector_dim);
        line(&mut out, "family dim", &e.family_dim);
        if let Some(reason) = &e.reason {
            line(&mut out, "reason", reason);
        }
        for (label, value) in [
            ("membership", e.membership_residual),
            ("annihilation", e.annihilation_residual),
            ("normalizer", e.normalizer_residual),
            ("eigenvector", e.eigenvector_residual),
        ] {
            if let Some(v) = value {
                line(&mut out, &format!("{label} residual"), &format!("{v:.3e}"));
            }
        }
        if let Some(n) = e.normalizes {
            line(&mut out, "normalizes", &n);
        }
        if let Some(f) = e.form_type {
            line(&mut out, "form type", &form_name(f));
        }
        if let Some(a) = e.automorphism_type {
            line(&mut out, "automorphism", &serde_plain(&a));
        }
        if let Some(o) = &self.oracle {
            let bound = if o.lower_bound { " (lower bound)" } else { "" };
            line(&mut out, "oracle", &format!("dim {} {} after {} rounds{bound}", o.dim, o.group, o.rounds));
        }
        for flag in &e.discrepancy_flags {
            line(&mut out, "flag", flag);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub schema: String,
    pub kind: String,
    pub sector: SectorDescriptor,
    pub family: Family,
    pub extension: String,
    pub sector_dim: usize,
    pub family_dim: usize,
    pub dim: usize,
    pub group: GroupId,
    pub rounds: usize,
    pub lower_bound: bool,
    pub max_power: usize,
    pub max_rounds: usize,
}

impl OracleReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        sector: SectorDescriptor,
        family: Family,
        extension: &str,
        family_dim: usize,
        closure: &ClosureResult,
        group: GroupId,
        lower_bound: bool,
        max_power: usize,
        max_rounds: usize,
    ) -> Self {
        Self {
            schema: schema(),
            kind: "oracle".into(),
            sector,
            family,
            extension: extension.into(),
            sector_dim: closure.sector_dim(),
            family_dim,
            dim: closure.dim,
            group,
            rounds: closure.rounds,
            lower_bound,
            max_power,
            max_rounds,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        line(&mut out, "sector", &self.sector);
        line(&mut out, "family", &self.family);
        line(&mut out, "extension", &self.extension);
        line(&mut out, "closure dim", &self.dim);
        line(&mut out, "group", &self.group);
        line(&mut out, "rounds", &format!("{} of at most {}", self.rounds, self.max_rounds));
        if self.lower_bound {
            line(&mut out, "note", &format!("gate seeds use powers up to {}; dim is a lower bound", self.max_power));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub row: usize,
    pub col: usize,
    pub row_state: String,
    pub col_state: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantsReport {
    pub schema: String,
    pub kind: String,
    pub sector: SectorDescriptor,
    pub family: Family,
    pub form_type: FormType,
    pub swap_sign: f64,
    pub norm: f64,
    /// Largest annihilation residual over the family's generators.
    pub max_generator_residual: f64,
    pub amplitudes: Vec<Amplitude>,
}

impl InvariantsReport {
    pub fn compute(sector: SectorDescriptor) -> Result<Self> {
        let family = Family::for_kind(sector.kind());
        let psi = invariant_vector(family, &sector)?;
        let basis = lie_basis(family, &sector)?;
        let mut max_generator_residual = 0.0f64;
        for g in basis.raw_generators() {
            max_generator_residual = max_generator_residual.max(annihilation_residual(g, &psi)?);
        }
        let states = enumerate_basis(&sector);
        let c = psi.coeffs();
        let mut amplitudes = Vec::new();
        for row in 0..c.nrows() {
            for col in 0..c.ncols() {
                let z = c[(row, col)];
                if z.norm() > AMPLITUDE_CUTOFF {
                    amplitudes.push(Amplitude {
                        row,
                        col,
                        row_state: states.states()[row].to_string(),
                        col_state: states.states()[col].to_string(),
                        re: z.re,
                        im: z.im,
                    });
                }
            }
        }
        Ok(Self {
            schema: schema(),
            kind: "invariants".into(),
            sector,
            family,
            form_type: psi.form_type(),
            swap_sign: psi.swap_sign(),
            norm: psi.norm(),
            max_generator_residual,
            amplitudes,
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        line(&mut out, "sector", &self.sector);
        line(&mut out, "family", &self.family);
        line(&mut out, "form type", &form_name(self.form_type));
        line(&mut out, "swap sign", &self.swap_sign);
        line(&mut out, "norm", &format!("{:.12}", self.norm));
        line(&mut out, "max residual", &format!("{:.3e}", self.max_generator_residual));
        for a in &self.amplitudes {
            let _ = writeln!(out, "  {} ⊗ {}  {:+.6} {:+.6}i", a.row_state, a.col_state, a.re, a.im);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimsReport {
    pub schema: String,
    pub kind: String,
    pub sector: SectorDescriptor,
    pub family: Family,
    pub sector_dim: usize,
    pub family_dim: usize,
    pub su_dim: usize,
    pub so_dim: usize,
    /// Only for even sector dimension.
    pub usp_dim: Option<usize>,
    /// Exchange symmetry of the invariant vector, when the sector has one.
    pub invariant_form: Option<FormType>,
}

impl DimsReport {
    pub fn compute(sector: SectorDescriptor) -> Result<Self> {
        let family = Family::for_kind(sector.kind());
        let n = sector.dim();
        let family_dim = lie_basis(family, &sector)?.dim();
        let invariant_form = invariant_vector(family, &sector).ok().map(|psi| psi.form_type());
        Ok(Self {
            schema: schema(),
            kind: "dims".into(),
            sector,
            family,
            sector_dim: n,
            family_dim,
            su_dim: n * n - 1,
            so_dim: n * (n - 1) / 2,
            usp_dim: (n % 2 == 0).then(|| n * (n + 1) / 2),
            invariant_form,
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        line(&mut out, "sector", &self.sector);
        line(&mut out, "family", &self.family);
        line(&mut out, "sector dim", &self.sector_dim);
        line(&mut out, "family dim", &self.family_dim);
        line(&mut out, "su dim", &self.su_dim);
        line(&mut out, "so dim", &self.so_dim);
        if let Some(u) = self.usp_dim {
            line(&mut out, "usp dim", &u);
        }
        match self.invariant_form {
            Some(f) => line(&mut out, "invariant", &form_name(f)),
            None => line(&mut out, "invariant", &"none"),
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReproRow {
    pub example: u8,
    pub case: String,
    pub expected: Vec<Verdict>,
    pub computed: Option<Verdict>,
    pub error: Option<String>,
    pub oracle_dim: Option<usize>,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReproReport {
    pub schema: String,
    pub kind: String,
    pub rows: Vec<ReproRow>,
    pub all_match: bool,
}

impl ReproReport {
    pub fn new(rows: Vec<ReproRow>) -> Self {
        let all_match = rows.iter().all(|r| r.matches);
        Self { schema: schema(), kind: "repro".into(), rows, all_match }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let expected: Vec<&str> = r.expected.iter().map(|v| v.as_str()).collect();
            let computed = match (&r.computed, &r.error) {
                (Some(v), _) => v.to_string(),
                (None, Some(e)) => format!("error: {e}"),
                (None, None) => "-".into(),
            };
            let oracle = r.oracle_dim.map(|d| format!("  oracle {d}")).unwrap_or_default();
            let status = if r.matches { "ok  " } else { "FAIL" };
            let _ = writeln!(
                out,
                "{status} example {} {:<28} expected {:<40} got {computed}{oracle}",
                r.example,
                r.case,
                expected.join("|")
            );
        }
        let matched = self.rows.iter().filter(|r| r.matches).count();
        let _ = writeln!(out, "{matched}/{} cases match", self.rows.len());
        out
    }
}

fn line(out: &mut String, label: &str, value: &dyn std::fmt::Display) {
    let _ = writeln!(out, "{label:<22} {value}");
}

fn form_name(f: FormType) -> &'static str {
    match f {
        FormType::Symmetric => "symmetric",
        FormType::Antisymmetric => "antisymmetric",
    }
}

/// Unit-variant enum rendered through its serde name.
fn serde_plain<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(e) => format!("<{e}>"),
    }
}
