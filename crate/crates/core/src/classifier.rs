//! Decision trees for extending a restricted gate family by one Hamiltonian
//! or one gate, with the numerical evidence behind each verdict and an
//! optional cross-check against the closure oracle.
//!
//! Every test is a residual compared against a guard band: below
//! `zero_tol · n` counts as zero, above `nonzero_tol · n` as nonzero, and
//! anything in between is reported as [`Error::NumericallyAmbiguous`].

use serde::{Deserialize, Serialize};

use crate::closure::{gate_closure_seeds, identify_group, lie_closure, ClosureOptions, GroupId, MAX_ORACLE_DIM};
use crate::error::{Error, Result};
use crate::invariants::{annihilation_residual, eigenvector_residual, invariant_vector, FormType};
use crate::linalg::{ensure_hermitian, ensure_unitary, hs_norm, traceless_part, CMatrix, C64, DEFAULT_RANK_TOL};
use crate::reps::{automorphism_type, lie_basis, normalizer_residual, AutomorphismType, Family, LieAlgebraBasis, UNITARY_TOL};
use crate::secondq::HERMITIAN_TOL;
use crate::sectors::{Operator, SectorDescriptor, SectorKind};

pub const DEFAULT_ZERO_TOL: f64 = 1e-8;
pub const DEFAULT_NONZERO_TOL: f64 = 1e-6;

/// Relative size of the traceless part below which a Hamiltonian counts
/// as a multiple of the identity.
const IDENTITY_TOL: f64 = 1e-12;

/// Phase difference below which the cross-Kerr predicate treats
/// `e^{iθ}` as `1`.
pub const CROSS_KERR_PHASE_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub enum Extension {
    Hamiltonian(CMatrix),
    Gate(CMatrix),
}

impl Extension {
    pub fn matrix(&self) -> &CMatrix {
        match self {
            Extension::Hamiltonian(m) | Extension::Gate(m) => m,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Extension::Hamiltonian(_) => "hamiltonian",
            Extension::Gate(_) => "gate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOptions {
    /// Residuals below `zero_tol · n` count as zero.
    pub zero_tol: f64,
    /// Residuals above `nonzero_tol · n` count as nonzero.
    pub nonzero_tol: f64,
    /// Rank tolerance of the closure oracle.
    pub rank_tol: f64,
    pub oracle: bool,
    /// Highest power of a gate conjugating the family in oracle seeds.
    pub max_power: usize,
    pub max_rounds: usize,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self {
            zero_tol: DEFAULT_ZERO_TOL,
            nonzero_tol: DEFAULT_NONZERO_TOL,
            rank_tol: DEFAULT_RANK_TOL,
            oracle: false,
            max_power: crate::closure::DEFAULT_MAX_POWER,
            max_rounds: crate::closure::DEFAULT_MAX_ROUNDS,
        }
    }
}

impl ScenarioOptions {
    pub fn with_oracle(mut self, oracle: bool) -> Self {
        self.oracle = oracle;
        self
    }

    fn validate(&self) -> Result<()> {
        let ok = self.zero_tol.is_finite()
            && self.nonzero_tol.is_finite()
            && self.rank_tol.is_finite()
            && self.zero_tol > 0.0
            && self.rank_tol > 0.0
            && self.nonzero_tol >= self.zero_tol;
        if !ok {
            return Err(Error::InvalidSpec(format!(
                "tolerances must be positive with nonzero_tol >= zero_tol, got {self:?}"
            )));
        }
        Ok(())
    }

    /// `Ok(true)` for a nonzero value, `Ok(false)` for zero.
    fn is_nonzero(&self, quantity: &str, value: f64, n: usize) -> Result<bool> {
        let zero_below = self.zero_tol * n as f64;
        let nonzero_above = self.nonzero_tol * n as f64;
        if value < zero_below {
            Ok(false)
        } else if value > nonzero_above {
            Ok(true)
        } else {
            Err(Error::NumericallyAmbiguous { quantity: quantity.into(), value, zero_below, nonzero_above })
        }
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub descriptor: SectorDescriptor,
    pub family: Family,
    pub extension: Extension,
    pub options: ScenarioOptions,
}

impl Scenario {
    pub fn new(
        family: Family,
        descriptor: SectorDescriptor,
        extension: Extension,
        options: ScenarioOptions,
    ) -> Result<Self> {
        family.check_sector(&descriptor)?;
        options.validate()?;
        let n = descriptor.dim();
        let m = extension.matrix();
        if m.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, found: m.nrows() });
        }
        Ok(Self { descriptor, family, extension, options })
    }

    /// Hamiltonian extension of the family native to `descriptor`.
    pub fn hamiltonian(descriptor: SectorDescriptor, x: CMatrix) -> Result<Self> {
        Self::new(Family::for_kind(descriptor.kind()), descriptor, Extension::Hamiltonian(x), ScenarioOptions::default())
    }

    /// Gate extension of the family native to `descriptor`.
    pub fn gate(descriptor: SectorDescriptor, v: CMatrix) -> Result<Self> {
        Self::new(Family::for_kind(descriptor.kind()), descriptor, Extension::Gate(v), ScenarioOptions::default())
    }

    pub fn with_options(mut self, options: ScenarioOptions) -> Result<Self> {
        options.validate()?;
        self.options = options;
        Ok(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    NotApplicable,
    NoExtension,
    FullUnitary,
    MiddleOrthogonal,
    MiddleSymplectic,
    LofPlusParticleHole,
    IndeterminateExceptional,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NotApplicable => "NotApplicable",
            Verdict::NoExtension => "NoExtension",
            Verdict::FullUnitary => "FullUnitary",
            Verdict::MiddleOrthogonal => "MiddleOrthogonal",
            Verdict::MiddleSymplectic => "MiddleSymplectic",
            Verdict::LofPlusParticleHole => "LofPlusParticleHole",
            Verdict::IndeterminateExceptional => "IndeterminateExceptional",
        }
    }

    /// Dimension of the traceless Lie algebra of the generated connected
    /// group, when the verdict fixes it.
    pub fn implied_dimension(self, n: usize, family_dim: usize) -> Option<usize> {
        match self {
            Verdict::NotApplicable | Verdict::NoExtension | Verdict::LofPlusParticleHole => Some(family_dim),
            Verdict::FullUnitary => Some(n * n - 1),
            Verdict::MiddleOrthogonal => Some(n * (n - 1) / 2),
            Verdict::MiddleSymplectic => Some(n * (n + 1) / 2),
            Verdict::IndeterminateExceptional => None,
        }
    }

    fn middle(form: FormType) -> Self {
        match form {
            FormType::Symmetric => Verdict::MiddleOrthogonal,
            FormType::Antisymmetric => Verdict::MiddleSymplectic,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleEvidence {
    pub dim: usize,
    pub group: GroupId,
    pub rounds: usize,
    /// Gate closures use finitely many conjugated copies of the family and
    /// only bound the generated algebra from below.
    pub lower_bound: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub sector_dim: usize,
    pub family_dim: usize,
    /// Why the scenario was not classified, for `NotApplicable`.
    pub reason: Option<String>,
    /// Distance of the normalized traceless Hamiltonian from the family algebra.
    pub membership_residual: Option<f64>,
    pub annihilation_residual: Option<f64>,
    pub eigenvector_residual: Option<f64>,
    pub normalizer_residual: Option<f64>,
    pub normalizes: Option<bool>,
    pub form_type: Option<FormType>,
    pub automorphism_type: Option<AutomorphismType>,
    pub oracle: Option<OracleEvidence>,
    pub discrepancy_flags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub verdict: Verdict,
    pub evidence: Evidence,
}

/// Reason string when the family already acts as the full unitary group
/// (or the sector is trivial).
fn not_applicable_reason(desc: &SectorDescriptor) -> Option<String> {
    let d = desc.modes();
    let n = desc.particles().unwrap_or(0);
    match desc.kind() {
        SectorKind::Bosonic if d == 1 => {
            Some("a single bosonic mode carries a one-dimensional sector".to_string())
        }
        SectorKind::Bosonic if n <= 1 => {
            Some(format!("for N = {n} passive bosonic optics is already the full unitary group"))
        }
        SectorKind::Fermionic if n <= 1 || n + 1 >= d => Some(format!(
            "for N in {{0, 1, d-1, d}} passive fermionic optics already equals the full unitary group (d = {d}, N = {n})"
        )),
        SectorKind::FockPlus if d <= 3 => Some(format!(
            "for d = {d} <= 3 active fermionic optics is itself the full unitary group on the positive-parity sector"
        )),
        _ => None,
    }
}

/// Sectors where the family is maximal in the special unitary group, so
/// any extension outside the family is universal.
fn full_regime(desc: &SectorDescriptor) -> bool {
    match desc.kind() {
        SectorKind::Bosonic => desc.modes() > 2,
        SectorKind::Fermionic => !desc.is_half_filling(),
        SectorKind::FockPlus => desc.modes() % 2 == 1,
    }
}

fn is_exceptional(desc: &SectorDescriptor) -> bool {
    desc.kind() == SectorKind::Bosonic && desc.modes() == 2 && desc.particles() == Some(6)
}

/// Flags a middle verdict at fermionic half-filling whose computed form type
/// disagrees with the rule "orthogonal unless 4 divides d".
fn mod4_flag(desc: &SectorDescriptor, form: FormType) -> Option<String> {
    if desc.kind() != SectorKind::Fermionic {
        return None;
    }
    let d = desc.modes();
    let rule = if d % 4 == 0 { FormType::Antisymmetric } else { FormType::Symmetric };
    (rule != form).then(|| {
        format!(
            "lof_mod4_rule: computed exchange sign gives a {} form at d = {d}, the d-mod-4 rule gives {}",
            form_name(form),
            form_name(rule)
        )
    })
}

fn form_name(form: FormType) -> &'static str {
    match form {
        FormType::Symmetric => "symmetric",
        FormType::Antisymmetric => "antisymmetric",
    }
}

struct Context {
    basis: LieAlgebraBasis,
    evidence: Evidence,
}

impl Context {
    fn new(s: &Scenario) -> Result<Self> {
        let basis = lie_basis(s.family, &s.descriptor)?;
        let evidence = Evidence { sector_dim: s.descriptor.dim(), family_dim: basis.dim(), ..Evidence::default() };
        Ok(Self { basis, evidence })
    }

    fn finish(mut self, verdict: Verdict, s: &Scenario) -> Result<ClassificationResult> {
        let mandatory = verdict == Verdict::IndeterminateExceptional;
        if (s.options.oracle || mandatory) && self.evidence.oracle.is_none() {
            if s.descriptor.dim() <= MAX_ORACLE_DIM {
                self.evidence.oracle = Some(run_oracle(s, &self.basis)?);
            } else {
                self.evidence.discrepancy_flags.push(format!(
                    "oracle_skipped: sector dimension {} exceeds the oracle limit {MAX_ORACLE_DIM}",
                    s.descriptor.dim()
                ));
            }
        }
        if let Verdict::MiddleOrthogonal | Verdict::MiddleSymplectic = verdict {
            if let Some(flag) = self.evidence.form_type.and_then(|f| mod4_flag(&s.descriptor, f)) {
                self.evidence.discrepancy_flags.push(flag);
            }
        }
        Ok(ClassificationResult { verdict, evidence: self.evidence })
    }

    /// Middle-or-exceptional branch once the invariant is preserved.
    fn preserved(mut self, form: FormType, s: &Scenario) -> Result<ClassificationResult> {
        self.evidence.form_type = Some(form);
        if is_exceptional(&s.descriptor) {
            self.finish(Verdict::IndeterminateExceptional, s)
        } else {
            self.finish(Verdict::middle(form), s)
        }
    }
}

fn run_oracle(s: &Scenario, basis: &LieAlgebraBasis) -> Result<OracleEvidence> {
    let (seeds, lower_bound) = match &s.extension {
        Extension::Hamiltonian(x) => {
            let mut seeds = basis.raw_generators().to_vec();
            seeds.push(x.clone());
            (seeds, false)
        }
        Extension::Gate(v) => (gate_closure_seeds(v, basis, s.options.max_power)?, true),
    };
    let options = ClosureOptions { tol: s.options.rank_tol, max_rounds: s.options.max_rounds };
    let result = lie_closure(&seeds, &options)?;
    let group = identify_group(&result, basis.dim())?;
    Ok(OracleEvidence { dim: result.dim, group, rounds: result.rounds, lower_bound })
}

/// Classifies the group generated by the family and a Hamiltonian.
pub fn classify_hamiltonian(s: &Scenario) -> Result<ClassificationResult> {
    let Extension::Hamiltonian(x) = &s.extension else {
        return Err(Error::InvalidSpec("expected a Hamiltonian extension".into()));
    };
    ensure_hermitian(x, HERMITIAN_TOL, "Hamiltonian")?;
    let mut ctx = Context::new(s)?;
    if let Some(reason) = not_applicable_reason(&s.descriptor) {
        ctx.evidence.reason = Some(reason);
        return ctx.finish(Verdict::NotApplicable, s);
    }
    let n = s.descriptor.dim();
    let x0 = traceless_part(x);
    let size = hs_norm(&x0);
    if size <= IDENTITY_TOL * hs_norm(x) {
        ctx.evidence.membership_residual = Some(0.0);
        return ctx.finish(Verdict::NoExtension, s);
    }
    let xn = x0 / C64::new(size, 0.0);
    let membership = ctx.basis.generators().distance(&xn);
    ctx.evidence.membership_residual = Some(membership);
    if !s.options.is_nonzero("membership residual", membership, n)? {
        return ctx.finish(Verdict::NoExtension, s);
    }
    if full_regime(&s.descriptor) {
        return ctx.finish(Verdict::FullUnitary, s);
    }
    let psi = invariant_vector(s.family, &s.descriptor)?;
    let r = annihilation_residual(&xn, &psi)?;
    ctx.evidence.annihilation_residual = Some(r);
    if s.options.is_nonzero("annihilation residual", r, n)? {
        return ctx.finish(Verdict::FullUnitary, s);
    }
    ctx.preserved(psi.form_type(), s)
}

/// Classifies the group generated by the family and a gate.
pub fn classify_gate(s: &Scenario) -> Result<ClassificationResult> {
    let Extension::Gate(v) = &s.extension else {
        return Err(Error::InvalidSpec("expected a gate extension".into()));
    };
    ensure_unitary(v, UNITARY_TOL)?;
    let mut ctx = Context::new(s)?;
    if let Some(reason) = not_applicable_reason(&s.descriptor) {
        ctx.evidence.reason = Some(reason);
        return ctx.finish(Verdict::NotApplicable, s);
    }
    let n = s.descriptor.dim();
    let op = Operator::new(s.descriptor, v.clone())?;
    let nr = normalizer_residual(&op, &ctx.basis)?;
    ctx.evidence.normalizer_residual = Some(nr);
    let normalizes = !s.options.is_nonzero("normalizer residual", nr, n)?;
    ctx.evidence.normalizes = Some(normalizes);
    if normalizes {
        if s.family == Family::Lof && s.descriptor.is_half_filling() {
            let kind = automorphism_type(&op, &ctx.basis)?;
            ctx.evidence.automorphism_type = Some(kind);
            if kind == AutomorphismType::Outer {
                return ctx.finish(Verdict::LofPlusParticleHole, s);
            }
        }
        return ctx.finish(Verdict::NoExtension, s);
    }
    if full_regime(&s.descriptor) {
        return ctx.finish(Verdict::FullUnitary, s);
    }
    let psi = invariant_vector(s.family, &s.descriptor)?;
    let r = eigenvector_residual(v, &psi)?;
    ctx.evidence.eigenvector_residual = Some(r);
    if s.options.is_nonzero("eigenvector residual", r, n)? {
        return ctx.finish(Verdict::FullUnitary, s);
    }
    ctx.preserved(psi.form_type(), s)
}

pub fn classify(s: &Scenario) -> Result<ClassificationResult> {
    match s.extension {
        Extension::Hamiltonian(_) => classify_hamiltonian(s),
        Extension::Gate(_) => classify_gate(s),
    }
}

/// Whether `V_t = exp(−i t n̂₁n̂₂)` on two modes with `N` bosons moves
/// some pair of Dicke phases apart: `∃ k, l` with
/// `e^{2it[l(N−l) − k(N−k)]} ≠ 1`.
pub fn cross_kerr_predicate(particles: usize, t: f64) -> bool {
    let n = particles as i64;
    (0..=n).any(|k| {
        (0..=n).any(|l| {
            let theta = 2.0 * t * ((l * (n - l)) - (k * (n - k))) as f64;
            (C64::from_polar(1.0, theta) - C64::new(1.0, 0.0)).norm() > CROSS_KERR_PHASE_TOL
        })
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub result: ClassificationResult,
    pub oracle: OracleEvidence,
}

/// Groups the oracle may report for a verdict.
fn compatible(verdict: Verdict, group: GroupId, n: usize) -> bool {
    match verdict {
        Verdict::FullUnitary => group == GroupId::FullSu,
        Verdict::MiddleOrthogonal => group == GroupId::So,
        Verdict::MiddleSymplectic => group == GroupId::Usp,
        Verdict::NoExtension | Verdict::LofPlusParticleHole => group == GroupId::LieFamily,
        Verdict::NotApplicable => matches!(group, GroupId::LieFamily | GroupId::FullSu),
        Verdict::IndeterminateExceptional => {
            n == 7 && matches!(group, GroupId::G2 | GroupId::So | GroupId::FullSu)
        }
    }
}

/// Runs the classifier with the oracle enabled and checks that the verdict
/// and the identified group agree. A disagreement is an error carrying
/// both records.
pub fn cross_validate(s: &Scenario) -> Result<CrossValidation> {
    let n = s.descriptor.dim();
    if n > MAX_ORACLE_DIM {
        return Err(Error::OracleScope { dim: n, limit: MAX_ORACLE_DIM });
    }
    let mut with_oracle = s.clone();
    with_oracle.options.oracle = true;
    let result = classify(&with_oracle)?;
    let oracle = result.evidence.oracle.clone().expect("oracle runs for sectors within scope");
    if !compatible(result.verdict, oracle.group, n) {
        let record = serde_json::to_string(&result).unwrap_or_else(|e| format!("<unserializable: {e}>"));
        return Err(Error::OracleMismatch(format!(
            "classifier says {} but the closure has dimension {} ({}); evidence: {record}",
            result.verdict, oracle.dim, oracle.group
        )));
    }
    Ok(CrossValidation { result, oracle })
}
