//! Second-quantized operators on the sector bases.
//!
//! Every factor token (`n:i`, `hop:i:j`, `cr:i`, `an:i`, `maj:k`) maps an
//! occupation vector to a single occupation vector times an amplitude, so
//! products of factors are evaluated state by state and matrices are built
//! column by column without materializing intermediate operators.
//!
//! Fermionic signs use the Jordan–Wigner string over modes `j < k`, with
//! mode 1 the leftmost occupation slot. Majorana operators are
//! `m_{2k-1} = f_k + f_k†` and `m_{2k} = i(f_k − f_k†)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ensure_hermitian, CMatrix, C64, I, ONE, ZERO};
use crate::sectors::{enumerate_basis, fock_index, fock_occupation, Operator, SectorDescriptor, SectorKind};

/// Largest mode count for which full `2^d` Fock-space matrices are built.
pub const MAX_FOCK_MODES: usize = 12;

/// Hermiticity tolerance applied to assembled Hamiltonians.
pub const HERMITIAN_TOL: f64 = 1e-10;

const LEAK_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorToken {
    /// `n:i`, the number operator of mode `i`.
    Number(usize),
    /// `hop:i:j`, moves one particle from mode `j` to mode `i`.
    Hop(usize, usize),
    /// `cr:i`, fermionic creation operator.
    Create(usize),
    /// `an:i`, fermionic annihilation operator.
    Annihilate(usize),
    /// `maj:k`, Majorana operator `m_k` with `1 ≤ k ≤ 2d`.
    Majorana(usize),
}

/// Parse or range error inside a single token; `column` is 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenError {
    pub column: usize,
    pub reason: String,
}

impl fmt::Display for TokenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.column, self.reason)
    }
}

impl std::error::Error for TokenError {}

impl TokenError {
    fn at(column: usize, reason: impl Into<String>) -> Self {
        Self { column, reason: reason.into() }
    }

    /// Attaches the position of the token inside a [`HamiltonianSpec`]
    /// (1-based term and factor numbers).
    pub fn locate(self, term: usize, factor: usize, token: &str) -> Error {
        Error::InvalidToken { term, factor, token: token.to_string(), column: self.column, reason: self.reason }
    }
}

impl FactorToken {
    fn tag(&self) -> &'static str {
        match self {
            FactorToken::Number(_) => "n",
            FactorToken::Hop(..) => "hop",
            FactorToken::Create(_) => "cr",
            FactorToken::Annihilate(_) => "an",
            FactorToken::Majorana(_) => "maj",
        }
    }

    fn indices(&self) -> Vec<usize> {
        match *self {
            FactorToken::Hop(i, j) => vec![i, j],
            FactorToken::Number(i) | FactorToken::Create(i) | FactorToken::Annihilate(i) | FactorToken::Majorana(i) => {
                vec![i]
            }
        }
    }

    pub fn is_fermionic_only(&self) -> bool {
        matches!(self, FactorToken::Create(_) | FactorToken::Annihilate(_) | FactorToken::Majorana(_))
    }

    /// Whether the token is valid on `desc`, with the column of the offending
    /// field in the canonical rendering when it is not.
    pub fn check(&self, desc: &SectorDescriptor) -> std::result::Result<(), TokenError> {
        let d = desc.modes();
        if desc.kind() == SectorKind::Bosonic && self.is_fermionic_only() {
            return Err(TokenError::at(1, format!("`{}` is only defined on fermionic sectors", self.tag())));
        }
        let limit = if matches!(self, FactorToken::Majorana(_)) { 2 * d } else { d };
        let mut column = self.tag().len() + 2;
        for i in self.indices() {
            if i > limit {
                return Err(TokenError::at(column, format!("index {i} out of range 1..={limit}")));
            }
            column += i.to_string().len() + 1;
        }
        Ok(())
    }

    /// Applies the factor to an occupation vector in place and returns the
    /// amplitude, or `None` when the state is annihilated.
    pub fn apply(&self, occ: &mut [u32], kind: SectorKind) -> Option<C64> {
        let fermionic = kind.is_fermionic();
        let jw = |occ: &[u32], k: usize| -> f64 {
            if occ[..k].iter().sum::<u32>() % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        match *self {
            FactorToken::Number(i) => {
                let n = occ[i - 1];
                (n > 0).then(|| C64::new(n as f64, 0.0))
            }
            FactorToken::Hop(i, j) => {
                let (i, j) = (i - 1, j - 1);
                if occ[j] == 0 {
                    return None;
                }
                if fermionic {
                    if i == j {
                        return Some(ONE);
                    }
                    let s_j = jw(occ, j);
                    occ[j] = 0;
                    if occ[i] == 1 {
                        return None;
                    }
                    let s_i = jw(occ, i);
                    occ[i] = 1;
                    Some(C64::new(s_i * s_j, 0.0))
                } else if i == j {
                    Some(C64::new(occ[j] as f64, 0.0))
                } else {
                    let mut amp = (occ[j] as f64).sqrt();
                    occ[j] -= 1;
                    amp *= ((occ[i] + 1) as f64).sqrt();
                    occ[i] += 1;
                    Some(C64::new(amp, 0.0))
                }
            }
            FactorToken::Create(i) => {
                let k = i - 1;
                if occ[k] == 1 {
                    return None;
                }
                let s = jw(occ, k);
                occ[k] = 1;
                Some(C64::new(s, 0.0))
            }
            FactorToken::Annihilate(i) => {
                let k = i - 1;
                if occ[k] == 0 {
                    return None;
                }
                let s = jw(occ, k);
                occ[k] = 0;
                Some(C64::new(s, 0.0))
            }
            FactorToken::Majorana(m) => {
                let k = (m - 1) / 2;
                let s = jw(occ, k);
                let was_occupied = occ[k] == 1;
                occ[k] = 1 - occ[k];
                if m % 2 == 1 {
                    Some(C64::new(s, 0.0))
                } else if was_occupied {
                    Some(I * s)
                } else {
                    Some(-I * s)
                }
            }
        }
    }
}

impl fmt::Display for FactorToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FactorToken::Hop(i, j) => write!(f, "hop:{i}:{j}"),
            other => write!(f, "{}:{}", other.tag(), other.indices()[0]),
        }
    }
}

impl FromStr for FactorToken {
    type Err = TokenError;

    fn from_str(s: &str) -> std::result::Result<Self, TokenError> {
        if s.is_empty() {
            return Err(TokenError::at(1, "empty factor"));
        }
        let fields: Vec<&str> = s.split(':').collect();
        let arity = match fields[0] {
            "n" | "cr" | "an" | "maj" => 1,
            "hop" => 2,
            other => {
                return Err(TokenError::at(
                    1,
                    format!("unknown factor `{other}`; expected one of n, hop, cr, an, maj"),
                ))
            }
        };
        if fields.len() != arity + 1 {
            let form = if arity == 2 { "hop:i:j".to_string() } else { format!("{}:i", fields[0]) };
            let column = if fields.len() < arity + 1 {
                s.len() + 1
            } else {
                fields[..=arity].iter().map(|f| f.len() + 1).sum::<usize>()
            };
            return Err(TokenError::at(
                column,
                format!("expected `{form}` with {arity} index(es), found {}", fields.len() - 1),
            ));
        }
        let mut column = fields[0].len() + 2;
        let mut indices = Vec::with_capacity(arity);
        for field in &fields[1..] {
            let value: usize = field
                .parse()
                .map_err(|_| TokenError::at(column, format!("`{field}` is not a mode index")))?;
            if value == 0 {
                return Err(TokenError::at(column, "mode indices are 1-based"));
            }
            indices.push(value);
            column += field.len() + 1;
        }
        Ok(match fields[0] {
            "n" => FactorToken::Number(indices[0]),
            "hop" => FactorToken::Hop(indices[0], indices[1]),
            "cr" => FactorToken::Create(indices[0]),
            "an" => FactorToken::Annihilate(indices[0]),
            _ => FactorToken::Majorana(indices[0]),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: C64,
    pub factors: Vec<FactorToken>,
}

impl Term {
    pub fn new(coeff: C64, factors: Vec<FactorToken>) -> Self {
        Self { coeff, factors }
    }

    pub fn real(coeff: f64, factors: Vec<FactorToken>) -> Self {
        Self::new(C64::new(coeff, 0.0), factors)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    coeff: [f64; 2],
    factors: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    terms: Vec<RawTerm>,
}

/// A sum of coefficient-weighted products of factor tokens.
///
/// JSON form: `{"terms":[{"coeff":[re,im],"factors":["n:1","hop:1:3"]}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct HamiltonianSpec {
    terms: Vec<Term>,
}

impl TryFrom<RawSpec> for HamiltonianSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let mut terms = Vec::with_capacity(raw.terms.len());
        for (t, term) in raw.terms.iter().enumerate() {
            let [re, im] = term.coeff;
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::InvalidSpec(format!("term {}: non-finite coefficient", t + 1)));
            }
            let mut factors = Vec::with_capacity(term.factors.len());
            for (f, token) in term.factors.iter().enumerate() {
                factors.push(token.parse().map_err(|e: TokenError| e.locate(t + 1, f + 1, token))?);
            }
            terms.push(Term::new(C64::new(re, im), factors));
        }
        Self::new(terms)
    }
}

impl From<HamiltonianSpec> for RawSpec {
    fn from(spec: HamiltonianSpec) -> Self {
        RawSpec {
            terms: spec
                .terms
                .into_iter()
                .map(|t| RawTerm {
                    coeff: [t.coeff.re, t.coeff.im],
                    factors: t.factors.iter().map(ToString::to_string).collect(),
                })
                .collect(),
        }
    }
}

impl HamiltonianSpec {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidSpec("at least one term is required".into()));
        }
        Ok(Self { terms })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("specs always serialize")
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Multiplies every coefficient by `c`.
    pub fn scaled(&self, c: C64) -> Self {
        Self { terms: self.terms.iter().map(|t| Term::new(t.coeff * c, t.factors.clone())).collect() }
    }

    /// Concatenates the terms of both specs.
    pub fn plus(&self, other: &Self) -> Self {
        Self { terms: self.terms.iter().chain(&other.terms).cloned().collect() }
    }

    /// Checks every token against the sector, reporting the first failure by
    /// term and factor number.
    pub fn validate(&self, desc: &SectorDescriptor) -> Result<()> {
        for (t, term) in self.terms.iter().enumerate() {
            for (f, token) in term.factors.iter().enumerate() {
                token.check(desc).map_err(|e| e.locate(t + 1, f + 1, &token.to_string()))?;
            }
        }
        Ok(())
    }
}

/// Applies the product `factors[0]·factors[1]·…` to a basis state: the
/// rightmost factor acts first.
fn apply_product(factors: &[FactorToken], occ: &mut [u32], kind: SectorKind) -> Option<C64> {
    let mut amp = ONE;
    for factor in factors.iter().rev() {
        amp *= factor.apply(occ, kind)?;
    }
    Some(amp)
}

fn describe_occupation(occ: &[u32]) -> String {
    let inner: Vec<String> = occ.iter().map(ToString::to_string).collect();
    format!("|{}>", inner.join(","))
}

/// Matrix of `spec` on the sector basis, without any Hermiticity check.
///
/// Intermediate states of a product may leave the sector; only the final
/// image is restricted. Amplitude landing outside the sector is an error.
pub fn build_matrix(spec: &HamiltonianSpec, desc: &SectorDescriptor) -> Result<CMatrix> {
    spec.validate(desc)?;
    let basis = enumerate_basis(desc);
    let n = basis.len();
    let mut m = CMatrix::zeros(n, n);
    for (col, state) in basis.states().iter().enumerate() {
        let mut leaked: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        for term in spec.terms() {
            let mut occ = state.occupation().to_vec();
            let Some(amp) = apply_product(&term.factors, &mut occ, desc.kind()) else {
                continue;
            };
            let amp = amp * term.coeff;
            match basis.position(&occ) {
                Some(row) => m[(row, col)] += amp,
                None => *leaked.entry(occ).or_insert(ZERO) += amp,
            }
        }
        if let Some((occ, amp)) = leaked.iter().find(|(_, a)| a.norm() > LEAK_TOL) {
            return Err(Error::SectorViolation(format!(
                "maps {} to {} outside {desc} (amplitude {:.3e})",
                state,
                describe_occupation(occ),
                amp.norm()
            )));
        }
    }
    Ok(m)
}

/// Hermitian operator for `spec` on `desc`. Non-Hermitian results are
/// rejected unless `hermitize` is set, in which case `(M + M†)/2` is used.
pub fn build_operator(spec: &HamiltonianSpec, desc: &SectorDescriptor, hermitize: bool) -> Result<Operator> {
    let m = build_matrix(spec, desc)?;
    let m = if hermitize {
        (&m + m.adjoint()) * C64::new(0.5, 0.0)
    } else {
        ensure_hermitian(&m, HERMITIAN_TOL, "Hamiltonian")?;
        m
    };
    Operator::new(*desc, m)
}

/// Action of a fermionic monomial on the full `2^d` Fock basis: entry `c`
/// holds the image index and amplitude of basis vector `c`, if any.
pub fn fock_monomial(factors: &[FactorToken], d: usize) -> Result<Vec<Option<(usize, C64)>>> {
    if d == 0 || d > MAX_FOCK_MODES {
        return Err(Error::MemoryGuard {
            what: format!("Fock space on {d} modes"),
            reason: format!("supported range is 1..={MAX_FOCK_MODES}"),
        });
    }
    for (f, token) in factors.iter().enumerate() {
        let full = SectorDescriptor::fock_plus(d)?;
        token.check(&full).map_err(|e| e.locate(1, f + 1, &token.to_string()))?;
    }
    Ok((0..1usize << d)
        .map(|c| {
            let mut occ = fock_occupation(c, d);
            apply_product(factors, &mut occ, SectorKind::Fermionic).map(|amp| (fock_index(&occ), amp))
        })
        .collect())
}

/// Dense matrix of a fermionic monomial on the full Fock space.
pub fn fock_matrix(factors: &[FactorToken], d: usize) -> Result<CMatrix> {
    let action = fock_monomial(factors, d)?;
    let mut m = CMatrix::zeros(action.len(), action.len());
    for (c, image) in action.into_iter().enumerate() {
        if let Some((r, amp)) = image {
            m[(r, c)] = amp;
        }
    }
    Ok(m)
}

fn check_mode(k: usize, limit: usize) -> Result<()> {
    if k == 0 || k > limit {
        return Err(Error::InvalidSpec(format!("index {k} out of range 1..={limit}")));
    }
    Ok(())
}

/// `f_k` (or `f_k†` when `create`) on the `2^d` Fock space.
pub fn jw_ladder(k: usize, d: usize, create: bool) -> Result<CMatrix> {
    check_mode(k, d)?;
    let token = if create { FactorToken::Create(k) } else { FactorToken::Annihilate(k) };
    fock_matrix(&[token], d)
}

/// Majorana operator `m_i`, `1 ≤ i ≤ 2d`, on the `2^d` Fock space.
pub fn majorana(i: usize, d: usize) -> Result<CMatrix> {
    check_mode(i, 2 * d)?;
    fock_matrix(&[FactorToken::Majorana(i)], d)
}

/// Total parity `(−1)^{Σ n_k}` on the `2^d` Fock space.
pub fn parity_op(d: usize) -> Result<CMatrix> {
    if d == 0 || d > MAX_FOCK_MODES {
        return Err(Error::MemoryGuard { what: format!("Fock space on {d} modes"), reason: "unsupported size".into() });
    }
    Ok(CMatrix::from_fn(1 << d, 1 << d, |r, c| {
        if r != c {
            ZERO
        } else if c.count_ones() % 2 == 0 {
            ONE
        } else {
            -ONE
        }
    }))
}

/// Indices of the even-parity rows of the `2^d` Fock space, in sector order.
pub fn even_parity_indices(d: usize) -> Vec<usize> {
    (0..1usize << d).filter(|c| c.count_ones() % 2 == 0).collect()
}
