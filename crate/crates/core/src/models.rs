//! Canned extension operators: cross-Kerr coupling, the cubic number
//! difference, correlated hopping, random two-mode Hamiltonians and the
//! quartic Majorana term. Random draws take the RNG from the caller.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{matexp, CMatrix, C64};
use crate::secondq::{build_matrix, FactorToken, HamiltonianSpec, Term};
use crate::sectors::SectorDescriptor;

/// `n̂₁ n̂₂`.
pub fn cross_kerr() -> HamiltonianSpec {
    HamiltonianSpec::new(vec![Term::real(1.0, vec![FactorToken::Number(1), FactorToken::Number(2)])])
        .expect("non-empty")
}

/// `exp(−i t H)` on `desc`.
pub fn evolution(spec: &HamiltonianSpec, desc: &SectorDescriptor, t: f64) -> Result<CMatrix> {
    matexp(&(build_matrix(spec, desc)? * C64::new(0.0, -t)))
}

/// Cross-Kerr gate `V_t = exp(−i t n̂₁n̂₂)` on two bosonic modes.
pub fn cross_kerr_gate(particles: usize, t: f64) -> Result<CMatrix> {
    evolution(&cross_kerr(), &SectorDescriptor::bosonic(2, particles)?, t)
}

/// `X₃ = n̂₁³ − n̂₂³`.
pub fn cubic_difference() -> HamiltonianSpec {
    let cube = |c, k| Term::real(c, vec![FactorToken::Number(k); 3]);
    HamiltonianSpec::new(vec![cube(1.0, 1), cube(-1.0, 2)]).expect("non-empty")
}

/// `(n̂_a − n̂_b)² (f_p† f_q + f_q† f_p)`, squares expanded.
fn correlated_hop(a: usize, b: usize, p: usize, q: usize) -> Vec<Term> {
    let square = [(1.0, [a, a]), (-2.0, [a, b]), (1.0, [b, b])];
    let hops = [FactorToken::Hop(p, q), FactorToken::Hop(q, p)];
    square
        .iter()
        .flat_map(|&(c, [x, y])| {
            hops.iter().map(move |&h| Term::real(c, vec![FactorToken::Number(x), FactorToken::Number(y), h]))
        })
        .collect()
}

fn check_even_modes(modes: usize) -> Result<()> {
    if modes < 4 || modes % 2 == 1 {
        return Err(Error::InvalidSpec(format!("correlated hopping needs an even mode count >= 4, got {modes}")));
    }
    Ok(())
}

/// The `2(d/2 − 1)` Hermitian summands of the correlated hopping term
///
/// ```text
/// Y = Σ_{j=1}^{d/2−1} (n_{2j} − n_{2j+2})² (f†_{2j−1} f_{2j+1} + h.c.)
///                   + (n_{2j−1} − n_{2j+1})² (f†_{2j} f_{2j+2} + h.c.)
/// ```
pub fn correlated_hopping_summands(modes: usize) -> Result<Vec<HamiltonianSpec>> {
    check_even_modes(modes)?;
    let mut out = Vec::new();
    for j in 1..modes / 2 {
        out.push(HamiltonianSpec::new(correlated_hop(2 * j, 2 * j + 2, 2 * j - 1, 2 * j + 1))?);
        out.push(HamiltonianSpec::new(correlated_hop(2 * j - 1, 2 * j + 1, 2 * j, 2 * j + 2))?);
    }
    Ok(out)
}

/// Correlated hopping `Y` on `modes` fermionic modes.
pub fn correlated_hopping(modes: usize) -> Result<HamiltonianSpec> {
    let terms = correlated_hopping_summands(modes)?.into_iter().flat_map(|s| s.terms().to_vec()).collect();
    HamiltonianSpec::new(terms)
}

/// `Σ_{k,l} α_kl f_k† f_l + β_kl n̂_k n̂_l` with Hermitian Gaussian `α` and
/// real Gaussian `β`.
pub fn random_two_mode<R: Rng + ?Sized>(modes: usize, rng: &mut R) -> HamiltonianSpec {
    let mut terms = Vec::new();
    for k in 1..=modes {
        for l in k..=modes {
            let re: f64 = rng.sample(StandardNormal);
            if k == l {
                terms.push(Term::real(re, vec![FactorToken::Number(k)]));
            } else {
                let im: f64 = rng.sample(StandardNormal);
                terms.push(Term::new(C64::new(re, im), vec![FactorToken::Hop(k, l)]));
                terms.push(Term::new(C64::new(re, -im), vec![FactorToken::Hop(l, k)]));
            }
        }
    }
    for k in 1..=modes {
        for l in 1..=modes {
            let beta: f64 = rng.sample(StandardNormal);
            terms.push(Term::real(beta, vec![FactorToken::Number(k), FactorToken::Number(l)]));
        }
    }
    HamiltonianSpec::new(terms).expect("non-empty")
}

/// `m₁ m₂ m₃ m₄`.
pub fn quartic_majorana() -> HamiltonianSpec {
    HamiltonianSpec::new(vec![Term::real(1.0, (1..=4).map(FactorToken::Majorana).collect())]).expect("non-empty")
}

/// Gaussian Hermitian `d x d` matrix.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let a = CMatrix::from_fn(d, d, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    (&a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Gaussian real antisymmetric `k x k` matrix.
pub fn random_antisymmetric<R: Rng + ?Sized>(k: usize, rng: &mut R) -> CMatrix {
    let mut h = CMatrix::zeros(k, k);
    for r in 0..k {
        for c in r + 1..k {
            let x: f64 = rng.sample(StandardNormal);
            h[(r, c)] = C64::new(x, 0.0);
            h[(c, r)] = C64::new(-x, 0.0);
        }
    }
    h
}
