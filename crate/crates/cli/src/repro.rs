//! Canned runs of the worked examples: cross-Kerr gates, the cubic number
//! difference, random two-body fermionic Hamiltonians, correlated hopping
//! and a quartic Majorana term.

use std::f64::consts::FRAC_PI_3;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use unikit_core::models::{correlated_hopping, cross_kerr_gate, cubic_difference, quartic_majorana, random_two_mode};
use unikit_core::{build_matrix, classify, HamiltonianSpec, Scenario, ScenarioOptions, SectorDescriptor, Verdict};

use crate::report::{ReproReport, ReproRow};

/// Seed of the random two-body draws.
pub const RANDOM_SEED: u64 = 20;
const RANDOM_DRAWS: usize = 5;

struct Case {
    example: u8,
    label: String,
    expected: Vec<Verdict>,
    build: Box<dyn Fn() -> unikit_core::Result<Scenario> + Send + Sync>,
}

fn hamiltonian(desc: SectorDescriptor, spec: &HamiltonianSpec) -> unikit_core::Result<Scenario> {
    Scenario::hamiltonian(desc, build_matrix(spec, &desc)?)
}

fn cases() -> Vec<Case> {
    use Verdict::*;
    let mut out = Vec::new();
    for n in 2..=7 {
        out.push(Case {
            example: 1,
            label: format!("cross-Kerr t=pi/3 N={n}"),
            expected: vec![FullUnitary],
            build: Box::new(move || {
                Scenario::gate(SectorDescriptor::bosonic(2, n)?, cross_kerr_gate(n, FRAC_PI_3)?)
            }),
        });
    }
    for n in 2..=8 {
        // Two bosons span a three-dimensional sector where orthogonal and
        // passive coincide.
        let expected = match n {
            2 => vec![MiddleOrthogonal, NoExtension],
            6 => vec![IndeterminateExceptional],
            _ if n % 2 == 1 => vec![MiddleSymplectic],
            _ => vec![MiddleOrthogonal],
        };
        out.push(Case {
            example: 2,
            label: format!("cubic difference N={n}"),
            expected,
            build: Box::new(move || hamiltonian(SectorDescriptor::bosonic(2, n)?, &cubic_difference())),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
    for draw in 0..RANDOM_DRAWS {
        let spec = random_two_mode(6, &mut rng);
        out.push(Case {
            example: 3,
            label: format!("random two-body draw {draw}"),
            expected: vec![FullUnitary],
            build: Box::new(move || hamiltonian(SectorDescriptor::fermionic(6, 3)?, &spec)),
        });
    }
    for d in [4, 6, 8] {
        let expected = if d == 6 { vec![MiddleSymplectic] } else { vec![MiddleOrthogonal, NoExtension] };
        out.push(Case {
            example: 4,
            label: format!("correlated hopping d={d}"),
            expected,
            build: Box::new(move || hamiltonian(SectorDescriptor::fermionic(d, d / 2)?, &correlated_hopping(d)?)),
        });
    }
    for d in 4..=6 {
        out.push(Case {
            example: 5,
            label: format!("quartic Majorana d={d}"),
            expected: vec![FullUnitary],
            build: Box::new(move || hamiltonian(SectorDescriptor::fock_plus(d)?, &quartic_majorana())),
        });
    }
    out
}

fn run_case(case: &Case, oracle: bool) -> ReproRow {
    let outcome = (case.build)().and_then(|s| {
        classify(&s.with_options(ScenarioOptions { oracle, ..Default::default() })?)
    });
    let (computed, error, oracle_dim) = match outcome {
        Ok(r) => (Some(r.verdict), None, r.evidence.oracle.map(|o| o.dim)),
        Err(e) => (None, Some(e.to_string()), None),
    };
    let matches = computed.is_some_and(|v| case.expected.contains(&v));
    ReproRow {
        example: case.example,
        case: case.label.clone(),
        expected: case.expected.clone(),
        computed,
        error,
        oracle_dim,
        matches,
    }
}

/// Runs every case; `oracle` adds closure dimensions where the sector is
/// small enough.
pub fn run(oracle: bool) -> ReproReport {
    let rows = cases().par_iter().map(|c| run_case(c, oracle)).collect();
    ReproReport::new(rows)
}
