//! Fixtures shared by the benchmarks.

use unikit_core::models::{cross_kerr_gate, cubic_difference, quartic_majorana};
use unikit_core::{build_matrix, CMatrix, Scenario, SectorDescriptor};

/// `n̂₁³ − n̂₂³` on two bosonic modes with `particles` bosons.
pub fn cubic_hamiltonian(particles: usize) -> CMatrix {
    let desc = SectorDescriptor::bosonic(2, particles).expect("valid sector");
    build_matrix(&cubic_difference(), &desc).expect("valid spec")
}

pub fn cubic_scenario(particles: usize) -> Scenario {
    let desc = SectorDescriptor::bosonic(2, particles).expect("valid sector");
    Scenario::hamiltonian(desc, cubic_hamiltonian(particles)).expect("valid scenario")
}

pub fn cross_kerr_scenario(particles: usize, t: f64) -> Scenario {
    let desc = SectorDescriptor::bosonic(2, particles).expect("valid sector");
    Scenario::gate(desc, cross_kerr_gate(particles, t).expect("valid gate")).expect("valid scenario")
}

pub fn quartic_scenario(modes: usize) -> Scenario {
    let desc = SectorDescriptor::fock_plus(modes).expect("valid sector");
    Scenario::hamiltonian(desc, build_matrix(&quartic_majorana(), &desc).expect("valid spec")).expect("valid scenario")
}
