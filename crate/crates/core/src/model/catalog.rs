//! The three benchmark networks used throughout the experiments.

use super::{RateLaw, ReactionNetwork};

/// Michaelis-Menten enzyme kinetics: E + S ⇌ C → E + P.
/// Species order (E, S, C, P).
pub fn enzyme() -> ReactionNetwork {
    ReactionNetwork {
        species: ["E", "S", "C", "P"].map(String::from).to_vec(),
        stoichiometry: vec![
            vec![-1, 1, 1],
            vec![-1, 1, 0],
            vec![1, -1, -1],
            vec![0, 0, 1],
        ],
        rate_laws: vec![
            RateLaw::MassAction { param: 0, reactants: vec![(0, 1), (1, 1)] },
            RateLaw::MassAction { param: 1, reactants: vec![(2, 1)] },
            RateLaw::MassAction { param: 2, reactants: vec![(2, 1)] },
        ],
        num_params: 3,
        system_size: 1.0,
    }
}

/// Predator-prey: prey birth, predation, predator death.
/// Species order (prey, predator).
pub fn lotka_volterra() -> ReactionNetwork {
    ReactionNetwork {
        species: ["prey", "predator"].map(String::from).to_vec(),
        stoichiometry: vec![vec![1, -1, 0], vec![0, 1, -1]],
        rate_laws: vec![
            RateLaw::MassAction { param: 0, reactants: vec![(0, 1)] },
            RateLaw::MassAction { param: 1, reactants: vec![(0, 1), (1, 1)] },
            RateLaw::MassAction { param: 2, reactants: vec![(1, 1)] },
        ],
        num_params: 3,
        system_size: 1.0,
    }
}

/// Copies of the gene per cell in the autoregulatory network.
pub const GENE_COPIES: f64 = 10.0;

/// Prokaryotic autoregulation with dimer repression.
/// Species order (DNA, RNA, P, P2).
pub fn gene_network() -> ReactionNetwork {
    ReactionNetwork {
        species: ["DNA", "RNA", "P", "P2"].map(String::from).to_vec(),
        stoichiometry: vec![
            vec![-1, 1, 0, 0, 0, 0, 0, 0],
            vec![0, 0, 1, 0, 0, 0, -1, 0],
            vec![0, 0, 0, 1, -2, 2, 0, -1],
            vec![-1, 1, 0, 0, 1, -1, 0, 0],
        ],
        rate_laws: vec![
            RateLaw::MassAction { param: 0, reactants: vec![(0, 1), (3, 1)] },
            RateLaw::ConservedComplement { param: 1, species: 0, total: GENE_COPIES },
            RateLaw::MassAction { param: 2, reactants: vec![(0, 1)] },
            RateLaw::MassAction { param: 3, reactants: vec![(1, 1)] },
            RateLaw::Combinatorial { param: 4, species: 2 },
            RateLaw::MassAction { param: 5, reactants: vec![(3, 1)] },
            RateLaw::MassAction { param: 6, reactants: vec![(1, 1)] },
            RateLaw::MassAction { param: 7, reactants: vec![(2, 1)] },
        ],
        num_params: 8,
        system_size: 1.0,
    }
}
