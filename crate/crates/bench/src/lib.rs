//! Shared inputs for the benchmarks.

use logion_core::cases;
use logion_core::random::FormulaGen;
use logion_core::{Formula, Specification};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn minepump() -> Specification {
    cases::find("MP").expect("MinePump is bundled").spec_file().unwrap().to_specification().unwrap()
}

/// `n` random formulae over three variables, the same for a given seed.
pub fn formulas(n: usize, max_size: usize, seed: u64) -> Vec<Formula> {
    let gen = FormulaGen::new(3, max_size);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| gen.sample(&mut rng)).collect()
}
