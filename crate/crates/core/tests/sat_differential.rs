//! The tableau checker against brute-force lasso enumeration.

use logion_core::ltl::{eval_on_lasso, Formula};
use logion_core::random::FormulaGen;
use logion_core::sat::{bounded_sat, check_sat, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn formulas(n: usize, seed: u64) -> Vec<Formula> {
    let gen = FormulaGen::new(3, 12);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| gen.sample(&mut rng)).collect()
}

#[test]
fn no_missed_models_and_valid_witnesses() {
    let mut sat = 0;
    for f in formulas(1500, 2024) {
        let vocab = f.variables();
        let r = check_sat(&f, &vocab).unwrap();
        match r.verdict {
            Verdict::Sat => {
                sat += 1;
                let w = r.witness.expect("sat verdicts carry a witness");
                assert!(eval_on_lasso(&f, &w, 0), "witness {w} does not satisfy {f}");
            }
            Verdict::Unsat => {
                assert!(bounded_sat(&f, &vocab, 3, 3).is_none(), "{f} has a short model but was judged unsatisfiable");
            }
        }
    }
    assert!(sat > 300, "generator should produce a healthy mix ({sat} sat)");
}
