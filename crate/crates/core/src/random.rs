//! Seeded random formula generation for property tests and benchmarks.

use rand::Rng;

use crate::ltl::{BinaryOp, Formula, UnaryOp};

#[derive(Debug, Clone)]
pub struct FormulaGen {
    pub vars: Vec<String>,
    pub max_size: usize,
    /// Whether `->` may appear.
    pub implications: bool,
    /// Whether `true`/`false` leaves may appear.
    pub constants: bool,
}

impl FormulaGen {
    pub fn new(num_vars: usize, max_size: usize) -> Self {
        let vars = ["p", "q", "r", "s", "t", "u"].iter().take(num_vars.max(1)).map(|s| s.to_string()).collect();
        FormulaGen { vars, max_size: max_size.max(1), implications: true, constants: true }
    }

    /// A formula whose size is uniform-ish in `1..=max_size`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Formula {
        let target = rng.gen_range(1..=self.max_size);
        self.sized(rng, target)
    }

    /// A formula with exactly `size` nodes.
    pub fn sized<R: Rng + ?Sized>(&self, rng: &mut R, size: usize) -> Formula {
        match size {
            0 | 1 => self.leaf(rng),
            2 => Formula::unary(self.unary(rng), self.leaf(rng)),
            _ => {
                if rng.gen_bool(0.4) {
                    Formula::unary(self.unary(rng), self.sized(rng, size - 1))
                } else {
                    let left = rng.gen_range(1..=size - 2);
                    let l = self.sized(rng, left);
                    let r = self.sized(rng, size - 1 - left);
                    Formula::binary(self.binary(rng), l, r)
                }
            }
        }
    }

    fn leaf<R: Rng + ?Sized>(&self, rng: &mut R) -> Formula {
        if self.constants && rng.gen_bool(0.1) {
            Formula::Const(rng.gen())
        } else {
            Formula::Var(self.vars[rng.gen_range(0..self.vars.len())].clone())
        }
    }

    fn unary<R: Rng + ?Sized>(&self, rng: &mut R) -> UnaryOp {
        UnaryOp::ALL[rng.gen_range(0..4)]
    }

    fn binary<R: Rng + ?Sized>(&self, rng: &mut R) -> BinaryOp {
        let n = if self.implications { 6 } else { 5 };
        match rng.gen_range(0..n) {
            5 => BinaryOp::Implies,
            i => BinaryOp::EDITABLE[i],
        }
    }
}
