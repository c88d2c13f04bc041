//! LTL syntax, parsing, printing and lasso semantics.

mod formula;
mod lasso;
mod parser;
mod spec;

pub use formula::{BinaryOp, Formula, Path, UnaryOp};
pub(crate) use lasso::TruthTable;
pub use lasso::{eval_on_lasso, LassoTrace, State};
pub use parser::{is_identifier, parse, parse_with, ParseError, ParseOptions, KEYWORDS};
pub use spec::{Named, SpecError, Specification};

/// A set of variable names.
pub type Vocabulary = std::collections::BTreeSet<String>;
