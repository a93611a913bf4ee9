//! Constraint expressions, routine path models, post-constraint pruning, and
//! the brute-force oracle that certifies the pruning rules.
//!
//! A routine is modeled as a set of paths; each path carries a constraint, a
//! set of integer outcome bindings (`ret`, `err`, ...), and the set of
//! variables it initializes. Given the post-constraint guarding a use site,
//! paths that cannot coexist with it are pruned, and the survivors partition
//! the suspicious variables into `must_init` and `may_init`.

mod expr;
mod model;
mod parse;
pub mod random;

pub use expr::{CmpOp, ConstraintExpr, Operand};
pub use model::{
    brute_force_oracle, func_model, path, prune_paths, qualified_postcondition, sscanf_model,
    Condition, MayInit, PathSpec, QualifiedPostcondition, RoutineModel,
};
pub use parse::parse_constraint;

use std::collections::BTreeMap;

use thiserror::Error;

/// Hard cap on enumerated free variables per satisfiability query.
pub const MAX_FREE_VARS: usize = 6;

/// Inclusive integer interval over which feasibility is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Domain {
    pub lo: i64,
    pub hi: i64,
}

impl Domain {
    pub const fn new(lo: i64, hi: i64) -> Self {
        Domain { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn values(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

/// All worked examples are decided correctly within this window and
/// exhaustive enumeration stays trivially fast.
impl Default for Domain {
    fn default() -> Self {
        Domain::new(-4, 7)
    }
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

#[derive(Debug, Error)]
pub enum ConstraintError {
    #[error("constraint parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("{count} free variables exceed the enumeration cap of {max}")]
    Capacity { count: usize, max: usize },
    #[error("empty variable domain {0}")]
    EmptyDomain(Domain),
    #[error("invalid routine model: {0}")]
    InvalidModel(String),
    #[error("suspicious variable set is empty")]
    EmptySuspicious,
}

/// Variable environment used during constraint evaluation.
pub type Env = BTreeMap<String, i64>;

/// True iff some assignment of `e`'s free variables to values in `domain`
/// satisfies `e`. Exhaustive enumeration, first hit wins.
pub fn satisfiable(e: &ConstraintExpr, domain: Domain) -> Result<bool, ConstraintError> {
    if domain.is_empty() {
        return Err(ConstraintError::EmptyDomain(domain));
    }
    let vars: Vec<&str> = e.free_vars().into_iter().collect();
    if vars.len() > MAX_FREE_VARS {
        return Err(ConstraintError::Capacity {
            count: vars.len(),
            max: MAX_FREE_VARS,
        });
    }
    let mut env = Env::new();
    Ok(enumerate(e, &vars, 0, domain, &mut env))
}

fn enumerate(e: &ConstraintExpr, vars: &[&str], idx: usize, domain: Domain, env: &mut Env) -> bool {
    if idx == vars.len() {
        return e.eval(env);
    }
    for v in domain.values() {
        env.insert(vars[idx].to_string(), v);
        if enumerate(e, vars, idx + 1, domain, env) {
            return true;
        }
    }
    env.remove(vars[idx]);
    false
}
