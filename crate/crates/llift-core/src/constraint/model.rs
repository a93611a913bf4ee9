//! Routine path models, the two pruning rules, qualified postconditions, and
//! the brute-force oracle.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;

use super::expr::{CmpOp, ConstraintExpr};
use super::parse::parse_constraint;
use super::{satisfiable, ConstraintError, Domain, Env, MAX_FREE_VARS};

/// One execution path through a routine: its path constraint, its integer
/// outcome bindings (return value and parameter updates), and the set of
/// variables it initializes. Outcomes and initialized names live in disjoint
/// namespaces: outcomes are value bindings, initialized are the suspicious
/// variable names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSpec {
    pub name: String,
    pub constraint: ConstraintExpr,
    pub outcomes: BTreeMap<String, i64>,
    pub initialized: BTreeSet<String>,
}

/// A routine as a non-empty set of paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutineModel {
    pub name: String,
    pub params: Vec<String>,
    pub paths: Vec<PathSpec>,
}

impl RoutineModel {
    pub fn validate(&self) -> Result<(), ConstraintError> {
        if self.paths.is_empty() {
            return Err(ConstraintError::InvalidModel(format!(
                "routine `{}` has no paths",
                self.name
            )));
        }
        let mut seen = BTreeSet::new();
        for path in &self.paths {
            if !seen.insert(path.name.as_str()) {
                return Err(ConstraintError::InvalidModel(format!(
                    "duplicate path name `{}` in routine `{}`",
                    path.name, self.name
                )));
            }
            if let Some(clash) = path.outcomes.keys().find(|k| path.initialized.contains(*k)) {
                return Err(ConstraintError::InvalidModel(format!(
                    "path `{}`: `{clash}` appears in both outcomes and initialized",
                    path.name
                )));
            }
        }
        Ok(())
    }

    /// Load a model from its JSON fixture form. Constraints are strings in
    /// the post-constraint grammar; absent or null means unconstrained.
    pub fn from_json(text: &str) -> Result<RoutineModel, ConstraintError> {
        let doc: ModelDoc = serde_json::from_str(text)
            .map_err(|e| ConstraintError::InvalidModel(e.to_string()))?;
        let model = RoutineModel {
            name: doc.name,
            params: doc.params,
            paths: doc
                .paths
                .into_iter()
                .map(|p| {
                    Ok(PathSpec {
                        name: p.name,
                        constraint: parse_constraint(p.constraint.as_deref())?,
                        outcomes: p.outcomes,
                        initialized: p.initialized,
                    })
                })
                .collect::<Result<_, ConstraintError>>()?,
        };
        model.validate()?;
        Ok(model)
    }
}

#[derive(Deserialize)]
struct ModelDoc {
    name: String,
    #[serde(default)]
    params: Vec<String>,
    paths: Vec<PathDoc>,
}

#[derive(Deserialize)]
struct PathDoc {
    name: String,
    #[serde(default)]
    constraint: Option<String>,
    #[serde(default)]
    outcomes: BTreeMap<String, i64>,
    #[serde(default)]
    initialized: BTreeSet<String>,
}

/// Condition attached to a may_init entry: a parsed expression when the
/// model route produced it, opaque text when it came from a model response
/// we could not parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    Opaque(String),
    Expr(ConstraintExpr),
}

impl Condition {
    pub fn render(&self) -> String {
        match self {
            Condition::Expr(e) => e.to_string(),
            Condition::Opaque(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MayInit {
    pub name: String,
    pub condition: Condition,
}

/// The routine's postcondition restricted to executions compatible with the
/// post-constraint: which suspicious names are initialized on every
/// surviving path (`must_init`) and which only on some (`may_init`).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QualifiedPostcondition {
    pub must_init: BTreeSet<String>,
    pub may_init: Vec<MayInit>,
    /// No path can coexist with the post-constraint: the use is unreachable
    /// and every suspicious name is vacuously must_init.
    pub unreachable_use: bool,
}

/// Apply the two pruning rules and return the surviving paths in order.
///
/// A path is dropped iff its constraint is jointly unsatisfiable with the
/// post-constraint (direct application), or some outcome binding `var = k`,
/// read as the equality `var == k`, is unsatisfiable with it (outcome
/// conflict).
pub fn prune_paths<'m>(
    r: &'m RoutineModel,
    cpost: &ConstraintExpr,
    domain: Domain,
) -> Result<Vec<&'m PathSpec>, ConstraintError> {
    r.validate()?;
    let mut surviving = Vec::new();
    'paths: for path in &r.paths {
        let joint = ConstraintExpr::and(vec![path.constraint.clone(), cpost.clone()]);
        if !satisfiable(&joint, domain)? {
            continue;
        }
        for (var, value) in &path.outcomes {
            let outcome = ConstraintExpr::cmp(var.clone(), CmpOp::Eq, *value);
            let joint = ConstraintExpr::and(vec![outcome, cpost.clone()]);
            if !satisfiable(&joint, domain)? {
                continue 'paths;
            }
        }
        surviving.push(path);
    }
    Ok(surviving)
}

/// Compute the qualified postcondition over the surviving paths.
pub fn qualified_postcondition(
    r: &RoutineModel,
    cpost: &ConstraintExpr,
    suspicious: &BTreeSet<String>,
    domain: Domain,
) -> Result<QualifiedPostcondition, ConstraintError> {
    if suspicious.is_empty() {
        return Err(ConstraintError::EmptySuspicious);
    }
    let surviving = prune_paths(r, cpost, domain)?;
    if surviving.is_empty() {
        return Ok(QualifiedPostcondition {
            must_init: suspicious.clone(),
            may_init: Vec::new(),
            unreachable_use: true,
        });
    }
    let mut result = QualifiedPostcondition::default();
    for name in suspicious {
        let initializing: Vec<&&PathSpec> = surviving
            .iter()
            .filter(|p| p.initialized.contains(name))
            .collect();
        if initializing.len() == surviving.len() {
            result.must_init.insert(name.clone());
        } else if !initializing.is_empty() {
            let condition = ConstraintExpr::or(
                initializing
                    .iter()
                    .map(|p| p.constraint.without_top_conjuncts())
                    .collect(),
            );
            result.may_init.push(MayInit {
                name: name.clone(),
                condition: Condition::Expr(condition),
            });
        }
    }
    Ok(result)
}

/// Independent certification route: no pruning. Enumerate every
/// (path, environment) pair, keep the executions where the path constraint
/// holds in the pre-state and the post-constraint holds in the post-state
/// (the environment overridden by the path's outcome bindings), and
/// intersect the initialized sets of the feasible paths.
///
/// Semantically equivalent to [`qualified_postcondition`] on the must_init
/// set for models whose path constraints range over non-outcome variables
/// (or pin an outcome variable to exactly its bound value) and whose
/// post-constraints do not correlate distinct outcome variables.
pub fn brute_force_oracle(
    r: &RoutineModel,
    cpost: &ConstraintExpr,
    suspicious: &BTreeSet<String>,
    domain: Domain,
) -> Result<QualifiedPostcondition, ConstraintError> {
    if suspicious.is_empty() {
        return Err(ConstraintError::EmptySuspicious);
    }
    if domain.is_empty() {
        return Err(ConstraintError::EmptyDomain(domain));
    }
    r.validate()?;
    let mut feasible: Vec<&PathSpec> = Vec::new();
    for path in &r.paths {
        let mut vars: BTreeSet<&str> = path.constraint.free_vars();
        vars.extend(cpost.free_vars());
        let vars: Vec<&str> = vars.into_iter().collect();
        if vars.len() > MAX_FREE_VARS {
            return Err(ConstraintError::Capacity {
                count: vars.len(),
                max: MAX_FREE_VARS,
            });
        }
        let mut env = Env::new();
        if any_execution(path, cpost, &vars, 0, domain, &mut env) {
            feasible.push(path);
        }
    }
    if feasible.is_empty() {
        return Ok(QualifiedPostcondition {
            must_init: suspicious.clone(),
            may_init: Vec::new(),
            unreachable_use: true,
        });
    }
    let mut result = QualifiedPostcondition::default();
    for name in suspicious {
        let initializing: Vec<&str> = feasible
            .iter()
            .filter(|p| p.initialized.contains(name))
            .map(|p| p.name.as_str())
            .collect();
        if initializing.len() == feasible.len() {
            result.must_init.insert(name.clone());
        } else if !initializing.is_empty() {
            result.may_init.push(MayInit {
                name: name.clone(),
                condition: Condition::Opaque(format!(
                    "feasible on {}",
                    initializing.join(", ")
                )),
            });
        }
    }
    Ok(result)
}

fn any_execution(
    path: &PathSpec,
    cpost: &ConstraintExpr,
    vars: &[&str],
    idx: usize,
    domain: Domain,
    env: &mut Env,
) -> bool {
    if idx == vars.len() {
        if !path.constraint.eval(env) {
            return false;
        }
        let mut post = env.clone();
        for (var, value) in &path.outcomes {
            post.insert(var.clone(), *value);
        }
        return cpost.eval(&post);
    }
    for v in domain.values() {
        env.insert(vars[idx].to_string(), v);
        if any_execution(path, cpost, vars, idx + 1, domain, env) {
            return true;
        }
    }
    env.remove(vars[idx]);
    false
}

/// Convenience for tests and fixtures: path constraint from grammar text.
pub fn path(
    name: &str,
    constraint: Option<&str>,
    outcomes: &[(&str, i64)],
    initialized: &[&str],
) -> PathSpec {
    PathSpec {
        name: name.to_string(),
        constraint: parse_constraint(constraint).expect("fixture constraint parses"),
        outcomes: outcomes
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect(),
        initialized: initialized.iter().map(|s| s.to_string()).collect(),
    }
}

impl QualifiedPostcondition {
    pub fn may_init_names(&self) -> BTreeSet<&str> {
        self.may_init.iter().map(|m| m.name.as_str()).collect()
    }
}

/// The worked six-path model of a scanf-style routine: `path_k` pins
/// `ret == k-1` and initializes the first `k-1` of `a, b, c, d, n`.
pub fn sscanf_model() -> RoutineModel {
    let vars = ["a", "b", "c", "d", "n"];
    RoutineModel {
        name: "sscanf".into(),
        params: vars.iter().map(|s| s.to_string()).collect(),
        paths: (0..=5)
            .map(|k| {
                path(
                    &format!("path_{}", k + 1),
                    Some(&format!("ret == {k}")),
                    &[("ret", k)],
                    &vars[..k as usize],
                )
            })
            .collect(),
    }
}

/// The worked two-path early-return model: an error path returning -1 and a
/// success path that initializes `a` and returns 0.
pub fn func_model() -> RoutineModel {
    RoutineModel {
        name: "func".into(),
        params: vec!["a".into()],
        paths: vec![
            path("path_err", Some("some_condi"), &[("ret", -1)], &[]),
            path("path_ok", Some("!some_condi"), &[("ret", 0)], &["a"]),
        ],
    }
}
