//! Randomized routine models and post-constraints for property testing.
//!
//! Generated models stay inside the class where the pruning rules are exact:
//! path constraints range over condition variables (never outcome variables,
//! except for an optional `ret == k` atom pinned to the path's own outcome
//! binding), and post-constraints are conjunctions whose conjuncts each
//! mention either condition variables or a single outcome variable. Outside
//! this class the pruning route is still sound but may retain paths the
//! oracle rules out; such inputs are the orchestrator's validation-warning
//! territory, not this generator's.

use std::collections::BTreeSet;

use rand::Rng;

use super::expr::{CmpOp, ConstraintExpr};
use super::model::{PathSpec, RoutineModel};

const CONDITION_VARS: [&str; 2] = ["c0", "c1"];
const OUTCOME_VARS: [&str; 2] = ["ret", "err"];
const SUSPICIOUS_VARS: [&str; 3] = ["a", "b", "c"];

const CMP_OPS: [CmpOp; 6] = [
    CmpOp::Eq,
    CmpOp::Ne,
    CmpOp::Lt,
    CmpOp::Le,
    CmpOp::Gt,
    CmpOp::Ge,
];

/// Pool of suspicious names matching the generated `initialized` sets.
pub fn suspicious_pool() -> BTreeSet<String> {
    SUSPICIOUS_VARS.iter().map(|s| s.to_string()).collect()
}

fn atom<R: Rng>(rng: &mut R, var: &str) -> ConstraintExpr {
    match rng.gen_range(0..4) {
        0 => ConstraintExpr::Var(var.to_string()),
        1 => ConstraintExpr::Not(Box::new(ConstraintExpr::Var(var.to_string()))),
        _ => {
            let op = CMP_OPS[rng.gen_range(0..CMP_OPS.len())];
            let value = rng.gen_range(-4..=7);
            ConstraintExpr::cmp(var, op, value)
        }
    }
}

/// A formula mentioning only `var`: an atom, a negation, or a 2-way or/and.
fn single_var_formula<R: Rng>(rng: &mut R, var: &str) -> ConstraintExpr {
    match rng.gen_range(0..4) {
        0 => ConstraintExpr::or(vec![atom(rng, var), atom(rng, var)]),
        1 => ConstraintExpr::and(vec![atom(rng, var), atom(rng, var)]),
        _ => atom(rng, var),
    }
}

fn pick<'a, R: Rng>(rng: &mut R, options: &[&'a str]) -> &'a str {
    options[rng.gen_range(0..options.len())]
}

fn condition_formula<R: Rng>(rng: &mut R) -> ConstraintExpr {
    let first = pick(rng, &CONDITION_VARS);
    let a = atom(rng, first);
    match rng.gen_range(0..3) {
        0 => a,
        1 => {
            let second = pick(rng, &CONDITION_VARS);
            ConstraintExpr::and(vec![a, atom(rng, second)])
        }
        _ => {
            let second = pick(rng, &CONDITION_VARS);
            ConstraintExpr::or(vec![a, atom(rng, second)])
        }
    }
}

/// A routine model with up to 4 paths, each carrying up to 2 outcome
/// bindings and initializing a random subset of the suspicious pool.
/// Path constraints are kept individually satisfiable: the paths of a
/// routine model stand for possible executions.
pub fn random_model<R: Rng>(rng: &mut R) -> RoutineModel {
    let path_count = rng.gen_range(1..=4);
    let domain = crate::constraint::Domain::default();
    let paths = (0..path_count)
        .map(|i| {
            let mut outcomes = std::collections::BTreeMap::new();
            for var in OUTCOME_VARS.iter().take(rng.gen_range(0..=2)) {
                outcomes.insert(var.to_string(), rng.gen_range(-4..=7));
            }
            let mut constraint = if rng.gen_bool(0.2) {
                ConstraintExpr::Top
            } else {
                let mut candidate = condition_formula(rng);
                for _ in 0..8 {
                    if crate::constraint::satisfiable(&candidate, domain).unwrap_or(false) {
                        break;
                    }
                    candidate = condition_formula(rng);
                }
                if crate::constraint::satisfiable(&candidate, domain).unwrap_or(false) {
                    candidate
                } else {
                    ConstraintExpr::Top
                }
            };
            // Occasionally pin `ret` in the constraint to the path's own
            // outcome value, the scanf-style modeling idiom.
            if let Some(ret) = outcomes.get("ret") {
                if rng.gen_bool(0.25) {
                    constraint = ConstraintExpr::and(vec![
                        constraint,
                        ConstraintExpr::cmp("ret", CmpOp::Eq, *ret),
                    ])
                    .without_top_conjuncts();
                }
            }
            let initialized = SUSPICIOUS_VARS
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .map(|s| s.to_string())
                .collect();
            PathSpec {
                name: format!("path_{i}"),
                constraint,
                outcomes,
                initialized,
            }
        })
        .collect();
    RoutineModel {
        name: "random".into(),
        params: SUSPICIOUS_VARS.iter().map(|s| s.to_string()).collect(),
        paths,
    }
}

/// A post-constraint from the exactness class: Top, or a conjunction of 1-2
/// conjuncts, each over condition variables or one outcome variable.
pub fn random_cpost<R: Rng>(rng: &mut R) -> ConstraintExpr {
    if rng.gen_bool(0.2) {
        return ConstraintExpr::Top;
    }
    let conjunct = |rng: &mut R| {
        if rng.gen_bool(0.6) {
            let var = pick(rng, &OUTCOME_VARS);
            single_var_formula(rng, var)
        } else {
            condition_formula(rng)
        }
    };
    let first = conjunct(rng);
    if rng.gen_bool(0.4) {
        ConstraintExpr::and(vec![first, conjunct(rng)])
    } else {
        first
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{
        brute_force_oracle, qualified_postcondition, satisfiable, Domain,
    };
    use rand::SeedableRng;

    #[test]
    fn generated_models_validate() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            random_model(&mut rng).validate().unwrap();
        }
    }

    #[test]
    fn pruning_route_agrees_with_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let domain = Domain::default();
        let suspicious = suspicious_pool();
        for i in 0..300 {
            let model = random_model(&mut rng);
            let cpost = random_cpost(&mut rng);
            let fast = qualified_postcondition(&model, &cpost, &suspicious, domain).unwrap();
            let slow = brute_force_oracle(&model, &cpost, &suspicious, domain).unwrap();
            assert_eq!(
                fast.must_init, slow.must_init,
                "instance {i}: cpost `{cpost}` on {model:?}"
            );
            assert_eq!(fast.unreachable_use, slow.unreachable_use, "instance {i}");
        }
    }

    #[test]
    fn must_and_may_stay_disjoint() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let domain = Domain::default();
        let suspicious = suspicious_pool();
        for _ in 0..200 {
            let model = random_model(&mut rng);
            let cpost = random_cpost(&mut rng);
            let q = qualified_postcondition(&model, &cpost, &suspicious, domain).unwrap();
            let may: BTreeSet<&str> = q.may_init_names();
            assert!(q.must_init.iter().all(|m| !may.contains(m.as_str())));
        }
    }

    #[test]
    fn soundness_every_feasible_execution_initializes_must_init() {
        // A name reported must_init is initialized on every feasible path,
        // checked against the oracle's feasible set directly.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let domain = Domain::default();
        let suspicious = suspicious_pool();
        for _ in 0..200 {
            let model = random_model(&mut rng);
            let cpost = random_cpost(&mut rng);
            let fast = qualified_postcondition(&model, &cpost, &suspicious, domain).unwrap();
            if fast.unreachable_use {
                continue;
            }
            let slow = brute_force_oracle(&model, &cpost, &suspicious, domain).unwrap();
            for name in &fast.must_init {
                assert!(
                    slow.must_init.contains(name),
                    "`{name}` claimed must_init but some feasible execution skips it"
                );
            }
        }
    }

    #[test]
    fn monotonicity_under_conjunction() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        let domain = Domain::default();
        for _ in 0..200 {
            let model = random_model(&mut rng);
            let c1 = random_cpost(&mut rng);
            let c2 = random_cpost(&mut rng);
            let both = ConstraintExpr::and(vec![c1.clone(), c2]);
            if !satisfiable(&both, domain).unwrap() {
                continue;
            }
            let wide: Vec<&str> = crate::constraint::prune_paths(&model, &c1, domain)
                .unwrap()
                .iter()
                .map(|p| p.name.as_str())
                .collect();
            let narrow: Vec<&str> = crate::constraint::prune_paths(&model, &both, domain)
                .unwrap()
                .iter()
                .map(|p| p.name.as_str())
                .collect();
            assert!(narrow.iter().all(|p| wide.contains(p)));
        }
    }
}
