//! Expression tree for path constraints and post-constraints.

use std::collections::BTreeSet;
use std::fmt;

use super::Env;

/// Comparison operator in a constraint atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn eval(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// Right-hand side of a comparison: an integer literal or another variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Operand {
    Int(i64),
    Var(String),
}

impl Operand {
    fn value(&self, env: &Env) -> i64 {
        match self {
            Operand::Int(v) => *v,
            Operand::Var(name) => lookup(env, name),
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Int(v) => write!(f, "{v}"),
            Operand::Var(name) => f.write_str(name),
        }
    }
}

/// A constraint over integer-valued scalar variables.
///
/// `Top` is the unconstrained condition and evaluates to true under every
/// environment. A bare variable is truthiness: `Var(x)` holds iff `x != 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConstraintExpr {
    Top,
    Var(String),
    Cmp {
        var: String,
        op: CmpOp,
        rhs: Operand,
    },
    Not(Box<ConstraintExpr>),
    And(Vec<ConstraintExpr>),
    Or(Vec<ConstraintExpr>),
}

fn lookup(env: &Env, name: &str) -> i64 {
    match env.get(name) {
        Some(v) => *v,
        None => panic!("evaluation requires a binding for `{name}`"),
    }
}

impl ConstraintExpr {
    /// n-ary conjunction; unwraps singletons and collapses the empty case to Top.
    pub fn and(mut children: Vec<ConstraintExpr>) -> ConstraintExpr {
        match children.len() {
            0 => ConstraintExpr::Top,
            1 => children.pop().unwrap(),
            _ => ConstraintExpr::And(children),
        }
    }

    /// n-ary disjunction; unwraps singletons and collapses the empty case to Top.
    pub fn or(mut children: Vec<ConstraintExpr>) -> ConstraintExpr {
        match children.len() {
            0 => ConstraintExpr::Top,
            1 => children.pop().unwrap(),
            _ => ConstraintExpr::Or(children),
        }
    }

    pub fn cmp(var: impl Into<String>, op: CmpOp, rhs: i64) -> ConstraintExpr {
        ConstraintExpr::Cmp {
            var: var.into(),
            op,
            rhs: Operand::Int(rhs),
        }
    }

    /// Evaluate under an environment binding every free variable.
    ///
    /// Panics on an unbound variable; callers enumerate `free_vars` first.
    pub fn eval(&self, env: &Env) -> bool {
        match self {
            ConstraintExpr::Top => true,
            ConstraintExpr::Var(name) => lookup(env, name) != 0,
            ConstraintExpr::Cmp { var, op, rhs } => op.eval(lookup(env, var), rhs.value(env)),
            ConstraintExpr::Not(inner) => !inner.eval(env),
            ConstraintExpr::And(children) => children.iter().all(|c| c.eval(env)),
            ConstraintExpr::Or(children) => children.iter().any(|c| c.eval(env)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            ConstraintExpr::Top => {}
            ConstraintExpr::Var(name) => {
                out.insert(name.as_str());
            }
            ConstraintExpr::Cmp { var, rhs, .. } => {
                out.insert(var.as_str());
                if let Operand::Var(name) = rhs {
                    out.insert(name.as_str());
                }
            }
            ConstraintExpr::Not(inner) => inner.collect_vars(out),
            ConstraintExpr::And(children) | ConstraintExpr::Or(children) => {
                for c in children {
                    c.collect_vars(out);
                }
            }
        }
    }

    /// Drop Top conjuncts from And nodes, recursively. The only
    /// simplification applied to reported may_init conditions.
    pub fn without_top_conjuncts(&self) -> ConstraintExpr {
        match self {
            ConstraintExpr::And(children) => ConstraintExpr::and(
                children
                    .iter()
                    .map(|c| c.without_top_conjuncts())
                    .filter(|c| *c != ConstraintExpr::Top)
                    .collect(),
            ),
            ConstraintExpr::Or(children) => ConstraintExpr::or(
                children.iter().map(|c| c.without_top_conjuncts()).collect(),
            ),
            ConstraintExpr::Not(inner) => {
                ConstraintExpr::Not(Box::new(inner.without_top_conjuncts()))
            }
            other => other.clone(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            ConstraintExpr::Or(_) => 0,
            ConstraintExpr::And(_) => 1,
            _ => 2,
        }
    }

    fn fmt_child(&self, child: &ConstraintExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if child.precedence() <= self.precedence() && child.precedence() < 2 {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

impl fmt::Display for ConstraintExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintExpr::Top => f.write_str("true"),
            ConstraintExpr::Var(name) => f.write_str(name),
            ConstraintExpr::Cmp { var, op, rhs } => write!(f, "{var} {} {rhs}", op.symbol()),
            ConstraintExpr::Not(inner) => match inner.as_ref() {
                ConstraintExpr::Var(name) => write!(f, "!{name}"),
                other => write!(f, "!({other})"),
            },
            ConstraintExpr::And(children) => {
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" && ")?;
                    }
                    self.fmt_child(c, f)?;
                }
                Ok(())
            }
            ConstraintExpr::Or(children) => {
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" || ")?;
                    }
                    self.fmt_child(c, f)?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, i64)]) -> Env {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn top_true_under_any_env() {
        assert!(ConstraintExpr::Top.eval(&Env::new()));
        assert!(ConstraintExpr::Top.eval(&env(&[("x", -3)])));
    }

    #[test]
    fn bare_var_means_nonzero() {
        let e = ConstraintExpr::Var("some_condi".into());
        assert!(e.eval(&env(&[("some_condi", 2)])));
        assert!(!e.eval(&env(&[("some_condi", 0)])));
    }

    #[test]
    fn var_to_var_comparison() {
        let e = ConstraintExpr::Cmp {
            var: "j".into(),
            op: CmpOp::Lt,
            rhs: Operand::Var("res".into()),
        };
        assert!(e.eval(&env(&[("j", 1), ("res", 3)])));
        assert!(!e.eval(&env(&[("j", 3), ("res", 3)])));
    }

    #[test]
    fn display_round_readable() {
        let e = ConstraintExpr::and(vec![
            ConstraintExpr::or(vec![
                ConstraintExpr::cmp("ret", CmpOp::Eq, 0),
                ConstraintExpr::cmp("ret", CmpOp::Ge, 4),
            ]),
            ConstraintExpr::Not(Box::new(ConstraintExpr::Var("err".into()))),
        ]);
        assert_eq!(e.to_string(), "(ret == 0 || ret >= 4) && !err");
    }

    #[test]
    fn top_conjunct_stripping() {
        let e = ConstraintExpr::And(vec![
            ConstraintExpr::Top,
            ConstraintExpr::cmp("ret", CmpOp::Eq, 5),
        ]);
        assert_eq!(
            e.without_top_conjuncts(),
            ConstraintExpr::cmp("ret", CmpOp::Eq, 5)
        );
        let all_top = ConstraintExpr::And(vec![ConstraintExpr::Top, ConstraintExpr::Top]);
        assert_eq!(all_top.without_top_conjuncts(), ConstraintExpr::Top);
    }
}
