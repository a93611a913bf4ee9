//! Recursive-descent parser for the post-constraint grammar.
//!
//! ```text
//! expr := or
//! or   := and ('||' and)*
//! and  := not ('&&' not)*
//! not  := '!' not | atom
//! atom := ident cmp (int | ident) | ident | '(' expr ')'
//! ```
//!
//! A bare identifier means `ident != 0`. Identifiers may carry field paths
//! and index suffixes (`comp_pkt.completion_status`, `pages[j]`, `p->len`)
//! which are treated as opaque scalar names.

use super::expr::{CmpOp, ConstraintExpr, Operand};
use super::ConstraintError;

/// Parse a post-constraint. Absent, empty, or literal `null` input is the
/// unconstrained condition Top.
pub fn parse_constraint(text: Option<&str>) -> Result<ConstraintExpr, ConstraintError> {
    let text = match text {
        None => return Ok(ConstraintExpr::Top),
        Some(t) => t.trim(),
    };
    if text.is_empty() || text == "null" {
        return Ok(ConstraintExpr::Top);
    }
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.expr()?;
    match parser.peek() {
        None => Ok(expr),
        Some(t) => Err(err(t.pos, format!("unexpected `{}`", t.kind))),
    }
}

fn err(pos: usize, msg: impl Into<String>) -> ConstraintError {
    ConstraintError::Parse {
        pos,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Ident(String),
    Int(i64),
    Cmp(CmpOp),
    AndAnd,
    OrOr,
    Bang,
    LParen,
    RParen,
}

impl std::fmt::Display for TokenKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TokenKind::Ident(s) => f.write_str(s),
            TokenKind::Int(v) => write!(f, "{v}"),
            TokenKind::Cmp(op) => f.write_str(op.symbol()),
            TokenKind::AndAnd => f.write_str("&&"),
            TokenKind::OrOr => f.write_str("||"),
            TokenKind::Bang => f.write_str("!"),
            TokenKind::LParen => f.write_str("("),
            TokenKind::RParen => f.write_str(")"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    pos: usize,
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_continue(c: u8) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, b'_' | b'.' | b'[' | b']')
}

fn tokenize(text: &str) -> Result<Vec<Token>, ConstraintError> {
    let b = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let pos = i;
        let c = b[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'(' => {
                tokens.push(Token { kind: TokenKind::LParen, pos });
                i += 1;
            }
            b')' => {
                tokens.push(Token { kind: TokenKind::RParen, pos });
                i += 1;
            }
            b'&' if b.get(i + 1) == Some(&b'&') => {
                tokens.push(Token { kind: TokenKind::AndAnd, pos });
                i += 2;
            }
            b'|' if b.get(i + 1) == Some(&b'|') => {
                tokens.push(Token { kind: TokenKind::OrOr, pos });
                i += 2;
            }
            b'=' if b.get(i + 1) == Some(&b'=') => {
                tokens.push(Token { kind: TokenKind::Cmp(CmpOp::Eq), pos });
                i += 2;
            }
            b'!' if b.get(i + 1) == Some(&b'=') => {
                tokens.push(Token { kind: TokenKind::Cmp(CmpOp::Ne), pos });
                i += 2;
            }
            b'!' => {
                tokens.push(Token { kind: TokenKind::Bang, pos });
                i += 1;
            }
            b'<' | b'>' => {
                let op = match (c, b.get(i + 1) == Some(&b'=')) {
                    (b'<', true) => CmpOp::Le,
                    (b'<', false) => CmpOp::Lt,
                    (b'>', true) => CmpOp::Ge,
                    (_, false) => CmpOp::Gt,
                    (_, true) => CmpOp::Ge,
                };
                i += if matches!(op, CmpOp::Le | CmpOp::Ge) { 2 } else { 1 };
                tokens.push(Token { kind: TokenKind::Cmp(op), pos });
            }
            b'-' if b.get(i + 1).is_some_and(|d| d.is_ascii_digit()) => {
                let (value, next) = scan_int(b, i + 1, true, pos)?;
                tokens.push(Token { kind: TokenKind::Int(value), pos });
                i = next;
            }
            _ if c.is_ascii_digit() => {
                let (value, next) = scan_int(b, i, false, pos)?;
                tokens.push(Token { kind: TokenKind::Int(value), pos });
                i = next;
            }
            _ if is_ident_start(c) => {
                let start = i;
                i += 1;
                while i < b.len() {
                    if is_ident_continue(b[i]) {
                        i += 1;
                    } else if b[i] == b'-' && b.get(i + 1) == Some(&b'>') {
                        i += 2;
                    } else {
                        break;
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(text[start..i].to_string()),
                    pos,
                });
            }
            other => return Err(err(pos, format!("unexpected character `{}`", other as char))),
        }
    }
    Ok(tokens)
}

fn scan_int(b: &[u8], start: usize, neg: bool, pos: usize) -> Result<(i64, usize), ConstraintError> {
    let mut i = start;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let digits = std::str::from_utf8(&b[start..i]).expect("digits are ascii");
    let magnitude: i64 = digits
        .parse()
        .map_err(|_| err(pos, "integer literal out of range"))?;
    Ok((if neg { -magnitude } else { magnitude }, i))
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn end_pos(&self) -> usize {
        self.tokens.last().map_or(0, |t| t.pos + 1)
    }

    fn expr(&mut self) -> Result<ConstraintExpr, ConstraintError> {
        let mut children = vec![self.and()?];
        while matches!(self.peek().map(|t| &t.kind), Some(TokenKind::OrOr)) {
            self.bump();
            children.push(self.and()?);
        }
        Ok(ConstraintExpr::or(children))
    }

    fn and(&mut self) -> Result<ConstraintExpr, ConstraintError> {
        let mut children = vec![self.not()?];
        while matches!(self.peek().map(|t| &t.kind), Some(TokenKind::AndAnd)) {
            self.bump();
            children.push(self.not()?);
        }
        Ok(ConstraintExpr::and(children))
    }

    fn not(&mut self) -> Result<ConstraintExpr, ConstraintError> {
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Bang)) {
            self.bump();
            return Ok(ConstraintExpr::Not(Box::new(self.not()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<ConstraintExpr, ConstraintError> {
        let end = self.end_pos();
        let token = self.bump().ok_or_else(|| err(end, "expected an atom"))?;
        match token.kind {
            TokenKind::LParen => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token { kind: TokenKind::RParen, .. }) => Ok(inner),
                    Some(t) => Err(err(t.pos, format!("expected `)`, found `{}`", t.kind))),
                    None => Err(err(self.end_pos(), "expected `)`")),
                }
            }
            TokenKind::Ident(name) => {
                if let Some(TokenKind::Cmp(op)) = self.peek().map(|t| t.kind.clone()) {
                    self.bump();
                    let end = self.end_pos();
                    let rhs = self.bump().ok_or_else(|| err(end, "expected a value"))?;
                    let rhs = match rhs.kind {
                        TokenKind::Int(v) => Operand::Int(v),
                        TokenKind::Ident(v) => Operand::Var(v),
                        other => {
                            return Err(err(rhs.pos, format!("expected a value, found `{other}`")))
                        }
                    };
                    Ok(ConstraintExpr::Cmp { var: name, op, rhs })
                } else {
                    Ok(ConstraintExpr::Var(name))
                }
            }
            other => Err(err(token.pos, format!("expected an atom, found `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison_atom() {
        let e = parse_constraint(Some("ret >= 4")).unwrap();
        assert_eq!(e, ConstraintExpr::cmp("ret", CmpOp::Ge, 4));
    }

    #[test]
    fn absent_and_null_are_top() {
        assert_eq!(parse_constraint(None).unwrap(), ConstraintExpr::Top);
        assert_eq!(parse_constraint(Some("")).unwrap(), ConstraintExpr::Top);
        assert_eq!(parse_constraint(Some("  null ")).unwrap(), ConstraintExpr::Top);
    }

    #[test]
    fn three_way_conjunction_with_var_operands() {
        let e = parse_constraint(Some("res < nr_pages && res > 0 && j < res")).unwrap();
        let ConstraintExpr::And(children) = &e else {
            panic!("expected conjunction, got {e:?}");
        };
        assert_eq!(children.len(), 3);
        assert_eq!(
            children[0],
            ConstraintExpr::Cmp {
                var: "res".into(),
                op: CmpOp::Lt,
                rhs: Operand::Var("nr_pages".into()),
            }
        );
        assert_eq!(children[1], ConstraintExpr::cmp("res", CmpOp::Gt, 0));
    }

    #[test]
    fn bang_and_bare_ident() {
        let e = parse_constraint(Some("!some_condi")).unwrap();
        assert_eq!(
            e,
            ConstraintExpr::Not(Box::new(ConstraintExpr::Var("some_condi".into())))
        );
        assert_eq!(e.to_string(), "!some_condi");
    }

    #[test]
    fn parens_and_precedence() {
        let e = parse_constraint(Some("a || b && c")).unwrap();
        let ConstraintExpr::Or(children) = &e else {
            panic!("|| binds loosest");
        };
        assert_eq!(children.len(), 2);
        let e2 = parse_constraint(Some("(a || b) && c")).unwrap();
        assert!(matches!(e2, ConstraintExpr::And(_)));
    }

    #[test]
    fn field_paths_and_indices_are_idents() {
        let e = parse_constraint(Some("comp_pkt.completion_status >= 0")).unwrap();
        assert_eq!(e, ConstraintExpr::cmp("comp_pkt.completion_status", CmpOp::Ge, 0));
        let e = parse_constraint(Some("pages[j] != 0")).unwrap();
        assert_eq!(e, ConstraintExpr::cmp("pages[j]", CmpOp::Ne, 0));
        let e = parse_constraint(Some("req->rc == 0")).unwrap();
        assert_eq!(e, ConstraintExpr::cmp("req->rc", CmpOp::Eq, 0));
    }

    #[test]
    fn negative_literal() {
        let e = parse_constraint(Some("ret == -1")).unwrap();
        assert_eq!(e, ConstraintExpr::cmp("ret", CmpOp::Eq, -1));
    }

    #[test]
    fn errors_carry_position() {
        let e = parse_constraint(Some("ret >= ?"));
        match e {
            Err(ConstraintError::Parse { pos, .. }) => assert_eq!(pos, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_constraint(Some("ret >=")).is_err());
        assert!(parse_constraint(Some("(ret == 0")).is_err());
        assert!(parse_constraint(Some("ret == 0 extra")).is_err());
    }
}
