//! Recursive-descent parser for Deladas goal files.
//!
//! ```text
//! goal        := [components] [hosts] constraintset
//! components  := "components" "{" (compDecl [","])* "}"
//! compDecl    := IDENT ["{" portDecl ("," portDecl)* "}"]
//! portDecl    := name ":" ("in" | "out")
//! hosts       := "hosts" "{" [IDENT ("," IDENT)*] "}"
//! constraintset := "constraintset" IDENT "=" "constraintset" "{" clause* "}"
//! clause      := unary ("and" unary)* ("or" unary ("and" unary)*)*
//! unary       := "not" unary | quant | "(" clause+ ")" | atom
//! quant       := ("forall" | "exists") ("host" | IDENT) IDENT ("," IDENT)*
//!                "in" ("deployment" | IDENT) "(" clause+ ")"
//! atom        := intExpr cmp intExpr
//!              | "reachable" "(" IDENT "," IDENT ")"
//!              | IDENT "." name "connectsto" IDENT "." name
//!              | IDENT ("=" | "!=") IDENT
//! intExpr     := INT | "card" "(" ("instancesof" IDENT "in" ("deployment" | IDENT)
//!                                  | IDENT IDENT "connectsto" IDENT) ")"
//! ```
//!
//! Adjacent clauses are an implicit conjunction that binds looser than `or`.

use std::collections::HashSet;

use crate::diagnostic::{Diagnostic, DiagnosticKind, Span};
use crate::model::{
    Clause, CmpOp, ComponentType, ConstraintExpr, ConstraintSet, Domain, Goal, HostDescriptor,
    IntExpr, PortDirection, PortRef, Quantifier, Scope, VarRef,
};

use super::infer;
use super::lexer::{tokenize, Keyword, Symbol, Token, TokenKind};

/// Names reserved for quantitative constraints that no probe supports yet.
const RESERVED_FUNCTIONS: [&str; 4] = ["latency", "bandwidth", "availability", "replication"];

/// Parses a goal file. Component types that appear only in quantifier
/// domains are added, and ports are inferred from `connectsto` usage.
pub fn parse_goal(source: &str) -> Result<Goal, Vec<Diagnostic>> {
    let tokens = tokenize(source).map_err(|d| vec![d])?;
    let mut parser = Parser::new(tokens, end_of(source));
    let raw = parser.goal().map_err(|d| vec![d])?;

    let mut diags = Vec::new();
    let mut names = HashSet::new();
    for (t, span) in &raw.types {
        if !names.insert(t.name.clone()) {
            diags.push(Diagnostic::error(
                DiagnosticKind::DuplicateName(t.name.clone()),
                *span,
                format!("component type `{}` declared twice", t.name),
            ));
        }
    }
    let mut hosts = HashSet::new();
    for (h, span) in &raw.hosts {
        if !hosts.insert(h.clone()) {
            diags.push(Diagnostic::error(
                DiagnosticKind::DuplicateName(h.clone()),
                *span,
                format!("host `{h}` declared twice"),
            ));
        }
    }
    diags.extend(raw.port_dupes);
    if !diags.is_empty() {
        return Err(diags);
    }

    let declared: Vec<ComponentType> = raw.types.into_iter().map(|(t, _)| t).collect();
    let (types, _) = infer::resolve_types(&raw.constraints, &declared);
    Ok(Goal::new(
        types,
        raw.hosts.into_iter().map(|(h, _)| HostDescriptor::available(h)).collect(),
        raw.constraints,
    ))
}

struct RawGoal {
    types: Vec<(ComponentType, Span)>,
    hosts: Vec<(String, Span)>,
    constraints: ConstraintSet,
    port_dupes: Vec<Diagnostic>,
}

fn end_of(source: &str) -> Span {
    let line = source.split('\n').count() as u32;
    let last = source.rsplit('\n').next().unwrap_or("");
    Span::new(line.max(1), last.chars().count() as u32 + 1)
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: Span,
}

impl Parser {
    fn new(tokens: Vec<Token>, eof: Span) -> Self {
        Parser { tokens, pos: 0, eof }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn peek_at(&self, offset: usize) -> Option<TokenKind> {
        self.tokens.get(self.pos + offset).map(|t| t.kind)
    }

    fn here(&self) -> Span {
        self.peek().map_or(self.eof, |t| t.span)
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        self.pos += 1;
        t
    }

    fn at_keyword(&self, k: Keyword) -> bool {
        self.peek_kind() == Some(TokenKind::Keyword(k))
    }

    fn at_symbol(&self, s: Symbol) -> bool {
        self.peek_kind() == Some(TokenKind::Symbol(s))
    }

    fn eat_keyword(&mut self, k: Keyword) -> bool {
        let hit = self.at_keyword(k);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn eat_symbol(&mut self, s: Symbol) -> bool {
        let hit = self.at_symbol(s);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn unexpected(&self, expected: &[&str]) -> Diagnostic {
        let found = match self.peek() {
            Some(t) => format!("`{}`", t.text),
            None => "end of input".to_string(),
        };
        let wanted = match expected {
            [one] => one.to_string(),
            many => format!("one of {}", many.join(", ")),
        };
        Diagnostic::error(
            DiagnosticKind::Syntax,
            self.here(),
            format!("expected {wanted}, found {found}"),
        )
    }

    fn expect_symbol(&mut self, s: Symbol) -> PResult<Span> {
        if self.at_symbol(s) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&[&format!("`{}`", s.as_str())]))
        }
    }

    fn expect_keyword(&mut self, k: Keyword) -> PResult<Span> {
        if self.at_keyword(k) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&[&format!("`{}`", k.as_str())]))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        if self.peek_kind() == Some(TokenKind::Ident) {
            let t = self.bump();
            Ok((t.text, t.span))
        } else {
            Err(self.unexpected(&["identifier"]))
        }
    }

    /// Port names may collide with keywords (`c.in`).
    fn name(&mut self) -> PResult<(String, Span)> {
        match self.peek_kind() {
            Some(TokenKind::Ident | TokenKind::Keyword(_)) => {
                let t = self.bump();
                Ok((t.text, t.span))
            }
            _ => Err(self.unexpected(&["port name"])),
        }
    }

    fn goal(&mut self) -> PResult<RawGoal> {
        let mut types = Vec::new();
        let mut port_dupes = Vec::new();
        if self.eat_keyword(Keyword::Components) {
            self.expect_symbol(Symbol::LBrace)?;
            while self.peek_kind() == Some(TokenKind::Ident) {
                let (t, span) = self.component_decl(&mut port_dupes)?;
                types.push((t, span));
                self.eat_symbol(Symbol::Comma);
            }
            if !self.at_symbol(Symbol::RBrace) {
                return Err(self.unexpected(&["component type name", "`}`"]));
            }
            self.bump();
        }
        let mut hosts = Vec::new();
        if self.eat_keyword(Keyword::Hosts) {
            self.expect_symbol(Symbol::LBrace)?;
            if !self.at_symbol(Symbol::RBrace) {
                hosts.push(self.ident()?);
                while self.eat_symbol(Symbol::Comma) {
                    hosts.push(self.ident()?);
                }
            }
            if !self.at_symbol(Symbol::RBrace) {
                return Err(self.unexpected(&["`,`", "`}`"]));
            }
            self.bump();
        }
        if !self.at_keyword(Keyword::Constraintset) {
            let mut expected = vec!["`constraintset`"];
            if types.is_empty() && hosts.is_empty() {
                expected.insert(0, "`components`");
                expected.insert(1, "`hosts`");
            } else if hosts.is_empty() {
                expected.insert(0, "`hosts`");
            }
            return Err(self.unexpected(&expected));
        }
        self.bump();
        let (name, _) = self.ident()?;
        self.expect_symbol(Symbol::Eq)?;
        self.expect_keyword(Keyword::Constraintset)?;
        self.expect_symbol(Symbol::LBrace)?;
        let mut clauses = Vec::new();
        while self.starts_clause() {
            let span = self.here();
            let expr = self.clause()?;
            clauses.push(Clause { expr, span });
        }
        if !self.at_symbol(Symbol::RBrace) {
            return Err(self.unexpected(&["a constraint clause", "`}`"]));
        }
        self.bump();
        if self.peek().is_some() {
            return Err(self.unexpected(&["end of input"]));
        }
        Ok(RawGoal {
            types,
            hosts,
            constraints: ConstraintSet::new(name, clauses),
            port_dupes,
        })
    }

    fn component_decl(&mut self, dupes: &mut Vec<Diagnostic>) -> PResult<(ComponentType, Span)> {
        let (name, span) = self.ident()?;
        let mut t = ComponentType::new(name);
        if self.eat_symbol(Symbol::LBrace) {
            loop {
                let (port, pspan) = self.name()?;
                self.expect_symbol(Symbol::Colon)?;
                let direction = match self.peek() {
                    Some(tok) if tok.kind == TokenKind::Keyword(Keyword::In) => PortDirection::In,
                    Some(tok) if tok.kind == TokenKind::Ident && tok.text == "out" => PortDirection::Out,
                    _ => return Err(self.unexpected(&["`in`", "`out`"])),
                };
                self.bump();
                if t.port(&port).is_some() {
                    dupes.push(Diagnostic::error(
                        DiagnosticKind::DuplicateName(port.clone()),
                        pspan,
                        format!("port `{port}` declared twice on `{}`", t.name),
                    ));
                } else {
                    t = t.with_port(port, direction);
                }
                if !self.eat_symbol(Symbol::Comma) {
                    break;
                }
            }
            self.expect_symbol(Symbol::RBrace)?;
        }
        Ok((t, span))
    }

    fn starts_clause(&self) -> bool {
        matches!(
            self.peek_kind(),
            Some(
                TokenKind::Ident
                    | TokenKind::Int
                    | TokenKind::Symbol(Symbol::LParen)
                    | TokenKind::Keyword(Keyword::Forall | Keyword::Exists | Keyword::Not)
            )
        )
    }

    fn clause(&mut self) -> PResult<ConstraintExpr> {
        let first = self.conjunction()?;
        if !self.at_keyword(Keyword::Or) {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_keyword(Keyword::Or) {
            items.push(self.conjunction()?);
        }
        Ok(ConstraintExpr::Or(items))
    }

    fn conjunction(&mut self) -> PResult<ConstraintExpr> {
        let first = self.unary()?;
        if !self.at_keyword(Keyword::And) {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_keyword(Keyword::And) {
            items.push(self.unary()?);
        }
        Ok(ConstraintExpr::And(items))
    }

    fn unary(&mut self) -> PResult<ConstraintExpr> {
        match self.peek_kind() {
            Some(TokenKind::Keyword(Keyword::Not)) => {
                self.bump();
                Ok(ConstraintExpr::Not(Box::new(self.unary()?)))
            }
            Some(TokenKind::Keyword(Keyword::Forall)) => self.quantified(Quantifier::Forall),
            Some(TokenKind::Keyword(Keyword::Exists)) => self.quantified(Quantifier::Exists),
            Some(TokenKind::Symbol(Symbol::LParen)) => {
                let open = self.bump().span;
                let mut items = self.clause_list(open, "group")?;
                Ok(if items.len() == 1 {
                    items.pop().unwrap()
                } else {
                    ConstraintExpr::And(items)
                })
            }
            Some(TokenKind::Ident | TokenKind::Int) => self.atom(),
            _ => Err(self.unexpected(&["`forall`", "`exists`", "`not`", "`(`", "identifier", "integer"])),
        }
    }

    /// `clause+ ")"`, with the opening paren already consumed.
    fn clause_list(&mut self, open: Span, what: &str) -> PResult<Vec<ConstraintExpr>> {
        let mut items = Vec::new();
        while self.starts_clause() {
            items.push(self.clause()?);
        }
        if items.is_empty() {
            return Err(self.unexpected(&["a constraint clause"]));
        }
        if !self.at_symbol(Symbol::RParen) {
            let mut d = self.unexpected(&["a constraint clause", "`)`"]);
            d.message = format!("{} (closing the {what} opened at line {})", d.message, open.line);
            return Err(d);
        }
        self.bump();
        Ok(items)
    }

    fn quantified(&mut self, quantifier: Quantifier) -> PResult<ConstraintExpr> {
        let span = self.bump().span;
        let domain = if self.eat_keyword(Keyword::Host) {
            Domain::Hosts
        } else if self.peek_kind() == Some(TokenKind::Ident) {
            Domain::Instances(self.bump().text)
        } else {
            return Err(self.unexpected(&["`host`", "component type name"]));
        };
        let mut vars = vec![self.ident()?.0];
        while self.eat_symbol(Symbol::Comma) {
            vars.push(self.ident()?.0);
        }
        self.expect_keyword(Keyword::In)?;
        let scope = self.scope()?;
        let open = self.expect_symbol(Symbol::LParen)?;
        let body = self.clause_list(open, "quantifier")?;
        Ok(ConstraintExpr::Quantified {
            quantifier,
            domain,
            vars,
            scope,
            body,
            span,
        })
    }

    fn scope(&mut self) -> PResult<Scope> {
        if self.eat_keyword(Keyword::Deployment) {
            return Ok(Scope::Deployment);
        }
        match self.peek_kind() {
            Some(TokenKind::Ident) => {
                let t = self.bump();
                Ok(Scope::Host(VarRef::at(t.text, t.span)))
            }
            _ => Err(self.unexpected(&["`deployment`", "host variable"])),
        }
    }

    fn atom(&mut self) -> PResult<ConstraintExpr> {
        let span = self.here();
        let tok = self.peek().cloned().expect("atom called at a token");
        if tok.kind == TokenKind::Ident && self.peek_at(1) == Some(TokenKind::Symbol(Symbol::LParen)) {
            match tok.text.as_str() {
                "card" => {}
                "reachable" => {
                    self.bump();
                    self.bump();
                    let (a, aspan) = self.ident()?;
                    self.expect_symbol(Symbol::Comma)?;
                    let (b, bspan) = self.ident()?;
                    self.expect_symbol(Symbol::RParen)?;
                    return Ok(ConstraintExpr::Reachable {
                        from: VarRef::at(a, aspan),
                        to: VarRef::at(b, bspan),
                        span,
                    });
                }
                other => {
                    let hint = if RESERVED_FUNCTIONS.contains(&other) {
                        "quantitative constraints such as latency, bandwidth and availability are a \
                         reserved extension point with no probe support"
                    } else {
                        "supported constraint functions are `card` and `reachable`"
                    };
                    return Err(Diagnostic::error(
                        DiagnosticKind::UnsupportedConstraint(other.to_string()),
                        span,
                        format!("unknown constraint function `{other}`: {hint}"),
                    ));
                }
            }
        }
        if tok.kind == TokenKind::Int || tok.text == "card" {
            let lhs = self.int_expr()?;
            let op = self.cmp_op()?;
            let rhs = self.int_expr()?;
            return Ok(ConstraintExpr::Compare { lhs, op, rhs, span });
        }

        let (var, vspan) = self.ident()?;
        match self.peek_kind() {
            Some(TokenKind::Symbol(Symbol::Dot)) => {
                self.bump();
                let (port, _) = self.name()?;
                self.expect_keyword(Keyword::Connectsto)?;
                let (to_var, tspan) = self.ident()?;
                self.expect_symbol(Symbol::Dot)?;
                let (to_port, _) = self.name()?;
                Ok(ConstraintExpr::ConnectsTo {
                    from: PortRef {
                        var: VarRef::at(var, vspan),
                        port,
                    },
                    to: PortRef {
                        var: VarRef::at(to_var, tspan),
                        port: to_port,
                    },
                    span,
                })
            }
            Some(TokenKind::Symbol(s @ (Symbol::Eq | Symbol::Ne))) => {
                self.bump();
                let (rhs, rspan) = self.ident()?;
                Ok(ConstraintExpr::SameEntity {
                    lhs: VarRef::at(var, vspan),
                    rhs: VarRef::at(rhs, rspan),
                    equal: s == Symbol::Eq,
                    span,
                })
            }
            _ => Err(self.unexpected(&["`.`", "`=`", "`!=`"])),
        }
    }

    fn cmp_op(&mut self) -> PResult<CmpOp> {
        let op = match self.peek_kind() {
            Some(TokenKind::Symbol(Symbol::Eq)) => CmpOp::Eq,
            Some(TokenKind::Symbol(Symbol::Ne)) => CmpOp::Ne,
            Some(TokenKind::Symbol(Symbol::Le)) => CmpOp::Le,
            Some(TokenKind::Symbol(Symbol::Lt)) => CmpOp::Lt,
            Some(TokenKind::Symbol(Symbol::Ge)) => CmpOp::Ge,
            Some(TokenKind::Symbol(Symbol::Gt)) => CmpOp::Gt,
            _ => return Err(self.unexpected(&["`=`", "`!=`", "`<=`", "`<`", "`>=`", "`>`"])),
        };
        self.bump();
        Ok(op)
    }

    fn int_expr(&mut self) -> PResult<IntExpr> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Int => {
                let t = self.bump();
                t.text.parse().map(IntExpr::Literal).map_err(|_| {
                    Diagnostic::error(DiagnosticKind::Syntax, t.span, format!("integer `{}` out of range", t.text))
                })
            }
            Some(t) if t.kind == TokenKind::Ident && t.text == "card" => {
                let span = self.bump().span;
                self.expect_symbol(Symbol::LParen)?;
                let e = if self.eat_keyword(Keyword::Instancesof) {
                    let (type_name, _) = self.ident()?;
                    self.expect_keyword(Keyword::In)?;
                    let scope = self.scope()?;
                    IntExpr::InstancesOf {
                        type_name,
                        scope,
                        span,
                    }
                } else if self.peek_kind() == Some(TokenKind::Ident) {
                    let (type_name, _) = self.ident()?;
                    let (var, _) = self.ident()?;
                    self.expect_keyword(Keyword::Connectsto)?;
                    let (target, tspan) = self.ident()?;
                    IntExpr::ConnectedCount {
                        type_name,
                        var,
                        target: VarRef::at(target, tspan),
                        span,
                    }
                } else {
                    return Err(self.unexpected(&["`instancesof`", "component type name"]));
                };
                self.expect_symbol(Symbol::RParen)?;
                Ok(e)
            }
            _ => Err(self.unexpected(&["integer", "`card`"])),
        }
    }
}
