//! Abstract syntax of constraint sets.
//!
//! Every node that can be the subject of a diagnostic carries a [`Span`].
//! Structural comparisons that should ignore source positions go through
//! [`ConstraintExpr::without_spans`].

use std::fmt;

use crate::diagnostic::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

/// What a quantified variable ranges over.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    /// `host h in deployment`: the available hosts.
    Hosts,
    /// `Router r in ...`: instances of a component type.
    Instances(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarRef {
    pub name: String,
    pub span: Span,
}

impl VarRef {
    pub fn new(name: impl Into<String>) -> Self {
        VarRef {
            name: name.into(),
            span: Span::default(),
        }
    }

    pub fn at(name: impl Into<String>, span: Span) -> Self {
        VarRef {
            name: name.into(),
            span,
        }
    }
}

/// `in deployment` or `in h` where `h` is a bound host variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scope {
    Deployment,
    Host(VarRef),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PortRef {
    pub var: VarRef,
    pub port: String,
}

impl PortRef {
    pub fn new(var: impl Into<String>, port: impl Into<String>) -> Self {
        PortRef {
            var: VarRef::new(var),
            port: port.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IntExpr {
    Literal(i64),
    /// `card(instancesof T in scope)`
    InstancesOf {
        type_name: String,
        scope: Scope,
        span: Span,
    },
    /// `card(T v connectsto target)`: instances of `T` with at least one
    /// channel to or from `target`.
    ConnectedCount {
        type_name: String,
        var: String,
        target: VarRef,
        span: Span,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintExpr {
    Quantified {
        quantifier: Quantifier,
        domain: Domain,
        vars: Vec<String>,
        scope: Scope,
        /// Implicit conjunction of the parenthesised clauses.
        body: Vec<ConstraintExpr>,
        span: Span,
    },
    And(Vec<ConstraintExpr>),
    Or(Vec<ConstraintExpr>),
    Not(Box<ConstraintExpr>),
    Compare {
        lhs: IntExpr,
        op: CmpOp,
        rhs: IntExpr,
        span: Span,
    },
    ConnectsTo {
        from: PortRef,
        to: PortRef,
        span: Span,
    },
    Reachable {
        from: VarRef,
        to: VarRef,
        span: Span,
    },
    /// `a = b` or `a != b` over bound variables.
    SameEntity {
        lhs: VarRef,
        rhs: VarRef,
        equal: bool,
        span: Span,
    },
}

impl ConstraintExpr {
    pub fn span(&self) -> Span {
        match self {
            ConstraintExpr::Quantified { span, .. }
            | ConstraintExpr::Compare { span, .. }
            | ConstraintExpr::ConnectsTo { span, .. }
            | ConstraintExpr::Reachable { span, .. }
            | ConstraintExpr::SameEntity { span, .. } => *span,
            ConstraintExpr::And(items) | ConstraintExpr::Or(items) => {
                items.first().map(ConstraintExpr::span).unwrap_or_default()
            }
            ConstraintExpr::Not(inner) => inner.span(),
        }
    }

    /// Copy of the tree with every span reset, for structural comparison.
    pub fn without_spans(&self) -> ConstraintExpr {
        fn var(v: &VarRef) -> VarRef {
            VarRef::new(v.name.clone())
        }
        fn scope(s: &Scope) -> Scope {
            match s {
                Scope::Deployment => Scope::Deployment,
                Scope::Host(v) => Scope::Host(var(v)),
            }
        }
        fn int(e: &IntExpr) -> IntExpr {
            match e {
                IntExpr::Literal(n) => IntExpr::Literal(*n),
                IntExpr::InstancesOf {
                    type_name, scope: s, ..
                } => IntExpr::InstancesOf {
                    type_name: type_name.clone(),
                    scope: scope(s),
                    span: Span::default(),
                },
                IntExpr::ConnectedCount {
                    type_name,
                    var: v,
                    target,
                    ..
                } => IntExpr::ConnectedCount {
                    type_name: type_name.clone(),
                    var: v.clone(),
                    target: var(target),
                    span: Span::default(),
                },
            }
        }
        fn port(p: &PortRef) -> PortRef {
            PortRef {
                var: var(&p.var),
                port: p.port.clone(),
            }
        }
        match self {
            ConstraintExpr::Quantified {
                quantifier,
                domain,
                vars,
                scope: s,
                body,
                ..
            } => ConstraintExpr::Quantified {
                quantifier: *quantifier,
                domain: domain.clone(),
                vars: vars.clone(),
                scope: scope(s),
                body: body.iter().map(ConstraintExpr::without_spans).collect(),
                span: Span::default(),
            },
            ConstraintExpr::And(items) => {
                ConstraintExpr::And(items.iter().map(ConstraintExpr::without_spans).collect())
            }
            ConstraintExpr::Or(items) => {
                ConstraintExpr::Or(items.iter().map(ConstraintExpr::without_spans).collect())
            }
            ConstraintExpr::Not(inner) => ConstraintExpr::Not(Box::new(inner.without_spans())),
            ConstraintExpr::Compare { lhs, op, rhs, .. } => ConstraintExpr::Compare {
                lhs: int(lhs),
                op: *op,
                rhs: int(rhs),
                span: Span::default(),
            },
            ConstraintExpr::ConnectsTo { from, to, .. } => ConstraintExpr::ConnectsTo {
                from: port(from),
                to: port(to),
                span: Span::default(),
            },
            ConstraintExpr::Reachable { from, to, .. } => ConstraintExpr::Reachable {
                from: var(from),
                to: var(to),
                span: Span::default(),
            },
            ConstraintExpr::SameEntity {
                lhs, rhs, equal, ..
            } => ConstraintExpr::SameEntity {
                lhs: var(lhs),
                rhs: var(rhs),
                equal: *equal,
                span: Span::default(),
            },
        }
    }

    /// Visits this node and every descendant in pre-order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a ConstraintExpr)) {
        f(self);
        match self {
            ConstraintExpr::Quantified { body, .. } => body.iter().for_each(|e| e.walk(f)),
            ConstraintExpr::And(items) | ConstraintExpr::Or(items) => {
                items.iter().for_each(|e| e.walk(f))
            }
            ConstraintExpr::Not(inner) => inner.walk(f),
            _ => {}
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Deployment => f.write_str("deployment"),
            Scope::Host(v) => f.write_str(&v.name),
        }
    }
}

impl fmt::Display for IntExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntExpr::Literal(n) => write!(f, "{n}"),
            IntExpr::InstancesOf {
                type_name, scope, ..
            } => write!(f, "card(instancesof {type_name} in {scope})"),
            IntExpr::ConnectedCount {
                type_name,
                var,
                target,
                ..
            } => write!(f, "card({type_name} {var} connectsto {})", target.name),
        }
    }
}
