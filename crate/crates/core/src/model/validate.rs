use std::collections::HashSet;

use crate::diagnostic::{Diagnostic, DiagnosticKind, Span};

use super::expr::{ConstraintExpr, Domain, IntExpr, PortRef, Scope, VarRef};
use super::goal::Goal;
use super::resources::PortDirection;

/// What a bound variable denotes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum VarKind {
    Host,
    Instance(String),
}

/// Lexical scope of quantified variables, innermost last.
#[derive(Default)]
pub(crate) struct Bindings<'a> {
    frames: Vec<(&'a str, VarKind)>,
}

impl<'a> Bindings<'a> {
    pub(crate) fn lookup(&self, name: &str) -> Option<&VarKind> {
        self.frames.iter().rev().find(|(n, _)| *n == name).map(|(_, k)| k)
    }

    pub(crate) fn push(&mut self, name: &'a str, kind: VarKind) {
        self.frames.push((name, kind));
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        self.frames.truncate(len);
    }

    pub(crate) fn len(&self) -> usize {
        self.frames.len()
    }
}

/// Checks that every name in the goal resolves. Returns one diagnostic per
/// defect; an empty list means the goal can be handed to the solver.
pub fn validate_goal(goal: &Goal) -> Vec<Diagnostic> {
    let mut v = Validator {
        goal,
        diags: Vec::new(),
    };
    v.resources();
    for clause in &goal.constraints.clauses {
        let mut scope = Bindings::default();
        v.expr(&clause.expr, &mut scope, clause.span);
    }
    v.diags
}

struct Validator<'g> {
    goal: &'g Goal,
    diags: Vec<Diagnostic>,
}

impl<'g> Validator<'g> {
    fn resources(&mut self) {
        let mut seen = HashSet::new();
        for t in &self.goal.component_types {
            if !seen.insert(t.name.as_str()) {
                self.push(
                    DiagnosticKind::DuplicateName(t.name.clone()),
                    Span::default(),
                    format!("component type `{}` declared twice", t.name),
                );
            }
            let mut ports = HashSet::new();
            for p in &t.ports {
                if !ports.insert(p.name.as_str()) {
                    self.push(
                        DiagnosticKind::DuplicateName(p.name.clone()),
                        Span::default(),
                        format!("port `{}` declared twice on `{}`", p.name, t.name),
                    );
                }
            }
        }
        let mut hosts = HashSet::new();
        for h in &self.goal.hosts {
            if !hosts.insert(h.id.as_str()) {
                self.push(
                    DiagnosticKind::DuplicateName(h.id.clone()),
                    Span::default(),
                    format!("host `{}` declared twice", h.id),
                );
            }
        }
    }

    fn push(&mut self, kind: DiagnosticKind, span: Span, message: String) {
        self.diags.push(Diagnostic::error(kind, span, message));
    }

    fn known_type(&mut self, name: &str, span: Span) -> bool {
        if self.goal.component_type(name).is_some() {
            return true;
        }
        self.push(
            DiagnosticKind::UnknownComponentType(name.to_string()),
            span,
            format!("unknown component type `{name}`"),
        );
        false
    }

    fn var(&mut self, v: &VarRef, scope: &Bindings<'_>, fallback: Span) -> Option<VarKind> {
        let span = if v.span == Span::default() { fallback } else { v.span };
        match scope.lookup(&v.name) {
            Some(k) => Some(k.clone()),
            None => {
                self.push(
                    DiagnosticKind::UnboundVariable(v.name.clone()),
                    span,
                    format!("variable `{}` is not bound by an enclosing quantifier", v.name),
                );
                None
            }
        }
    }

    fn instance_var(&mut self, v: &VarRef, scope: &Bindings<'_>, fallback: Span) -> Option<String> {
        match self.var(v, scope, fallback)? {
            VarKind::Instance(t) => Some(t),
            VarKind::Host => {
                self.push(
                    DiagnosticKind::VariableKind(v.name.clone()),
                    pick(v.span, fallback),
                    format!("`{}` is a host variable where a component instance is required", v.name),
                );
                None
            }
        }
    }

    fn host_scope(&mut self, s: &Scope, scope: &Bindings<'_>, fallback: Span) {
        if let Scope::Host(v) = s {
            if let Some(VarKind::Instance(_)) = self.var(v, scope, fallback) {
                self.push(
                    DiagnosticKind::VariableKind(v.name.clone()),
                    pick(v.span, fallback),
                    format!("`{}` is a component variable where a host is required", v.name),
                );
            }
        }
    }

    fn expr<'e>(&mut self, e: &'e ConstraintExpr, scope: &mut Bindings<'e>, at: Span) {
        let at = pick(e.span(), at);
        match e {
            ConstraintExpr::Quantified {
                domain,
                vars,
                scope: s,
                body,
                span,
                ..
            } => {
                let kind = match domain {
                    Domain::Hosts => {
                        if let Scope::Host(v) = s {
                            self.push(
                                DiagnosticKind::Syntax,
                                pick(v.span, *span),
                                "host quantifiers range over the whole deployment".to_string(),
                            );
                        }
                        VarKind::Host
                    }
                    Domain::Instances(t) => {
                        self.known_type(t, *span);
                        self.host_scope(s, scope, *span);
                        VarKind::Instance(t.clone())
                    }
                };
                let mut local = HashSet::new();
                for v in vars {
                    if !local.insert(v.as_str()) {
                        self.push(
                            DiagnosticKind::DuplicateName(v.clone()),
                            *span,
                            format!("variable `{v}` bound twice in one quantifier"),
                        );
                    }
                }
                let mark = scope.len();
                for v in vars {
                    scope.push(v, kind.clone());
                }
                for b in body {
                    self.expr(b, scope, at);
                }
                scope.truncate(mark);
            }
            ConstraintExpr::And(items) | ConstraintExpr::Or(items) => {
                for i in items {
                    self.expr(i, scope, at);
                }
            }
            ConstraintExpr::Not(inner) => self.expr(inner, scope, at),
            ConstraintExpr::Compare { lhs, rhs, span, .. } => {
                self.int(lhs, scope, *span);
                self.int(rhs, scope, *span);
            }
            ConstraintExpr::ConnectsTo { from, to, span } => {
                let a = self.port(from, scope, *span);
                let b = self.port(to, scope, *span);
                if let (Some(a), Some(b)) = (a, b) {
                    if a == b {
                        self.push(
                            DiagnosticKind::DirectionMismatch,
                            *span,
                            format!(
                                "`{}.{}` and `{}.{}` are both {} ports; a channel joins an OUT port to an IN port",
                                from.var.name, from.port, to.var.name, to.port, a
                            ),
                        );
                    }
                }
            }
            ConstraintExpr::Reachable { from, to, span } => {
                self.instance_var(from, scope, *span);
                self.instance_var(to, scope, *span);
            }
            ConstraintExpr::SameEntity { lhs, rhs, span, .. } => {
                let a = self.var(lhs, scope, *span);
                let b = self.var(rhs, scope, *span);
                if let (Some(a), Some(b)) = (a, b) {
                    if (a == VarKind::Host) != (b == VarKind::Host) {
                        self.push(
                            DiagnosticKind::VariableKind(rhs.name.clone()),
                            *span,
                            format!("cannot compare host and component variables `{}` and `{}`", lhs.name, rhs.name),
                        );
                    }
                }
            }
        }
    }

    fn int(&mut self, e: &IntExpr, scope: &Bindings<'_>, at: Span) {
        match e {
            IntExpr::Literal(_) => {}
            IntExpr::InstancesOf {
                type_name,
                scope: s,
                span,
            } => {
                let span = pick(*span, at);
                self.known_type(type_name, span);
                self.host_scope(s, scope, span);
            }
            IntExpr::ConnectedCount {
                type_name,
                target,
                span,
                ..
            } => {
                let span = pick(*span, at);
                self.known_type(type_name, span);
                self.instance_var(target, scope, span);
            }
        }
    }

    fn port(&mut self, p: &PortRef, scope: &Bindings<'_>, at: Span) -> Option<PortDirection> {
        let type_name = self.instance_var(&p.var, scope, at)?;
        let t = self.goal.component_type(&type_name)?;
        match t.direction_of(&p.port) {
            Some(d) => Some(d),
            None => {
                self.push(
                    DiagnosticKind::UnknownPort {
                        type_name: type_name.clone(),
                        port: p.port.clone(),
                    },
                    pick(p.var.span, at),
                    format!("component type `{type_name}` has no port `{}`", p.port),
                );
                None
            }
        }
    }
}

fn pick(span: Span, fallback: Span) -> Span {
    if span == Span::default() {
        fallback
    } else {
        span
    }
}
