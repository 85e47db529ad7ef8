use crate::diagnostic::Span;

use super::expr::ConstraintExpr;
use super::resources::{ComponentType, HostDescriptor, HostStatus, PortDirection};

/// One top-level conjunct of a constraint set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub expr: ConstraintExpr,
    pub span: Span,
}

impl Clause {
    pub fn new(expr: ConstraintExpr) -> Self {
        let span = expr.span();
        Clause { expr, span }
    }
}

/// A named conjunction of clauses. An empty set is vacuously satisfied.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstraintSet {
    pub name: String,
    pub clauses: Vec<Clause>,
}

impl ConstraintSet {
    pub fn new(name: impl Into<String>, clauses: Vec<Clause>) -> Self {
        ConstraintSet {
            name: name.into(),
            clauses,
        }
    }

    /// The clause trees with spans stripped.
    pub fn structure(&self) -> Vec<ConstraintExpr> {
        self.clauses.iter().map(|c| c.expr.without_spans()).collect()
    }
}

/// Resources plus constraints: everything the administrator supplies.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Goal {
    pub component_types: Vec<ComponentType>,
    pub hosts: Vec<HostDescriptor>,
    pub constraints: ConstraintSet,
    /// Bumped on every evolution of the resource set.
    pub revision: u64,
}

impl Goal {
    pub fn new(
        component_types: Vec<ComponentType>,
        hosts: Vec<HostDescriptor>,
        constraints: ConstraintSet,
    ) -> Self {
        Goal {
            component_types,
            hosts,
            constraints,
            revision: 0,
        }
    }

    pub fn name(&self) -> &str {
        &self.constraints.name
    }

    pub fn component_type(&self, name: &str) -> Option<&ComponentType> {
        self.component_types.iter().find(|t| t.name == name)
    }

    pub fn host(&self, id: &str) -> Option<&HostDescriptor> {
        self.hosts.iter().find(|h| h.id == id)
    }

    pub fn is_host_available(&self, id: &str) -> bool {
        self.host(id).is_some_and(HostDescriptor::is_available)
    }

    pub fn available_hosts(&self) -> impl Iterator<Item = &HostDescriptor> {
        self.hosts.iter().filter(|h| h.is_available())
    }

    pub fn port_direction(&self, type_name: &str, port: &str) -> Option<PortDirection> {
        self.component_type(type_name)?.direction_of(port)
    }

    /// Same goal with a different host list, keeping constraints and types.
    pub fn with_hosts<I, S>(&self, ids: I) -> Goal
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Goal {
            hosts: ids.into_iter().map(HostDescriptor::available).collect(),
            ..self.clone()
        }
    }

    pub fn set_host_status(&mut self, id: &str, status: HostStatus) -> bool {
        match self.hosts.iter_mut().find(|h| h.id == id) {
            Some(h) if h.status != status => {
                h.status = status;
                true
            }
            _ => false,
        }
    }
}
