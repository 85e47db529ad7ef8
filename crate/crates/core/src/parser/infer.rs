//! Component type and port inference from constraint usage.
//!
//! Each `x.p connectsto y.q` says that `p` and `q` sit at opposite ends of a
//! channel, so the ports form a graph whose edges demand opposite directions.
//! A port's direction is pinned by its declaration when there is one,
//! otherwise by its name (`in`, `rin` and `cin` read as IN; `out`, `cout` and
//! `rou` read as OUT). Pinned ports propagate across each connected group; a
//! group with no pinned port takes OUT for the left-hand side of its first use.

use std::collections::{BTreeMap, VecDeque};

use crate::diagnostic::{Diagnostic, DiagnosticKind, Span};
use crate::model::validate::{Bindings, VarKind};
use crate::model::{ComponentType, ConstraintExpr, ConstraintSet, Domain, PortDirection, PortSpec};

/// Returns the goal's component types with every port implied by `connectsto`
/// usage added. Fails if a usage contradicts a declared or name-implied direction.
pub fn infer_ports(
    constraints: &ConstraintSet,
    declared: &[ComponentType],
) -> Result<Vec<ComponentType>, Vec<Diagnostic>> {
    let (types, diags) = resolve_types(constraints, declared);
    if diags.is_empty() {
        Ok(types)
    } else {
        Err(diags)
    }
}

/// Direction suggested by a port's name, if any.
pub fn direction_hint(port: &str) -> Option<PortDirection> {
    let lower = port.to_ascii_lowercase();
    if lower.ends_with("out") || lower.ends_with("ou") {
        Some(PortDirection::Out)
    } else if lower.ends_with("in") {
        Some(PortDirection::In)
    } else {
        None
    }
}

struct Usage {
    from: usize,
    to: usize,
    span: Span,
}

/// Best-effort inference: always produces a type list, plus the conflicts found.
/// Where a conflict exists the pinned direction is kept, so validation reports it.
pub(crate) fn resolve_types(
    constraints: &ConstraintSet,
    declared: &[ComponentType],
) -> (Vec<ComponentType>, Vec<Diagnostic>) {
    let mut types: Vec<ComponentType> = declared.to_vec();
    for clause in &constraints.clauses {
        clause.expr.walk(&mut |e| {
            if let ConstraintExpr::Quantified {
                domain: Domain::Instances(t),
                ..
            } = e
            {
                if !types.iter().any(|d| &d.name == t) {
                    types.push(ComponentType::new(t.clone()));
                }
            }
        });
    }

    let mut nodes: Vec<(String, String)> = Vec::new();
    let mut index: BTreeMap<(String, String), usize> = BTreeMap::new();
    let mut usages = Vec::new();
    {
        let mut node = |t: &str, p: &str| -> usize {
            let key = (t.to_string(), p.to_string());
            *index.entry(key.clone()).or_insert_with(|| {
                nodes.push(key);
                nodes.len() - 1
            })
        };
        for clause in &constraints.clauses {
            let mut scope = Bindings::default();
            collect(&clause.expr, &mut scope, &mut |ft, fp, tt, tp, span| {
                let from = node(ft, fp);
                let to = node(tt, tp);
                usages.push(Usage { from, to, span });
            });
        }
    }

    let declared_dir = |n: usize| -> Option<PortDirection> {
        let (t, p) = &nodes[n];
        types.iter().find(|d| &d.name == t)?.direction_of(p)
    };
    let pinned: Vec<Option<PortDirection>> = (0..nodes.len())
        .map(|n| declared_dir(n).or_else(|| direction_hint(&nodes[n].1)))
        .collect();
    let mut adjacency: Vec<Vec<(usize, Span)>> = vec![Vec::new(); nodes.len()];
    let mut first_use: Vec<Option<Span>> = vec![None; nodes.len()];
    for u in &usages {
        adjacency[u.from].push((u.to, u.span));
        adjacency[u.to].push((u.from, u.span));
        for n in [u.from, u.to] {
            first_use[n].get_or_insert(u.span);
        }
    }

    let mut diags = Vec::new();
    let mut parity: Vec<Option<bool>> = vec![None; nodes.len()];
    let mut resolved: Vec<Option<PortDirection>> = vec![None; nodes.len()];
    for root in 0..nodes.len() {
        if parity[root].is_some() {
            continue;
        }
        let mut members = Vec::new();
        let mut queue = VecDeque::from([root]);
        parity[root] = Some(false);
        while let Some(n) = queue.pop_front() {
            members.push(n);
            let here = parity[n].unwrap();
            for &(m, span) in &adjacency[n] {
                match parity[m] {
                    None => {
                        parity[m] = Some(!here);
                        queue.push_back(m);
                    }
                    Some(p) if p == here => {
                        if !diags.iter().any(|d: &Diagnostic| d.span == span) {
                            diags.push(mismatch(&nodes[n], &nodes[m], span));
                        }
                    }
                    Some(_) => {}
                }
            }
        }
        members.sort_unstable();
        let anchor = members.iter().find_map(|&n| pinned[n].map(|d| (n, d)));
        let root_dir = match anchor {
            Some((n, d)) if parity[n] == Some(true) => d.opposite(),
            Some((_, d)) => d,
            None => PortDirection::Out,
        };
        for &n in &members {
            let computed = if parity[n] == Some(true) {
                root_dir.opposite()
            } else {
                root_dir
            };
            if let Some(p) = pinned[n] {
                if p != computed {
                    let span = first_use[n].unwrap_or_default();
                    diags.push(Diagnostic::error(
                        DiagnosticKind::DirectionMismatch,
                        span,
                        format!(
                            "port `{}.{}` must be {} to satisfy its connections, but is {} {}",
                            nodes[n].0,
                            nodes[n].1,
                            computed,
                            if declared_dir(n).is_some() { "declared" } else { "named as" },
                            p
                        ),
                    ));
                }
            }
            resolved[n] = Some(pinned[n].unwrap_or(computed));
        }
    }
    diags.sort_by_key(|d| d.span);
    diags.dedup();

    for (n, (t, p)) in nodes.iter().enumerate() {
        let ty = types.iter_mut().find(|d| &d.name == t).expect("usage types are registered");
        if ty.port(p).is_none() {
            ty.ports.push(PortSpec::new(p.clone(), resolved[n].unwrap()));
        }
    }
    (types, diags)
}

fn mismatch(a: &(String, String), b: &(String, String), span: Span) -> Diagnostic {
    Diagnostic::error(
        DiagnosticKind::DirectionMismatch,
        span,
        format!(
            "ports `{}.{}` and `{}.{}` cannot sit at opposite ends of every channel they appear in",
            a.0, a.1, b.0, b.1
        ),
    )
}

fn collect<'e>(
    e: &'e ConstraintExpr,
    scope: &mut Bindings<'e>,
    emit: &mut impl FnMut(&str, &str, &str, &str, Span),
) {
    match e {
        ConstraintExpr::Quantified {
            domain, vars, body, ..
        } => {
            let kind = match domain {
                Domain::Hosts => VarKind::Host,
                Domain::Instances(t) => VarKind::Instance(t.clone()),
            };
            let mark = scope.len();
            for v in vars {
                scope.push(v, kind.clone());
            }
            for b in body {
                collect(b, scope, emit);
            }
            scope.truncate(mark);
        }
        ConstraintExpr::And(items) | ConstraintExpr::Or(items) => {
            items.iter().for_each(|i| collect(i, scope, emit))
        }
        ConstraintExpr::Not(inner) => collect(inner, scope, emit),
        ConstraintExpr::ConnectsTo { from, to, span } => {
            if let (Some(VarKind::Instance(a)), Some(VarKind::Instance(b))) =
                (scope.lookup(&from.var.name), scope.lookup(&to.var.name))
            {
                let (a, b) = (a.clone(), b.clone());
                emit(&a, &from.port, &b, &to.port, *span);
            }
        }
        _ => {}
    }
}
