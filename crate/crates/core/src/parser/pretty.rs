//! Canonical source form of goals and constraint trees.

use std::fmt::{self, Write};

use crate::model::{ConstraintExpr, ConstraintSet, Domain, Goal};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Clause,
    Conjunction,
    Unary,
}

fn write_expr(out: &mut String, e: &ConstraintExpr, level: Level, indent: usize) -> fmt::Result {
    match e {
        ConstraintExpr::Or(items) => {
            if level > Level::Clause {
                out.push('(');
            }
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(" or ");
                }
                write_expr(out, item, Level::Conjunction, indent)?;
            }
            if level > Level::Clause {
                out.push(')');
            }
        }
        ConstraintExpr::And(items) => {
            if level > Level::Conjunction {
                out.push('(');
            }
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(" and ");
                }
                write_expr(out, item, Level::Unary, indent)?;
            }
            if level > Level::Conjunction {
                out.push(')');
            }
        }
        ConstraintExpr::Not(inner) => {
            out.push_str("not ");
            write_expr(out, inner, Level::Unary, indent)?;
        }
        ConstraintExpr::Quantified {
            quantifier,
            domain,
            vars,
            scope,
            body,
            ..
        } => {
            let domain = match domain {
                Domain::Hosts => "host",
                Domain::Instances(t) => t.as_str(),
            };
            write!(out, "{} {} {} in {} (", quantifier.keyword(), domain, vars.join(", "), scope)?;
            for b in body {
                out.push('\n');
                pad(out, indent + 1);
                write_expr(out, b, Level::Clause, indent + 1)?;
            }
            out.push('\n');
            pad(out, indent);
            out.push(')');
        }
        ConstraintExpr::Compare { lhs, op, rhs, .. } => {
            write!(out, "{lhs} {} {rhs}", op.symbol())?;
        }
        ConstraintExpr::ConnectsTo { from, to, .. } => {
            write!(out, "{}.{} connectsto {}.{}", from.var.name, from.port, to.var.name, to.port)?;
        }
        ConstraintExpr::Reachable { from, to, .. } => {
            write!(out, "reachable({}, {})", from.name, to.name)?;
        }
        ConstraintExpr::SameEntity {
            lhs, rhs, equal, ..
        } => {
            write!(out, "{} {} {}", lhs.name, if *equal { "=" } else { "!=" }, rhs.name)?;
        }
    }
    Ok(())
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("    ");
    }
}

impl fmt::Display for ConstraintExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_expr(&mut out, self, Level::Clause, 0)?;
        f.write_str(&out)
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        writeln!(out, "constraintset {} = constraintset {{", self.name)?;
        for c in &self.clauses {
            pad(&mut out, 1);
            write_expr(&mut out, &c.expr, Level::Clause, 1)?;
            out.push('\n');
        }
        out.push('}');
        f.write_str(&out)
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "components {{")?;
        for t in &self.component_types {
            write!(f, "    {}", t.name)?;
            if !t.ports.is_empty() {
                let ports: Vec<String> = t
                    .ports
                    .iter()
                    .map(|p| format!("{}: {}", p.name, p.direction.keyword()))
                    .collect();
                write!(f, " {{ {} }}", ports.join(", "))?;
            }
            writeln!(f)?;
        }
        writeln!(f, "}}")?;
        let hosts: Vec<&str> = self.hosts.iter().map(|h| h.id.as_str()).collect();
        if hosts.is_empty() {
            writeln!(f, "hosts {{ }}")?;
        } else {
            writeln!(f, "hosts {{ {} }}", hosts.join(", "))?;
        }
        writeln!(f, "{}", self.constraints)
    }
}
