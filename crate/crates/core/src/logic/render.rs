//! Canonical printing. The output re-parses to a structurally identical tree.

use std::fmt::{self, Write};

use super::syntax::{Formula, Statement, Term};

/// Shortest decimal that parses back to `r` exactly.
pub fn format_real(r: f64) -> String {
    let a = r.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

const SUM: u8 = 0;
const PRODUCT: u8 = 1;
const ATOM: u8 = 2;

fn negated(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::Mul(a, b) if matches!(**a, Formula::Real(r) if r == -1.0) => Some(b),
        _ => None,
    }
}

fn write_formula(out: &mut String, f: &Formula, level: u8) -> fmt::Result {
    match f {
        Formula::Real(r) => out.push_str(&format_real(*r)),
        Formula::Rel(name, args) => {
            out.push_str(name);
            out.push('(');
            for (i, t) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(match t {
                    Term::Var(n) | Term::Const(n) => n,
                });
            }
            out.push(')');
        }
        Formula::Abs(g) => {
            out.push('|');
            write_formula(out, g, SUM)?;
            out.push('|');
        }
        Formula::Integral { var, body } => {
            write!(out, "int[{var}](")?;
            write_formula(out, body, SUM)?;
            out.push(')');
        }
        Formula::Add(g, h) => {
            let paren = level > SUM;
            if paren {
                out.push('(');
            }
            write_formula(out, g, SUM)?;
            match negated(h) {
                Some(inner) => {
                    out.push_str(" - ");
                    write_formula(out, inner, PRODUCT)?;
                }
                None => {
                    out.push_str(" + ");
                    write_formula(out, h, PRODUCT)?;
                }
            }
            if paren {
                out.push(')');
            }
        }
        Formula::Mul(g, h) => {
            let paren = level > PRODUCT;
            if paren {
                out.push('(');
            }
            write_formula(out, g, PRODUCT)?;
            out.push('*');
            write_formula(out, h, ATOM)?;
            if paren {
                out.push(')');
            }
        }
    }
    Ok(())
}

pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, SUM).expect("writing to a String cannot fail");
    out
}

pub fn render_statement(s: &Statement) -> String {
    format!(
        "{} {} {}",
        render_formula(&s.formula),
        s.comparison,
        format_real(s.threshold)
    )
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self))
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_statement(self))
    }
}
