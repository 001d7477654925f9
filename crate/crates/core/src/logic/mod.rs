//! Formula language: syntax tree, parser, printer and structural utilities.

mod parse;
mod render;
mod syntax;

pub use parse::{parse_formula, parse_statement, ParseError, ParseErrorKind};
pub use render::{format_real, render_formula, render_statement};
pub use syntax::{
    Comparison, Formula, Language, LanguageError, OpenStatement, Statement, Symbol, SymbolKind,
    Term, Theory, TheoryEntry, EQUALITY,
};

pub(crate) use syntax::is_identifier;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeKind {
    Max,
    Min,
}

/// Free variables in order of first occurrence.
pub fn free_vars(f: &Formula) -> Vec<String> {
    fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match f {
            Formula::Rel(_, args) => {
                for t in args {
                    if let Term::Var(v) = t {
                        if !bound.contains(v) && !out.contains(v) {
                            out.push(v.clone());
                        }
                    }
                }
            }
            Formula::Real(_) => {}
            Formula::Abs(g) => walk(g, bound, out),
            Formula::Add(g, h) | Formula::Mul(g, h) => {
                walk(g, bound, out);
                walk(h, bound, out);
            }
            Formula::Integral { var, body } => {
                bound.push(var.clone());
                walk(body, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(f, &mut Vec::new(), &mut out);
    out
}

pub fn is_closed(f: &Formula) -> bool {
    free_vars(f).is_empty()
}

/// `max(f, g) = (f + g + |f - g|) / 2` and `min(f, g) = (f + g - |f - g|) / 2`,
/// built from the core constructors only.
pub fn derive_lattice(kind: LatticeKind, f: Formula, g: Formula) -> Formula {
    let diff = Formula::abs(Formula::sub(f.clone(), g.clone()));
    let spread = match kind {
        LatticeKind::Max => diff,
        LatticeKind::Min => Formula::neg(diff),
    };
    Formula::mul(Formula::Real(0.5), Formula::add(Formula::add(f, g), spread))
}

/// A bound `B` with `|f| <= B` in every probability structure respecting the
/// declared relation bounds. Relations missing from `language` count as unbounded.
pub fn formula_bound(f: &Formula, language: &Language) -> f64 {
    match f {
        Formula::Rel(name, _) => language
            .relation(name)
            .map_or(f64::INFINITY, |(_, bound)| bound),
        Formula::Real(r) => r.abs(),
        Formula::Abs(g) | Formula::Integral { body: g, .. } => formula_bound(g, language),
        Formula::Add(g, h) => formula_bound(g, language) + formula_bound(h, language),
        Formula::Mul(g, h) => formula_bound(g, language) * formula_bound(h, language),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lang() -> Language {
        Language::with_symbols([
            Symbol::relation("R_f", 1, 3.0),
            Symbol::relation("R_g", 1, 2.0),
            Symbol::relation("R_h", 1, 1.0),
            Symbol::constant("c_a"),
        ])
        .unwrap()
    }

    #[test]
    fn free_variables_in_first_occurrence_order() {
        let f = parse_formula("int[y](R_f(x)+R_g(y)) + |2*R_h(z)|", &lang()).unwrap();
        assert_eq!(free_vars(&f), vec!["x".to_string(), "z".to_string()]);
        assert!(free_vars(&Formula::Real(3.0)).is_empty());
        let e = Formula::rel(EQUALITY, vec![Term::var("x"), Term::var("x")]);
        assert_eq!(free_vars(&e), vec!["x".to_string()]);
    }

    #[test]
    fn closedness() {
        let l = lang();
        assert!(is_closed(&parse_formula("int[x](1)", &l).unwrap()));
        assert!(!is_closed(&parse_formula("R_f(x)", &l).unwrap()));
        assert!(is_closed(
            &parse_formula("int[x](R_f(x)*R_f(c_a))", &l).unwrap()
        ));
    }

    #[test]
    fn bounds() {
        let l = lang();
        let b = |s: &str| formula_bound(&parse_formula(s, &l).unwrap(), &l);
        assert_eq!(b("R_f(x)"), 3.0);
        assert_eq!(b("R_f(x) + R_g(x)"), 5.0);
        assert_eq!(b("int[y](R_f(y))"), 3.0);
        assert_eq!(b("-2*|R_h(x)|"), 2.0);
        assert_eq!(b("e(x, c_a)"), 1.0);
    }

    #[test]
    fn min_structure() {
        let f = Formula::unary("R_f", "x");
        let g = Formula::unary("R_g", "x");
        let m = derive_lattice(LatticeKind::Min, f.clone(), g.clone());
        let expected = Formula::mul(
            Formula::Real(0.5),
            Formula::add(
                Formula::add(f.clone(), g.clone()),
                Formula::mul(
                    Formula::Real(-1.0),
                    Formula::abs(Formula::add(f, Formula::mul(Formula::Real(-1.0), g))),
                ),
            ),
        );
        assert_eq!(m, expected);
    }
}
