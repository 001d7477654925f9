use std::collections::BTreeMap;
use std::fmt;

/// Name of the distinguished equality relation.
pub const EQUALITY: &str = "e";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymbolKind {
    /// A real-valued relation of the given arity, bounded in absolute value by `bound`.
    Relation {
        arity: usize,
        bound: f64,
    },
    Constant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    pub name: String,
    pub kind: SymbolKind,
}

impl Symbol {
    pub fn relation(name: impl Into<String>, arity: usize, bound: f64) -> Self {
        Symbol {
            name: name.into(),
            kind: SymbolKind::Relation { arity, bound },
        }
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Symbol {
            name: name.into(),
            kind: SymbolKind::Constant,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LanguageError {
    #[error("symbol `{0}` declared twice")]
    Duplicate(String),
    #[error("relation `{0}` must have arity at least 1")]
    ZeroArity(String),
    #[error("relation `{name}` has invalid universal bound {bound}")]
    BadBound { name: String, bound: f64 },
    #[error("the equality symbol `e` is fixed with arity 2 and bound 1")]
    EqualityRedeclared,
    #[error("`{0}` is not a valid identifier")]
    BadIdentifier(String),
}

/// A relational language. The equality symbol `e` is always present.
#[derive(Debug, Clone, PartialEq)]
pub struct Language {
    symbols: BTreeMap<String, SymbolKind>,
}

impl Default for Language {
    fn default() -> Self {
        Self::new()
    }
}

impl Language {
    pub fn new() -> Self {
        let mut symbols = BTreeMap::new();
        symbols.insert(
            EQUALITY.to_string(),
            SymbolKind::Relation {
                arity: 2,
                bound: 1.0,
            },
        );
        Language { symbols }
    }

    pub fn with_symbols(symbols: impl IntoIterator<Item = Symbol>) -> Result<Self, LanguageError> {
        let mut language = Language::new();
        for symbol in symbols {
            language.declare(symbol)?;
        }
        Ok(language)
    }

    pub fn declare(&mut self, symbol: Symbol) -> Result<(), LanguageError> {
        if !is_identifier(&symbol.name) || is_reserved(&symbol.name) {
            return Err(LanguageError::BadIdentifier(symbol.name));
        }
        if symbol.name == EQUALITY {
            return match symbol.kind {
                SymbolKind::Relation { arity: 2, bound } if bound == 1.0 => Ok(()),
                _ => Err(LanguageError::EqualityRedeclared),
            };
        }
        if let SymbolKind::Relation { arity, bound } = symbol.kind {
            if arity == 0 {
                return Err(LanguageError::ZeroArity(symbol.name));
            }
            if !(bound.is_finite() && bound >= 0.0) {
                return Err(LanguageError::BadBound {
                    name: symbol.name,
                    bound,
                });
            }
        }
        if self.symbols.contains_key(&symbol.name) {
            return Err(LanguageError::Duplicate(symbol.name));
        }
        self.symbols.insert(symbol.name, symbol.kind);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<SymbolKind> {
        self.symbols.get(name).copied()
    }

    pub fn relation(&self, name: &str) -> Option<(usize, f64)> {
        match self.symbols.get(name) {
            Some(SymbolKind::Relation { arity, bound }) => Some((*arity, *bound)),
            _ => None,
        }
    }

    pub fn is_constant(&self, name: &str) -> bool {
        matches!(self.symbols.get(name), Some(SymbolKind::Constant))
    }

    /// Symbols in name order.
    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.symbols.iter().map(|(name, kind)| Symbol {
            name: name.clone(),
            kind: *kind,
        })
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize, f64)> + '_ {
        self.symbols.iter().filter_map(|(name, kind)| match kind {
            SymbolKind::Relation { arity, bound } => Some((name.as_str(), *arity, *bound)),
            SymbolKind::Constant => None,
        })
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> + '_ {
        self.symbols.iter().filter_map(|(name, kind)| match kind {
            SymbolKind::Constant => Some(name.as_str()),
            SymbolKind::Relation { .. } => None,
        })
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn is_reserved(s: &str) -> bool {
    matches!(s, "max" | "min" | "int")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }
}

/// Integration-logic formulas. Only the core constructors exist here; subtraction,
/// `max`, `min` and division by literals are rewritten into these by the parser.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Rel(String, Vec<Term>),
    Real(f64),
    Abs(Box<Formula>),
    Add(Box<Formula>, Box<Formula>),
    Mul(Box<Formula>, Box<Formula>),
    Integral { var: String, body: Box<Formula> },
}

impl Formula {
    pub fn rel(name: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Rel(name.into(), args)
    }

    /// Unary relation applied to a variable, the common case in the engines.
    pub fn unary(name: impl Into<String>, var: &str) -> Self {
        Formula::Rel(name.into(), vec![Term::var(var)])
    }

    pub fn real(r: f64) -> Self {
        Formula::Real(r)
    }

    pub fn abs(f: Formula) -> Self {
        Formula::Abs(Box::new(f))
    }

    pub fn add(f: Formula, g: Formula) -> Self {
        Formula::Add(Box::new(f), Box::new(g))
    }

    pub fn mul(f: Formula, g: Formula) -> Self {
        Formula::Mul(Box::new(f), Box::new(g))
    }

    pub fn integral(var: impl Into<String>, body: Formula) -> Self {
        Formula::Integral {
            var: var.into(),
            body: Box::new(body),
        }
    }

    /// `-f`, spelled as `-1 * f`.
    pub fn neg(f: Formula) -> Self {
        Formula::mul(Formula::Real(-1.0), f)
    }

    /// `f - g`, spelled as `f + -1 * g`.
    pub fn sub(f: Formula, g: Formula) -> Self {
        Formula::add(f, Formula::neg(g))
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Rel(..) | Formula::Real(_) => 1,
            Formula::Abs(f) => 1 + f.depth(),
            Formula::Integral { body, .. } => 1 + body.depth(),
            Formula::Add(f, g) | Formula::Mul(f, g) => 1 + f.depth().max(g.depth()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    AtLeast,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Comparison::Equal => f.write_str("=="),
            Comparison::AtLeast => f.write_str(">="),
        }
    }
}

/// `formula == threshold` or `formula >= threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub formula: Formula,
    pub comparison: Comparison,
    pub threshold: f64,
}

impl Statement {
    pub fn equal(formula: Formula, threshold: f64) -> Self {
        Statement {
            formula,
            comparison: Comparison::Equal,
            threshold,
        }
    }

    pub fn at_least(formula: Formula, threshold: f64) -> Self {
        Statement {
            formula,
            comparison: Comparison::AtLeast,
            threshold,
        }
    }

    pub fn is_closed(&self) -> bool {
        super::is_closed(&self.formula)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryEntry {
    pub label: Option<String>,
    pub statement: Statement,
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("statement {index} is not closed: free variables {free:?}")]
pub struct OpenStatement {
    pub index: usize,
    pub free: Vec<String>,
}

/// An ordered list of closed statements.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Theory {
    entries: Vec<TheoryEntry>,
}

impl Theory {
    pub fn new() -> Self {
        Theory::default()
    }

    pub fn push(
        &mut self,
        label: Option<String>,
        statement: Statement,
    ) -> Result<(), OpenStatement> {
        let free = super::free_vars(&statement.formula);
        if !free.is_empty() {
            return Err(OpenStatement {
                index: self.entries.len(),
                free,
            });
        }
        self.entries.push(TheoryEntry { label, statement });
        Ok(())
    }

    /// Appends unless a structurally identical statement is already present.
    pub fn push_unique(
        &mut self,
        label: Option<String>,
        statement: Statement,
    ) -> Result<bool, OpenStatement> {
        if self.entries.iter().any(|e| e.statement == statement) {
            return Ok(false);
        }
        self.push(label, statement).map(|_| true)
    }

    pub fn entries(&self) -> &[TheoryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
