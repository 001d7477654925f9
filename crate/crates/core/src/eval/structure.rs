use std::collections::{BTreeMap, HashMap};

use crate::logic::{Formula, Language, Term, EQUALITY};
use crate::measure::{FiniteMeasureSpace, TOLERANCE};

/// Values of a relation on every tuple of points, row-major with the first argument
/// varying slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationTable {
    arity: usize,
    points: usize,
    values: Vec<f64>,
}

impl RelationTable {
    pub fn new(arity: usize, points: usize, values: Vec<f64>) -> Result<Self, StructureError> {
        let expected = points.checked_pow(arity as u32).unwrap_or(usize::MAX);
        if values.len() != expected {
            return Err(StructureError::MissingEntry {
                relation: String::new(),
                detail: format!("expected {expected} values, found {}", values.len()),
            });
        }
        Ok(RelationTable {
            arity,
            points,
            values,
        })
    }

    pub fn from_fn(arity: usize, points: usize, f: impl Fn(&[usize]) -> f64) -> Self {
        let count = points.pow(arity as u32);
        let mut tuple = vec![0usize; arity];
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            values.push(f(&tuple));
            for slot in tuple.iter_mut().rev() {
                *slot += 1;
                if *slot < points {
                    break;
                }
                *slot = 0;
            }
        }
        RelationTable {
            arity,
            points,
            values,
        }
    }

    /// A unary table from its values.
    pub fn unary(values: Vec<f64>) -> Self {
        let points = values.len();
        RelationTable {
            arity: 1,
            points,
            values,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn offset(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.points + a)
    }

    pub fn get(&self, args: &[usize]) -> f64 {
        self.values[self.offset(args)]
    }

    /// Tuples in table order paired with their values.
    pub fn tuples(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.values.iter().enumerate().map(move |(mut k, &v)| {
            let mut tuple = vec![0usize; self.arity];
            for slot in tuple.iter_mut().rev() {
                *slot = k % self.points;
                k /= self.points;
            }
            (tuple, v)
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StructureError {
    #[error("relation `{relation}` has value {value} at {args:?}, exceeding its bound {bound}")]
    BoundViolated {
        relation: String,
        args: Vec<usize>,
        value: f64,
        bound: f64,
    },
    #[error("relation `{relation}` is incomplete: {detail}")]
    MissingEntry { relation: String, detail: String },
    #[error("total weight {0} is not 1")]
    NotProbability(f64),
    #[error("equality must be 1 on the diagonal and 0 elsewhere; found {value} at ({p}, {q})")]
    BadEquality { p: usize, q: usize, value: f64 },
    #[error("`{0}` is not declared as a relation")]
    UnknownSymbol(String),
    #[error("no interpretation for constant `{0}`")]
    MissingConstant(String),
    #[error("constant `{name}` refers to point index {point} outside the space")]
    BadConstant { name: String, point: usize },
    #[error("relation `{relation}` has arity {declared} but its table has arity {table}")]
    ArityMismatch {
        relation: String,
        declared: usize,
        table: usize,
    },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("variable `{0}` is not assigned")]
    UnassignedVariable(String),
    #[error("relation `{0}` is not interpreted")]
    UnknownRelation(String),
    #[error("constant `{0}` is not interpreted")]
    UnknownConstant(String),
    #[error("relation `{name}` applied to {found} arguments, expected {expected}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("statement is not closed: free variables {0:?}")]
    OpenStatement(Vec<String>),
    #[error("negative approximation parameter {0}")]
    NegativeEpsilon(f64),
}

/// A finite probability space with interpretations of relation and constant symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpretedStructure {
    space: FiniteMeasureSpace,
    language: Language,
    relations: BTreeMap<String, RelationTable>,
    constants: BTreeMap<String, usize>,
}

impl InterpretedStructure {
    /// Validates bounds, equality and total measure. A missing table for `e` is filled
    /// with the diagonal indicator.
    pub fn interpret(
        space: FiniteMeasureSpace,
        language: Language,
        tables: BTreeMap<String, RelationTable>,
        constants: BTreeMap<String, usize>,
    ) -> Result<Self, StructureError> {
        let n = space.len();
        let total = space.total();
        if (total - 1.0).abs() > TOLERANCE {
            return Err(StructureError::NotProbability(total));
        }
        let mut relations = BTreeMap::new();
        for (name, table) in tables {
            let Some((arity, bound)) = language.relation(&name) else {
                return Err(StructureError::UnknownSymbol(name));
            };
            if table.arity != arity {
                return Err(StructureError::ArityMismatch {
                    relation: name,
                    declared: arity,
                    table: table.arity,
                });
            }
            if table.points != n {
                return Err(StructureError::MissingEntry {
                    relation: name,
                    detail: format!("table built for {} points, space has {n}", table.points),
                });
            }
            for (args, value) in table.tuples() {
                if !value.is_finite() || value.abs() > bound {
                    return Err(StructureError::BoundViolated {
                        relation: name,
                        args,
                        value,
                        bound,
                    });
                }
            }
            relations.insert(name, table);
        }
        match relations.get(EQUALITY) {
            Some(eq) => {
                for (args, value) in eq.tuples() {
                    let want = if args[0] == args[1] { 1.0 } else { 0.0 };
                    if value != want {
                        return Err(StructureError::BadEquality {
                            p: args[0],
                            q: args[1],
                            value,
                        });
                    }
                }
            }
            None => {
                relations.insert(
                    EQUALITY.to_string(),
                    RelationTable::from_fn(2, n, |t| if t[0] == t[1] { 1.0 } else { 0.0 }),
                );
            }
        }
        for (name, _, _) in language.relations() {
            if !relations.contains_key(name) {
                return Err(StructureError::MissingEntry {
                    relation: name.to_string(),
                    detail: "no table given".into(),
                });
            }
        }
        for name in language.constants() {
            match constants.get(name) {
                None => return Err(StructureError::MissingConstant(name.to_string())),
                Some(&p) if p >= n => {
                    return Err(StructureError::BadConstant {
                        name: name.to_string(),
                        point: p,
                    })
                }
                Some(_) => {}
            }
        }
        if let Some(extra) = constants.keys().find(|c| !language.is_constant(c)) {
            return Err(StructureError::UnknownSymbol(extra.clone()));
        }
        Ok(InterpretedStructure {
            space,
            language,
            relations,
            constants,
        })
    }

    pub fn space(&self) -> &FiniteMeasureSpace {
        &self.space
    }

    pub fn language(&self) -> &Language {
        &self.language
    }

    pub fn relation(&self, name: &str) -> Option<&RelationTable> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> &BTreeMap<String, RelationTable> {
        &self.relations
    }

    pub fn constants(&self) -> &BTreeMap<String, usize> {
        &self.constants
    }

    /// Evaluates `f` under `assignment` (variable name to point index).
    pub fn eval(&self, f: &Formula, assignment: &HashMap<String, usize>) -> Result<f64, EvalError> {
        let mut env: Vec<(&str, usize)> =
            assignment.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        self.eval_in(f, &mut env)
    }

    /// Evaluates a formula without free variables.
    pub fn eval_closed(&self, f: &Formula) -> Result<f64, EvalError> {
        self.eval_in(f, &mut Vec::new())
    }

    fn lookup(&self, t: &Term, env: &[(&str, usize)]) -> Result<usize, EvalError> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(name, _)| name == v)
                .map(|(_, p)| *p)
                .ok_or_else(|| EvalError::UnassignedVariable(v.clone())),
            Term::Const(c) => self
                .constants
                .get(c)
                .copied()
                .ok_or_else(|| EvalError::UnknownConstant(c.clone())),
        }
    }

    fn eval_in<'f>(
        &self,
        f: &'f Formula,
        env: &mut Vec<(&'f str, usize)>,
    ) -> Result<f64, EvalError> {
        Ok(match f {
            Formula::Real(r) => *r,
            Formula::Rel(name, args) => {
                let table = self
                    .relations
                    .get(name)
                    .ok_or_else(|| EvalError::UnknownRelation(name.clone()))?;
                if args.len() != table.arity {
                    return Err(EvalError::Arity {
                        name: name.clone(),
                        expected: table.arity,
                        found: args.len(),
                    });
                }
                let mut offset = 0;
                for t in args {
                    offset = offset * table.points + self.lookup(t, env)?;
                }
                table.values[offset]
            }
            Formula::Abs(g) => self.eval_in(g, env)?.abs(),
            Formula::Add(g, h) => self.eval_in(g, env)? + self.eval_in(h, env)?,
            Formula::Mul(g, h) => self.eval_in(g, env)? * self.eval_in(h, env)?,
            Formula::Integral { var, body } => {
                let mut total = 0.0;
                for (p, w) in self.space.weights().iter().enumerate() {
                    env.push((var.as_str(), p));
                    let v = self.eval_in(body, env);
                    env.pop();
                    total += v? * w;
                }
                total
            }
        })
    }
}
