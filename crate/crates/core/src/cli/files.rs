//! Line-oriented input files: `[section]` headers, `key = value` lines, `#` comments.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::eval::{InterpretedStructure, RelationTable, StructureError};
use crate::logic::{
    format_real, parse_statement, render_statement, Language, Symbol, Theory, EQUALITY,
};
use crate::measure::FiniteMeasureSpace;

/// A diagnostic tied to a file and, when known, a line.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError {
    pub file: String,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.file, self.line, self.message)
    }
}

impl std::error::Error for InputError {}

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub number: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub lines: Vec<Line>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionFile {
    pub path: String,
    pub sections: Vec<Section>,
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(head, _)| head).trim()
}

impl SectionFile {
    pub fn parse(path: &str, text: &str) -> Result<Self, InputError> {
        let mut file = SectionFile {
            path: path.to_string(),
            sections: Vec::new(),
        };
        for (i, raw) in text.lines().enumerate() {
            let number = i + 1;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim().to_string();
                if file.sections.iter().any(|s| s.name == name) {
                    return Err(file.err(number, format!("section [{name}] appears twice")));
                }
                file.sections.push(Section {
                    name,
                    line: number,
                    lines: Vec::new(),
                });
                continue;
            }
            match file.sections.last_mut() {
                Some(s) => s.lines.push(Line {
                    number,
                    text: line.to_string(),
                }),
                None => return Err(file.err(number, "content before the first [section] header")),
            }
        }
        Ok(file)
    }

    pub fn err(&self, line: usize, message: impl Into<String>) -> InputError {
        InputError {
            file: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&Section, InputError> {
        self.section(name)
            .ok_or_else(|| self.err(1, format!("missing section [{name}]")))
    }

    /// Rejects sections outside `allowed` and reports missing `required` ones.
    pub fn expect_sections(
        &self,
        kind: &str,
        allowed: &[&str],
        required: &[&str],
    ) -> Result<(), InputError> {
        if let Some(s) = self
            .sections
            .iter()
            .find(|s| !allowed.contains(&s.name.as_str()))
        {
            return Err(self.err(
                s.line,
                format!("section [{}] does not belong in a {kind} file", s.name),
            ));
        }
        for r in required {
            self.require(r)?;
        }
        Ok(())
    }

    /// `key = value` pairs of a section.
    pub fn entries<'a>(
        &self,
        section: &'a Section,
    ) -> Result<Vec<(usize, &'a str, &'a str)>, InputError> {
        section
            .lines
            .iter()
            .map(|l| {
                let (k, v) = l
                    .text
                    .split_once('=')
                    .ok_or_else(|| self.err(l.number, "expected `key = value`"))?;
                Ok((l.number, k.trim(), v.trim()))
            })
            .collect()
    }

    /// The single value of `key` in `section`, if present.
    pub fn value<'a>(
        &self,
        section: &'a Section,
        key: &str,
    ) -> Result<Option<(usize, &'a str)>, InputError> {
        let mut found = None;
        for (line, k, v) in self.entries(section)? {
            if k == key {
                if found.is_some() {
                    return Err(self.err(line, format!("`{key}` given twice")));
                }
                found = Some((line, v));
            }
        }
        Ok(found)
    }

    pub fn real(&self, line: usize, text: &str) -> Result<f64, InputError> {
        parse_real(text).ok_or_else(|| self.err(line, format!("`{text}` is not a finite number")))
    }

    pub fn reals(&self, line: usize, text: &str) -> Result<Vec<f64>, InputError> {
        split_list(text).map(|t| self.real(line, t)).collect()
    }
}

/// Decimal text to the nearest double; rejects infinities and NaN.
pub fn parse_real(text: &str) -> Option<f64> {
    text.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Items separated by whitespace or commas.
pub fn split_list(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
}

fn read(path: &str) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError {
        file: path.to_string(),
        line: 0,
        message: e.to_string(),
    })
}

pub fn load(path: &str) -> Result<SectionFile, InputError> {
    SectionFile::parse(path, &read(path)?)
}

/// Parses `name(a,b)` into the name and its arguments.
fn application(text: &str) -> Option<(&str, Vec<&str>)> {
    let (name, rest) = text.split_once('(')?;
    let args = rest.strip_suffix(')')?;
    let args = if args.trim().is_empty() {
        vec![]
    } else {
        args.split(',').map(str::trim).collect()
    };
    Some((name.trim(), args))
}

/// Reads a structure file with sections `[space]` (`point <id> <weight>`),
/// `[relations]` (`R/arity = bound`, then `R(p,q) = v` entries or `R = v ...` in table
/// order) and `[constants]` (`c = id`).
pub fn parse_structure(file: &SectionFile) -> Result<InterpretedStructure, InputError> {
    file.expect_sections(
        "structure",
        &["space", "relations", "constants"],
        &["space"],
    )?;
    let space_section = file.require("space")?;
    let mut ids = Vec::new();
    let mut weights = Vec::new();
    for l in &space_section.lines {
        let parts: Vec<&str> = l.text.split_whitespace().collect();
        match parts.as_slice() {
            ["point", id, w] => {
                if ids.iter().any(|x: &String| x == id) {
                    return Err(file.err(l.number, format!("point `{id}` listed twice")));
                }
                ids.push(id.to_string());
                weights.push(file.real(l.number, w)?);
            }
            _ => return Err(file.err(l.number, "expected `point <id> <weight>`")),
        }
    }
    let n = ids.len();
    let space = FiniteMeasureSpace::new(ids.clone(), weights)
        .map_err(|e| file.err(space_section.line, e.to_string()))?;
    let index: HashMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();

    let mut language = Language::new();
    let mut decl_line: HashMap<String, usize> = HashMap::new();
    let mut tables: BTreeMap<String, Vec<Option<f64>>> = BTreeMap::new();
    if let Some(rel) = file.section("relations") {
        let entries = file.entries(rel)?;
        for &(line, key, value) in &entries {
            if let Some((name, arity)) = key.split_once('/') {
                let arity: usize = arity
                    .trim()
                    .parse()
                    .map_err(|_| file.err(line, format!("bad arity in `{key}`")))?;
                let bound = file.real(line, value)?;
                let name = name.trim();
                language
                    .declare(Symbol::relation(name, arity, bound))
                    .map_err(|e| file.err(line, e.to_string()))?;
                let size = n
                    .checked_pow(arity as u32)
                    .filter(|s| *s <= 1 << 24)
                    .ok_or_else(|| file.err(line, format!("table for `{name}` is too large")))?;
                decl_line.insert(name.to_string(), line);
                tables.insert(name.to_string(), vec![None; size]);
            }
        }
        for &(line, key, value) in &entries {
            if key.contains('/') {
                continue;
            }
            let (name, args) = match application(key) {
                Some((name, args)) => (name, Some(args)),
                None => (key, None),
            };
            let Some((arity, _)) = language.relation(name) else {
                return Err(file.err(
                    line,
                    format!("relation `{name}` is not declared (`{name}/<arity> = <bound>`)"),
                ));
            };
            let table = tables
                .get_mut(name)
                .expect("declared relations have tables");
            match args {
                Some(args) => {
                    if args.len() != arity {
                        return Err(file.err(line, format!("`{name}` takes {arity} arguments")));
                    }
                    let mut offset = 0;
                    for a in args {
                        let p = index
                            .get(a)
                            .ok_or_else(|| file.err(line, format!("unknown point `{a}`")))?;
                        offset = offset * n + p;
                    }
                    if table[offset].is_some() {
                        return Err(file.err(line, format!("value for `{key}` given twice")));
                    }
                    table[offset] = Some(file.real(line, value)?);
                }
                None => {
                    let values = file.reals(line, value)?;
                    if values.len() != table.len() {
                        return Err(file.err(
                            line,
                            format!(
                                "`{name}` needs {} values, found {}",
                                table.len(),
                                values.len()
                            ),
                        ));
                    }
                    if table.iter().any(Option::is_some) {
                        return Err(file.err(line, format!("values for `{name}` given twice")));
                    }
                    for (slot, v) in table.iter_mut().zip(values) {
                        *slot = Some(v);
                    }
                }
            }
        }
    }

    let mut constants = BTreeMap::new();
    let mut const_line: HashMap<String, usize> = HashMap::new();
    if let Some(sec) = file.section("constants") {
        for (line, name, id) in file.entries(sec)? {
            language
                .declare(Symbol::constant(name))
                .map_err(|e| file.err(line, e.to_string()))?;
            let p = index
                .get(id)
                .ok_or_else(|| file.err(line, format!("unknown point `{id}`")))?;
            constants.insert(name.to_string(), *p);
            const_line.insert(name.to_string(), line);
        }
    }

    let mut built = BTreeMap::new();
    for (name, values) in tables {
        let (arity, _) = language.relation(&name).expect("declared");
        let line = decl_line[&name];
        if name == EQUALITY && values.iter().all(Option::is_none) {
            continue;
        }
        let missing = values.iter().position(Option::is_none);
        if let Some(k) = missing {
            let mut tuple = vec![0; arity];
            let mut rest = k;
            for slot in tuple.iter_mut().rev() {
                *slot = rest % n;
                rest /= n;
            }
            let args: Vec<&str> = tuple.iter().map(|i| ids[*i].as_str()).collect();
            return Err(file.err(
                line,
                format!("missing value for {name}({})", args.join(",")),
            ));
        }
        let values = values.into_iter().map(|v| v.expect("checked")).collect();
        let table =
            RelationTable::new(arity, n, values).map_err(|e| file.err(line, e.to_string()))?;
        built.insert(name, table);
    }

    InterpretedStructure::interpret(space, language, built, constants).map_err(|e| {
        let line = match &e {
            StructureError::BoundViolated { relation, .. }
            | StructureError::MissingEntry { relation, .. }
            | StructureError::ArityMismatch { relation, .. } => decl_line.get(relation).copied(),
            StructureError::BadEquality { .. } => decl_line.get(EQUALITY).copied(),
            StructureError::MissingConstant(c) | StructureError::BadConstant { name: c, .. } => {
                const_line.get(c).copied()
            }
            StructureError::UnknownSymbol(s) => const_line.get(s).or(decl_line.get(s)).copied(),
            StructureError::NotProbability(_) => None,
        };
        file.err(line.unwrap_or(space_section.line), e.to_string())
    })
}

pub fn load_structure(path: &str) -> Result<InterpretedStructure, InputError> {
    parse_structure(&load(path)?)
}

/// Writes `m` in the structure-file format; reading it back gives the same structure.
pub fn emit_structure(m: &InterpretedStructure) -> String {
    let space = m.space();
    let mut out = String::from("[space]\n");
    for (id, w) in space.ids().iter().zip(space.weights()) {
        out.push_str(&format!("point {id} {}\n", format_real(*w)));
    }
    out.push_str("\n[relations]\n");
    for (name, arity, bound) in m.language().relations() {
        if name == EQUALITY {
            continue;
        }
        out.push_str(&format!("{name}/{arity} = {}\n", format_real(bound)));
        let table = m.relation(name).expect("interpreted");
        let values: Vec<String> = table.values().iter().map(|v| format_real(*v)).collect();
        out.push_str(&format!("{name} = {}\n", values.join(" ")));
    }
    if m.constants().is_empty() {
        return out;
    }
    out.push_str("\n[constants]\n");
    for (name, p) in m.constants() {
        out.push_str(&format!("{name} = {}\n", space.id(*p)));
    }
    out
}

/// Reads a theory: one statement per line, optionally prefixed by `label:`.
pub fn parse_theory(path: &str, text: &str, language: &Language) -> Result<Theory, InputError> {
    let mut theory = Theory::new();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let err = |message: String| InputError {
            file: path.to_string(),
            line: number,
            message,
        };
        let (label, body) = match line.split_once(':') {
            Some((l, b)) => (Some(l.trim().to_string()), b.trim()),
            None => (None, line),
        };
        let statement = parse_statement(body, language)
            .map_err(|e| err(format!("column {}: {}", e.offset + 1, e.kind)))?;
        theory
            .push(label, statement)
            .map_err(|open| err(format!("statement is not closed: {open:?}")))?;
    }
    Ok(theory)
}

pub fn load_theory(path: &str, language: &Language) -> Result<Theory, InputError> {
    parse_theory(path, &read(path)?, language)
}

pub fn emit_theory(theory: &Theory) -> String {
    theory
        .entries()
        .iter()
        .map(|e| match &e.label {
            Some(l) => format!("{l}: {}\n", render_statement(&e.statement)),
            None => format!("{}\n", render_statement(&e.statement)),
        })
        .collect()
}
