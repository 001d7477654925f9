//! Instance files for the `construct` command.

use evalexpr::{
    build_operator_tree, ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Value,
};

use super::files::{split_list, InputError, Section, SectionFile};
use crate::engines::{uniform_grid, Combination, FiniteProbabilityAlgebra};
use crate::lattice::{HiddenWeights, LatticeFn, PositiveFunctional, TableFunctional};
use crate::measure::{PointSet, SetAlgebra};

/// Values read from an optional `[settings]` section.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Settings {
    pub epsilon: Option<f64>,
    pub separation_cap: Option<usize>,
}

fn settings(file: &SectionFile) -> Result<Settings, InputError> {
    let mut out = Settings::default();
    let Some(sec) = file.section("settings") else {
        return Ok(out);
    };
    for (line, key, value) in file.entries(sec)? {
        match key {
            "epsilon" => out.epsilon = Some(file.real(line, value)?),
            "separation_cap" => {
                out.separation_cap = Some(
                    value
                        .parse()
                        .map_err(|_| file.err(line, format!("`{value}` is not a count")))?,
                )
            }
            _ => return Err(file.err(line, format!("unknown setting `{key}`"))),
        }
    }
    Ok(out)
}

pub fn stone(file: &SectionFile) -> Result<FiniteProbabilityAlgebra, InputError> {
    file.expect_sections("stone", &["algebra"], &["algebra"])?;
    let sec = file.require("algebra")?;
    let (line, atoms) = file
        .value(sec, "atoms")?
        .ok_or_else(|| file.err(sec.line, "[algebra] needs `atoms = <mass> ...`"))?;
    if let Some((l, k, _)) = file
        .entries(sec)?
        .into_iter()
        .find(|(_, k, _)| *k != "atoms")
    {
        return Err(file.err(l, format!("unknown key `{k}` in [algebra]")));
    }
    FiniteProbabilityAlgebra::new(file.reals(line, atoms)?)
        .map_err(|e| file.err(line, e.to_string()))
}

/// The functional of a `[functional]` section, over `len` points. `fns` resolves names
/// used by a `table` functional; `1` always denotes the constant function.
fn functional(
    file: &SectionFile,
    len: usize,
    fns: &[(String, LatticeFn)],
) -> Result<Box<dyn PositiveFunctional>, InputError> {
    let sec = file.require("functional")?;
    let (kind_line, kind) = file.value(sec, "kind")?.ok_or_else(|| {
        file.err(
            sec.line,
            "[functional] needs `kind = hidden-weights` or `kind = table`",
        )
    })?;
    match kind {
        "hidden-weights" => {
            let mut weights = None;
            for (line, key, value) in file.entries(sec)? {
                match key {
                    "kind" => {}
                    "weights" if value == "uniform" => {
                        weights = Some((line, vec![1.0 / len as f64; len]))
                    }
                    "weights" => weights = Some((line, file.reals(line, value)?)),
                    _ => {
                        return Err(
                            file.err(line, format!("unknown key `{key}` for hidden-weights"))
                        )
                    }
                }
            }
            let (line, weights) =
                weights.ok_or_else(|| file.err(sec.line, "hidden-weights needs `weights`"))?;
            if weights.len() != len {
                return Err(file.err(line, format!("{} weights for {len} points", weights.len())));
            }
            let w = HiddenWeights::new(weights).map_err(|e| file.err(line, e.to_string()))?;
            Ok(Box::new(w))
        }
        "table" => {
            let mut entries = Vec::new();
            for (line, key, value) in file.entries(sec)? {
                if key == "kind" {
                    continue;
                }
                let name = key
                    .strip_prefix("I(")
                    .and_then(|k| k.strip_suffix(')'))
                    .map(str::trim)
                    .ok_or_else(|| {
                        file.err(
                            line,
                            format!("expected `I(<function>) = <value>`, found `{key}`"),
                        )
                    })?;
                let f = if name == "1" {
                    LatticeFn::constant(len, 1.0)
                } else {
                    fns.iter()
                        .find(|(n, _)| n == name)
                        .map(|(_, f)| f.clone())
                        .ok_or_else(|| file.err(line, format!("unknown function `{name}`")))?
                };
                entries.push((f, file.real(line, value)?));
            }
            let t = TableFunctional::new(len, &entries)
                .map_err(|e| file.err(sec.line, e.to_string()))?;
            Ok(Box::new(t))
        }
        other => Err(file.err(kind_line, format!("unknown functional kind `{other}`"))),
    }
}

pub struct DaniellInput {
    pub ids: Vec<String>,
    pub generators: Vec<(String, LatticeFn)>,
    pub combinations: Vec<(String, Combination)>,
    pub functional: Box<dyn PositiveFunctional>,
    pub settings: Settings,
}

fn combination(file: &SectionFile, line: usize, text: &str) -> Result<Combination, InputError> {
    let bad = || {
        file.err(
            line,
            format!("expected `f + g`, `r * f` or `max(f, g)`, found `{text}`"),
        )
    };
    if let Some(args) = text.strip_prefix("max(").and_then(|t| t.strip_suffix(')')) {
        let (a, b) = args.split_once(',').ok_or_else(bad)?;
        return Ok(Combination::Join(a.trim().into(), b.trim().into()));
    }
    if let Some((a, b)) = text.split_once('+') {
        return Ok(Combination::Sum(a.trim().into(), b.trim().into()));
    }
    if let Some((r, f)) = text.split_once('*') {
        return Ok(Combination::Scale(file.real(line, r)?, f.trim().into()));
    }
    Err(bad())
}

fn generator_values(
    file: &SectionFile,
    sec: &Section,
    len: usize,
) -> Result<Vec<(String, LatticeFn)>, InputError> {
    file.entries(sec)?
        .into_iter()
        .map(|(line, name, value)| {
            let values = file.reals(line, value)?;
            if values.len() != len {
                return Err(file.err(
                    line,
                    format!("`{name}` has {} values for {len} points", values.len()),
                ));
            }
            Ok((name.to_string(), LatticeFn::new(values)))
        })
        .collect()
}

pub fn daniell(file: &SectionFile, max_points: usize) -> Result<DaniellInput, InputError> {
    file.expect_sections(
        "daniell",
        &[
            "settings",
            "domain",
            "generators",
            "combinations",
            "functional",
        ],
        &["domain", "generators", "functional"],
    )?;
    let settings = settings(file)?;
    let dom = file.require("domain")?;
    let mut ids = None;
    for (line, key, value) in file.entries(dom)? {
        let next: Vec<String> = match key {
            "points" => split_list(value).map(String::from).collect(),
            "count" => {
                let n: usize = value
                    .parse()
                    .map_err(|_| file.err(line, format!("`{value}` is not a count")))?;
                (0..n).map(|i| format!("x{i}")).collect()
            }
            _ => {
                return Err(file.err(
                    line,
                    format!("a daniell [domain] takes `points` or `count`, not `{key}`"),
                ))
            }
        };
        if ids.replace((line, next)).is_some() {
            return Err(file.err(line, "the domain is given twice"));
        }
    }
    let (line, ids) =
        ids.ok_or_else(|| file.err(dom.line, "[domain] needs `points` or `count`"))?;
    if ids.len() > max_points {
        return Err(file.err(
            line,
            format!("{} points exceed --max-points {max_points}", ids.len()),
        ));
    }
    let generators = generator_values(file, file.require("generators")?, ids.len())?;
    let mut combinations = Vec::new();
    if let Some(sec) = file.section("combinations") {
        for (line, name, text) in file.entries(sec)? {
            combinations.push((name.to_string(), combination(file, line, text)?));
        }
    }
    let functional = functional(file, ids.len(), &generators)?;
    Ok(DaniellInput {
        ids,
        generators,
        combinations,
        functional,
        settings,
    })
}

pub struct RieszInput {
    pub grid: Vec<f64>,
    pub generators: Vec<(String, LatticeFn)>,
    /// Source expression of each generator.
    pub expressions: Vec<(String, String)>,
    pub functional: Box<dyn PositiveFunctional>,
    pub settings: Settings,
}

/// Samples an expression in `x` on the grid.
fn sample(
    file: &SectionFile,
    line: usize,
    expr: &str,
    grid: &[f64],
) -> Result<Vec<f64>, InputError> {
    let tree = build_operator_tree::<DefaultNumericTypes>(expr)
        .map_err(|e| file.err(line, e.to_string()))?;
    let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
    grid.iter()
        .map(|t| {
            ctx.set_value("x".into(), Value::Float(*t))
                .map_err(|e| file.err(line, e.to_string()))?;
            let v = tree
                .eval_number_with_context(&ctx)
                .map_err(|e| file.err(line, format!("at x = {t}: {e}")))?;
            if !v.is_finite() {
                return Err(file.err(line, format!("`{expr}` is not finite at x = {t}")));
            }
            Ok(v)
        })
        .collect()
}

pub fn riesz(file: &SectionFile, max_points: usize) -> Result<RieszInput, InputError> {
    file.expect_sections(
        "riesz",
        &["settings", "domain", "generators", "functional"],
        &["domain", "generators", "functional"],
    )?;
    let settings = settings(file)?;
    let dom = file.require("domain")?;
    let (mut interval, mut points) = (None, None);
    for (line, key, value) in file.entries(dom)? {
        match key {
            "interval" => match file.reals(line, value)?.as_slice() {
                [a, b] if a < b => interval = Some((*a, *b)),
                _ => return Err(file.err(line, "expected `interval = <lo> <hi>` with lo < hi")),
            },
            "points" => {
                let n: usize = value
                    .parse()
                    .map_err(|_| file.err(line, format!("`{value}` is not a count")))?;
                if n < 2 || n > max_points {
                    return Err(file.err(line, format!("points must be in 2..={max_points}")));
                }
                points = Some(n);
            }
            _ => {
                return Err(file.err(
                    line,
                    format!("a riesz [domain] takes `interval` and `points`, not `{key}`"),
                ))
            }
        }
    }
    let ((lo, hi), n) = interval
        .zip(points)
        .ok_or_else(|| file.err(dom.line, "[domain] needs `interval` and `points`"))?;
    let grid = uniform_grid(lo, hi, n);
    let mut generators = Vec::new();
    let mut expressions = Vec::new();
    for (line, name, expr) in file.entries(file.require("generators")?)? {
        generators.push((
            name.to_string(),
            LatticeFn::new(sample(file, line, expr, &grid)?),
        ));
        expressions.push((name.to_string(), expr.to_string()));
    }
    let functional = functional(file, n, &generators)?;
    Ok(RieszInput {
        grid,
        generators,
        expressions,
        functional,
        settings,
    })
}

pub struct PushdownInput {
    pub ids: Vec<String>,
    pub weights: Vec<f64>,
    pub algebra: SetAlgebra,
    pub subset: PointSet,
    pub generators: Vec<(String, LatticeFn)>,
}

pub fn pushdown(file: &SectionFile, max_points: usize) -> Result<PushdownInput, InputError> {
    file.expect_sections(
        "pushdown",
        &["space", "algebra", "subset", "generators"],
        &["space", "algebra", "subset"],
    )?;
    let space = file.require("space")?;
    let mut ids: Vec<String> = Vec::new();
    let mut weights = Vec::new();
    for l in &space.lines {
        match l.text.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["point", id, w] => {
                if ids.iter().any(|x| x == id) {
                    return Err(file.err(l.number, format!("point `{id}` listed twice")));
                }
                ids.push(id.to_string());
                weights.push(file.real(l.number, w)?);
            }
            _ => return Err(file.err(l.number, "expected `point <id> <weight>`")),
        }
    }
    let len = ids.len();
    if len > max_points {
        return Err(file.err(
            space.line,
            format!("{len} points exceed --max-points {max_points}"),
        ));
    }
    let set = |line: usize, text: &str| -> Result<PointSet, InputError> {
        let mut s = PointSet::empty(len);
        for id in split_list(text) {
            let i = ids
                .iter()
                .position(|x| x == id)
                .ok_or_else(|| file.err(line, format!("unknown point `{id}`")))?;
            s.insert(i);
        }
        Ok(s)
    };
    let alg = file.require("algebra")?;
    let mut powerset = false;
    let mut gens = Vec::new();
    for (line, key, value) in file.entries(alg)? {
        match (key, value) {
            ("powerset", "true") => powerset = true,
            ("generator", v) => gens.push(set(line, v)?),
            _ => return Err(file.err(line, "expected `powerset = true` or `generator = <ids>`")),
        }
    }
    if powerset && !gens.is_empty() {
        return Err(file.err(alg.line, "give either `powerset` or generators, not both"));
    }
    let algebra = if powerset {
        SetAlgebra::powerset(len)
    } else {
        SetAlgebra::generated(&PointSet::full(len), &gens)
            .map_err(|e| file.err(alg.line, e.to_string()))?
    };
    let sub = file.require("subset")?;
    let (line, points) = file
        .value(sub, "points")?
        .ok_or_else(|| file.err(sub.line, "[subset] needs `points = <ids>`"))?;
    let subset = set(line, points)?;
    let generators = match file.section("generators") {
        Some(sec) => generator_values(file, sec, len)?,
        None => Vec::new(),
    };
    Ok(PushdownInput {
        ids,
        weights,
        algebra,
        subset,
        generators,
    })
}
