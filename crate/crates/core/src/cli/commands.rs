use std::path::Path;

use super::files::{emit_structure, emit_theory, load, load_structure, load_theory, split_list};
use super::instances;
use super::{CliError, CombineArg, Kind, LemmaArgs, LemmaName, Outcome, WorkbenchConfig};
use crate::engines::{
    daniell_model, id_list, pushdown_check, real_list, riesz_model, stone_isomorphism_check,
    stone_model, stone_theory, DaniellInstance, DaniellModel, KvWriter, PushdownInstance,
    RieszInstance,
};
use crate::eval::{check_theory, CheckConfig, CheckReport, InterpretedStructure, RelationTable};
use crate::lattice::{
    classify_pair, cover_violations, find_inessential, is_almost_special, is_inessential,
    is_special, refine_cover, stabilization_index, star_combine, Combine, HiddenWeights,
    IndicatorSeq, Interval, LatticeFn, Mode, PairKind,
};
use crate::logic::{format_real, parse_statement, Language, Symbol, Theory};
use crate::measure::{FiniteMeasureSpace, PointSet, TOLERANCE};

/// Epsilon for constructions when neither the flag nor the instance sets one.
pub const DEFAULT_EPSILON: f64 = 0.01;
/// Largest index scanned by the brute-force stabilization check of `lemma tendtochar`.
const BRUTE_FORCE_CAP: u64 = 100_000;

type Result<T> = std::result::Result<T, CliError>;

fn engine<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Engine(e.to_string())
}

fn outcome(passed: bool) -> Outcome {
    if passed {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn emit(
    config: &WorkbenchConfig,
    structure: Option<&InterpretedStructure>,
    theory: &Theory,
) -> Result<()> {
    if let Some(path) = &config.emit_structure {
        let m = structure
            .ok_or_else(|| CliError::Engine("no model was constructed, nothing to emit".into()))?;
        write_file(path, &emit_structure(m))?;
    }
    if let Some(path) = &config.emit_theory {
        write_file(path, &emit_theory(theory))?;
    }
    Ok(())
}

/// Per-statement lines, the failing labels and the `[residuals]` section.
fn render_check(w: &mut KvWriter, theory: &Theory, report: &CheckReport) {
    let label = |i: usize| {
        theory.entries()[i]
            .label
            .clone()
            .unwrap_or_else(|| format!("s{}", i + 1))
    };
    let mut failed = Vec::new();
    for (i, e) in report.entries.iter().enumerate() {
        let l = label(i);
        match &e.outcome {
            Ok(c) => {
                w.kv(
                    format!("statement.{l}"),
                    format!(
                        "{} value={} threshold={}",
                        verdict(c.passed),
                        format_real(c.value),
                        format_real(c.threshold)
                    ),
                );
            }
            Err(err) => {
                w.kv(format!("statement.{l}"), format!("error {err}"));
            }
        }
        if !e.passed() {
            failed.push(l);
        }
    }
    w.kv("statements", report.entries.len())
        .kv("passed_statements", report.pass_count())
        .kv("failed", failed.join(","))
        .kv("passed", report.all_passed())
        .section("residuals");
    for (i, e) in report.entries.iter().enumerate() {
        if let Ok(c) = &e.outcome {
            w.real(label(i), c.violation());
        }
    }
    w.real("residual_max", report.max_residual());
}

pub fn check(structure: &str, theory: &str, config: &WorkbenchConfig) -> Result<(String, Outcome)> {
    let m = load_structure(structure)?;
    let t = load_theory(theory, m.language())?;
    let epsilon = config.epsilon.unwrap_or(0.0);
    let report = check_theory(
        &m,
        &t,
        CheckConfig {
            epsilon,
            tol: config.tolerance,
        },
    )
    .map_err(engine)?;
    let mut w = KvWriter::new();
    w.kv("command", "check")
        .kv("points", m.space().len())
        .real("epsilon", epsilon)
        .real("tol", config.tolerance);
    render_check(&mut w, &t, &report);
    Ok((w.finish(), outcome(report.all_passed())))
}

pub fn construct(
    kind: Kind,
    instance: &str,
    config: &WorkbenchConfig,
) -> Result<(String, Outcome)> {
    let file = load(instance)?;
    match kind {
        Kind::Stone => stone(&file, config),
        Kind::Daniell => daniell(&file, config),
        Kind::Riesz => riesz(&file, config),
        Kind::Pushdown => pushdown(&file, config),
    }
}

fn stone(file: &super::files::SectionFile, config: &WorkbenchConfig) -> Result<(String, Outcome)> {
    let b = instances::stone(file)?;
    let model = stone_model(&b);
    let theory = stone_theory(&b);
    let epsilon = config.epsilon.unwrap_or(0.0);
    let report = check_theory(
        &model,
        &theory,
        CheckConfig {
            epsilon,
            tol: config.tolerance,
        },
    )
    .map_err(engine)?;
    let iso = stone_isomorphism_check(&b, &model).map_err(engine)?;
    let mut w = KvWriter::new();
    w.kv("kind", "stone")
        .kv("atoms", b.atom_count())
        .kv("masses", real_list(b.masses()))
        .kv("elements", b.top() + 1)
        .real("epsilon", epsilon);
    let ids = model.space().ids().to_vec();
    for (a, set) in b.elements().zip(&iso.image) {
        w.kv(format!("image.{}", b.bits(a)), id_list(set, &ids));
    }
    w.kv("iso.generated_size", iso.generated_size);
    for c in &iso.checks {
        match &c.witness {
            Some(x) => w.kv(format!("iso.{}", c.name), format!("fail {x}")),
            None => w.kv(format!("iso.{}", c.name), "pass"),
        };
    }
    w.kv("iso.passed", iso.passed());
    render_check(&mut w, &theory, &report);
    emit(config, Some(&model), &theory)?;
    Ok((w.finish(), outcome(report.all_passed() && iso.passed())))
}

fn finish_construction(
    mut w: KvWriter,
    model: &DaniellModel,
    ids: &[String],
    config: &WorkbenchConfig,
) -> Result<(String, Outcome)> {
    emit(config, model.structure.as_ref(), &model.theory)?;
    w.kv("statements", model.theory.len());
    let text = w.finish() + &model.report.render(ids);
    Ok((text, outcome(model.report.passed())))
}

fn daniell(
    file: &super::files::SectionFile,
    config: &WorkbenchConfig,
) -> Result<(String, Outcome)> {
    let input = instances::daniell(file, config.max_points)?;
    let epsilon = config
        .epsilon
        .or(input.settings.epsilon)
        .unwrap_or(DEFAULT_EPSILON);
    let mut inst = DaniellInstance::new(
        input.ids.clone(),
        input.generators,
        input.combinations,
        input.functional.as_ref(),
        epsilon,
    )
    .map_err(engine)?;
    if let Some(cap) = input.settings.separation_cap {
        inst = inst.with_separation_cap(cap);
    }
    inst.spot_check(config.seed).map_err(engine)?;
    let model = daniell_model(&inst).map_err(engine)?;
    let mut w = KvWriter::new();
    w.kv("seed", config.seed).kv("spot_check", "pass");
    finish_construction(w, &model, &input.ids, config)
}

fn riesz(file: &super::files::SectionFile, config: &WorkbenchConfig) -> Result<(String, Outcome)> {
    let input = instances::riesz(file, config.max_points)?;
    let epsilon = config
        .epsilon
        .or(input.settings.epsilon)
        .unwrap_or(DEFAULT_EPSILON);
    let inst = RieszInstance::new(
        input.grid.clone(),
        input.generators,
        input.functional.as_ref(),
        epsilon,
    )
    .map_err(engine)?;
    inst.as_daniell().spot_check(config.seed).map_err(engine)?;
    let model = riesz_model(&inst).map_err(engine)?;
    let mut w = KvWriter::new();
    w.kv("seed", config.seed)
        .kv("spot_check", "pass")
        .kv("grid.points", input.grid.len())
        .real("grid.lo", input.grid[0])
        .real("grid.hi", input.grid[input.grid.len() - 1]);
    for (name, expr) in &input.expressions {
        w.kv(format!("generator.{name}"), expr);
    }
    finish_construction(w, &model, inst.as_daniell().ids(), config)
}

/// The subspace measure on `X`, normalized to total 1, with `R_f` interpreted by
/// `f|_X`, and the theory stating that each integral equals the one over `N`.
fn pushdown_model(
    input: &instances::PushdownInput,
    transfers: &[(String, f64)],
    total: f64,
) -> Result<(InterpretedStructure, Theory)> {
    let x: Vec<usize> = input.subset.iter().collect();
    let mut weights = vec![0.0; x.len()];
    for atom in input.algebra.atoms() {
        let inside: Vec<usize> = (0..x.len()).filter(|k| atom.contains(x[*k])).collect();
        let mass: f64 = atom.iter().map(|p| input.weights[p]).sum();
        for k in &inside {
            weights[*k] = mass / total / inside.len() as f64;
        }
    }
    let ids: Vec<String> = x.iter().map(|p| input.ids[*p].clone()).collect();
    let space = FiniteMeasureSpace::new(ids, weights).map_err(engine)?;
    let mut language = Language::new();
    let mut tables = std::collections::BTreeMap::new();
    for (name, f) in &input.generators {
        let values: Vec<f64> = x.iter().map(|p| f.get(*p)).collect();
        let bound = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let rel = format!("R_{name}");
        language
            .declare(Symbol::relation(rel.clone(), 1, bound))
            .map_err(engine)?;
        tables.insert(rel, RelationTable::unary(values));
    }
    let m = InterpretedStructure::interpret(space, language, tables, Default::default())
        .map_err(engine)?;
    let mut theory = Theory::new();
    for (name, on_whole) in transfers {
        let text = format!("int[x](R_{name}(x)) == {}", format_real(on_whole / total));
        let s = parse_statement(&text, m.language()).map_err(|e| engine(e.kind))?;
        theory
            .push(Some(format!("transfer[{name}]")), s)
            .map_err(engine)?;
    }
    Ok((m, theory))
}

/// `N` with `ν` normalized, `R_X` and `R_C` the indicators of `X` and of the witnessing
/// member `C`, and the theory stating `ν(C) < ν(N)` and `X ⊆ C` almost everywhere.
fn witness_model(
    input: &instances::PushdownInput,
    cover: &PointSet,
    measure: f64,
    total: f64,
) -> Result<(InterpretedStructure, Theory)> {
    let weights: Vec<f64> = input.weights.iter().map(|w| w / total).collect();
    let space = FiniteMeasureSpace::new(input.ids.clone(), weights).map_err(engine)?;
    let language = Language::with_symbols([
        Symbol::relation("R_X", 1, 1.0),
        Symbol::relation("R_C", 1, 1.0),
    ])
    .map_err(engine)?;
    let indicator = |s: &PointSet| RelationTable::unary(LatticeFn::indicator(s).values().to_vec());
    let tables = [
        ("R_X".to_string(), indicator(&input.subset)),
        ("R_C".to_string(), indicator(cover)),
    ]
    .into_iter()
    .collect();
    let m = InterpretedStructure::interpret(space, language, tables, Default::default())
        .map_err(engine)?;
    let mut theory = Theory::new();
    for (label, text) in [
        (
            "witness_measure",
            format!("int[x](R_C(x)) == {}", format_real(measure / total)),
        ),
        (
            "witness_contains_x",
            "int[x](R_X(x) - R_X(x) * R_C(x)) == 0".to_string(),
        ),
    ] {
        let s = parse_statement(&text, m.language()).map_err(|e| engine(e.kind))?;
        theory.push(Some(label.to_string()), s).map_err(engine)?;
    }
    Ok((m, theory))
}

fn pushdown(
    file: &super::files::SectionFile,
    config: &WorkbenchConfig,
) -> Result<(String, Outcome)> {
    let input = instances::pushdown(file, config.max_points)?;
    let inst = PushdownInstance::new(
        input.ids.clone(),
        input.weights.clone(),
        input.algebra.clone(),
        input.subset.clone(),
        input.generators.clone(),
    )
    .map_err(engine)?;
    let r = pushdown_check(&inst).map_err(engine)?;
    let ids = &input.ids;
    let mut w = KvWriter::new();
    w.kv("kind", "pushdown")
        .kv("points", ids.len())
        .kv("subset", id_list(&input.subset, ids))
        .real("total", r.total)
        .real("outer", r.outer)
        .kv("full", r.full);
    if let Some((cover, m)) = &r.witness {
        w.kv("witness", id_list(cover, ids))
            .real("witness_measure", *m);
    }
    for t in &r.transfers {
        let p = format!("transfer.{}", t.name);
        w.real(format!("{p}.on_subset"), t.on_subset)
            .real(format!("{p}.on_whole"), t.on_whole)
            .kv(format!("{p}.passed"), t.passed);
    }
    for (k, s) in r.subclaims.iter().enumerate() {
        let p = format!("subclaim.{k}");
        w.kv(format!("{p}.member"), id_list(&s.member, ids))
            .real(format!("{p}.measure"), s.measure)
            .kv(format!("{p}.index"), s.index)
            .real(format!("{p}.max_integral"), s.max_integral)
            .kv(format!("{p}.pair"), format!("{:?}", s.pair).to_lowercase())
            .kv(format!("{p}.passed"), s.passed);
    }
    if r.full {
        w.real("cover_sum", r.cover_sum);
    }
    for (i, v) in r.violations.iter().enumerate() {
        w.kv(format!("violation.{i}"), v);
    }
    w.kv("violations", r.violations.len())
        .kv("passed", r.passed())
        .section("residuals");
    let mut max: f64 = 0.0;
    for t in &r.transfers {
        let d = (t.on_subset - t.on_whole).abs();
        max = max.max(d);
        w.real(format!("transfer[{}]", t.name), d);
    }
    w.real("residual_max", max);

    if config.emit_structure.is_some() || config.emit_theory.is_some() {
        if r.total <= 0.0 {
            return Err(CliError::Engine(
                "the measure is zero; there is no model to emit".into(),
            ));
        }
        let (m, theory) = match &r.witness {
            None => {
                let transfers: Vec<(String, f64)> = r
                    .transfers
                    .iter()
                    .map(|t| (t.name.clone(), t.on_whole))
                    .collect();
                pushdown_model(&input, &transfers, r.total)?
            }
            Some((cover, measure)) => witness_model(&input, cover, *measure, r.total)?,
        };
        emit(config, Some(&m), &theory)?;
    }
    Ok((w.finish(), outcome(r.passed())))
}

fn reals(flag: &str, text: &str) -> Result<Vec<f64>> {
    split_list(text)
        .map(|t| {
            super::files::parse_real(t)
                .ok_or_else(|| CliError::Usage(format!("--{flag}: `{t}` is not a finite number")))
        })
        .collect()
}

fn function(flag: &str, text: &str) -> Result<LatticeFn> {
    let v = reals(flag, text)?;
    if v.is_empty() {
        return Err(CliError::Usage(format!(
            "--{flag} needs at least one value"
        )));
    }
    Ok(LatticeFn::new(v))
}

fn functions(args: &LemmaArgs) -> Result<Vec<LatticeFn>> {
    if args.f.is_empty() {
        return Err(CliError::Usage("at least one --f is required".into()));
    }
    let fs: Vec<LatticeFn> = args
        .f
        .iter()
        .map(|t| function("f", t))
        .collect::<Result<_>>()?;
    if fs.iter().any(|f| f.len() != fs[0].len()) {
        return Err(CliError::Usage(
            "all --f functions need the same number of values".into(),
        ));
    }
    Ok(fs)
}

fn weights(args: &LemmaArgs, len: usize) -> Result<Vec<f64>> {
    match &args.weights {
        None => Ok(vec![1.0 / len as f64; len]),
        Some(t) => {
            let w = reals("weights", t)?;
            if w.len() != len || w.iter().any(|x| *x < 0.0) {
                return Err(CliError::Usage(format!(
                    "--weights needs {len} nonnegative values"
                )));
            }
            Ok(w)
        }
    }
}

fn indices(flag: &str, text: &str, len: usize) -> Result<PointSet> {
    let mut s = PointSet::empty(len);
    for t in split_list(text) {
        match t.parse::<usize>() {
            Ok(i) if i < len => s.insert(i),
            _ => {
                return Err(CliError::Usage(format!(
                    "--{flag}: `{t}` is not a point index below {len}"
                )))
            }
        }
    }
    Ok(s)
}

fn set_text(s: &PointSet) -> String {
    s.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn lemma(args: &LemmaArgs, config: &WorkbenchConfig) -> Result<(String, Outcome)> {
    let mut w = KvWriter::new();
    let mut checks: Vec<(&str, bool)> = Vec::new();
    match args.name {
        LemmaName::Tendtochar => {
            w.kv("lemma", "tendtochar");
            tendtochar(args, &mut w, &mut checks)?
        }
        LemmaName::Inessential => {
            w.kv("lemma", "inessential");
            inessential(args, config, &mut w, &mut checks)?
        }
        LemmaName::RefineCover => {
            w.kv("lemma", "refine_cover");
            cover(args, config, &mut w, &mut checks)?
        }
        LemmaName::SpecialPair => {
            w.kv("lemma", "special_pair");
            special_pair(args, &mut w, &mut checks)?
        }
    }
    for (name, ok) in &checks {
        w.kv(format!("check.{name}"), verdict(*ok));
    }
    let passed = checks.iter().all(|(_, ok)| *ok);
    w.kv("passed", passed);
    Ok((w.finish(), outcome(passed)))
}

fn tendtochar(args: &LemmaArgs, w: &mut KvWriter, checks: &mut Vec<(&str, bool)>) -> Result<()> {
    let fs = functions(args)?;
    if args.interval.len() != fs.len() {
        return Err(CliError::Usage("give one --interval per --f".into()));
    }
    let intervals: Vec<Interval> = args
        .interval
        .iter()
        .map(|t| {
            t.parse::<Interval>()
                .map_err(|e| CliError::Usage(e.to_string()))
        })
        .collect::<Result<_>>()?;
    let mode = if intervals[0].is_open() {
        Mode::Open
    } else {
        Mode::Closed
    };
    let combine = match args.combine {
        CombineArg::Intersection => Combine::Intersection,
        CombineArg::Union => Combine::Union,
    };
    let seq = IndicatorSeq::new(fs.into_iter().zip(intervals).collect(), mode, combine)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let n_star = stabilization_index(&seq).map_err(engine)?;
    let target = seq.target();
    let indicator = LatticeFn::indicator(&target);
    w.kv("mode", format!("{mode:?}").to_lowercase())
        .kv("n_star", n_star)
        .kv("target", set_text(&target))
        .kv("indicator", real_list(indicator.values()));
    let mut shown = Vec::new();
    let mut n = 1;
    while n < n_star {
        shown.push(n);
        n *= 2;
    }
    shown.extend([n_star, n_star + 1]);
    let terms: Vec<LatticeFn> = shown.iter().map(|n| seq.term(*n)).collect();
    for (n, t) in shown.iter().zip(&terms) {
        w.kv(format!("term.{n}"), real_list(t.values()));
    }
    let ordered = |a: &LatticeFn, b: &LatticeFn| {
        a.values().iter().zip(b.values()).all(|(x, y)| match mode {
            Mode::Open => x <= y,
            Mode::Closed => x >= y,
        })
    };
    checks.push(("monotone", terms.windows(2).all(|p| ordered(&p[0], &p[1]))));
    checks.push((
        "range",
        terms
            .iter()
            .all(|t| t.values().iter().all(|v| (0.0..=1.0).contains(v))),
    ));
    // open: every term vanishes off the target; closed: every term is 1 on it
    checks.push(("support", terms.iter().all(|t| ordered(t, &indicator))));
    checks.push((
        "limit",
        terms[terms.len() - 2] == indicator && terms[terms.len() - 1] == indicator,
    ));
    if n_star <= BRUTE_FORCE_CAP {
        let first = (1..=n_star).find(|n| seq.term(*n) == indicator);
        checks.push(("brute_force", first == Some(n_star)));
    }
    Ok(())
}

fn inessential(
    args: &LemmaArgs,
    config: &WorkbenchConfig,
    w: &mut KvWriter,
    checks: &mut Vec<(&str, bool)>,
) -> Result<()> {
    let fs = functions(args)?;
    let (lo, hi) = args
        .lo
        .zip(args.hi)
        .ok_or_else(|| CliError::Usage("inessential needs --lo and --hi".into()))?;
    let weights = weights(args, fs[0].len())?;
    let functional = HiddenWeights::new(weights).map_err(|e| CliError::Usage(e.to_string()))?;
    let tol = config.tolerance;
    let choice = find_inessential(&fs, lo, hi, &functional, tol).map_err(engine)?;
    let alpha = choice.alpha;
    w.real("lo", lo)
        .real("hi", hi)
        .real("alpha", alpha)
        .kv("tested", choice.tested)
        .kv("rejected", real_list(&choice.rejected));
    let mut limits_zero = true;
    for (i, f) in fs.iter().enumerate() {
        let c = is_inessential(f, alpha, &functional, tol).map_err(engine)?;
        w.kv(format!("function.{i}.index"), c.index)
            .real(format!("function.{i}.limit"), c.limit);
        limits_zero &= c.inessential && c.limit == 0.0;
    }
    checks.push(("in_interval", lo < alpha && alpha < hi));
    checks.push(("not_attained", fs.iter().all(|f| !f.attains(alpha))));
    checks.push(("limit_zero", limits_zero));
    Ok(())
}

fn cover(
    args: &LemmaArgs,
    config: &WorkbenchConfig,
    w: &mut KvWriter,
    checks: &mut Vec<(&'static str, bool)>,
) -> Result<()> {
    let fs = functions(args)?;
    let len = fs[0].len();
    let weights = weights(args, len)?;
    let target = match &args.target {
        Some(t) => indices("target", t, len)?,
        None => PointSet::full(len),
    };
    if args.cover.is_empty() {
        return Err(CliError::Usage(
            "refine_cover needs at least one --cover".into(),
        ));
    }
    let members: Vec<PointSet> = args
        .cover
        .iter()
        .map(|t| indices("cover", t, len))
        .collect::<Result<_>>()?;
    let epsilon = config.epsilon.unwrap_or(DEFAULT_EPSILON);
    let r = refine_cover(&weights, &fs, &target, &members, epsilon).map_err(engine)?;
    w.real("epsilon", epsilon)
        .real("delta", r.delta)
        .kv("target", set_text(&target));
    for (k, m) in r.members.iter().enumerate() {
        let p = format!("member.{k}");
        w.kv(format!("{p}.origin"), m.origin)
            .kv(format!("{p}.set"), set_text(&m.set))
            .kv(format!("{p}.function"), real_list(m.function.values()));
        match &m.split {
            Some(s) => w.kv(
                format!("{p}.split"),
                format!("a1={} a2={}", format_real(s.a1), format_real(s.a2)),
            ),
            None => w.kv(format!("{p}.split"), "none"),
        };
    }
    let identity = r.members.len() == members.len()
        && r.members
            .iter()
            .enumerate()
            .all(|(k, m)| m.origin == k && m.set == members[k] && m.split.is_none());
    w.real("input_measure", r.input_measure)
        .real("output_measure", r.output_measure)
        .kv("identity", identity);
    let violated = cover_violations(&r, &weights, &target, epsilon);
    for name in ["nice-form", "null-zero-set", "measure-sum", "covers"] {
        checks.push((name, !violated.contains(&name)));
    }
    Ok(())
}

fn special_pair(args: &LemmaArgs, w: &mut KvWriter, checks: &mut Vec<(&str, bool)>) -> Result<()> {
    let f = match args.f.as_slice() {
        [t] => function("f", t)?,
        _ => return Err(CliError::Usage("special_pair needs exactly one --f".into())),
    };
    let g = function(
        "g",
        args.g
            .as_deref()
            .ok_or_else(|| CliError::Usage("special_pair needs --g".into()))?,
    )?;
    if g.len() != f.len() {
        return Err(CliError::Usage(
            "--f and --g need the same number of values".into(),
        ));
    }
    let nu = weights(args, f.len())?;
    let star = star_combine(&f, &g);
    let kind = classify_pair(&f, &g, Some(&nu)).map_err(engine)?;
    w.kv("star", real_list(star.map(|v| v + 0.0).values()))
        .kv("kind", format!("{kind:?}").to_lowercase());
    // f*g from its defining expression, against the closed form used by the library
    let neg_g = g.neg().join(&LatticeFn::constant(f.len(), 0.0));
    let literal = f.join(&neg_g).sub(&f).sub(&neg_g);
    let agree = literal
        .values()
        .iter()
        .zip(star.values())
        .all(|(a, b)| (a - b).abs() <= TOLERANCE * (1.0 + a.abs()));
    checks.push(("star_identity", agree));
    let consistent = match kind {
        PairKind::Exact => is_special(&f, &g) && is_almost_special(&f, &g, &nu),
        PairKind::Almost => !is_special(&f, &g) && is_almost_special(&f, &g, &nu),
        PairKind::Neither => !is_special(&f, &g) && !is_almost_special(&f, &g, &nu),
    };
    checks.push(("classification", consistent));
    Ok(())
}
