//! Acceptance suite: one PASS/FAIL line per criterion. Every quantity is compared
//! against an oracle computed here from first principles.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use intlog::engines::{
    daniell_model, pushdown_check, riesz_model, stone_isomorphism_check, stone_model, stone_theory,
    uniform_grid, DaniellInstance, FiniteProbabilityAlgebra, PushdownInstance, RieszInstance,
    Sampler,
};
use intlog::eval::{check_theory, CheckConfig, InterpretedStructure, RelationTable};
use intlog::lattice::{
    find_inessential, refine_cover, stabilization_index, Combine, HiddenWeights, IndicatorSeq,
    Interval, LatticeFn, Mode,
};
use intlog::logic::{derive_lattice, Formula, Language, LatticeKind, Symbol, Term};
use intlog::measure::{
    caratheodory_extend, FiniteMeasureSpace, PointSet, PremeasureTable, ProductMeasure, SetAlgebra,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type Curve = (&'static str, fn(f64) -> f64);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    ensure(elapsed <= Duration::from_secs(limit_secs), || {
        format!("took {elapsed:.2?}, limit {limit_secs} s")
    })
}

/// Positive integers summing to `total`, one per point.
fn composition(rng: &mut ChaCha8Rng, parts: usize, total: u32) -> Vec<u32> {
    let mut cuts: Vec<u32> = (1..total).collect::<Vec<_>>();
    cuts.shuffle(rng);
    let mut cuts: Vec<u32> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts.into_iter().chain([total]) {
        out.push(c - prev);
        prev = c;
    }
    out
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

fn mass(weights: &[f64], set: &PointSet) -> f64 {
    set.iter().map(|i| weights[i]).sum()
}

/// Atoms of the algebra generated by `sets` over `len` points, by membership signature.
fn oracle_atoms(len: usize, sets: &[PointSet]) -> Vec<PointSet> {
    let mut by_signature: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for x in 0..len {
        let sig = sets.iter().map(|s| s.contains(x)).collect();
        by_signature.entry(sig).or_default().push(x);
    }
    by_signature
        .into_values()
        .map(|pts| PointSet::from_indices(len, pts))
        .collect()
}

// ---------------------------------------------------------------- evaluator laws

const VARS: [&str; 3] = ["x", "y", "z"];

/// A structure with dyadic weights `k/64` and dyadic relation values `k/8`, so that
/// every evaluation below is exact in floating point.
fn dyadic_structure(rng: &mut ChaCha8Rng) -> InterpretedStructure {
    let n = rng.gen_range(1..=8);
    let weights: Vec<f64> = composition(rng, n, 64)
        .into_iter()
        .map(|k| k as f64 / 64.0)
        .collect();
    let space = FiniteMeasureSpace::indexed("p", weights).unwrap();
    let language = Language::with_symbols([
        Symbol::relation("P", 1, 2.0),
        Symbol::relation("Q", 2, 2.0),
        Symbol::constant("c"),
    ])
    .unwrap();
    let mut value = || rng.gen_range(-16..=16) as f64 / 8.0;
    let p = RelationTable::unary((0..n).map(|_| value()).collect());
    let q = RelationTable::new(2, n, (0..n * n).map(|_| value()).collect()).unwrap();
    let tables = [("P".to_string(), p), ("Q".to_string(), q)]
        .into_iter()
        .collect();
    let c = rng.gen_range(0..n);
    let constants = [("c".to_string(), c)].into_iter().collect();
    InterpretedStructure::interpret(space, language, tables, constants).unwrap()
}

fn random_term(rng: &mut ChaCha8Rng, vars: &[&str]) -> Term {
    if rng.gen_bool(0.2) {
        Term::Const("c".into())
    } else {
        Term::var(*vars.choose(rng).unwrap())
    }
}

fn random_formula(rng: &mut ChaCha8Rng, depth: usize, vars: &[&str]) -> Formula {
    if depth <= 1 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => Formula::real(rng.gen_range(-16..=16) as f64 / 8.0),
            1 => Formula::rel("P", vec![random_term(rng, vars)]),
            2 => Formula::rel("Q", vec![random_term(rng, vars), random_term(rng, vars)]),
            _ => Formula::rel("e", vec![random_term(rng, vars), random_term(rng, vars)]),
        };
    }
    match rng.gen_range(0..4) {
        0 => Formula::abs(random_formula(rng, depth - 1, vars)),
        1 => Formula::add(
            random_formula(rng, depth - 1, vars),
            random_formula(rng, depth - 1, vars),
        ),
        2 => Formula::mul(
            random_formula(rng, depth - 1, vars),
            random_formula(rng, depth - 1, vars),
        ),
        _ => Formula::integral(
            *vars.choose(rng).unwrap(),
            random_formula(rng, depth - 1, vars),
        ),
    }
}

/// Direct recursive evaluation from the definition of the semantics.
fn naive_eval(m: &InterpretedStructure, f: &Formula, env: &HashMap<String, usize>) -> f64 {
    match f {
        Formula::Real(r) => *r,
        Formula::Rel(name, args) => {
            let points: Vec<usize> = args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => env[v],
                    Term::Const(c) => m.constants()[c],
                })
                .collect();
            m.relation(name).unwrap().get(&points)
        }
        Formula::Abs(g) => naive_eval(m, g, env).abs(),
        Formula::Add(g, h) => naive_eval(m, g, env) + naive_eval(m, h, env),
        Formula::Mul(g, h) => naive_eval(m, g, env) * naive_eval(m, h, env),
        Formula::Integral { var, body } => {
            let mut inner = env.clone();
            let mut total = 0.0;
            for (p, w) in m.space().weights().iter().enumerate() {
                inner.insert(var.clone(), p);
                total += naive_eval(m, body, &inner) * w;
            }
            total
        }
    }
}

fn evaluator_laws() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cases = 1000;
    for case in 0..cases {
        let m = dyadic_structure(&mut rng);
        let n = m.space().len();
        let assignment: HashMap<String, usize> = VARS
            .iter()
            .map(|v| (v.to_string(), rng.gen_range(0..n)))
            .collect();
        let f = random_formula(&mut rng, 6, &VARS);
        ensure(f.depth() <= 6, || {
            format!("generator produced depth {}", f.depth())
        })?;
        let got = m.eval(&f, &assignment).map_err(|e| e.to_string())?;
        let want = naive_eval(&m, &f, &assignment);
        ensure(got.to_bits() == want.to_bits(), || {
            format!("case {case}: eval {got} but naive {want} for {f:?}")
        })?;

        let g = random_formula(&mut rng, 3, &VARS);
        let h = random_formula(&mut rng, 3, &VARS);
        let (a, b) = (
            naive_eval(&m, &g, &assignment),
            naive_eval(&m, &h, &assignment),
        );
        let max = m
            .eval(
                &derive_lattice(LatticeKind::Max, g.clone(), h.clone()),
                &assignment,
            )
            .unwrap();
        let min = m
            .eval(&derive_lattice(LatticeKind::Min, g, h), &assignment)
            .unwrap();
        ensure(max == a.max(b) && min == a.min(b), || {
            format!("case {case}: max/min gave {max}/{min} for {a}, {b}")
        })?;

        let body = random_formula(&mut rng, 3, &["x", "y"]);
        let xy = Formula::integral("x", Formula::integral("y", body.clone()));
        let yx = Formula::integral("y", Formula::integral("x", body));
        let (l, r) = (m.eval_closed(&xy).unwrap(), m.eval_closed(&yx).unwrap());
        ensure(l == r, || format!("case {case}: Fubini fails, {l} vs {r}"))?;
    }
    within(start.elapsed(), 10)?;
    Ok(format!("{cases} triples, {:.2?}", start.elapsed()))
}

// ---------------------------------------------------------------- diagonal measure

fn diagonal_measure() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let spaces = 200;
    let mut rectangles = 0usize;
    for case in 0..spaces {
        let n = rng.gen_range(1..=16);
        let w = random_weights(&mut rng, n);
        let space = FiniteMeasureSpace::indexed("p", w.clone()).unwrap();
        let pm = ProductMeasure::new(&space, 2, true).map_err(|e| e.to_string())?;
        let squares: f64 = w.iter().map(|x| x * x).sum();
        let mut pairs_on_diagonal = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    pairs_on_diagonal += w[i] * w[j];
                }
            }
        }
        let d = pm.diagonal(0, 1).map_err(|e| e.to_string())?;
        ensure(
            (d - squares).abs() <= 1e-12 && (d - pairs_on_diagonal).abs() <= 1e-12,
            || {
                format!("space {case}: diagonal {d}, sum of squares {squares}, pairs {pairs_on_diagonal}")
            },
        )?;
        let enumerated = pm
            .measure_where(|t| t[0] == t[1])
            .map_err(|e| e.to_string())?;
        ensure((enumerated - squares).abs() <= 1e-12, || {
            format!("space {case}: enumeration {enumerated}")
        })?;

        // every rectangle for small spaces, a random sample of 256 otherwise
        let sides: Vec<(u64, u64)> = if n <= 6 {
            (0..1u64 << n)
                .flat_map(|a| (0..1u64 << n).map(move |b| (a, b)))
                .collect()
        } else {
            (0..256)
                .map(|_| (rng.gen_range(0..1u64 << n), rng.gen_range(0..1u64 << n)))
                .collect()
        };
        for (a, b) in sides {
            let (sa, sb) = (PointSet::from_mask(n, a), PointSet::from_mask(n, b));
            let mut pairs = 0.0;
            for i in sa.iter() {
                for j in sb.iter() {
                    pairs += w[i] * w[j];
                }
            }
            let got = pm
                .rectangle(&[sa.clone(), sb.clone()])
                .map_err(|e| e.to_string())?;
            ensure((got - pairs).abs() <= 1e-12, || {
                format!("space {case}: rectangle {a:b}x{b:b} is {got}, pairs give {pairs}")
            })?;
            rectangles += 1;
        }
    }
    within(start.elapsed(), 5)?;
    Ok(format!(
        "{spaces} spaces, {rectangles} rectangles, {:.2?}",
        start.elapsed()
    ))
}

// ---------------------------------------------------------------- Caratheodory

fn caratheodory() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let cases = 300;
    for case in 0..cases {
        let n = rng.gen_range(1..=8);
        let w = random_weights(&mut rng, n);
        let k = rng.gen_range(1..=3);
        let gens: Vec<PointSet> = (0..k)
            .map(|_| PointSet::from_mask(n, rng.gen_range(0..1u64 << n)))
            .collect();
        let atoms = oracle_atoms(n, &gens);
        let members: Vec<PointSet> = (0..1u64 << atoms.len())
            .map(|mask| {
                atoms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .fold(PointSet::empty(n), |acc, (_, a)| acc.union(a))
            })
            .collect();
        let table = PremeasureTable::new(
            PointSet::full(n),
            members.iter().map(|m| (m.clone(), mass(&w, m))).collect(),
        )
        .map_err(|e| format!("case {case}: {e}"))?;
        let ext = caratheodory_extend(&table).map_err(|e| format!("case {case}: {e}"))?;
        ensure(ext.algebra().atoms().len() == atoms.len(), || {
            format!(
                "case {case}: {} atoms, oracle {}",
                ext.algebra().atoms().len(),
                atoms.len()
            )
        })?;
        for m in &members {
            let got = ext.measure(m).map_err(|e| e.to_string())?;
            let want = mass(&w, m);
            ensure((got - want).abs() <= 1e-12, || {
                format!("case {case}: {m:?} has {got}, atoms sum {want}")
            })?;
        }
    }
    Ok(format!("{cases} algebras"))
}

// ---------------------------------------------------------------- Lemma 3.1

fn dyadic_fn(rng: &mut ChaCha8Rng, len: usize) -> LatticeFn {
    LatticeFn::new(
        (0..len)
            .map(|_| rng.gen_range(-16..=16) as f64 / 8.0)
            .collect(),
    )
}

/// Membership from the interval's written definition.
fn member(v: f64, open: bool, lo: Option<f64>, hi: Option<f64>) -> bool {
    let above = match lo {
        None => true,
        Some(a) if open => v > a,
        Some(a) => v >= a,
    };
    let below = match hi {
        None => true,
        Some(b) if open => v < b,
        Some(b) => v <= b,
    };
    above && below
}

fn lemma_tendtochar() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let cases = 500;
    for case in 0..cases {
        let len = rng.gen_range(1..=10);
        let open = rng.gen_bool(0.5);
        let k = rng.gen_range(1..=2);
        let combine = if rng.gen_bool(0.5) {
            Combine::Intersection
        } else {
            Combine::Union
        };
        let mut constraints = Vec::new();
        let mut specs = Vec::new();
        for _ in 0..k {
            let f = dyadic_fn(&mut rng, len);
            let mut end = || (rng.gen_bool(0.8)).then(|| rng.gen_range(-40..=40) as f64 / 16.0);
            let (mut lo, mut hi) = (end(), end());
            if let (Some(a), Some(b)) = (lo, hi) {
                if a > b || (open && a == b) {
                    std::mem::swap(&mut lo, &mut hi);
                    if open && lo == hi {
                        hi = hi.map(|b| b + 0.5);
                    }
                }
            }
            let interval = if open {
                Interval::open(lo, hi)
            } else {
                Interval::closed(lo, hi)
            }
            .map_err(|e| format!("case {case}: {e}"))?;
            specs.push((f.clone(), lo, hi));
            constraints.push((f, interval));
        }
        let mode = if open { Mode::Open } else { Mode::Closed };
        let seq = IndicatorSeq::new(constraints, mode, combine).map_err(|e| e.to_string())?;
        let indicator: Vec<f64> = (0..len)
            .map(|x| {
                let hits = specs
                    .iter()
                    .map(|(f, lo, hi)| member(f.get(x), open, *lo, *hi));
                let inside = match combine {
                    Combine::Intersection => hits.into_iter().all(|b| b),
                    Combine::Union => hits.into_iter().any(|b| b),
                };
                if inside {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let n_star = stabilization_index(&seq).map_err(|e| format!("case {case}: {e}"))?;
        let brute = (1..=n_star + 1).find(|n| seq.term(*n).values() == indicator.as_slice());
        ensure(brute == Some(n_star), || {
            format!("case {case}: index {n_star}, brute force {brute:?}")
        })?;
        let mut prev: Option<LatticeFn> = None;
        for n in 1..=n_star + 3 {
            let t = seq.term(n);
            for (x, v) in t.values().iter().enumerate() {
                ensure((0.0..=1.0).contains(v), || {
                    format!("case {case}: term {n} is {v} at {x}")
                })?;
                let law = if open {
                    *v <= indicator[x]
                } else {
                    *v >= indicator[x]
                };
                ensure(law, || {
                    format!("case {case}: support/superset law fails at n = {n}, x = {x}")
                })?;
                if let Some(p) = &prev {
                    let step = if open { p.get(x) <= *v } else { p.get(x) >= *v };
                    ensure(step, || {
                        format!("case {case}: not monotone at n = {n}, x = {x}")
                    })?;
                }
            }
            if n >= n_star {
                ensure(t.values() == indicator.as_slice(), || {
                    format!("case {case}: term {n} differs from the indicator after stabilization")
                })?;
            }
            prev = Some(t);
        }
    }
    Ok(format!("{cases} cases"))
}

// ---------------------------------------------------------------- Lemma 3.3

fn lemma_inessential() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let cases = 200;
    for case in 0..cases {
        let len = rng.gen_range(1..=12);
        let count = rng.gen_range(1..=4);
        let fs: Vec<LatticeFn> = (0..count).map(|_| dyadic_fn(&mut rng, len)).collect();
        let w = random_weights(&mut rng, len);
        let i = HiddenWeights::new(w.clone()).unwrap();
        let r = rng.gen_range(-24..=20) as f64 / 8.0;
        let s = r + rng.gen_range(1..=16) as f64 / 8.0;
        let choice =
            find_inessential(&fs, r, s, &i, 1e-12).map_err(|e| format!("case {case}: {e}"))?;
        let alpha = choice.alpha;
        ensure(r < alpha && alpha < s, || {
            format!("case {case}: α = {alpha} outside ({r},{s})")
        })?;
        for f in &fs {
            // h_n = max(0, 1 - n|f - α|) decreases to the indicator of f = α
            let limit = (1..=1u64 << 20)
                .map(|n| {
                    f.values()
                        .iter()
                        .map(|v| (1.0 - n as f64 * (v - alpha).abs()).max(0.0))
                        .collect::<Vec<_>>()
                })
                .find(|h| h.iter().all(|v| *v == 0.0 || *v == 1.0))
                .map(|h| h.iter().zip(&w).map(|(v, w)| v * w).sum::<f64>());
            ensure(limit == Some(0.0), || {
                format!("case {case}: limit at α = {alpha} is {limit:?}")
            })?;
        }
    }
    Ok(format!("{cases} instances"))
}

// ---------------------------------------------------------------- Lemma 3.4

fn lemma_refine_cover() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let cases = 200;
    for case in 0..cases {
        let epsilon = if case % 2 == 0 { 0.1 } else { 0.01 };
        let len = rng.gen_range(1..=10);
        let count = rng.gen_range(1..=3);
        // small integer values make zero levels frequent
        let fs: Vec<LatticeFn> = (0..count)
            .map(|_| LatticeFn::new((0..len).map(|_| rng.gen_range(-2..=2) as f64).collect()))
            .collect();
        let w: Vec<f64> = random_weights(&mut rng, len)
            .into_iter()
            .map(|x| if rng.gen_bool(0.15) { 0.0 } else { x })
            .collect();
        let mut target = PointSet::from_mask(len, rng.gen_range(0..1u64 << len));
        if target.is_empty() {
            target.insert(0);
        }
        let signs: Vec<PointSet> = fs
            .iter()
            .flat_map(|f| {
                [
                    PointSet::from_predicate(len, |x| f.get(x) > 0.0),
                    PointSet::from_predicate(len, |x| f.get(x) < 0.0),
                ]
            })
            .collect();
        let cells = oracle_atoms(len, &signs);
        let mut cover: Vec<PointSet> = Vec::new();
        for c in cells.iter().filter(|c| c.intersects(&target)) {
            if !cover.is_empty() && rng.gen_bool(0.4) {
                let k = rng.gen_range(0..cover.len());
                cover[k] = cover[k].union(c);
            } else {
                cover.push(c.clone());
            }
        }
        let r = refine_cover(&w, &fs, &target, &cover, epsilon)
            .map_err(|e| format!("case {case}: {e}"))?;
        let mut union = PointSet::empty(len);
        let mut output = 0.0;
        for m in &r.members {
            let positive = PointSet::from_predicate(len, |x| m.function.get(x) > 0.0);
            ensure(positive == m.set, || {
                format!("case {case}: member is not g⁻¹(0,∞)")
            })?;
            let zero = PointSet::from_predicate(len, |x| m.function.get(x) == 0.0);
            ensure(mass(&w, &zero) == 0.0, || {
                format!(
                    "case {case}: zero level set has measure {}",
                    mass(&w, &zero)
                )
            })?;
            union = union.union(&m.set);
            output += mass(&w, &m.set);
        }
        let input: f64 = cover.iter().map(|u| mass(&w, u)).sum();
        ensure((output - input).abs() <= epsilon, || {
            format!("case {case}: Σμ(V) = {output}, Σμ(U) = {input}")
        })?;
        ensure(target.is_subset(&union), || {
            format!("case {case}: refined sets do not cover")
        })?;
    }
    Ok(format!("{cases} instances"))
}

// ---------------------------------------------------------------- Stone

fn stone() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let cases = 120;
    for case in 0..cases {
        let atoms = rng.gen_range(1..=6);
        let masses = random_weights(&mut rng, atoms);
        let b = FiniteProbabilityAlgebra::new(masses.clone()).map_err(|e| e.to_string())?;
        let m = stone_model(&b);
        let theory = stone_theory(&b);
        let report =
            check_theory(&m, &theory, CheckConfig::default()).map_err(|e| e.to_string())?;
        ensure(report.all_passed() && report.max_residual() <= 1e-9, || {
            format!(
                "case {case}: theory fails with residual {}",
                report.max_residual()
            )
        })?;
        let iso = stone_isomorphism_check(&b, &m).map_err(|e| e.to_string())?;
        let failed: Vec<&str> = iso
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        ensure(failed.is_empty(), || {
            format!("case {case}: isomorphism checks failed: {failed:?}")
        })?;
        // the measure of X_a read off the model, against the masses of a's atoms
        let weights = m.space().weights();
        for a in b.elements() {
            let table = m.relation(&b.relation_name(a)).unwrap();
            let got: f64 = (0..weights.len())
                .filter(|x| table.get(&[*x]) == 1.0)
                .map(|x| weights[x])
                .sum();
            let want: f64 = (0..atoms)
                .filter(|i| a >> i & 1 == 1)
                .map(|i| masses[i])
                .sum();
            ensure((got - want).abs() <= 1e-9, || {
                format!("case {case}: μ(X_{a}) = {got}, want {want}")
            })?;
        }
    }
    within(start.elapsed(), 30)?;
    Ok(format!("{cases} algebras, {:.2?}", start.elapsed()))
}

// ---------------------------------------------------------------- Daniell

fn daniell() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let mut instances = 0;
    let mut singleton = 0;
    let mut worst: f64 = 0.0;
    for case in 0..16 {
        let epsilon = if case % 2 == 0 { 0.1 } else { 0.01 };
        let len = if case < 4 {
            200
        } else {
            rng.gen_range(2..=200)
        };
        let count = rng.gen_range(1..=5);
        let levels = rng.gen_range(2..=12);
        let gens: Vec<(String, LatticeFn)> = (0..count)
            .map(|k| {
                let values = (0..len)
                    .map(|_| rng.gen_range(-levels..=levels) as f64 / 4.0)
                    .collect();
                (format!("f{k}"), LatticeFn::new(values))
            })
            .collect();
        let w = random_weights(&mut rng, len);
        let i = HiddenWeights::new(w.clone()).unwrap();
        let ids: Vec<String> = (0..len).map(|x| format!("x{x}")).collect();
        let inst = DaniellInstance::new(ids, gens.clone(), vec![], &i, epsilon)
            .map_err(|e| e.to_string())?;
        let model = daniell_model(&inst).map_err(|e| format!("case {case}: {e}"))?;
        let r = &model.report;
        ensure(r.violations.is_empty(), || {
            format!("case {case}: {:?}", r.violations)
        })?;
        ensure(
            (1.0 - epsilon..=1.0 + epsilon).contains(&r.lambda0_total),
            || format!("case {case}: λ₀(X) = {}", r.lambda0_total),
        )?;
        let total: f64 = w.iter().sum();
        for (name, f) in &gens {
            let i_f: f64 = f.values().iter().zip(&w).map(|(v, w)| v * w).sum::<f64>() / total;
            let lam: f64 = f.values().iter().zip(&r.lambda).map(|(v, l)| v * l).sum();
            let residual = (i_f - lam).abs();
            worst = worst.max(residual);
            ensure(residual <= epsilon * (1.0 + f.sup()), || {
                format!(
                    "case {case}: |I({name}) - ∫{name} dλ| = {residual} exceeds ε(1 + sup {name})"
                )
            })?;
        }
        if r.cells.iter().all(|c| c.points.count() == 1) {
            singleton += 1;
            for (x, (l, w)) in r.lambda.iter().zip(&w).enumerate() {
                ensure((l - w / total).abs() <= 1e-9, || {
                    format!("case {case}: λ({x}) = {l}, hidden weight {}", w / total)
                })?;
            }
        }
        instances += 1;
    }
    ensure(singleton > 0, || {
        "no singleton-cell instance was generated".into()
    })?;
    within(start.elapsed(), 60)?;
    Ok(format!(
        "{instances} instances ({singleton} singleton-cell), worst residual {worst:e}, {:.2?}",
        start.elapsed()
    ))
}

// ---------------------------------------------------------------- Riesz

fn riesz() -> Outcome {
    let start = Instant::now();
    let grid = uniform_grid(0.0, 1.0, 101);
    let i = HiddenWeights::uniform(101);
    let gens = |jump: bool| {
        let mut g: Vec<(String, Sampler)> = vec![
            ("one".into(), Box::new(|_| 1.0)),
            ("x".into(), Box::new(|t| t)),
            ("x2".into(), Box::new(|t| t * t)),
            ("kink".into(), Box::new(|t: f64| (t - 0.5).abs())),
        ];
        if jump {
            g.push(("step".into(), Box::new(|t| if t > 0.5 { 1.0 } else { 0.0 })));
        }
        g
    };
    let inst =
        RieszInstance::sampled(grid.clone(), gens(false), &i, 0.05).map_err(|e| e.to_string())?;
    let r = riesz_model(&inst).map_err(|e| e.to_string())?.report;
    ensure(r.passed(), || {
        format!("continuous run failed: {:?}", r.violations)
    })?;
    let dini = r.dini.as_ref().ok_or("no Dini report")?;
    ensure(dini.passed(), || {
        "Dini check failed on continuous generators".into()
    })?;
    // uniform quadrature on the grid, computed directly
    let oracles: [Curve; 4] = [
        ("one", |_| 1.0),
        ("x", |t| t),
        ("x2", |t| t * t),
        ("kink", |t| (t - 0.5).abs()),
    ];
    for (name, g) in oracles {
        let values: Vec<f64> = grid.iter().map(|t| g(*t)).collect();
        let i_f: f64 = values.iter().sum::<f64>() / 101.0;
        let lam: f64 = values.iter().zip(&r.lambda).map(|(v, l)| v * l).sum();
        let sup = values.iter().fold(0.0f64, |a, v| a.max(*v));
        ensure((i_f - lam).abs() <= 0.05 * (1.0 + sup), || {
            format!("{name}: |I - ∫dλ| = {}", (i_f - lam).abs())
        })?;
    }
    let jump = RieszInstance::sampled(grid, gens(true), &i, 0.05).map_err(|e| e.to_string())?;
    let rj = riesz_model(&jump).map_err(|e| e.to_string())?.report;
    let flagged = rj
        .dini
        .as_ref()
        .map(|d| d.flagged.clone())
        .unwrap_or_default();
    ensure(flagged == ["step"], || {
        format!("flagged {flagged:?}, expected [step]")
    })?;
    ensure(!rj.passed(), || "the discontinuous run passed".into())?;
    within(start.elapsed(), 10)?;
    Ok(format!(
        "continuous passes, `step` flagged, {:.2?}",
        start.elapsed()
    ))
}

// ---------------------------------------------------------------- push-down

fn pushdown() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let (mut full_cases, mut rejected) = (0, 0);
    for case in 0..200 {
        let len = rng.gen_range(2..=10);
        let w: Vec<f64> = random_weights(&mut rng, len)
            .into_iter()
            .map(|x| if rng.gen_bool(0.2) { 0.0 } else { x })
            .collect();
        let total: f64 = w.iter().sum();
        if total == 0.0 {
            continue;
        }
        let gens: Vec<PointSet> = (0..rng.gen_range(0..=3))
            .map(|_| PointSet::from_mask(len, rng.gen_range(0..1u64 << len)))
            .collect();
        let atoms = oracle_atoms(len, &gens);
        let algebra =
            SetAlgebra::generated(&PointSet::full(len), &gens).map_err(|e| e.to_string())?;
        // X meets each atom of positive measure, unless this case plants a gap
        let plant_gap = case % 3 == 2;
        let heavy: Vec<usize> = (0..atoms.len())
            .filter(|k| mass(&w, &atoms[*k]) > 0.0)
            .collect();
        let gap = if plant_gap {
            heavy.choose(&mut rng).copied()
        } else {
            None
        };
        let mut subset = PointSet::empty(len);
        for (k, atom) in atoms.iter().enumerate() {
            if Some(k) == gap {
                continue;
            }
            if mass(&w, atom) > 0.0 || rng.gen_bool(0.5) {
                let pts: Vec<usize> = atom.iter().collect();
                subset.insert(*pts.choose(&mut rng).unwrap());
                for p in pts {
                    if rng.gen_bool(0.3) {
                        subset.insert(p);
                    }
                }
            }
        }
        if subset.is_empty() {
            continue;
        }
        let fns: Vec<(String, LatticeFn)> = (0..rng.gen_range(1..=3))
            .map(|k| {
                let per_atom: Vec<f64> = atoms
                    .iter()
                    .map(|_| rng.gen_range(-8..=8) as f64 / 4.0)
                    .collect();
                let values = (0..len)
                    .map(|x| per_atom[atoms.iter().position(|a| a.contains(x)).unwrap()])
                    .collect();
                (format!("f{k}"), LatticeFn::new(values))
            })
            .collect();
        let ids = (0..len).map(|x| format!("p{x}")).collect();
        let inst = PushdownInstance::new(ids, w.clone(), algebra, subset.clone(), fns.clone())
            .map_err(|e| format!("case {case}: {e}"))?;
        let r = pushdown_check(&inst).map_err(|e| format!("case {case}: {e}"))?;
        let outer: f64 = atoms
            .iter()
            .filter(|a| a.intersects(&subset))
            .map(|a| mass(&w, a))
            .sum();
        let full = outer >= total - 1e-9;
        ensure(r.full == full, || {
            format!("case {case}: full = {}, oracle says {full}", r.full)
        })?;
        if full {
            ensure(r.passed(), || format!("case {case}: {:?}", r.violations))?;
            for (name, f) in &fns {
                // subspace measure: each atom's mass moves to its trace on X
                let on_x: f64 = atoms
                    .iter()
                    .filter(|a| a.intersects(&subset))
                    .map(|a| mass(&w, a) * f.get(a.first().unwrap()))
                    .sum();
                let on_n: f64 = f.values().iter().zip(&w).map(|(v, w)| v * w).sum();
                let t = r
                    .transfers
                    .iter()
                    .find(|t| &t.name == name)
                    .ok_or("missing transfer")?;
                ensure(
                    (t.on_subset - on_n).abs() <= 1e-9 && (on_x - on_n).abs() <= 1e-9,
                    || {
                        format!(
                            "case {case}: {name} gives {} on X, {on_n} on N",
                            t.on_subset
                        )
                    },
                )?;
            }
            full_cases += 1;
        } else {
            ensure(!r.passed(), || format!("case {case}: non-full X accepted"))?;
            let (cover, m) = r
                .witness
                .clone()
                .ok_or_else(|| format!("case {case}: no witness"))?;
            let is_union = atoms
                .iter()
                .all(|a| a.is_subset(&cover) || !a.intersects(&cover));
            ensure(subset.is_subset(&cover) && is_union, || {
                format!("case {case}: witness is not a cover in the algebra")
            })?;
            ensure(
                (m - mass(&w, &cover)).abs() <= 1e-12 && m < total - 1e-9,
                || format!("case {case}: witness measure {m}, total {total}"),
            )?;
            rejected += 1;
        }
    }
    ensure(full_cases > 0 && rejected > 0, || {
        "generator missed a case".into()
    })?;
    Ok(format!(
        "{full_cases} full instances transfer, {rejected} non-full rejected with witnesses"
    ))
}

// ---------------------------------------------------------------- CLI

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn intlog(args: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_intlog"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn report_value<'a>(report: &'a str, key: &str) -> Option<&'a str> {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(" = "))
}

fn cli() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut instances: Vec<PathBuf> = std::fs::read_dir(fixtures())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "instance"))
        .collect();
    instances.sort();
    for path in &instances {
        let stem = path.file_stem().unwrap().to_string_lossy().to_string();
        let kind = stem.split('_').next().unwrap();
        let s = dir.path().join(format!("{stem}.structure"));
        let t = dir.path().join(format!("{stem}.theory"));
        let args = [
            "construct",
            kind,
            path.to_str().unwrap(),
            "--seed",
            "7",
            "--emit-structure",
            s.to_str().unwrap(),
            "--emit-theory",
            t.to_str().unwrap(),
        ];
        let (code, first) = intlog(&args)?;
        ensure(code == 0 || code == 1, || {
            format!("{stem}: construct exited {code}")
        })?;
        let (_, second) = intlog(&args)?;
        ensure(first == second, || {
            format!("{stem}: reports differ between runs")
        })?;
        let report = String::from_utf8(first).map_err(|e| e.to_string())?;
        let epsilon = report_value(&report, "epsilon").unwrap_or("0");
        let (check, out) = intlog(&[
            "check",
            s.to_str().unwrap(),
            t.to_str().unwrap(),
            "--epsilon",
            epsilon,
        ])?;
        ensure(check == 0, || {
            format!(
                "{stem}: check of the emitted model exited {check}\n{}",
                String::from_utf8_lossy(&out)
            )
        })?;
    }
    let pass = fixtures().join("check_pass.structure");
    let (code, _) = intlog(&[
        "check",
        pass.to_str().unwrap(),
        fixtures().join("check_pass.theory").to_str().unwrap(),
    ])?;
    ensure(code == 0, || format!("check_pass exited {code}"))?;
    Ok(format!(
        "{} instance fixtures re-verified, reports byte-identical",
        instances.len()
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("evaluator laws", evaluator_laws),
        ("diagonal measure", diagonal_measure),
        ("Caratheodory extension", caratheodory),
        ("tend-to-characteristic suite", lemma_tendtochar),
        ("inessential value suite", lemma_inessential),
        ("cover refinement suite", lemma_refine_cover),
        ("Stone isomorphism", stone),
        ("Daniell bound", daniell),
        ("Riesz desk scale", riesz),
        ("push-down", pushdown),
        ("CLI determinism and self-consistency", cli),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failures += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
