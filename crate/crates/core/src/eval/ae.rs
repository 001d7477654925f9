use crate::logic::{free_vars, Formula, Statement};

/// Almost-everywhere assertions expressible as a single closed integral statement.
#[derive(Debug, Clone, PartialEq)]
pub enum AeClaim {
    /// `φ = 0` a.e.
    Zero(Formula),
    /// `φ = ψ` a.e.
    Equal(Formula, Formula),
    /// `φ` takes values in the finite set a.e.
    Range(Formula, Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AeError {
    #[error("a.e. claims need at most one free variable, found {0:?}")]
    FreeVariableMismatch(Vec<String>),
    #[error("range claim over an empty value set")]
    EmptyRange,
}

fn binders(f: &Formula, out: &mut Vec<String>) {
    match f {
        Formula::Rel(..) | Formula::Real(_) => {}
        Formula::Abs(g) => binders(g, out),
        Formula::Add(g, h) | Formula::Mul(g, h) => {
            binders(g, out);
            binders(h, out);
        }
        Formula::Integral { var, body } => {
            out.push(var.clone());
            binders(body, out);
        }
    }
}

/// `φ - r`, or `φ` itself when `r = 0`.
fn shifted(phi: &Formula, r: f64) -> Formula {
    if r == 0.0 {
        phi.clone()
    } else {
        Formula::sub(phi.clone(), Formula::Real(r))
    }
}

/// Encodes the claim as `int[x](|…|) == 0`, integrating out its free variable.
///
/// * zero: `int[x](|φ|) == 0`
/// * equal: `int[x](|φ - ψ|) == 0`
/// * range `{r_1..r_n}`: `int[x](|(φ - r_1)*…*(φ - r_n)|) == 0`
pub fn encode_ae(claim: &AeClaim) -> Result<Statement, AeError> {
    let (body, parts): (Formula, Vec<&Formula>) = match claim {
        AeClaim::Zero(phi) => (phi.clone(), vec![phi]),
        AeClaim::Equal(phi, psi) => (Formula::sub(phi.clone(), psi.clone()), vec![phi, psi]),
        AeClaim::Range(phi, values) => {
            let mut it = values.iter();
            let first = it.next().ok_or(AeError::EmptyRange)?;
            let product = it.fold(shifted(phi, *first), |acc, r| {
                Formula::mul(acc, shifted(phi, *r))
            });
            (product, vec![phi])
        }
    };
    let mut free: Vec<String> = Vec::new();
    for part in &parts {
        for v in free_vars(part) {
            if !free.contains(&v) {
                free.push(v);
            }
        }
    }
    if free.len() > 1 {
        return Err(AeError::FreeVariableMismatch(free));
    }
    let var = match free.pop() {
        Some(v) => v,
        None => {
            let mut taken = Vec::new();
            binders(&body, &mut taken);
            std::iter::once("x".to_string())
                .chain((1..).map(|i| format!("x{i}")))
                .find(|c| !taken.contains(c))
                .expect("unbounded candidate list")
        }
    };
    Ok(Statement::equal(
        Formula::integral(var, Formula::abs(body)),
        0.0,
    ))
}
