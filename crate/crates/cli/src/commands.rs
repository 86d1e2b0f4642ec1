use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use num_traits::{Signed, Zero};
use qmt_core::chow::{chow_group_basis, chow_presentation, emit_cas_script, graded_dimensions, moduli_presentation};
use qmt_core::exactlin::verify_exact_sequence;
use qmt_core::fans::{binomial, count_cones, poincare_polynomial, verify_simplicial_sample, PoincarePolynomial};
use qmt_core::pseudofan::{build_primitive_collections, AmvcProblem};
use qmt_core::rational::{self, q, Q};
use qmt_core::toricdata::{build_vertex_matrix, build_weight_matrix, verify_column_identities};
use qmt_core::Degree;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{Command, Common, Format, Which};

pub const SCHEMA_VERSION: u32 = 1;

/// What a command produced: the JSON document, its human-readable form and
/// whether every check it ran passed.
struct Output {
    json: Value,
    pretty: String,
    csv: Option<String>,
    ok: bool,
}

impl Output {
    fn new(json: Value, pretty: String) -> Self {
        Output {
            json,
            pretty,
            csv: None,
            ok: true,
        }
    }
}

pub fn run(command: Command) -> ExitCode {
    let common = common_of(&command).clone();
    let result = dispatch(command);
    match result.and_then(|o| emit(&common, o)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let doc = json!({ "schema_version": SCHEMA_VERSION, "error": format!("{e:#}") });
            println!("{}", serde_json::to_string_pretty(&doc).expect("error document serializes"));
            ExitCode::from(2)
        }
    }
}

fn common_of(command: &Command) -> &Common {
    match command {
        Command::Build(c) | Command::Poincare(c) | Command::Moduli(c) => c,
        Command::Verify { common, .. }
        | Command::SolveAmvc { common, .. }
        | Command::Count { common, .. }
        | Command::Chow { common, .. }
        | Command::Report { common, .. }
        | Command::Emit { common, .. } => common,
    }
}

fn dispatch(command: Command) -> Result<Output> {
    match command {
        Command::Build(c) => build(&c),
        Command::Verify { common, trials, tamper } => verify(&common, trials, tamper),
        Command::SolveAmvc { common, y, oracle } => solve(&common, &y, oracle),
        Command::Count { common, kmax } => count(&common, kmax),
        Command::Poincare(c) => poincare(&c),
        Command::Chow {
            common,
            graded_kmax,
            emit,
            script,
        } => chow(&common, graded_kmax, emit.as_deref(), script.as_deref()),
        Command::Report { common, kmax } => report(&common, kmax),
        Command::Emit { common, what } => emit_matrix(&common, what),
        Command::Moduli(c) => moduli(&c),
    }
}

fn emit(common: &Common, out: Output) -> Result<bool> {
    let text = match common.format {
        Format::Json => {
            let mut doc = out.json;
            if let Value::Object(map) = &mut doc {
                map.insert("schema_version".into(), json!(SCHEMA_VERSION));
            }
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            s
        }
        Format::Pretty => out.pretty,
        Format::Csv => out.csv.ok_or_else(|| anyhow!("csv output is only available for `emit`"))?,
    };
    match &common.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(out.ok)
}

fn degree(c: &Common) -> Result<Degree> {
    Ok(Degree::new(c.d1, c.d2)?)
}

fn dims(d: Degree) -> Value {
    json!({ "d1": d.d1(), "d2": d.d2(), "r": d.r(), "n": d.n(), "r_minus_n": d.torus_rank() })
}

fn build(c: &Common) -> Result<Output> {
    let d = degree(c)?;
    let w = build_weight_matrix(d);
    let v = build_vertex_matrix(d);
    let pcs = build_primitive_collections(d);
    let mut pretty = format!("degree {d}: r = {}, n = {}, r-n = {}\n\nW\n", d.r(), d.n(), d.torus_rank());
    pretty.push_str(&w.pretty());
    pretty.push_str("\nV\n");
    pretty.push_str(&v.pretty());
    let _ = writeln!(pretty, "\nprimitive collections ({})", pcs.len());
    for coll in &pcs.collections {
        let names: Vec<String> = coll.members.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(pretty, "  {{{}}}", names.join(", "));
    }
    Ok(Output::new(
        json!({
            "degree": dims(d),
            "weight_matrix": w,
            "vertex_matrix": v,
            "primitive_collections": pcs.collections,
        }),
        pretty,
    ))
}

fn verify(c: &Common, trials: usize, tamper: bool) -> Result<Output> {
    let d = degree(c)?;
    let mut problem = AmvcProblem::new(d);
    if tamper {
        let m = &mut problem.weight.matrix;
        m.set(0, 0, m.get(0, 0) + 1);
    }
    let w = &problem.weight;
    let v = build_vertex_matrix(d);

    let exact = verify_exact_sequence(&v.matrix, &w.matrix)?;
    let identities = verify_column_identities(w);

    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut mvc_passed = 0;
    let mut mvc_first_failure = Value::Null;
    for trial in 0..trials {
        let y: Vec<Q> = (0..d.r()).map(|_| q(rng.gen_range(-50..=50))).collect();
        match problem.solve(&y) {
            Ok(s) if problem.is_solution(&y, &s.x) => mvc_passed += 1,
            other => {
                if mvc_first_failure.is_null() {
                    mvc_first_failure = json!({
                        "trial": trial,
                        "y": y.iter().map(rational::to_text).collect::<Vec<_>>(),
                        "error": match other {
                            Err(e) => e.to_string(),
                            Ok(_) => "solution violates the min-value conditions".to_string(),
                        },
                    });
                }
            }
        }
    }
    let simplicial = verify_simplicial_sample(d, trials, c.seed);

    let identity_failures = identities.failures().count();
    let ok = exact.is_exact() && identities.all_passed() && mvc_passed == trials && simplicial.all_passed();
    let mark = |b: bool| if b { "pass" } else { "FAIL" };
    let mut pretty = format!("verify {d} (seed {}, {trials} trials)\n", c.seed);
    let _ = writeln!(
        pretty,
        "  exact sequence      {}  failures {:?}",
        mark(exact.is_exact()),
        exact.failures()
    );
    let _ = writeln!(
        pretty,
        "  column identities   {}  {}/{}",
        mark(identities.all_passed()),
        identities.checks.len() - identity_failures,
        identities.checks.len()
    );
    let _ = writeln!(pretty, "  min-value trials    {}  {mvc_passed}/{trials}", mark(mvc_passed == trials));
    let _ = writeln!(
        pretty,
        "  simplicial samples  {}  {}/{}",
        mark(simplicial.all_passed()),
        simplicial.passed,
        trials
    );
    let _ = writeln!(pretty, "overall: {}", mark(ok));

    let first_identity_failure = identities.failures().next().map(|f| json!(f)).unwrap_or(Value::Null);
    let mut out = Output::new(
        json!({
            "degree": dims(d),
            "seed": c.seed,
            "trials": trials,
            "tampered": tamper,
            "passed": ok,
            "exact_sequence": {
                "passed": exact.is_exact(),
                "failed_conditions": exact.failures().iter().map(|ch| ch.to_string()).collect::<Vec<_>>(),
                "report": exact,
            },
            "column_identities": {
                "passed": identities.all_passed(),
                "checked": identities.checks.len(),
                "failed": identity_failures,
                "first_failure": first_identity_failure,
            },
            "min_value_trials": {
                "passed": mvc_passed == trials,
                "succeeded": mvc_passed,
                "first_failure": mvc_first_failure,
            },
            "simplicial_samples": {
                "passed": simplicial.all_passed(),
                "succeeded": simplicial.passed,
                "min_size": simplicial.min_size,
                "max_size": simplicial.max_size,
                "first_failure": simplicial.failures.first(),
            },
        }),
        pretty,
    );
    out.ok = ok;
    Ok(out)
}

fn parse_y(text: &str) -> Result<Vec<Q>> {
    let values: Vec<Value> = serde_json::from_str(text).context("--y must be a JSON array")?;
    values
        .iter()
        .enumerate()
        .map(|(i, v)| match v {
            Value::Number(n) => n
                .as_i64()
                .map(q)
                .ok_or_else(|| anyhow!("y[{i}] = {n} is not an integer; pass fractions as \"p/q\" strings")),
            Value::String(s) => rational::parse(s).ok_or_else(|| anyhow!("y[{i}] = {s:?} is not a rational")),
            other => bail!("y[{i}] = {other} is not a number"),
        })
        .collect()
}

fn solve(c: &Common, y: &str, oracle: bool) -> Result<Output> {
    let d = degree(c)?;
    let y = parse_y(y)?;
    let problem = AmvcProblem::new(d);
    let sol = problem.solve(&y)?;
    let labels: Vec<String> = problem.weight.row_labels.iter().map(|l| l.to_string()).collect();
    let x_text: Vec<String> = sol.x.iter().map(rational::to_text).collect();

    let mut pretty = format!("min-value solution for {d}\n");
    for (l, x) in labels.iter().zip(&x_text) {
        let _ = writeln!(pretty, "  x[{l}] = {x}");
    }
    let all_zero = sol.residuals.iter().all(Zero::is_zero);
    let _ = writeln!(pretty, "residuals all zero: {all_zero}");

    let (oracle_json, agreement) = if oracle {
        let e = problem.enumerate(&y)?;
        let agree = e.solutions.len() == 1 && e.solutions[0].x == sol.x;
        let _ = writeln!(
            pretty,
            "oracle: {} solution(s) from {} patterns, agreement {agree}",
            e.solutions.len(),
            e.patterns_tried
        );
        (json!(e), json!(agree))
    } else {
        (Value::Null, Value::Null)
    };

    let mut out = Output::new(
        json!({
            "degree": dims(d),
            "x_labels": labels,
            "x": x_text,
            "residuals": sol.residuals.iter().map(rational::to_text).collect::<Vec<_>>(),
            "member_values_nonnegative": problem
                .member_values(&y, &sol.x)
                .iter()
                .all(|v| !v.is_negative()),
            "oracle": oracle_json,
            "oracle_agreement": agreement,
        }),
        pretty,
    );
    out.ok = agreement != json!(false);
    Ok(out)
}

fn count(c: &Common, kmax: Option<usize>) -> Result<Output> {
    let d = degree(c)?;
    let table = count_cones(d, kmax.unwrap_or(d.n() / 2), Some(c.budget))?;
    let mut pretty = format!("cone counts for {d}\n");
    for (k, n) in table.counts.iter().enumerate() {
        let _ = writeln!(pretty, "  |Sigma({k})| = {n}");
    }
    Ok(Output::new(json!(table), pretty))
}

/// `(1+t^2)^m` when the Betti numbers are binomial coefficients.
fn factored(p: &PoincarePolynomial) -> Option<String> {
    let m = p.betti.len() - 1;
    p.betti
        .iter()
        .enumerate()
        .all(|(k, &b)| b == binomial(m, k))
        .then(|| format!("(1+t^2)^{m}"))
}

fn poincare(c: &Common) -> Result<Output> {
    let d = degree(c)?;
    let res = poincare_polynomial(d, Some(c.budget))?;
    let f = factored(&res.polynomial);
    let mut pretty = format!("P(t) for {d} = {}\n", res.polynomial);
    if let Some(f) = &f {
        let _ = writeln!(pretty, "       = {f}");
    }
    if let Some(cmp) = &res.comparison {
        let _ = writeln!(pretty, "equals (1+t^2)^{}: {}", cmp.exponent, cmp.equal);
    }
    Ok(Output::new(
        json!({
            "degree": dims(d),
            "betti": res.polynomial.betti,
            "coefficients": res.polynomial.coefficients(),
            "polynomial": res.polynomial.to_string(),
            "factored": f,
            "comparison": res.comparison,
            "cone_counts": res.counts.counts,
        }),
        pretty,
    ))
}

fn chow(
    c: &Common,
    graded_kmax: Option<usize>,
    dialect: Option<&str>,
    script_path: Option<&std::path::Path>,
) -> Result<Output> {
    let d = degree(c)?;
    let w = build_weight_matrix(d);
    let basis = chow_group_basis(&w)?;
    let p = chow_presentation(d);
    let graded = graded_kmax
        .map(|k| graded_dimensions(&p, k, Some(c.budget)))
        .transpose()?;
    let script = dialect.map(|dl| emit_cas_script(&p, dl)).transpose()?;
    let mut script_json = script.clone().map(Value::String).unwrap_or(Value::Null);
    if let (Some(text), Some(path)) = (&script, script_path) {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        script_json = json!({ "written_to": path.display().to_string() });
    }

    let rendered: Vec<String> = p.relations.iter().map(|r| r.to_string()).collect();
    let mut pretty = format!(
        "Q[h1..h{}] / <{}>\n",
        p.num_generators,
        rendered.join(", ")
    );
    if let Some(g) = &graded {
        let _ = writeln!(pretty, "graded dimensions: {g:?}");
    }
    if let (Some(s), None) = (&script, script_path) {
        pretty.push('\n');
        pretty.push_str(s);
    }
    Ok(Output::new(
        json!({
            "degree": dims(d),
            "num_generators": p.num_generators,
            "generators": w.row_labels.iter().enumerate()
                .map(|(k, l)| json!({ "name": format!("h{}", k + 1), "row": l }))
                .collect::<Vec<_>>(),
            "relations": p.relations.iter().map(|r| json!({
                "text": r.to_string(),
                "collection": r.collection,
                "factors": r.factors,
            })).collect::<Vec<_>>(),
            "chow_group_basis": basis,
            "graded_dimensions": graded,
            "script": script_json,
        }),
        pretty,
    ))
}

fn report(c: &Common, kmax: usize) -> Result<Output> {
    let d = degree(c)?;
    let res = poincare_polynomial(d, Some(c.budget))?;
    let betti = &res.polynomial.betti;
    let kmax = kmax.min(d.n());
    let graded = graded_dimensions(&chow_presentation(d), kmax, Some(c.budget))?;
    let graded_matches = graded.iter().zip(betti).all(|(&g, &b)| g as i128 == b);
    let f = factored(&res.polynomial);
    let display = f.clone().unwrap_or_else(|| res.polynomial.to_string());
    let symmetric = res.polynomial.is_palindromic();

    let mut pretty = format!("report for {d}\n");
    let _ = writeln!(pretty, "  cone counts         {:?}", res.counts.counts);
    let _ = writeln!(pretty, "  Betti numbers       {betti:?}");
    let _ = writeln!(pretty, "  P(t)                {display}");
    let _ = writeln!(pretty, "  graded dimensions   {graded:?} (match: {graded_matches})");
    if let Some(cmp) = &res.comparison {
        let _ = writeln!(pretty, "  equals (1+t^2)^{}    {}", cmp.exponent, cmp.equal);
    }

    let mut out = Output::new(
        json!({
            "degree": dims(d),
            "cone_counts": res.counts.counts,
            "betti": betti,
            "polynomial": res.polynomial.to_string(),
            "display": display,
            "factored": f.is_some(),
            "symmetric": symmetric,
            "graded_dimensions": graded,
            "graded_matches_betti": graded_matches,
            "comparison": res.comparison,
        }),
        pretty,
    );
    out.ok = graded_matches && symmetric;
    Ok(out)
}

fn emit_matrix(c: &Common, what: Which) -> Result<Output> {
    let d = degree(c)?;
    let m = match what {
        Which::Weight => build_weight_matrix(d),
        Which::Vertex => build_vertex_matrix(d),
    };
    let mut out = Output::new(json!({ "degree": dims(d), "matrix": m }), m.pretty());
    out.csv = Some(m.to_csv());
    Ok(out)
}

fn moduli(c: &Common) -> Result<Output> {
    let d = degree(c)?;
    let m = moduli_presentation(d);
    let coords: Vec<String> = m.coordinates.iter().map(|l| l.to_string()).collect();
    let mut pretty = format!("(C^{} - Z) / (C*)^{}\n", d.r(), m.torus_rank);
    let _ = writeln!(pretty, "coordinates: {}", coords.join(", "));
    let _ = writeln!(pretty, "Z = {}", m.excluded_display());
    pretty.push_str("\nweights\n");
    pretty.push_str(&m.weights.pretty());
    Ok(Output::new(json!(m), pretty))
}
