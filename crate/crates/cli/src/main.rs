mod args;
mod table;

use std::process::ExitCode;

use clap::Parser;
use onedep::detpp::kernel_from_one_runs;
use onedep::enumerate::{pattern_count_table, PairSet};
use onedep::error::Error;
use onedep::models::{self, ModelSpec};
use onedep::series::Rational;
use onedep::verify::Suite;
use serde_json::json;

use args::{Cli, Command, ModelArgs, ModelName, RunKindArg};
use table::{render_rational, Cell, Table};

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DEPTH: u8 = 3;

/// A command that ran but whose verification checks failed still prints
/// its table; `failed` picks the exit code.
struct Output {
    table: Table,
    failed: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DepthExceeded { .. } | Error::SamplerUnavailable(_) => EXIT_DEPTH,
        Error::InternalInconsistency(_) => EXIT_VERIFY,
        _ => EXIT_USAGE,
    }
}

/// Accepts `a/b`, integers, and plain decimals like `0.25`.
fn parse_rational(flag: &str, s: &str) -> Result<Rational, Error> {
    let bad = || Error::Usage(format!("--{flag}: cannot parse {s:?} as a rational"));
    let s = s.trim();
    if let Some((int_part, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac}");
        let den = format!("1{}", "0".repeat(frac.len()));
        return format!("{digits}/{den}").parse().map_err(|_| bad());
    }
    s.parse().map_err(|_| bad())
}

fn model_spec(m: &ModelArgs) -> Result<ModelSpec, Error> {
    let need = |flag: &str, v: &Option<String>| -> Result<Rational, Error> {
        match v {
            Some(s) => parse_rational(flag, s),
            None => Err(Error::Usage(format!(
                "model {} needs --{flag}",
                clap::ValueEnum::to_possible_value(&m.model)
                    .expect("named")
                    .get_name()
            ))),
        }
    };
    let spec = match m.model {
        ModelName::Eulerian => ModelSpec::Eulerian,
        ModelName::Iid => ModelSpec::Iid {
            p: need("p", &m.p)?,
        },
        ModelName::OnePair => ModelSpec::OnePair {
            p: need("p", &m.p)?,
        },
        ModelName::Flipping => ModelSpec::Flipping {
            p: need("p", &m.p)?,
        },
        ModelName::Carries => ModelSpec::Carries {
            b: m.b
                .ok_or_else(|| Error::Usage("model carries needs --b".into()))?,
        },
        ModelName::NonTwoBlock => ModelSpec::NonTwoBlock {
            alpha: need("alpha", &m.alpha)?,
            beta: need("beta", &m.beta)?,
        },
    };
    spec.validate()?;
    Ok(spec)
}

fn parse_pairs(m: usize, s: &str) -> Result<PairSet, Error> {
    let mut pairs = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parsed = item
            .split_once(':')
            .and_then(|(x, y)| Some((x.trim().parse().ok()?, y.trim().parse().ok()?)));
        match parsed {
            Some(p) => pairs.push(p),
            None => {
                return Err(Error::Usage(format!(
                    "--pairs: bad pair {item:?}, expected x:y"
                )))
            }
        }
    }
    PairSet::new(m, pairs)
}

fn model_params(spec: &ModelSpec) -> serde_json::Map<String, serde_json::Value> {
    let mut p = serde_json::Map::new();
    p.insert("model".into(), json!(spec.name()));
    match spec {
        ModelSpec::Eulerian => {}
        ModelSpec::Iid { p: x } | ModelSpec::OnePair { p: x } | ModelSpec::Flipping { p: x } => {
            p.insert("p".into(), json!(render_rational(x)));
        }
        ModelSpec::Carries { b } => {
            p.insert("b".into(), json!(b));
        }
        ModelSpec::NonTwoBlock { alpha, beta } => {
            p.insert("alpha".into(), json!(render_rational(alpha)));
            p.insert("beta".into(), json!(render_rational(beta)));
        }
    }
    p
}

fn with_model(mut t: Table, spec: &ModelSpec) -> Table {
    t.params.extend(model_params(spec));
    t
}

fn dist(m: &ModelArgs, n: usize) -> Result<Output, Error> {
    let spec = model_spec(m)?;
    let bgf = models::bgf(&spec, n)?;
    let mut t = with_model(Table::new("dist", &["j", "k", "=prob"]), &spec).param("n", n);
    for j in 0..=n {
        for k in 0..=j {
            t.rows.push(vec![
                Cell::Int(j as u64),
                Cell::Int(k as u64),
                Cell::Rat(bgf.coeff(k, j)),
            ]);
        }
    }
    Ok(Output {
        table: t,
        failed: false,
    })
}

fn runs(m: &ModelArgs, order: usize, kind: RunKindArg) -> Result<Output, Error> {
    let spec = model_spec(m)?;
    let (seq, name) = match kind {
        RunKindArg::Zero => (models::zero_runs(&spec, order)?, "zero"),
        RunKindArg::One => (models::one_runs(&spec, order)?, "one"),
    };
    let mut t = with_model(Table::new("runs", &["kind", "n", "=prob"]), &spec)
        .param("order", order)
        .param("kind", name);
    for n in 0..=order {
        t.rows.push(vec![
            Cell::Text(name.into()),
            Cell::Int(n as u64),
            Cell::Rat(seq.coeff(n).clone()),
        ]);
    }
    Ok(Output {
        table: t,
        failed: false,
    })
}

fn kernel(m: &ModelArgs, hi: usize) -> Result<Output, Error> {
    let spec = model_spec(m)?;
    let kb = kernel_from_one_runs(&models::one_runs(&spec, hi + 1)?, hi)?;
    let mut t = with_model(Table::new("kernel", &["lag", "=value"]), &spec).param("hi", hi);
    for (lag, v) in kb.iter() {
        t.rows
            .push(vec![Cell::Text(lag.to_string()), Cell::Rat(v.clone())]);
    }
    Ok(Output {
        table: t,
        failed: false,
    })
}

fn enumerate(alphabet: usize, pairs: &str, n: usize) -> Result<Output, Error> {
    let ps = parse_pairs(alphabet, pairs)?;
    let table = pattern_count_table(&ps, n)?;
    let listed: Vec<String> = ps.pairs().map(|(x, y)| format!("{x}:{y}")).collect();
    let mut t = Table::new("enumerate", &["n", "k", "count"])
        .param("alphabet", alphabet)
        .param("pairs", listed)
        .param("n", n);
    for len in 1..=n {
        for (k, c) in table.row(len).iter().enumerate() {
            t.rows.push(vec![
                Cell::Int(len as u64),
                Cell::Int(k as u64),
                Cell::Big(c.to_string()),
            ]);
        }
    }
    Ok(Output {
        table: t,
        failed: false,
    })
}

fn verify(suite: &str, seed: u64) -> Result<Output, Error> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse()?]
    };
    let mut t = Table::new("verify", &["suite", "check", "status", "detail"])
        .param("suite", suite)
        .param("seed", seed);
    let mut failed = false;
    for s in suites {
        let report = s.run(seed);
        failed |= !report.passed();
        for c in report.checks {
            let status = if c.passed { "pass" } else { "fail" };
            t.rows.push(vec![
                Cell::Text(s.name().into()),
                Cell::Text(c.name),
                Cell::Text(status.into()),
                Cell::Text(c.detail),
            ]);
        }
    }
    Ok(Output { table: t, failed })
}

fn run(cli: &Cli) -> Result<Output, Error> {
    match &cli.command {
        Command::Dist { model, n } => dist(model, *n),
        Command::Runs { model, order, kind } => runs(model, *order, *kind),
        Command::Kernel { model, hi } => kernel(model, *hi),
        Command::Enumerate { alphabet, pairs, n } => enumerate(*alphabet, pairs, *n),
        Command::Verify { suite, seed } => verify(suite, *seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("onedep: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = out.table.render(cli.output.format, cli.output.decimal);
    let written = match &cli.output.out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("onedep: cannot write output: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    if out.failed {
        ExitCode::from(EXIT_VERIFY)
    } else {
        ExitCode::SUCCESS
    }
}
