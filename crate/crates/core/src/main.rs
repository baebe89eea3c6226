//! Command-line surface: compute invariants of catalog or file-backed
//! groups, run verification sweeps, and benchmark enumeration strategies.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use gtensor::catalog;
use gtensor::fp;
use gtensor::group::{
    derivative_chain, ActionTable, FiniteGroup, DEFAULT_COSET_LIMIT, DEFAULT_ORDER_CAP,
};
use gtensor::harness::{self, SweepOptions};
use gtensor::tensor::{self, Strategy, TensorProduct};
use gtensor::{Error, Limits, Result};

#[derive(Parser)]
#[command(
    name = "gtensor",
    version,
    about = "Non-abelian tensor and exterior products of finite groups"
)]
struct Cli {
    /// Coset-table row limit for enumerations
    #[arg(long, global = true)]
    coset_limit: Option<usize>,
    /// Maximum admitted group order (TENSOR_ORDER_CAP overrides the default)
    #[arg(long, global = true)]
    order_cap: Option<usize>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Direct,
    Nu,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Direct => Strategy::Direct,
            StrategyArg::Nu => Strategy::Nu,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesArg {
    Lower,
    Upper,
    Derived,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    SolvableExact,
    NilpotentBound,
}

/// Group selection shared by the compute subcommands.
#[derive(Args)]
struct GroupArg {
    /// Catalog name (e.g. S3, D4, Q8, C2xC4, E2^3)
    group: Option<String>,
    /// Load the group from a JSON Cayley-table file instead
    #[arg(long)]
    file: Option<PathBuf>,
}

impl GroupArg {
    fn load(&self, limits: &Limits) -> Result<(String, FiniteGroup)> {
        match (&self.group, &self.file) {
            (Some(name), None) => Ok((name.clone(), catalog::by_name(name, limits.order_cap)?)),
            (None, Some(path)) => {
                let g = catalog::load_group(path, limits.order_cap)?;
                Ok((path.display().to_string(), g))
            }
            _ => Err(Error::InvalidGroup(
                "give exactly one of a catalog name or --file".into(),
            )),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Order, abelian invariants and structural predicates of a group
    Info(GroupArg),
    /// Term orders of a central or derived series
    Series {
        #[command(flatten)]
        group: GroupArg,
        /// Which series to compute
        #[arg(long = "type", value_enum)]
        kind: SeriesArg,
        /// Number of terms
        #[arg(short, default_value_t = 4)]
        n: usize,
    },
    /// Tensor square G (x) G under conjugation
    TensorSquare {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, value_enum, default_value_t = StrategyArg::Direct)]
        strategy: StrategyArg,
    },
    /// Exterior square G ^ G
    ExteriorSquare {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, value_enum, default_value_t = StrategyArg::Direct)]
        strategy: StrategyArg,
    },
    /// Iterated tensor powers G^(x)2 .. G^(x)n with bracket-image orders
    TensorPower {
        #[command(flatten)]
        group: GroupArg,
        /// Top power to build (at least 2)
        #[arg(short, default_value_t = 3)]
        n: usize,
    },
    /// Schur multiplier: kernel of the exterior bracket map
    Schur {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, value_enum, default_value_t = StrategyArg::Direct)]
        strategy: StrategyArg,
    },
    /// Higher multiplier-style kernels from the towers
    Multiplier {
        #[command(flatten)]
        group: GroupArg,
        /// solvable-exact is exact; nilpotent-bound is only an upper bound
        #[arg(long, value_enum)]
        variant: VariantArg,
        /// Level k (kernel above the (k+1)-st power)
        #[arg(short, default_value_t = 1)]
        k: usize,
    },
    /// Derivative chain D^0(G) .. D^k(G) under the conjugation self-action
    Derivative {
        #[command(flatten)]
        group: GroupArg,
        #[arg(short, default_value_t = 2)]
        k: usize,
    },
    /// Order of the n-th bracket-vanishing term D_n(G)
    Frakd {
        #[command(flatten)]
        group: GroupArg,
        #[arg(short, default_value_t = 1)]
        n: usize,
    },
    /// Round-trip a group through its multiplication-table presentation
    Roundtrip(GroupArg),
    /// Run claim-verification sweeps over the catalog
    Verify {
        #[arg(long)]
        lemma1: bool,
        #[arg(long)]
        lemma2: bool,
        #[arg(long)]
        thm1: bool,
        #[arg(long)]
        prop1: bool,
        #[arg(long)]
        prop3: bool,
        #[arg(long)]
        dtech: bool,
        #[arg(long)]
        bjr: bool,
        #[arg(long = "schur-group")]
        schur_group: bool,
        /// Largest catalog group order to include
        #[arg(long, default_value_t = 16)]
        max_order: usize,
        /// Largest n for the extension claims
        #[arg(short, default_value_t = 2)]
        n: usize,
        /// Worker threads (0 = default pool width)
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Append the JSON-lines report here instead of stdout
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Time the enumeration strategies on the catalog
    Bench {
        #[arg(long, default_value_t = 12)]
        max_order: usize,
    },
}

fn limits(cli: &Cli) -> Limits {
    let env_cap = std::env::var("TENSOR_ORDER_CAP")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    Limits {
        coset_limit: cli.coset_limit.unwrap_or(DEFAULT_COSET_LIMIT),
        order_cap: cli.order_cap.or(env_cap).unwrap_or(DEFAULT_ORDER_CAP),
    }
}

fn emit(format: Format, value: &Value) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value).unwrap()),
        Format::Table => print_table(value, 0),
    }
}

fn print_table(value: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) => {
                        println!("{pad}{k}:");
                        print_table(v, indent + 1);
                    }
                    Value::Array(items) if items.iter().any(Value::is_object) => {
                        println!("{pad}{k}:");
                        for item in items {
                            print_table(item, indent + 1);
                            println!();
                        }
                    }
                    _ => println!("{pad}{k}: {}", compact(v)),
                }
            }
        }
        _ => println!("{pad}{}", compact(value)),
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => serde_json::to_string(other).unwrap(),
    }
}

fn group_summary(name: &str, g: &FiniteGroup) -> Value {
    json!({
        "group": name,
        "order": g.order(),
        "abelian_invariants": g.abelian_invariants(),
        "predicates": g.predicates(),
    })
}

fn square_summary(name: &str, g: &FiniteGroup, tp: &TensorProduct) -> Value {
    // a small pairing sample: the images of the first few generator pairs
    let mut sample = Vec::new();
    for &a in g.gens().iter().take(2) {
        for &b in g.gens().iter().take(2) {
            sample.push(json!({ "a": a, "b": b, "pair": tp.pair(a, b) }));
        }
    }
    json!({
        "group": name,
        "kind": if tp.exterior { "exterior-square" } else { "tensor-square" },
        "strategy": tp.strategy.to_string(),
        "order": tp.group.order(),
        "abelian_invariants_of_product": tp.group.abelian_invariants(),
        "pairing_sample": sample,
    })
}

fn run(cli: &Cli) -> Result<i32> {
    let limits = limits(cli);
    match &cli.cmd {
        Cmd::Info(arg) => {
            let (name, g) = arg.load(&limits)?;
            emit(cli.format, &group_summary(&name, &g));
        }
        Cmd::Series { group, kind, n } => {
            let (name, g) = group.load(&limits)?;
            let chain = match kind {
                SeriesArg::Lower => g.lower_central_series((*n).max(1)),
                SeriesArg::Upper => g.upper_central_series(*n),
                SeriesArg::Derived => g.derived_series((*n).max(1)),
            };
            let orders: Vec<usize> = chain.terms.iter().map(|t| t.order()).collect();
            emit(
                cli.format,
                &json!({
                    "group": name,
                    "series": chain.kind,
                    "orders": orders,
                    "stabilized": chain.stabilized,
                }),
            );
        }
        Cmd::TensorSquare { group, strategy } => {
            let (name, g) = group.load(&limits)?;
            let tp = tensor::tensor_square(&g, (*strategy).into(), &limits)?;
            emit(cli.format, &square_summary(&name, &g, &tp));
        }
        Cmd::ExteriorSquare { group, strategy } => {
            let (name, g) = group.load(&limits)?;
            let tp = tensor::exterior_square(&g, (*strategy).into(), &limits)?;
            emit(cli.format, &square_summary(&name, &g, &tp));
        }
        Cmd::TensorPower { group, n } => {
            let (name, g) = group.load(&limits)?;
            if *n < 2 {
                return Err(Error::InvalidGroup("tensor-power needs n >= 2".into()));
            }
            let tower = tensor::tensor_tower(&g, *n, &limits)?;
            let levels: Vec<Value> = tower
                .levels
                .iter()
                .enumerate()
                .map(|(i, level)| {
                    json!({
                        "power": i + 2,
                        "order": level.group.order(),
                        "bracket_image": level.lambda.image_subgroup(&g).order(),
                    })
                })
                .collect();
            emit(
                cli.format,
                &json!({ "group": name, "order": g.order(), "levels": levels }),
            );
        }
        Cmd::Schur { group, strategy } => {
            let (name, g) = group.load(&limits)?;
            let m = tensor::schur_multiplier(&g, (*strategy).into(), &limits)?;
            emit(
                cli.format,
                &json!({
                    "group": name,
                    "variant": m.variant,
                    "kernel_order": m.order,
                    "kernel_invariants": m.invariants,
                    "exterior_square_order": m.group.order(),
                }),
            );
        }
        Cmd::Multiplier { group, variant, k } => {
            let (name, g) = group.load(&limits)?;
            if *k < 1 {
                return Err(Error::InvalidGroup("multiplier needs k >= 1".into()));
            }
            let m = match variant {
                VariantArg::SolvableExact => tensor::solvable_multiplier(&g, *k, &limits)?,
                VariantArg::NilpotentBound => tensor::nilpotent_multiplier_bound(&g, *k, &limits)?,
            };
            emit(
                cli.format,
                &json!({
                    "group": name,
                    "k": k,
                    "variant": m.variant,
                    "kernel_order": m.order,
                    "kernel_invariants": m.invariants,
                    "power_order": m.group.order(),
                }),
            );
        }
        Cmd::Derivative { group, k } => {
            let (name, g) = group.load(&limits)?;
            let conj = ActionTable::conjugation(&g);
            let chain = derivative_chain(&g, &g, &conj, *k)?;
            let orders: Vec<usize> = chain.iter().map(|t| t.order()).collect();
            emit(cli.format, &json!({ "group": name, "orders": orders }));
        }
        Cmd::Frakd { group, n } => {
            let (name, g) = group.load(&limits)?;
            if *n < 1 {
                return Err(Error::InvalidGroup("frakd needs n >= 1".into()));
            }
            let term = g.frak_d(*n);
            emit(
                cli.format,
                &json!({ "group": name, "n": n, "order": term.order() }),
            );
        }
        Cmd::Roundtrip(arg) => {
            let (name, g) = arg.load(&limits)?;
            let pres = fp::presentation_of(&g);
            let real = fp::realize_group(&pres, &limits)?;
            let ok = real.group.order() == g.order()
                && real.group.abelian_invariants() == g.abelian_invariants();
            emit(
                cli.format,
                &json!({
                    "group": name,
                    "order": g.order(),
                    "realized_order": real.group.order(),
                    "invariants_match": ok,
                }),
            );
            if !ok {
                return Err(Error::InvalidGroup("round trip mismatch".into()));
            }
        }
        Cmd::Verify {
            lemma1,
            lemma2,
            thm1,
            prop1,
            prop3,
            dtech,
            bjr,
            schur_group,
            max_order,
            n,
            workers,
            report,
        } => {
            let mut claims = Vec::new();
            for (flag, key) in [
                (lemma1, "lemma1"),
                (lemma2, "lemma2"),
                (thm1, "thm1"),
                (prop1, "prop1"),
                (prop3, "prop3"),
                (dtech, "dtech"),
                (bjr, "bjr"),
                (schur_group, "schur-group"),
            ] {
                if *flag {
                    claims.push(key.to_string());
                }
            }
            let opts = SweepOptions {
                max_order: *max_order,
                n_max: *n,
                claims,
                workers: *workers,
                ..SweepOptions::default()
            };
            let sink: Box<dyn Write + Send> = match report {
                Some(path) => Box::new(
                    std::fs::OpenOptions::new()
                        .create(true)
                        .append(true)
                        .open(path)?,
                ),
                None => Box::new(std::io::stdout()),
            };
            let outcome = harness::run_sweep(&opts, &limits, sink)?;
            let mut summary = Map::new();
            summary.insert("pass".into(), json!(outcome.pass));
            summary.insert("fail".into(), json!(outcome.fail));
            summary.insert("skipped".into(), json!(outcome.skipped));
            summary.insert("not_applicable".into(), json!(outcome.not_applicable));
            if let Some(reading) = &outcome.bjr_reading {
                summary.insert("bjr_reading".into(), json!(reading));
            }
            let summary = Value::Object(summary);
            if report.is_some() {
                emit(cli.format, &summary);
            } else {
                eprintln!("{}", serde_json::to_string(&summary).unwrap());
            }
            if outcome.fail > 0 {
                return Ok(1);
            }
        }
        Cmd::Bench { max_order } => {
            let mut rows = Vec::new();
            for name in catalog::curated_names_upto(*max_order, limits.order_cap) {
                let g = catalog::by_name(name, limits.order_cap)?;
                let t0 = Instant::now();
                let direct = tensor::tensor_square(&g, Strategy::Direct, &limits)?;
                let direct_ms = t0.elapsed().as_millis();
                let t1 = Instant::now();
                let nu = tensor::tensor_square(&g, Strategy::Nu, &limits)?;
                let nu_ms = t1.elapsed().as_millis();
                assert_eq!(direct.group.order(), nu.group.order());
                rows.push(json!({
                    "group": name,
                    "order": g.order(),
                    "tensor_square": direct.group.order(),
                    "cosets": direct.group.order(),
                    "direct_ms": direct_ms,
                    "nu_ms": nu_ms,
                }));
            }
            emit(cli.format, &json!({ "rows": rows }));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
