use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use projconst::experiments::{self, Settings};
use projconst::formats::{self, FrequencySpec, SupportSpec};
use projconst::report::{ExperimentReport, Field, Format, Record};
use projconst::Runtime;
use projconst_core::constants::{self, Curve};
use projconst_core::dirichlet::{self, DirichletSpace, ProjectionOptions, Route};
use projconst_core::indexsets::{self, Family, GenerateOptions, DEFAULT_CAP};
use projconst_core::integrate::McConfig;
use projconst_core::kernels::KernelSpec;
use projconst_core::sidon::{self, SidonBudget};
use projconst_core::Backend;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Projection constants of spaces of trigonometric and Dirichlet polynomials.
#[derive(Parser, Debug)]
#[command(name = "projconst", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Master seed of every random stream.
    #[arg(long, global = true, default_value_t = McConfig::default().seed)]
    seed: u64,
    /// Sample budget (default depends on the command).
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Independent blocks (random shifts) per estimate.
    #[arg(long, global = true, default_value_t = McConfig::default().blocks)]
    blocks: u32,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output path; the words `json` and `csv` select the format instead.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Output format: json or csv.
    #[arg(long, global = true)]
    format: Option<Format>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lebesgue constant L_m, or L⁺_m with --plus.
    Lebesgue {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        plus: bool,
    },
    /// Closed forms, bounds and reference curves.
    Constants(ConstantsArgs),
    /// Sizes of index families and number-theoretic counts.
    Count(CountArgs),
    /// Projection constant of a space of Dirichlet polynomials.
    Proj(ProjArgs),
    /// Certified Sidon-constant bounds of a character set.
    Sidon(SidonArgs),
    /// Run a registered experiment, or `all`.
    Experiment { name: String },
    /// List the registered experiments.
    ListExperiments,
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    /// proj_l2_complex, proj_l2_real, proj_l1_real, proj_l1_complex,
    /// kadets_snobar, lewis_bound, lewis_gap, lambda2_bracket, proj_box_exact,
    /// reference_curve
    #[arg(long)]
    name: String,
    #[arg(long)]
    n: Option<u64>,
    /// Λ(2) constant for lambda2_bracket.
    #[arg(long)]
    c2: Option<f64>,
    /// Box extents for proj_box_exact, comma separated.
    #[arg(long, value_delimiter = ',')]
    d: Vec<u64>,
    /// Analytic box [0, d_j] instead of [−d_j, d_j].
    #[arg(long)]
    analytic: bool,
    /// Curve for reference_curve: lozinski, harper, logp, landau, babenko, limit_formula.
    #[arg(long)]
    curve: Option<String>,
    /// Curve argument.
    #[arg(long)]
    x: Option<f64>,
    /// Curve parameter (m for landau, n for babenko and limit_formula).
    #[arg(long)]
    param: Option<u32>,
}

#[derive(Args, Debug)]
struct CountArgs {
    /// A family tag (lambda_exact, lambda_le, j_exact, j_le, box, sphere,
    /// delta_x, n1_lift, ninf_lift), or one of lambda1, lattice, prime_pi, n1.
    #[arg(long)]
    family: String,
    /// key=value pairs, e.g. p=1,m=2,n=3 or d=1:2,analytic=false.
    #[arg(long, default_value = "")]
    params: String,
    /// Cardinality cap for generated sets.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u128,
    /// Write the generated set to this index-set file.
    #[arg(long)]
    write: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ProjArgs {
    /// natural, logn, logp, qindep or file:PATH.
    #[arg(long)]
    frequency: FrequencySpec,
    /// upto:x, range:a,b, list:..., n1:m,x, ninf:m,n or file:PATH.
    #[arg(long)]
    support: SupportSpec,
    /// auto, exact_kernel, exact_product, closed_form_l1, mc, qmc, ergodic.
    #[arg(long, default_value = "auto")]
    method: String,
    /// Half-length T of the time average.
    #[arg(long, default_value_t = dirichlet::DEFAULT_HORIZON)]
    horizon: f64,
    /// Minimum number of integrand evaluations of the time average.
    #[arg(long, default_value_t = 2)]
    nodes: usize,
    /// Declare the frequency a B₂ set.
    #[arg(long)]
    b2: bool,
    /// Relative standard error at which sampling stops early.
    #[arg(long, default_value_t = dirichlet::DEFAULT_REL_STDERR)]
    rel_stderr: f64,
    /// Use |P|² as a control variate.
    #[arg(long)]
    control_variate: bool,
}

#[derive(Args, Debug)]
struct SidonArgs {
    /// Any --support form, or family:<tag>:<params> for multi-index sets.
    #[arg(long)]
    support: SupportSpec,
    /// Grid points per axis (0 chooses automatically).
    #[arg(long, default_value_t = 0)]
    grid: usize,
    /// Number of random candidate polynomials.
    #[arg(long, default_value_t = SidonBudget::default().candidates)]
    budget: usize,
    /// Cardinality cap for generated sets.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u128,
}

/// Where output goes and in which format.
struct Sink {
    format: Format,
    path: Option<PathBuf>,
}

impl Sink {
    fn new(g: &Global, default: Format) -> Self {
        match g.out.as_deref() {
            Some("json") => Sink { format: Format::Json, path: None },
            Some("csv") => Sink { format: Format::Csv, path: None },
            Some(p) => {
                let by_ext = match Path::new(p).extension().and_then(|e| e.to_str()) {
                    Some("csv") => Some(Format::Csv),
                    Some("json") => Some(Format::Json),
                    _ => None,
                };
                Sink { format: g.format.or(by_ext).unwrap_or(default), path: Some(PathBuf::from(p)) }
            }
            None => Sink { format: g.format.unwrap_or(default), path: None },
        }
    }

    fn explicit(g: &Global) -> bool {
        g.out.is_some() || g.format.is_some()
    }

    fn write(&self, text: &str) -> Result<()> {
        match &self.path {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

fn help_text() -> String {
    let mut s = String::from("Experiments:\n");
    for e in experiments::registry() {
        s.push_str(&format!("  {:<14} {}\n", e.name, e.anchor));
    }
    s.push_str("\nEnvironment:\n  HAAR_CACHE_DIR  directory for persisted Lebesgue-constant and lattice caches");
    s
}

fn main() -> ExitCode {
    let matches = Cli::command().after_help(help_text()).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` when an experiment assertion failed.
fn run(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    let rt = Runtime::from_env(g.jobs).context("starting the runtime")?;
    let ok = match &cli.command {
        Command::Lebesgue { m, plus } => {
            let spec = if *plus { KernelSpec::analytic(*m) } else { KernelSpec::symmetric(*m) };
            let value = rt.lebesgue(spec)?;
            if Sink::explicit(g) {
                let mut r = Record::new();
                r.push("m", *m).push("kind", if *plus { "analytic" } else { "symmetric" });
                r.push("value", value);
                let sink = Sink::new(g, Format::Json);
                sink.write(&r.render(sink.format))?;
            } else {
                println!("{value:.16e}");
            }
            true
        }
        Command::Constants(a) => {
            let r = constants_record(a, &rt)?;
            let sink = Sink::new(g, Format::Json);
            sink.write(&r.render(sink.format))?;
            true
        }
        Command::Count(a) => {
            let r = count_record(a, &rt)?;
            let sink = Sink::new(g, Format::Json);
            sink.write(&r.render(sink.format))?;
            true
        }
        Command::Proj(a) => {
            let r = proj_record(a, g, &rt)?;
            let sink = Sink::new(g, Format::Json);
            sink.write(&r.render(sink.format))?;
            true
        }
        Command::Sidon(a) => {
            let r = sidon_record(a, g, &rt)?;
            let sink = Sink::new(g, Format::Json);
            sink.write(&r.render(sink.format))?;
            true
        }
        Command::Experiment { name } => run_experiments(name, g, &rt)?,
        Command::ListExperiments => {
            let mut out = std::io::stdout().lock();
            for e in experiments::registry() {
                writeln!(out, "{}\t{}\t{}", e.name, e.anchor, e.budget)?;
            }
            true
        }
    };
    rt.flush().context("writing caches")?;
    Ok(ok)
}

fn run_experiments(name: &str, g: &Global, rt: &Runtime) -> Result<bool> {
    let settings = Settings { seed: g.seed, samples: g.samples, blocks: g.blocks };
    let names: Vec<&str> = if name == "all" {
        experiments::registry().iter().map(|e| e.name).collect()
    } else {
        vec![name]
    };
    let sink = Sink::new(g, Format::Csv);
    // with several experiments an output path names a directory
    let several = names.len() > 1;
    let dir = match (&sink.path, several) {
        (Some(p), true) => {
            std::fs::create_dir_all(p).with_context(|| format!("creating {}", p.display()))?;
            Some(p.clone())
        }
        _ => None,
    };
    let mut ok = true;
    for n in names {
        let report: ExperimentReport = experiments::run_experiment(n, &settings, rt)?;
        let text = report.render(sink.format)?;
        match (&dir, &sink.path) {
            (Some(d), _) => {
                let ext = if sink.format == Format::Csv { "csv" } else { "json" };
                let p = d.join(format!("{n}.{ext}"));
                std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
            }
            (None, Some(_)) => sink.write(&text)?,
            (None, None) => {
                if several && sink.format == Format::Csv {
                    println!("# experiment: {n}");
                }
                sink.write(&text)?;
            }
        }
        for f in report.failures() {
            eprintln!("{n}: FAILED: {}", f.description);
        }
        ok &= report.passed();
    }
    Ok(ok)
}

fn constants_record(a: &ConstantsArgs, rt: &Runtime) -> Result<Record> {
    let n = || a.n.ok_or_else(|| anyhow!("{} needs --n", a.name));
    let mut r = Record::new();
    r.push("name", a.name.as_str());
    match a.name.as_str() {
        "proj_l2_complex" | "proj_l2_real" | "proj_l1_real" | "proj_l1_complex" | "kadets_snobar"
        | "lewis_bound" | "lewis_gap" => {
            let n = n()?;
            let v = match a.name.as_str() {
                "proj_l2_complex" => constants::proj_l2_complex(n)?,
                "proj_l2_real" => constants::proj_l2_real(n)?,
                "proj_l1_real" => constants::proj_l1_real(n)?,
                "proj_l1_complex" => constants::proj_l1_complex(n)?,
                "kadets_snobar" => constants::kadets_snobar(n),
                "lewis_bound" => constants::lewis_bound(n)?,
                _ => constants::lewis_gap(n)?,
            };
            r.push("n", n).push("value", v);
        }
        "lambda2_bracket" => {
            let n = n()?;
            let c2 = a.c2.ok_or_else(|| anyhow!("lambda2_bracket needs --c2"))?;
            let b = constants::lambda2_bracket(n, c2)?;
            r.push("n", n).push("c2", c2).push("lo", b.lo).push("hi", b.hi);
        }
        "proj_box_exact" => {
            let v = constants::proj_box_exact_with(&a.d, a.analytic, rt)?;
            let d: Vec<String> = a.d.iter().map(|v| v.to_string()).collect();
            r.push("d", d.join(":")).push("analytic", a.analytic).push("value", v);
        }
        "reference_curve" => {
            let name = a.curve.as_deref().ok_or_else(|| anyhow!("reference_curve needs --curve"))?;
            let x = a.x.ok_or_else(|| anyhow!("reference_curve needs --x"))?;
            let c = Curve::parse(name, a.param)?;
            r.push("curve", c.name()).push("x", x).push("value", constants::reference_curve(c, x)?);
        }
        other => bail!("unknown constant `{other}`"),
    }
    Ok(r)
}

fn kv(params: &str, key: &str) -> Result<u64> {
    params
        .split(',')
        .filter_map(|p| p.split_once('='))
        .find(|(k, _)| *k == key)
        .ok_or_else(|| anyhow!("missing parameter `{key}`"))?
        .1
        .parse()
        .with_context(|| format!("parameter `{key}`"))
}

fn count_record(a: &CountArgs, rt: &Runtime) -> Result<Record> {
    let mut r = Record::new();
    r.push("family", a.family.as_str()).push("params", a.params.as_str());
    match a.family.as_str() {
        "lambda1" => {
            r.push("count", indexsets::cardinality_lambda1(kv(&a.params, "m")?, kv(&a.params, "n")?)?);
        }
        "lattice" => {
            let n = kv(&a.params, "n")? as usize;
            r.push("count", indexsets::lattice_count_capped(kv(&a.params, "m")?, n, a.cap)?);
        }
        "prime_pi" => {
            let x = kv(&a.params, "x")?;
            r.push("count", rt.sieve(x.max(2)).prime_pi(x)?);
        }
        "n1" => {
            let (m, x) = (kv(&a.params, "m")?, kv(&a.params, "x")?);
            let m = u32::try_from(m).context("m")?;
            r.push("count", rt.sieve(x.max(2)).n1_numbers(m, x)?.len());
        }
        tag => {
            let family = Family::parse(tag, &a.params)?;
            let need = match family {
                Family::DeltaX { x } | Family::N1Lift { x, .. } => x.max(2),
                _ => 2,
            };
            let sieve = rt.sieve(need);
            let set = indexsets::generate_with(&family, &GenerateOptions { cap: a.cap, sieve: Some(&sieve) })?;
            r.push("dim", set.dim()).push("count", set.len());
            if let Some(p) = &a.write {
                let f = std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
                let mut w = std::io::BufWriter::new(f);
                formats::write_index_set(&set, &mut w)?;
                w.flush()?;
            }
        }
    }
    Ok(r)
}

fn proj_record(a: &ProjArgs, g: &Global, rt: &Runtime) -> Result<Record> {
    let natural = a.frequency == FrequencySpec::Natural;
    let support = a.support.integers(natural, rt)?;
    let max_n = support.iter().copied().max().unwrap_or(1);
    let frequency = a.frequency.build(max_n, a.b2, rt)?;
    let space = DirichletSpace::new(frequency, support)?;
    let budget = McConfig {
        samples: g.samples.unwrap_or(McConfig::default().samples),
        seed: g.seed,
        blocks: g.blocks,
        control_variate: a.control_variate,
        target_rel_stderr: Some(a.rel_stderr),
        ..McConfig::default()
    };
    let opts = ProjectionOptions { route: Route::parse(&a.method)?, budget, horizon: a.horizon, nodes: a.nodes };
    let res = dirichlet::projection_constant(&space, &opts, rt)?;
    let e = res.estimate;
    let mut r = Record::new();
    r.push("value", e.value).push("stderr", e.stderr).push("samples", e.samples);
    r.push("method", res.method.label()).push("estimator", e.method.label()).push("seed", e.seed);
    match res.bracket {
        Some(b) => {
            r.push("bracket_lo", b.lo).push("bracket_hi", b.hi).push("bracket_source", b.source);
        }
        None => {
            r.push("bracket_lo", Field::Json(serde_json::Value::Null));
            r.push("bracket_hi", Field::Json(serde_json::Value::Null));
            r.push("bracket_source", "");
        }
    }
    r.push("frequency", space.frequency().label()).push("support_size", space.len());
    r.push("torus_dim", res.torus_dim).push("warning", res.warning);
    if let Some(erg) = res.ergodic {
        let horizons: Vec<serde_json::Value> = erg.horizons.iter().map(|&h| h.into()).collect();
        let values: Vec<serde_json::Value> = erg.values.iter().map(|&v| v.into()).collect();
        r.push("ergodic_horizons", Field::Json(horizons.into()));
        r.push("ergodic_values", Field::Json(values.into()));
    }
    if res.warning {
        eprintln!("warning: the sample budget ran out before the stderr target was met");
    }
    Ok(r)
}

fn sidon_record(a: &SidonArgs, g: &Global, rt: &Runtime) -> Result<Record> {
    let set = a.support.index_set(a.cap, rt)?;
    let budget = SidonBudget { candidates: a.budget, grid: a.grid, seed: g.seed };
    let e = sidon::sidon_bounds(&set, &budget, rt)?;
    let mut r = Record::new();
    r.push("lower", e.lower).push("upper", e.upper).push("sup_certificate", e.sup_certificate);
    r.push("grid", e.grid).push("dim", set.dim()).push("size", set.len());
    let support: Vec<serde_json::Value> = e.witness.support().iter().map(|a| a.to_dense().into()).collect();
    let coefs: Vec<serde_json::Value> =
        e.witness.coefficients().iter().map(|c| serde_json::json!([c.re, c.im])).collect();
    r.push("witness_support", Field::Json(support.into()));
    r.push("witness_coefficients", Field::Json(coefs.into()));
    Ok(r)
}
