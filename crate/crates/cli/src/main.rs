use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use repconst::constructions::{moser_set, verify_moser};
use repconst::cyclotomic::{cyclotomic_poly, multiplicity_in_poly};
use repconst::mstructure::{
    certify_nonconstant, certify_target, check_certificate, solve_multiplicities, Certificate, ExpVector,
    SolveOutcome,
};
use repconst::repfn::{constancy_check, rep_profile};
use repconst::search::{resume, search_constant_rep, Checkpoint, SearchConfig, SearchOutcome, SearchStatus};
use repconst::{CoefficientTuple, Exec, IntPolynomial, SetPrefix};

/// Exit status when a search stopped on its node budget.
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "repconst", version, about = "Representation functions and non-constancy certificates")]
struct Cli {
    /// Output format; csv is only available for profiles.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Directory for relative output paths.
    #[arg(long, global = true, env = "REPCONST_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Representation counts of a set prefix.
    Repfn(RepfnArgs),
    /// Moser-type set with digits below k in base k^d.
    Moser(MoserArgs),
    /// Cyclotomic polynomial of order N, or its multiplicity in a polynomial.
    Cyclotomic(CyclotomicArgs),
    /// Non-constancy certificate for a theorem-form tuple.
    Certify(CertifyArgs),
    /// Independently replay a certificate file.
    Verify(VerifyArgs),
    /// Solve the multiplicity relations over a box.
    Solve(SolveArgs),
    /// Backtracking search for prefixes with constant representation.
    Search(SearchArgs),
    /// Decomposition, solver conflict, certificate and search for one tuple.
    Demo(DemoArgs),
}

#[derive(Args)]
struct RepfnArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    ks: Vec<u64>,
    /// JSON file with `members` and `decided_bound`.
    #[arg(long, conflicts_with_all = ["members", "bound"])]
    set: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    members: Vec<u64>,
    /// Decided bound M; defaults to the largest member.
    #[arg(long)]
    bound: Option<u64>,
    /// Largest n to report; defaults to the determined horizon.
    #[arg(long)]
    upto: Option<u64>,
    /// Also check r(n) = C on [n0, horizon].
    #[arg(long)]
    constant: Option<u64>,
    #[arg(long, default_value_t = 0)]
    n0: u64,
}

#[derive(Args)]
struct MoserArgs {
    #[arg(long)]
    k: u64,
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long)]
    upto: u64,
    /// Check that r(n; 1, k, …, k^(d-1)) = 1 on the horizon.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CyclotomicArgs {
    n: usize,
    /// JSON coefficient array (constant term first) to divide by Φ_N.
    #[arg(long)]
    multiplicity: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    ks: Vec<u64>,
    /// Support box of the cyclotomic multiplicities; zero by default.
    #[arg(long, value_delimiter = ',')]
    t: Vec<u32>,
    /// Derive this particular index instead of the first one available.
    #[arg(long, value_delimiter = ',')]
    target: Vec<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    certificate: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    ks: Vec<u64>,
    /// Multiplicity entry `j1,j2,…=s`; repeatable.
    #[arg(long = "s", value_name = "J=S")]
    s: Vec<String>,
    #[arg(long = "box", value_delimiter = ',', required = true)]
    bound: Vec<u32>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_delimiter = ',', required_unless_present = "resume")]
    ks: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    c: u64,
    #[arg(long, default_value_t = 0)]
    n0: u64,
    #[arg(long, required_unless_present = "resume")]
    upto: Option<u64>,
    /// Node budget, e.g. 1e8.
    #[arg(long, default_value = "1e8", value_parser = parse_budget)]
    budget: u64,
    #[arg(long)]
    report_all: bool,
    /// Worker threads for the parallel search.
    #[arg(long)]
    threads: Option<usize>,
    /// Explore subtrees one after another.
    #[arg(long)]
    sequential: bool,
    /// Where to write a checkpoint if the budget runs out.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Continue from a checkpoint file.
    #[arg(long, conflicts_with_all = ["ks", "upto"])]
    resume: Option<PathBuf>,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    ks: Vec<u64>,
    /// Decided bound for the corroborating searches.
    #[arg(long, default_value_t = 40)]
    upto: u64,
    /// Searches run for every n0 up to this value, with c = 1 and 2.
    #[arg(long, default_value_t = 10)]
    max_n0: u64,
}

fn parse_budget(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 1.0 && x.fract() == 0.0 && x <= u64::MAX as f64 => Ok(x as u64),
        _ => Err(format!("not a positive integer budget: {s}")),
    }
}

fn parse_s_entry(raw: &str) -> Result<(ExpVector, u64)> {
    let (j, s) = raw
        .split_once('=')
        .with_context(|| format!("expected J=S, got {raw:?}"))?;
    let j = j
        .split(',')
        .map(|x| x.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("bad index in {raw:?}"))?;
    let s = s.trim().parse().with_context(|| format!("bad multiplicity in {raw:?}"))?;
    Ok((ExpVector(j), s))
}

struct Io {
    format: Format,
    out_dir: Option<PathBuf>,
}

impl Io {
    fn resolve(&self, path: &Path) -> PathBuf {
        match &self.out_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }

    fn write(&self, path: &Path, contents: &str) -> Result<PathBuf> {
        let path = self.resolve(path);
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    fn json_only(&self, what: &str) -> Result<()> {
        if self.format == Format::Csv {
            bail!("csv output is only available for repfn profiles, not {what}");
        }
        Ok(())
    }
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("output serializes"));
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn repfn(io: &Io, a: RepfnArgs) -> Result<ExitCode> {
    let ks = CoefficientTuple::new(a.ks)?;
    let set = match a.set {
        Some(path) => serde_json::from_str::<SetPrefix>(&read(&path)?)
            .with_context(|| format!("parsing {}", path.display()))?,
        None => {
            let bound = a.bound.or(a.members.last().copied()).unwrap_or(0);
            SetPrefix::new(a.members, bound)?
        }
    };
    let upto = a.upto.unwrap_or_else(|| set.horizon(&ks));
    let profile = rep_profile(&set, &ks, upto);
    let verdict = a.constant.map(|c| constancy_check(&set, &ks, a.n0, c));
    match io.format {
        Format::Csv => {
            println!("n,count,determined");
            for (n, v) in profile.iter().enumerate() {
                println!("{n},{},{}", v.count, v.determined);
            }
            if let Some(v) = &verdict {
                eprintln!("{}", serde_json::to_string(v)?);
            }
        }
        Format::Json => {
            let rows: Vec<Value> = profile
                .iter()
                .enumerate()
                .map(|(n, v)| json!({"n": n, "count": v.count.to_string(), "determined": v.determined}))
                .collect();
            let mut out = json!({"ks": ks, "decided_bound": set.decided_bound(), "profile": rows});
            if let Some(v) = &verdict {
                out["constancy"] = serde_json::to_value(v)?;
            }
            print_json(&out);
        }
    }
    Ok(status(verdict.is_none_or(|v| v.holds())))
}

fn moser(io: &Io, a: MoserArgs) -> Result<ExitCode> {
    io.json_only("moser")?;
    let set = moser_set(a.k, a.d, a.upto)?;
    if let Some(path) = &a.out {
        let path = io.write(path, &serde_json::to_string_pretty(&set)?)?;
        eprintln!("wrote {}", path.display());
    }
    let mut out = json!({"k": a.k, "d": a.d, "set": set});
    let mut ok = true;
    if a.verify {
        let verdict = verify_moser(a.k, a.d, a.upto)?;
        ok = verdict.holds();
        out["constancy"] = serde_json::to_value(&verdict)?;
    }
    if a.out.is_none() || a.verify {
        print_json(&out);
    }
    Ok(status(ok))
}

fn cyclotomic(io: &Io, a: CyclotomicArgs) -> Result<ExitCode> {
    io.json_only("cyclotomic")?;
    match a.multiplicity {
        None => println!("{}", cyclotomic_poly(a.n)?),
        Some(path) => {
            let p: IntPolynomial = serde_json::from_str(&read(&path)?)
                .with_context(|| format!("parsing {}", path.display()))?;
            let (s, residual) = multiplicity_in_poly(&p, a.n)?;
            print_json(&json!({"order": a.n, "multiplicity": s, "residual": residual}));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn certify(io: &Io, a: CertifyArgs) -> Result<ExitCode> {
    io.json_only("certify")?;
    let ks = CoefficientTuple::new(a.ks)?;
    let m = ks.theorem_form()?.m();
    let t = if a.t.is_empty() { ExpVector::zero(m) } else { ExpVector(a.t) };
    let cert = if a.target.is_empty() {
        certify_nonconstant(&ks, &t)?
    } else {
        certify_target(&ks, &t, &ExpVector(a.target))?
    };
    let verdict = check_certificate(&cert);
    match &a.out {
        Some(path) => {
            let path = io.write(path, &cert.to_json())?;
            eprintln!("wrote {} ({} relations, target {:?})", path.display(), cert.steps.len(), cert.target);
        }
        None => println!("{}", cert.to_json()),
    }
    if let Err(reason) = &verdict {
        eprintln!("generated certificate failed verification: {reason}");
    }
    Ok(status(verdict.is_ok()))
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let cert = Certificate::from_json(&read(&a.certificate)?)?;
    match check_certificate(&cert) {
        Ok(()) => {
            println!("VALID");
            println!(
                "r_{} = 0 follows from {} relations outside [0, {}], but r ≡ -1 mod {}",
                ExpVector(cert.target.clone()),
                cert.steps.len(),
                ExpVector(cert.t.clone()),
                cert.d
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(reason) => {
            println!("INVALID: {reason}");
            Ok(ExitCode::FAILURE)
        }
    }
}

fn solve(io: &Io, a: SolveArgs) -> Result<ExitCode> {
    io.json_only("solve")?;
    let ks = CoefficientTuple::new(a.ks)?;
    let s: BTreeMap<ExpVector, u64> = a.s.iter().map(|e| parse_s_entry(e)).collect::<Result<_>>()?;
    let out = solve_multiplicities(&ks, &s, &ExpVector(a.bound))?;
    print_json(&out);
    Ok(ExitCode::SUCCESS)
}

fn exec_for(sequential: bool, threads: Option<usize>) -> Result<Exec> {
    if let Some(n) = threads {
        if cfg!(not(feature = "parallel")) {
            bail!("--threads needs a build with the parallel feature");
        }
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(if sequential { Exec::Sequential } else { Exec::Parallel })
}

fn search(io: &Io, a: SearchArgs) -> Result<ExitCode> {
    io.json_only("search")?;
    let exec = exec_for(a.sequential, a.threads)?;
    let (cfg, out) = match &a.resume {
        Some(path) => {
            let ck = Checkpoint::from_json(&read(path)?)?;
            let out = resume(&ck, a.budget, exec);
            (ck.config, out)
        }
        None => {
            let ks = CoefficientTuple::new(a.ks)?;
            let upto = a.upto.expect("required by clap");
            let cfg = SearchConfig::new(ks, a.c, a.n0, upto, a.budget, a.report_all)?;
            let out = search_constant_rep(&cfg, exec);
            (cfg, out)
        }
    };
    if out.status == SearchStatus::BudgetExceeded {
        if let Some(path) = &a.checkpoint {
            let path = io.write(path, &out.checkpoint(&cfg).to_json())?;
            eprintln!("budget exhausted; checkpoint written to {}", path.display());
        }
    }
    print_json(&search_report(&cfg, &out));
    Ok(match out.status {
        SearchStatus::BudgetExceeded => ExitCode::from(EXIT_BUDGET),
        _ => ExitCode::SUCCESS,
    })
}

fn search_report(cfg: &SearchConfig, out: &SearchOutcome) -> Value {
    json!({
        "ks": cfg.ks(),
        "c": cfg.c(),
        "n0": cfg.n0(),
        "upto": cfg.upto(),
        "status": out.status,
        "survivors": out.survivors.iter().map(|s| s.members()).collect::<Vec<_>>(),
        "nodes_explored": out.nodes_explored,
        "deepest_bound_reached": out.deepest_bound_reached,
        "stats": out.stats,
        "pending_subtrees": out.pending.len(),
    })
}

fn demo(io: &Io, a: DemoArgs) -> Result<ExitCode> {
    io.json_only("demo")?;
    let ks = CoefficientTuple::new(a.ks)?;
    let form = ks.theorem_form()?;
    let m = form.m();

    let solve_box = ExpVector::splat(m, 6);
    let solved = solve_multiplicities(&ks, &BTreeMap::new(), &solve_box)?;
    let conflict = match &solved {
        SolveOutcome::Conflict { at, detail, .. } => json!({"at": at, "detail": detail}),
        SolveOutcome::Consistent { .. } => Value::Null,
    };

    let cert = certify_nonconstant(&ks, &ExpVector::zero(m))?;
    let verified = check_certificate(&cert);

    let mut runs = Vec::new();
    for c in [1, 2] {
        for n0 in 0..=a.max_n0.min(a.upto) {
            let cfg = SearchConfig::new(ks.clone(), c, n0, a.upto, 10_000_000, false)?;
            let out = search_constant_rep(&cfg, Exec::Parallel);
            runs.push(json!({
                "c": c,
                "n0": n0,
                "status": out.status,
                "nodes_explored": out.nodes_explored,
                "deepest_bound_reached": out.deepest_bound_reached,
                "survivor": out.survivors.first().map(|s| s.members()),
            }));
        }
    }
    let search = json!({"upto": a.upto, "runs": runs});

    let ok = solved.conflict_at().is_some() && verified.is_ok();
    print_json(&json!({
        "ks": ks,
        "theorem_form": {"q": form.qs(), "b": form.rows()},
        "solver": {"box": solve_box, "s": "zero", "conflict": conflict},
        "certificate": {
            "t": cert.t,
            "target": cert.target,
            "relations": cert.steps.len(),
            "working_box": cert.working_box,
            "verified": verified.is_ok(),
            "conclusion": format!("r_{} = 0, but r ≡ -1 mod {}", ExpVector(cert.target.clone()), cert.d),
        },
        "search": search,
        "confirmed": ok,
    }));
    Ok(status(ok))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let io = Io {
        format: cli.format,
        out_dir: cli.out_dir,
    };
    match cli.command {
        Command::Repfn(a) => repfn(&io, a),
        Command::Moser(a) => moser(&io, a),
        Command::Cyclotomic(a) => cyclotomic(&io, a),
        Command::Certify(a) => certify(&io, a),
        Command::Verify(a) => verify(a),
        Command::Solve(a) => solve(&io, a),
        Command::Search(a) => search(&io, a),
        Command::Demo(a) => demo(&io, a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
