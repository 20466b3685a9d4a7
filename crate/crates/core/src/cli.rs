//! The `zkmc` command line: check, ground, setup, prove, verify and bench.
//!
//! Exit codes: 0 when a certificate is valid or a proof accepts, 1 when it is
//! invalid or rejects, 2 on usage errors and malformed inputs.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::crypto::ops;
use crate::explicit::plaintext_disjointness;
use crate::kzg::Srs;
use crate::lang::{self, graph_from_json, graph_to_json, print_certificate, space_to_json, Unit};
use crate::lp::{self, farkas_witness, FarkasWitness};
use crate::model::{check_ranking_explicit, check_wellformedness, ExplicitRanking, ExplicitSystem, PiecewiseRanking, Ranking};
use crate::oracle::ground;
use crate::protocol::explicit::{self as pe, ExplicitBundle, ExplicitCertificate};
use crate::protocol::symbolic::{self as ps, SymbolicBundle, SymbolicCertificate, DEFAULT_BATCH};
use crate::sigma::Params;
use crate::symbolic::{gen_obligations, undischarged};
use crate::DEFAULT_BOUND;

#[derive(Parser, Debug)]
#[command(name = "zkmc", version, about = "Zero-knowledge model checking")]
pub struct Cli {
    /// Upper bound on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Allow `--seed` and `--insecure-setup`; never use for real proofs.
    #[arg(long, global = true)]
    pub test_mode: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Explicit,
    Symbolic,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Scheme to use; inferred from the ranking form when omitted.
    #[arg(long, value_enum)]
    pub scheme: Option<Scheme>,
    /// Coefficient and witness bound M.
    #[arg(long = "bound", default_value_t = DEFAULT_BOUND)]
    pub bound: u64,
    /// Obligations in flight at once (symbolic scheme).
    #[arg(long, default_value_t = DEFAULT_BATCH)]
    pub batch: usize,
    /// Keep the setup trapdoor in the parameter file and accept such files (test mode only).
    #[arg(long)]
    pub insecure_setup: bool,
    /// Deterministic randomness (test mode only).
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check well-formedness and validity of a certificate in plaintext.
    Check {
        unit: PathBuf,
        /// Explicit graph certified by a table ranking.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long = "bound", default_value_t = DEFAULT_BOUND)]
        bound: u64,
    },
    /// Enumerate a guarded-command system into an explicit graph with a table certificate.
    Ground {
        unit: PathBuf,
        #[arg(long)]
        graph_out: PathBuf,
        /// Labels-only copy of the graph, the public part for the verifier.
        #[arg(long)]
        space_out: Option<PathBuf>,
        /// Certificate with the piecewise ranking tabulated on the grounded states.
        #[arg(long)]
        cert_out: Option<PathBuf>,
        #[arg(long, default_value_t = 1 << 16)]
        limit: usize,
    },
    /// Print the public obligations of a symbolic certificate as JSON.
    Obligations { unit: PathBuf },
    /// Generate public parameters sized for a certificate.
    Setup {
        unit: PathBuf,
        /// Labels-only state space (explicit scheme).
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: RunConfig,
    },
    /// Prove that a secret system satisfies a certificate.
    Prove {
        unit: PathBuf,
        /// Secret explicit graph (explicit scheme).
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: RunConfig,
    },
    /// Verify a proof bundle from public inputs only.
    Verify {
        cert: PathBuf,
        bundle: PathBuf,
        /// Labels-only state space (explicit scheme).
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long)]
        params: PathBuf,
        #[command(flatten)]
        config: RunConfig,
    },
    /// Time the pipeline end to end and print one JSON line.
    Bench {
        unit: PathBuf,
        /// Explicit graph; without it a symbolic unit is grounded for the explicit scheme.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Also count prover group operations (runs the prover on one thread).
        #[arg(long)]
        ops: bool,
        #[command(flatten)]
        config: RunConfig,
    },
}

/// Exit status plus a message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn reject(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

type CliResult = Result<(), Failure>;

/// Parses arguments, runs the command and maps the outcome to an exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}

pub fn execute(cli: Cli) -> CliResult {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Failure::usage(format!("cannot configure threads: {e}")))?;
    }
    let test_mode = cli.test_mode;
    match cli.command {
        Command::Check { unit, graph, bound } => cmd_check(&unit, graph.as_deref(), bound),
        Command::Ground { unit, graph_out, space_out, cert_out, limit } => {
            cmd_ground(&unit, &graph_out, space_out.as_deref(), cert_out.as_deref(), limit)
        }
        Command::Obligations { unit } => cmd_obligations(&unit),
        Command::Setup { unit, space, out, config } => {
            check_test_flags(&config, test_mode)?;
            cmd_setup(&unit, space.as_deref(), &out, &config)
        }
        Command::Prove { unit, graph, params, out, config } => {
            check_test_flags(&config, test_mode)?;
            cmd_prove(&unit, graph.as_deref(), &params, &out, &config)
        }
        Command::Verify { cert, bundle, space, params, config } => {
            check_test_flags(&config, test_mode)?;
            cmd_verify(&cert, &bundle, space.as_deref(), &params, &config)
        }
        Command::Bench { unit, graph, ops, config } => {
            check_test_flags(&config, test_mode)?;
            cmd_bench(&unit, graph.as_deref(), ops, &config)
        }
    }
}

fn check_test_flags(config: &RunConfig, test_mode: bool) -> CliResult {
    if !test_mode && (config.seed.is_some() || config.insecure_setup) {
        return Err(Failure::usage("--seed and --insecure-setup require --test-mode"));
    }
    Ok(())
}

fn rng_for(config: &RunConfig) -> ChaCha20Rng {
    match config.seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    String::from_utf8(read(path)?).map_err(|_| Failure::usage(format!("{}: not UTF-8", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> CliResult {
    fs::write(path, bytes).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_unit(path: &Path, bound: u64) -> Result<Unit, Failure> {
    let text = read_text(path)?;
    lang::parse_with_bound(&text, bound).map(|(u, _)| u).map_err(|diags| {
        let lines: Vec<String> = diags.iter().map(|d| format!("{}: {d}", path.display())).collect();
        Failure::usage(lines.join("\n"))
    })
}

fn load_graph(path: &Path) -> Result<ExplicitSystem, Failure> {
    graph_from_json(&read_text(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn scheme_of(unit: &Unit, requested: Option<Scheme>) -> Result<Scheme, Failure> {
    let natural = match unit.ranking {
        Ranking::Table(_) => Scheme::Explicit,
        Ranking::Piecewise(_) => Scheme::Symbolic,
    };
    match requested {
        Some(s) if s != natural => Err(Failure::usage(format!(
            "a {} ranking cannot be used with the {:?} scheme",
            if natural == Scheme::Explicit { "table" } else { "piecewise" },
            s
        ))),
        _ => Ok(natural),
    }
}

fn table(unit: &Unit) -> Result<&ExplicitRanking, Failure> {
    match &unit.ranking {
        Ranking::Table(t) => Ok(t),
        Ranking::Piecewise(_) => Err(Failure::usage("expected a table ranking")),
    }
}

fn piecewise(unit: &Unit) -> Result<&PiecewiseRanking, Failure> {
    match &unit.ranking {
        Ranking::Piecewise(p) => Ok(p),
        Ranking::Table(_) => Err(Failure::usage("expected a piecewise ranking")),
    }
}

fn cmd_check(path: &Path, graph: Option<&Path>, bound: u64) -> CliResult {
    let unit = load_unit(path, bound)?;
    match &unit.ranking {
        Ranking::Table(rank) => {
            let graph = graph.ok_or_else(|| Failure::usage("a table ranking needs --graph"))?;
            let sys = load_graph(graph)?;
            let report =
                check_ranking_explicit(&sys, &unit.spec, rank).map_err(|e| Failure::usage(e.to_string()))?;
            let cert = ExplicitCertificate::new(unit.spec.clone(), rank.clone(), &sys);
            let (_, batches) = cert.batches().map_err(|e| Failure::usage(e.to_string()))?;
            let disjoint = plaintext_disjointness(&sys, &batches);
            println!("states: {}", sys.num_states());
            println!("batches: init {} step {} fair {}", batches.e_init.len(), batches.e_step.len(), batches.e_fair.len());
            for v in &report.violations {
                println!("violation: {v}");
            }
            println!("disjoint: {disjoint}");
            if report.is_ok() && disjoint {
                println!("certificate valid");
                Ok(())
            } else {
                Err(Failure::reject("certificate invalid"))
            }
        }
        Ranking::Piecewise(rk) => {
            let wf = check_wellformedness(rk, &unit.spec);
            for issue in &wf.issues {
                println!("well-formedness: {issue}");
            }
            let Some(sys) = &unit.system else {
                return if wf.is_ok() {
                    println!("certificate well-formed (no system to check against)");
                    Ok(())
                } else {
                    Err(Failure::reject("certificate ill-formed"))
                };
            };
            let set = gen_obligations(sys, &unit.spec, rk).map_err(|e| Failure::usage(e.to_string()))?;
            let open = undischarged(&set);
            let c = set.counts;
            println!("obligations: {} (init {}, finiteness {}, rank {})", c.total(), c.init, c.finiteness, c.rank);
            for (i, _) in &open {
                let ob = &set.obligations[*i];
                println!("obligation {i} ({:?}, {:?}) is satisfiable", ob.kind, ob.source);
            }
            let over: Vec<usize> = set
                .obligations
                .par_iter()
                .enumerate()
                .filter(|(i, _)| !open.iter().any(|(j, _)| j == i))
                .filter_map(|(i, ob)| farkas_witness(ob, bound).is_err().then_some(i))
                .collect();
            for i in &over {
                println!("obligation {i}: no Farkas witness within the bound {bound}");
            }
            if wf.is_ok() && open.is_empty() && over.is_empty() {
                println!("certificate valid");
                Ok(())
            } else {
                Err(Failure::reject("certificate invalid"))
            }
        }
    }
}

fn cmd_ground(path: &Path, graph_out: &Path, space_out: Option<&Path>, cert_out: Option<&Path>, limit: usize) -> CliResult {
    let unit = load_unit(path, DEFAULT_BOUND)?;
    let sys = unit.system.as_ref().ok_or_else(|| Failure::usage("the unit has no system to ground"))?;
    let g = ground(sys, &unit.spec, limit).map_err(|e| Failure::usage(e.to_string()))?;
    write(graph_out, graph_to_json(&g.system).as_bytes())?;
    if let Some(p) = space_out {
        write(p, space_to_json(&g.system).as_bytes())?;
    }
    if let Some(p) = cert_out {
        let rank = g
            .ranking(piecewise(&unit)?)
            .ok_or_else(|| Failure::reject("the ranking does not cover every grounded state"))?;
        write(p, print_certificate(&unit.spec, &Ranking::Table(rank)).as_bytes())?;
    }
    println!("grounded {} states, {} transitions", g.system.num_states(), g.system.transitions.len());
    Ok(())
}

fn cmd_obligations(path: &Path) -> CliResult {
    let unit = load_unit(path, DEFAULT_BOUND)?;
    let rk = piecewise(&unit)?;
    let nvars = unit.spec.vars.len();
    let commands = unit.system.as_ref().map_or(0, |s| s.commands.len());
    let obs = crate::symbolic::public_obligations(&unit.spec, rk, nvars, commands)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let text = serde_json::to_string_pretty(&obs).map_err(|e| Failure::usage(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn explicit_cert(unit: &Unit, space: &ExplicitSystem) -> Result<ExplicitCertificate, Failure> {
    Ok(ExplicitCertificate::new(unit.spec.clone(), table(unit)?.clone(), space))
}

fn symbolic_cert(unit: &Unit, bound: u64) -> Result<SymbolicCertificate, Failure> {
    let sys = unit.system.as_ref().ok_or_else(|| Failure::usage("the unit has no system"))?;
    Ok(SymbolicCertificate::new(unit.spec.clone(), piecewise(unit)?.clone(), sys, bound))
}

fn cmd_setup(path: &Path, space: Option<&Path>, out: &Path, config: &RunConfig) -> CliResult {
    let unit = load_unit(path, config.bound)?;
    let mut rng = rng_for(config);
    let bytes = match scheme_of(&unit, config.scheme)? {
        Scheme::Explicit => {
            let space = load_graph(space.ok_or_else(|| Failure::usage("explicit setup needs --space"))?)?;
            let (deg, batch) = explicit_cert(&unit, &space)?.srs_size().map_err(|e| Failure::usage(e.to_string()))?;
            Srs::setup(deg, batch, config.insecure_setup, &mut rng).to_bytes()
        }
        Scheme::Symbolic => {
            let len = symbolic_cert(&unit, config.bound)?.params_len().map_err(|e| Failure::usage(e.to_string()))?;
            Params::setup(len, config.insecure_setup, &mut rng).to_bytes()
        }
    };
    write(out, &bytes)
}

fn load_srs(path: &Path, config: &RunConfig) -> Result<Srs, Failure> {
    Srs::from_bytes(&read(path)?, config.insecure_setup).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_params(path: &Path, config: &RunConfig) -> Result<Params, Failure> {
    Params::from_bytes(&read(path)?, config.insecure_setup).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn witnesses(unit: &Unit, bound: u64) -> Result<Vec<FarkasWitness>, Failure> {
    let sys = unit.system.as_ref().ok_or_else(|| Failure::usage("the unit has no system"))?;
    let set = gen_obligations(sys, &unit.spec, piecewise(unit)?).map_err(|e| Failure::usage(e.to_string()))?;
    lp::witnesses(&set.obligations, bound).map_err(|(i, e)| Failure::reject(format!("obligation {i}: {e}")))
}

fn cmd_prove(path: &Path, graph: Option<&Path>, params: &Path, out: &Path, config: &RunConfig) -> CliResult {
    let unit = load_unit(path, config.bound)?;
    let mut rng = rng_for(config);
    match scheme_of(&unit, config.scheme)? {
        Scheme::Explicit => {
            let sys = load_graph(graph.ok_or_else(|| Failure::usage("explicit proving needs --graph"))?)?;
            let srs = load_srs(params, config)?;
            let cert = explicit_cert(&unit, &sys)?;
            let bundle = pe::prove(&sys, &cert, &srs, &mut rng).map_err(|e| Failure::reject(e.to_string()))?;
            write(out, &bundle.to_bytes())
        }
        Scheme::Symbolic => {
            let sys = unit.system.as_ref().ok_or_else(|| Failure::usage("the unit has no system"))?;
            let wits = witnesses(&unit, config.bound)?;
            let cert = symbolic_cert(&unit, config.bound)?;
            let p = load_params(params, config)?;
            let bundle =
                ps::prove_all(&p, &cert, sys, &wits, config.batch, &mut rng).map_err(|e| Failure::reject(e.to_string()))?;
            println!("proved {} obligations", bundle.proofs.len());
            write(out, &bundle.to_bytes())
        }
    }
}

fn cmd_verify(cert_path: &Path, bundle: &Path, space: Option<&Path>, params: &Path, config: &RunConfig) -> CliResult {
    let unit = load_unit(cert_path, config.bound)?;
    match scheme_of(&unit, config.scheme)? {
        Scheme::Explicit => {
            let space = load_graph(space.ok_or_else(|| Failure::usage("explicit verification needs --space"))?)?;
            let srs = load_srs(params, config)?;
            let cert = explicit_cert(&unit, &space)?;
            let bundle = ExplicitBundle::from_bytes(&read(bundle)?).map_err(|e| Failure::reject(format!("reject: {e}")))?;
            match pe::verify(&bundle, &cert, &srs) {
                Ok(()) => {
                    println!("accept");
                    Ok(())
                }
                Err(r) => Err(Failure::reject(format!("reject: {r}"))),
            }
        }
        Scheme::Symbolic => {
            let p = load_params(params, config)?;
            let bundle = SymbolicBundle::from_bytes(&read(bundle)?).map_err(|e| Failure::reject(format!("reject: {e}")))?;
            let cert = SymbolicCertificate::from_public(
                unit.spec.clone(),
                piecewise(&unit)?.clone(),
                bundle.secret_rows.clone(),
                config.bound,
            );
            match ps::verify_all(&p, &cert, &bundle, config.batch) {
                Ok(()) => {
                    println!("accept ({} obligations)", bundle.proofs.len());
                    Ok(())
                }
                Err(f) => {
                    for (i, r) in &f.failures {
                        if *i == usize::MAX {
                            println!("bundle: {r}");
                        } else {
                            println!("obligation {i}: {r}");
                        }
                    }
                    Err(Failure::reject("reject"))
                }
            }
        }
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn cmd_bench(path: &Path, graph: Option<&Path>, count_ops: bool, config: &RunConfig) -> CliResult {
    let unit = load_unit(path, config.bound)?;
    let mut rng = rng_for(config);
    let model = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let scheme = match (config.scheme, &unit.ranking) {
        (Some(s), _) => s,
        (None, Ranking::Table(_)) => Scheme::Explicit,
        (None, Ranking::Piecewise(_)) => Scheme::Symbolic,
    };
    let row = match scheme {
        Scheme::Explicit => {
            let t = Instant::now();
            let (sys, rank) = match (&unit.ranking, graph) {
                (Ranking::Table(r), Some(g)) => (load_graph(g)?, r.clone()),
                (Ranking::Piecewise(rk), _) => {
                    let s = unit.system.as_ref().ok_or_else(|| Failure::usage("the unit has no system to ground"))?;
                    let g = ground(s, &unit.spec, 1 << 16).map_err(|e| Failure::usage(e.to_string()))?;
                    let r = g.ranking(rk).ok_or_else(|| Failure::reject("ranking does not cover the grounded states"))?;
                    (g.system, r)
                }
                (Ranking::Table(_), None) => return Err(Failure::usage("a table ranking needs --graph")),
            };
            let cert = ExplicitCertificate::new(unit.spec.clone(), rank, &sys);
            let (_, batches) = cert.batches().map_err(|e| Failure::usage(e.to_string()))?;
            let (deg, max_batch) = cert.srs_size().map_err(|e| Failure::usage(e.to_string()))?;
            let enum_ms = ms(t);
            let t = Instant::now();
            let srs = Srs::setup(deg, max_batch, config.insecure_setup, &mut rng);
            let setup_ms = ms(t);
            let t = Instant::now();
            let (bundle, prover_ops) = if count_ops {
                let (b, c) = ops::measure(|| pe::prove(&sys, &cert, &srs, &mut rng));
                (b, Some(c))
            } else {
                (pe::prove(&sys, &cert, &srs, &mut rng), None)
            };
            let bundle = bundle.map_err(|e| Failure::reject(e.to_string()))?;
            let prover_ms = ms(t);
            let t = Instant::now();
            let accepted = pe::verify(&bundle, &cert, &srs).is_ok();
            json!({
                "model": model, "scheme": "explicit", "states": sys.num_states(),
                "batch_total": batches.total(),
                "enum_ms": enum_ms, "setup_ms": setup_ms, "prover_ms": prover_ms, "verifier_ms": ms(t),
                "bundle_bytes": bundle.to_bytes().len(), "accepted": accepted,
                "prover_ops": prover_ops.map(|c| c.group_ops()),
            })
        }
        Scheme::Symbolic => {
            let t = Instant::now();
            let wits = witnesses(&unit, config.bound)?;
            let cert = symbolic_cert(&unit, config.bound)?;
            let sys = unit.system.as_ref().expect("checked by symbolic_cert");
            let len = cert.params_len().map_err(|e| Failure::usage(e.to_string()))?;
            let enum_ms = ms(t);
            let t = Instant::now();
            let p = Params::setup(len, config.insecure_setup, &mut rng);
            let setup_ms = ms(t);
            let t = Instant::now();
            let (bundle, prover_ops) = if count_ops {
                let (b, c) = ops::measure(|| ps::prove_all(&p, &cert, sys, &wits, config.batch, &mut rng));
                (b, Some(c))
            } else {
                (ps::prove_all(&p, &cert, sys, &wits, config.batch, &mut rng), None)
            };
            let bundle = bundle.map_err(|e| Failure::reject(e.to_string()))?;
            let prover_ms = ms(t);
            let t = Instant::now();
            let accepted = ps::verify_all(&p, &cert, &bundle, config.batch).is_ok();
            json!({
                "model": model, "scheme": "symbolic", "obligations": bundle.proofs.len(),
                "enum_ms": enum_ms, "setup_ms": setup_ms, "prover_ms": prover_ms, "verifier_ms": ms(t),
                "bundle_bytes": bundle.to_bytes().len(), "accepted": accepted,
                "prover_ops": prover_ops.map(|c| c.group_ops()),
            })
        }
    };
    println!("{row}");
    if row["accepted"] == true {
        Ok(())
    } else {
        Err(Failure::reject("bundle rejected"))
    }
}
