use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use num_rational::Rational64;
use timesim::bench::{self, Family, Variant};
use timesim::model::Tea;
use timesim::nonzeno::{non_zeno, nz_simulation_check};
use timesim::oracle::{maximal_nz_simulation, maximal_simulation};
use timesim::sim::{equivalence_check, simulation_check, CheckOptions, Seed, Verdict};

/// Checks whether a timed event-automaton is simulated by another.
///
/// Exit status: 0 when the relation holds, 1 when it does not, 2 on usage,
/// parse or model errors.
#[derive(Parser, Debug)]
#[command(name = "simcheck", version)]
struct Args {
    /// Implementation automaton (A1).
    #[arg(long = "impl", value_name = "FILE", required_unless_present = "bench")]
    implementation: Option<PathBuf>,
    /// Specification automaton (A2).
    #[arg(long, value_name = "FILE", required_unless_present = "bench")]
    spec: Option<PathBuf>,
    /// Check NZ-simulation: only non-Zeno implementation states must be matched.
    #[arg(long)]
    nz: bool,
    /// Check simulation in both directions.
    #[arg(long, conflicts_with = "nz")]
    equiv: bool,
    /// Write the converged relation to FILE.
    #[arg(long, value_name = "FILE")]
    dump_relation: Option<PathBuf>,
    /// Write the non-Zeno reachable states of the implementation to FILE.
    #[arg(long, value_name = "FILE")]
    dump_nz: Option<PathBuf>,
    /// Also run the region-graph oracle and report whether it agrees.
    #[arg(long)]
    oracle: bool,
    /// Disable the early check of the initial condition.
    #[arg(long)]
    no_edgf: bool,
    /// Starting relation of the fixpoint: pairs reachable from initial
    /// pairs, or every pair inside both invariants. Verdicts are the same.
    #[arg(long, value_enum, default_value_t = SeedArg::Reachable)]
    seed: SeedArg,
    /// Generate a benchmark instance instead of reading files.
    #[arg(long, value_name = "FAMILY", conflicts_with_all = ["implementation", "spec"])]
    bench: Option<Family>,
    /// Number of processes in the benchmark.
    #[arg(long, default_value_t = 1, requires = "bench")]
    m: usize,
    /// Benchmark variant: exists, nz-only or not.
    #[arg(long, default_value = "exists", requires = "bench")]
    variant: Variant,
    /// Use the small constants of the benchmark family.
    #[arg(long, requires = "bench")]
    desk: bool,
    /// Multiply every constant by NUM/DEN, then clear denominators.
    #[arg(long, value_name = "NUM/DEN", value_parser = parse_ratio)]
    scale: Option<Rational64>,
    /// Print iteration count, cell counts and elapsed time.
    #[arg(long)]
    stats: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SeedArg {
    Reachable,
    Invariants,
}

fn parse_ratio(s: &str) -> Result<Rational64, String> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: i64 = n.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
    let d: i64 = d.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
    if n <= 0 || d <= 0 {
        return Err("the scale must be positive".into());
    }
    Ok(Rational64::new(n, d))
}

fn read(path: &Path) -> Result<Tea, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    timesim::text::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: String) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn models(args: &Args) -> Result<(Tea, Tea), String> {
    let (a, b) = match args.bench {
        Some(family) => {
            let c = if args.desk {
                family.desk_constants()
            } else {
                family.constants()
            };
            bench::generate(family, args.m, args.variant, &c).map_err(|e| e.to_string())?
        }
        None => (
            read(args.implementation.as_deref().expect("required by clap"))?,
            read(args.spec.as_deref().expect("required by clap"))?,
        ),
    };
    match args.scale {
        Some(r) => bench::scale_pair(&a, &b, r).map_err(|e| e.to_string()),
        None => Ok((a, b)),
    }
}

fn print_stats(label: &str, v: &Verdict) {
    let s = &v.stats;
    println!(
        "{label}sweeps {} | seed cells {} | cells per sweep {:?} | elapsed {:.3?}",
        s.sweeps, s.seed_cells, s.cells_per_sweep, s.elapsed
    );
}

fn run(args: &Args) -> Result<bool, String> {
    let (a1, a2) = models(args)?;
    let opts = CheckOptions {
        edgf: !args.no_edgf,
        seed: match args.seed {
            SeedArg::Reachable => Seed::ReachablePairs,
            SeedArg::Invariants => Seed::Invariants,
        },
        ..CheckOptions::default()
    };
    if let Some(path) = &args.dump_nz {
        let nz = non_zeno(&a1).map_err(|e| e.to_string())?;
        write(path, format!("{}\n", nz.set))?;
    }
    let start = Instant::now();
    let holds = if args.equiv {
        let (fwd, bwd) = equivalence_check(&a1, &a2, &opts).map_err(|e| e.to_string())?;
        println!("{}", fwd.message());
        println!(
            "{}",
            if bwd.holds {
                "A2 implements A1."
            } else {
                "A2 does not implement A1."
            }
        );
        if args.stats {
            print_stats("A1 <= A2: ", &fwd);
            print_stats("A2 <= A1: ", &bwd);
        }
        if let Some(path) = &args.dump_relation {
            let show = |v: &Verdict| v.relation.as_ref().map_or("false".to_string(), |r| r.to_string());
            write(path, format!("{}\n{}\n", show(&fwd), show(&bwd)))?;
        }
        fwd.holds && bwd.holds
    } else {
        let v = if args.nz {
            nz_simulation_check(&a1, &a2, &opts)
        } else {
            simulation_check(&a1, &a2, &opts)
        }
        .map_err(|e| e.to_string())?;
        println!("{}", v.message());
        if args.stats {
            print_stats("", &v);
        }
        if let Some(path) = &args.dump_relation {
            let text = match (&v.relation, &v.failing_initial) {
                (Some(r), _) => r.to_string(),
                (None, Some(f)) => format!("# unmatched initial states\n{f}"),
                (None, None) => "false".to_string(),
            };
            write(path, format!("{text}\n"))?;
        }
        v.holds
    };
    if args.stats {
        println!("total {:.3?}", start.elapsed());
    }
    if args.oracle {
        let check = |x: &Tea, y: &Tea| {
            if args.nz {
                maximal_nz_simulation(x, y)
            } else {
                maximal_simulation(x, y)
            }
        };
        let oracle = check(&a1, &a2).and_then(|o| {
            if args.equiv {
                Ok(o.holds && check(&a2, &a1)?.holds)
            } else {
                Ok(o.holds)
            }
        });
        match oracle {
            Ok(o) if o == holds => println!("oracle agrees ({o})"),
            Ok(o) => println!("oracle DISAGREES: engine {holds}, oracle {o}"),
            Err(e) => println!("oracle skipped: {e}"),
        }
    }
    Ok(holds)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
