//! `qseq` — sequential-measurement statistics from the command line.
//!
//! Four subcommands: `sequential` (ordered joint tables and the order gap),
//! `epr` (singlet correlations and inequality reports), `simulate`
//! (event-by-event coincidence runs), and `feasibility` (joint-measure
//! extension checks). JSON goes to stdout unless `--output` redirects it;
//! `simulate --events` additionally writes the raw event CSV.

mod spec_parse;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qseq::eprbohm::{
    bell_inequality_report, chsh, conditional_decomposition, correlation, AngleSetting,
    Convention, CorrelationSet, Particle,
};
use qseq::eventsim::{match_coincidences, run_experiment, write_events_csv, SimConfig};
use qseq::kolmogorov::{
    evaluate_chsh_facets, problem_from_correlations, solve_feasibility, FeasibilityProblem,
    FeasibilityStatus, DEFAULT_FEASIBILITY_TOL,
};
use qseq::sequential::{order_symmetry_gap, sequential_joint, SequentialJointTable};
use qseq::{Error, Result};

#[derive(Parser)]
#[command(name = "qseq", version, about = "Sequential quantum measurement toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    /// E(θa, θb) = −cos(θa − θb)
    Spin,
    /// E(θa, θb) = −cos 2(θa − θb)
    Photon,
}

impl From<ConventionArg> for Convention {
    fn from(arg: ConventionArg) -> Self {
        match arg {
            ConventionArg::Spin => Convention::SpinHalf,
            ConventionArg::Photon => Convention::Photon,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArg {
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Ordered joint table for two observables, its reverse, and the order gap.
    Sequential {
        /// State preset (ket0, ket1, plus, minus, singlet) or JSON amplitudes.
        #[arg(long, default_value = "ket0")]
        state: String,
        /// Two observables, comma separated: pauli_x/y/z, legN:<angle>, or a
        /// JSON matrix of [re, im] pairs.
        #[arg(long)]
        observables: String,
        #[arg(long, value_enum, default_value = "spin")]
        convention: ConventionArg,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Singlet correlations and inequality reports for 2–4 analyzer angles.
    Epr {
        /// Comma-separated angles in radians: 2 → correlation + branch
        /// decomposition, 3 → three-setting inequality report, 4 → CHSH.
        #[arg(long)]
        angles: String,
        #[arg(long, value_enum, default_value = "spin")]
        convention: ConventionArg,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Event-by-event EPR run with click times and window matching.
    Simulate {
        #[arg(long, default_value_t = 10_000)]
        pairs: u64,
        #[arg(long = "theta-a", default_value_t = 0.0)]
        theta_a: f64,
        #[arg(long = "theta-b", default_value_t = 0.0)]
        theta_b: f64,
        /// Coincidence window Δ in seconds ("inf" accepts everything).
        #[arg(long, default_value_t = 1e-5)]
        window: f64,
        /// Click-time jitter σ in seconds.
        #[arg(long, default_value_t = 1e-6)]
        jitter: f64,
        #[arg(long, default_value_t = 1.0)]
        efficiency: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "tie-epsilon", default_value_t = 0.0)]
        tie_epsilon: f64,
        #[arg(long, value_enum, default_value = "spin")]
        convention: ConventionArg,
        /// Also write the raw per-pair event CSV here.
        #[arg(long, value_name = "PATH")]
        events: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Decide whether a pairwise-distribution family extends to one joint
    /// measure. Exits 0 when feasible, 1 when infeasible, 2 on bad input.
    Feasibility {
        /// Problem JSON file.
        problem: PathBuf,
        #[command(flatten)]
        out: OutputArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Sequential { state, observables, convention, format, out } => {
            cmd_sequential(&state, &observables, convention.into(), format, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Epr { angles, convention, out } => {
            cmd_epr(&angles, convention.into(), &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            pairs,
            theta_a,
            theta_b,
            window,
            jitter,
            efficiency,
            seed,
            tie_epsilon,
            convention,
            events,
            out,
        } => {
            let cfg = SimConfig {
                n_pairs: pairs,
                theta_a,
                theta_b,
                window_delta: window,
                jitter_sigma: jitter,
                detector_efficiency: efficiency,
                seed,
                convention: convention.into(),
                tie_epsilon,
            };
            cmd_simulate(&cfg, events.as_deref(), &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Feasibility { problem, out } => cmd_feasibility(&problem, &out),
    }
}

fn emit(out: &OutputArg, text: &str) -> Result<()> {
    match &out.output {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn table_json(table: &SequentialJointTable) -> Value {
    json!({
        "first_outcomes": table.first_outcomes,
        "second_outcomes": table.second_outcomes,
        "q": table.q,
    })
}

fn cmd_sequential(
    state_spec: &str,
    observables_spec: &str,
    convention: Convention,
    format: FormatArg,
    out: &OutputArg,
) -> Result<()> {
    let psi = spec_parse::parse_state(state_spec)?;
    let specs = spec_parse::split_top_level(observables_spec);
    if specs.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "expected exactly two observables, found {}",
            specs.len()
        )));
    }
    let first = spec_parse::parse_observable(&specs[0], convention)?;
    let second = spec_parse::parse_observable(&specs[1], convention)?;

    let forward = sequential_joint(&psi, &first, &second)?;
    let reversed = sequential_joint(&psi, &second, &first)?;
    let gap = order_symmetry_gap(&psi, &first, &second)?;

    let text = match format {
        FormatArg::Json => {
            let report = json!({
                "state": state_spec,
                "order": [first.label(), second.label()],
                "table": table_json(&forward),
                "reversed_order": [second.label(), first.label()],
                "reversed_table": table_json(&reversed),
                "order_symmetry_gap": gap,
            });
            format!("{}\n", serde_json::to_string_pretty(&report)?)
        }
        FormatArg::Csv => {
            let mut text = String::from("table,first_outcome,second_outcome,probability\n");
            for (name, table) in [("forward", &forward), ("reversed", &reversed)] {
                for (i, &alpha) in table.first_outcomes.iter().enumerate() {
                    for (j, &beta) in table.second_outcomes.iter().enumerate() {
                        text.push_str(&format!("{name},{alpha},{beta},{}\n", table.q[i][j]));
                    }
                }
            }
            text.push_str(&format!("gap,,,{gap}\n"));
            text
        }
    };
    emit(out, &text)
}

fn cmd_epr(angles_spec: &str, convention: Convention, out: &OutputArg) -> Result<()> {
    let angles = spec_parse::parse_angles(angles_spec)?;
    let report = match angles.len() {
        2 => {
            let a = AngleSetting::new(angles[0], Particle::First, convention);
            let b = AngleSetting::new(angles[1], Particle::Second, convention);
            let e = correlation(&a, &b)?;
            let d = conditional_decomposition(&a, &b)?;
            json!({
                "angles": angles,
                "convention": convention_name(convention),
                "correlation": e,
                "decomposition": {
                    "p_plus": d.p_plus,
                    "e_given_plus": d.e_given_plus,
                    "p_minus": d.p_minus,
                    "e_given_minus": d.e_given_minus,
                    "recombined": d.recombined,
                    "identity_error": d.identity_error(),
                },
            })
        }
        3 => {
            let setting = |theta: f64| AngleSetting::new(theta, Particle::First, convention);
            let r = bell_inequality_report(
                &setting(angles[0]),
                &setting(angles[1]),
                &setting(angles[2]),
            )?;
            json!({
                "angles": angles,
                "convention": convention_name(convention),
                "correlations": { "ab": r.e_ab, "bc": r.e_bc, "ac": r.e_ac },
                "forms": {
                    "chained": { "lhs": r.chained.lhs, "rhs": r.chained.rhs, "satisfied": r.chained.satisfied },
                    "original": { "lhs": r.original.lhs, "rhs": r.original.rhs, "satisfied": r.original.satisfied },
                },
            })
        }
        4 => {
            let a1 = AngleSetting::new(angles[0], Particle::First, convention);
            let a2 = AngleSetting::new(angles[1], Particle::First, convention);
            let b1 = AngleSetting::new(angles[2], Particle::Second, convention);
            let b2 = AngleSetting::new(angles[3], Particle::Second, convention);
            let s = chsh(&a1, &a2, &b1, &b2)?;

            let mut set = CorrelationSet::new();
            set.insert("a1", "b1", correlation(&a1, &b1)?)?;
            set.insert("a1", "b2", correlation(&a1, &b2)?)?;
            set.insert("a2", "b1", correlation(&a2, &b1)?)?;
            set.insert("a2", "b2", correlation(&a2, &b2)?)?;
            let facets = evaluate_chsh_facets(&set)?;
            let pairs: Vec<(String, String)> =
                [("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2")]
                    .iter()
                    .map(|&(x, y)| (x.to_string(), y.to_string()))
                    .collect();
            let problem = problem_from_correlations(&pairs, &set)?;
            json!({
                "angles": angles,
                "convention": convention_name(convention),
                "correlations": {
                    "a1b1": set.get("a1", "b1"),
                    "a1b2": set.get("a1", "b2"),
                    "a2b1": set.get("a2", "b1"),
                    "a2b2": set.get("a2", "b2"),
                },
                "chsh": s,
                "facets": serde_json::to_value(&facets)?,
                "marginals_assumed_unbiased": true,
                "feasibility_problem": serde_json::to_value(&problem)?,
            })
        }
        n => {
            return Err(Error::InvalidArgument(format!(
                "expected 2, 3, or 4 angles, found {n}"
            )))
        }
    };
    emit(out, &format!("{}\n", serde_json::to_string_pretty(&report)?))
}

fn convention_name(convention: Convention) -> &'static str {
    match convention {
        Convention::SpinHalf => "spin_half",
        Convention::Photon => "photon",
    }
}

fn cmd_simulate(cfg: &SimConfig, events_path: Option<&std::path::Path>, out: &OutputArg) -> Result<()> {
    let events = run_experiment(cfg)?;
    if let Some(path) = events_path {
        let mut file = std::io::BufWriter::new(fs::File::create(path)?);
        write_events_csv(&mut file, &events, cfg)?;
        file.flush()?;
    }
    let stats = match_coincidences(&events, cfg);
    let report = json!({
        "counts": {
            "++": stats.count(1, 1),
            "+-": stats.count(1, -1),
            "-+": stats.count(-1, 1),
            "--": stats.count(-1, -1),
        },
        "n_g12": stats.n_g12,
        "n_g21": stats.n_g21,
        "n_simultaneous": stats.n_simultaneous,
        "n_unmatched": stats.n_unmatched,
        "e_hat": stats.e_hat,
        "std_err": stats.std_err,
    });
    emit(out, &format!("{}\n", serde_json::to_string_pretty(&report)?))
}

fn cmd_feasibility(problem_path: &std::path::Path, out: &OutputArg) -> Result<ExitCode> {
    let text = fs::read_to_string(problem_path)?;
    let problem = FeasibilityProblem::from_json(&text)?;
    let result = solve_feasibility(&problem, DEFAULT_FEASIBILITY_TOL)?;
    emit(out, &format!("{}\n", result.to_json()))?;
    Ok(match result.status {
        FeasibilityStatus::Feasible => ExitCode::SUCCESS,
        FeasibilityStatus::Infeasible => ExitCode::from(1),
    })
}
