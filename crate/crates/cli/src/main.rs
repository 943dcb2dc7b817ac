//! `xeq`: equilibria of finite games with symmetry groups, on the command
//! line. One JSON object per input file; verifier subcommands exit 0 on a
//! true verdict, 1 on a false one, and 2 on input errors.

use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use xeq_core::algebra::{
    contracted_power, power, power_action, symmetrize_game, PowerGame, DEFAULT_CELL_CAP,
};
use xeq_core::deviation::deviation_game;
use xeq_core::dnn::{dnn_membership, DnnVerdict, DEFAULT_DNN_TOL};
use xeq_core::equilibria::{
    solve_ce, solve_xe, verify_ce, verify_ce_conditional, verify_nash, XeOptions, XeTermination,
};
use xeq_core::error::Error;
use xeq_core::game::{is_zero_sum, Game};
use xeq_core::group::{classify_action, validate_action, GroupAction, DEFAULT_CLOSURE_CAP};
use xeq_core::json;
use xeq_core::orderm::{solve_order_m_xe, OrderMOptions};
use xeq_core::rational::{format_rat, parse_rat, rat_to_f64};

#[derive(Parser)]
#[command(
    name = "xeq",
    version,
    about = "Correlated and exchangeable equilibria of finite games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format for verifier output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cap on group closure size.
    #[arg(long, global = true, default_value_t = DEFAULT_CLOSURE_CAP)]
    closure_cap: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a game file.
    Info { game: PathBuf },
    /// Check a product profile for Nash equilibrium, exactly.
    VerifyNash { game: PathBuf, profile: PathBuf },
    /// Check a joint distribution for correlated equilibrium, exactly.
    VerifyCe {
        game: PathBuf,
        distribution: PathBuf,
        /// Use the conditional best-response characterization instead of the
        /// deviation inequalities (same verdicts).
        #[arg(long)]
        conditional: bool,
    },
    /// Solve for a correlated equilibrium by exact LP.
    SolveCe {
        game: PathBuf,
        /// Optional profile weighting to maximize, as weights JSON.
        #[arg(long)]
        objective: Option<PathBuf>,
        /// Write the distribution here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve for an exchangeable equilibrium certificate by column generation.
    SolveXe {
        game: PathBuf,
        group: PathBuf,
        /// Convergence tolerance (exact rational, e.g. "0" or "1/1000").
        #[arg(long, default_value = "0")]
        epsilon: String,
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
        /// Write the certificate here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve for an order-m exchangeable equilibrium certificate.
    SolveXeM {
        game: PathBuf,
        group: PathBuf,
        #[arg(long)]
        m: usize,
        /// Float tolerance for the master and the oracle.
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
        /// Oracle seed-ladder size.
        #[arg(long, default_value_t = 16)]
        starts: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit the deviation game (profiles vs unilateral deviations) of a game
    /// or one of its powers, in the game JSON schema.
    Gamma0 {
        game: PathBuf,
        /// Base object to build the deviation game of.
        #[arg(long, value_enum, default_value_t = Gamma0Of::Game)]
        of: Gamma0Of,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Materialize the m-th power (or contracted power) and its product
    /// action.
    Power {
        game: PathBuf,
        /// Base symmetry group; the trivial group if omitted.
        group: Option<PathBuf>,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        contracted: bool,
        /// Write the power game here instead of stdout.
        #[arg(long)]
        out_game: Option<PathBuf>,
        /// Write the product action here instead of stdout.
        #[arg(long)]
        out_group: Option<PathBuf>,
    },
    /// Materialize the tensor-sum symmetrization and its player-transitive
    /// action.
    Symmetrize {
        game: PathBuf,
        /// Base symmetry group; the trivial group if omitted.
        group: Option<PathBuf>,
        #[arg(long)]
        out_game: Option<PathBuf>,
        #[arg(long)]
        out_group: Option<PathBuf>,
    },
    /// Test a symmetric rational matrix for doubly nonnegative membership.
    DnnCheck {
        matrix: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DNN_TOL)]
        tol: f64,
    },
    /// Validate a group file against a game and classify the action.
    ValidateGroup { game: PathBuf, group: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Gamma0Of {
    Game,
    Power,
    ContractedPower,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_game(path: &Path) -> Result<Game, Error> {
    json::game_from_json(&read(path)?)
}

fn load_group(game: &Game, path: Option<&PathBuf>, cap: usize) -> Result<GroupAction, Error> {
    match path {
        Some(p) => json::group_from_json(game, &read(p)?, cap),
        None => Ok(GroupAction::trivial(game)),
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), Error> {
    match output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cell_cap() -> usize {
    std::env::var("XEQ_MAX_CELLS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(DEFAULT_CELL_CAP)
}

fn run(cli: &Cli) -> Result<u8, Error> {
    match &cli.command {
        Command::Info { game } => {
            let g = load_game(game)?;
            if cli.format == Format::Json {
                let value = serde_json::json!({
                    "players": g.player_count(),
                    "strategy_counts": g.strategy_counts(),
                    "profiles": g.profile_count(),
                    "zero_sum": is_zero_sum(&g),
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&value).expect("serializable")
                );
            } else {
                println!("players: {}", g.player_count());
                for i in 0..g.player_count() {
                    let labels: Vec<String> = (0..g.strategy_counts()[i])
                        .map(|s| g.strategy_label(i, s))
                        .collect();
                    println!(
                        "player {}: {} strategies [{}]",
                        i + 1,
                        labels.len(),
                        labels.join(", ")
                    );
                }
                println!("profiles: {}", g.profile_count());
                println!("zero-sum: {}", is_zero_sum(&g));
            }
            Ok(0)
        }
        Command::VerifyNash { game, profile } => {
            let g = load_game(game)?;
            let p = json::profile_from_json(&g, &read(profile)?)?;
            let report = verify_nash(&g, &p)?;
            print_report(cli.format, &g, &report);
            Ok(u8::from(!report.verdict))
        }
        Command::VerifyCe {
            game,
            distribution,
            conditional,
        } => {
            let g = load_game(game)?;
            let d = json::distribution_from_json(&g, &read(distribution)?)?;
            let report = if *conditional {
                verify_ce_conditional(&g, &d)?
            } else {
                verify_ce(&g, &d)?
            };
            print_report(cli.format, &g, &report);
            Ok(u8::from(!report.verdict))
        }
        Command::SolveCe {
            game,
            objective,
            output,
        } => {
            let g = load_game(game)?;
            let weights = match objective {
                Some(path) => Some(json::weights_from_json(&g, &read(path)?)?),
                None => None,
            };
            let ce = solve_ce(&g, weights.as_deref())?;
            emit(&json::distribution_to_json(&ce), output.as_ref())?;
            Ok(0)
        }
        Command::SolveXe {
            game,
            group,
            epsilon,
            max_iters,
            output,
        } => {
            let g = load_game(game)?;
            let action = load_group(&g, Some(group), cli.closure_cap)?;
            let eps = parse_rat(epsilon).map_err(Error::Parse)?;
            let solve = solve_xe(
                &g,
                &action,
                &XeOptions {
                    epsilon: eps,
                    max_iters: *max_iters,
                },
            )?;
            eprintln!(
                "termination: {} after {} iterations, residual {}",
                termination_str(solve.termination),
                solve.iterations,
                format_rat(&solve.residual)
            );
            emit(
                &json::certificate_to_json(&solve.certificate),
                output.as_ref(),
            )?;
            Ok(u8::from(!solve.converged()))
        }
        Command::SolveXeM {
            game,
            group,
            m,
            epsilon,
            max_iters,
            starts,
            output,
        } => {
            let g = load_game(game)?;
            let action = load_group(&g, Some(group), cli.closure_cap)?;
            let opts = OrderMOptions {
                epsilon: *epsilon,
                max_iters: *max_iters,
                starts: *starts,
                cell_cap: cell_cap(),
            };
            let solve = solve_order_m_xe(&g, &action, *m, &opts)?;
            eprintln!(
                "termination: {} after {} iterations, residual {} ({:.3e})",
                termination_str(solve.termination),
                solve.iterations,
                format_rat(&solve.residual),
                rat_to_f64(&solve.residual)
            );
            eprintln!(
                "contracted-power check: verdict {}, worst violation {}",
                solve.report_contracted.verdict,
                format_rat(&solve.report_contracted.worst_violation)
            );
            eprintln!(
                "power check: verdict {}, worst violation {}",
                solve.report_power.verdict,
                format_rat(&solve.report_power.worst_violation)
            );
            emit(
                &json::certificate_to_json(&solve.certificate),
                output.as_ref(),
            )?;
            Ok(u8::from(!solve.converged()))
        }
        Command::Gamma0 {
            game,
            of,
            m,
            output,
        } => {
            let g = load_game(game)?;
            let target = match of {
                Gamma0Of::Game => g,
                Gamma0Of::Power => power(&g, *m, cell_cap())?.game,
                Gamma0Of::ContractedPower => contracted_power(&g, *m, cell_cap())?.game,
            };
            let zs = deviation_game(&target);
            let (rows, cols) = json::deviation_game_labels(&target);
            let as_game = zs.to_game()?;
            let labeled = Game::with_names(
                as_game.strategy_counts().to_vec(),
                Some(vec![rows, cols]),
                vec![as_game.utilities(0).to_vec(), as_game.utilities(1).to_vec()],
            )?;
            emit(&json::game_to_json(&labeled), output.as_ref())?;
            Ok(0)
        }
        Command::Power {
            game,
            group,
            m,
            contracted,
            out_game,
            out_group,
        } => {
            let g = load_game(game)?;
            let action = load_group(&g, group.as_ref(), cli.closure_cap)?;
            let pg: PowerGame = if *contracted {
                contracted_power(&g, *m, cell_cap())?
            } else {
                power(&g, *m, cell_cap())?
            };
            let product = power_action(&pg, &g, &action)?;
            emit(&json::game_to_json(&pg.game), out_game.as_ref())?;
            emit(&json::group_to_json(&pg.game, &product), out_group.as_ref())?;
            Ok(0)
        }
        Command::Symmetrize {
            game,
            group,
            out_game,
            out_group,
        } => {
            let g = load_game(game)?;
            let action = load_group(&g, group.as_ref(), cli.closure_cap)?;
            let (sym, sym_action) = symmetrize_game(&g, &action, cell_cap())?;
            emit(&json::game_to_json(&sym), out_game.as_ref())?;
            emit(&json::group_to_json(&sym, &sym_action), out_group.as_ref())?;
            Ok(0)
        }
        Command::DnnCheck { matrix, tol } => {
            let m = json::matrix_from_json(&read(matrix)?)?;
            let report = dnn_membership(&m, *tol)?;
            if cli.format == Format::Json {
                print!("{}", json::dnn_report_to_json(&report));
            } else {
                print!("{}", json::dnn_report_to_text(&report));
            }
            Ok(u8::from(report.verdict == DnnVerdict::NonMember))
        }
        Command::ValidateGroup { game, group } => {
            let g = load_game(game)?;
            let action = json::group_from_json(&g, &read(group)?, cli.closure_cap)?;
            match validate_action(&g, &action) {
                Ok(()) => {
                    let class = classify_action(&action);
                    if cli.format == Format::Json {
                        let value = serde_json::json!({
                            "valid": true,
                            "order": action.order(),
                            "player_trivial": class.player_trivial,
                            "player_transitive": class.player_transitive,
                        });
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&value).expect("serializable")
                        );
                    } else {
                        println!("valid: true");
                        println!("order: {}", action.order());
                        println!("player trivial: {}", class.player_trivial);
                        println!("player transitive: {}", class.player_transitive);
                    }
                    Ok(0)
                }
                Err(v) => {
                    if cli.format == Format::Json {
                        let value = serde_json::json!({
                            "valid": false,
                            "element": v.element,
                            "player": v.player + 1,
                            "profile": v.profile,
                        });
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&value).expect("serializable")
                        );
                    } else {
                        println!(
                            "valid: false (element {}, player {}, profile {:?})",
                            v.element,
                            v.player + 1,
                            v.profile
                        );
                    }
                    Ok(1)
                }
            }
        }
    }
}

fn termination_str(t: XeTermination) -> &'static str {
    match t {
        XeTermination::Converged => "converged",
        XeTermination::IterationLimit => "iteration limit",
        XeTermination::Stalled => "stalled",
    }
}

fn print_report(format: Format, game: &Game, report: &xeq_core::equilibria::EquilibriumReport) {
    if format == Format::Json {
        print!("{}", json::report_to_json(game, report));
    } else {
        print!("{}", json::report_to_text(game, report));
    }
}
