mod report;

use std::fs;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use vinberg::classifier::{classify_range_with, classify_with_digits, Execution, Family};
use vinberg::covers::{find_coloring, verify_coloring, Coloring};
use vinberg::diagram::{assemble_gram, parse_diagram};
use vinberg::interval::set_start_precision;
use vinberg::lobell::{
    antiprism_ratio, delta_n, lobell_faces, pnk_diagram, systole_candidate, trace_field_facts,
    FaceRole,
};

use report::ReportJson;

const PRECISION_ENV: &str = "LOBELL_PRECISION_BITS";

#[derive(Parser)]
#[command(
    name = "vinberg",
    version,
    about = "Arithmeticity of hyperbolic reflection groups and the Löbell family"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a Coxeter–Vinberg diagram file.
    Classify {
        path: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Quantities and diagrams of the Löbell family.
    #[command(subcommand)]
    Lobell(LobellCommand),
    /// Face colorings of L_n defining degree-8 covers.
    #[command(subcommand)]
    Cover(CoverCommand),
}

#[derive(Args, Clone, Copy)]
struct Output {
    /// Emit JSON.
    #[arg(long)]
    json: bool,
    /// Decimal places in previews.
    #[arg(long, default_value_t = 30)]
    digits: usize,
}

#[derive(Subcommand)]
enum LobellCommand {
    /// Exact Gram matrix of the slice T_n (or P_{n,k} with --k).
    Gram {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 2)]
        k: u64,
        #[command(flatten)]
        out: Output,
    },
    /// The diagram file of T_n (or P_{n,k}).
    Diagram {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 2)]
        k: u64,
    },
    /// Classify T_n (or P_{n,k}).
    Classify {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 2)]
        k: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Classify T_n over an inclusive range such as 5..18.
    Table {
        range: String,
        /// Evaluate rows one after another.
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        json: bool,
    },
    /// delta_n and the systole candidate 2 delta_n.
    Systole {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        out: Output,
    },
    /// The circle ratio (1 + sin(pi/n)) / cos(pi/n).
    Ratio {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Face lattice of L_n.
    Faces {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum CoverCommand {
    /// Search for an orientable coloring of L_n.
    Search {
        #[arg(long)]
        n: u64,
        /// Require the top and bottom faces to share a color.
        #[arg(long)]
        top_eq_bottom: bool,
    },
    /// Check a coloring file against L_n.
    Verify {
        #[arg(long)]
        n: u64,
        path: PathBuf,
        #[command(flatten)]
        out: Output,
    },
}

type CmdResult = Result<String, String>;

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn read(path: &PathBuf) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let bad = || format!("bad range '{s}', expected a..b");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    Ok(a..=b)
}

fn cmd_classify(path: &PathBuf, out: Output) -> CmdResult {
    let d = parse_diagram(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    let r = classify_with_digits(&d, out.digits).map_err(|e| e.to_string())?;
    Ok(if out.json {
        to_json(&ReportJson::new(r))
    } else {
        report::classification_text(&r)
    })
}

fn cmd_lobell(cmd: LobellCommand) -> CmdResult {
    let err = |e: vinberg::lobell::LobellError| e.to_string();
    match cmd {
        LobellCommand::Gram { n, k, out } => {
            let d = pnk_diagram(n, k).map_err(err)?;
            let (_, g) = assemble_gram(&d).map_err(|e| e.to_string())?;
            let rows: Vec<Vec<String>> = (0..g.dim())
                .map(|i| (0..g.dim()).map(|j| g.get(i, j).to_string()).collect())
                .collect();
            if out.json {
                return Ok(to_json(&rows));
            }
            Ok(rows
                .iter()
                .map(|r| format!("[{}]\n", r.join(", ")))
                .collect())
        }
        LobellCommand::Diagram { n, k } => Ok(pnk_diagram(n, k).map_err(err)?.to_text()),
        LobellCommand::Classify { n, k, out } => {
            let r = classify_with_digits(&pnk_diagram(n, k).map_err(err)?, out.digits)
                .map_err(|e| e.to_string())?;
            Ok(if out.json {
                to_json(&ReportJson::new(r))
            } else {
                report::classification_text(&r)
            })
        }
        LobellCommand::Table {
            range,
            sequential,
            json,
        } => {
            let range = parse_range(&range)?;
            if let Some(n) = range.clone().find(|&n| n < 5) {
                return Err(format!("n = {n}: the Löbell family needs n >= 5"));
            }
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::default()
            };
            let rows =
                classify_range_with(Family::Slice, range, exec).map_err(|e| e.to_string())?;
            if json {
                return Ok(to_json(
                    &rows.iter().map(report::table_row_json).collect::<Vec<_>>(),
                ));
            }
            Ok(report::table_text(&rows))
        }
        LobellCommand::Systole { n, out } => {
            let d = delta_n(n, out.digits + 2).map_err(err)?;
            let s = systole_candidate(n, out.digits + 2).map_err(err)?;
            let facts = trace_field_facts(n).map_err(err)?;
            if out.json {
                #[derive(Serialize)]
                #[serde(rename_all = "camelCase")]
                struct SystoleJson {
                    n: u64,
                    delta: String,
                    systole_candidate: String,
                    field_degree: u64,
                }
                return Ok(to_json(&SystoleJson {
                    n,
                    delta: d.to_decimal(out.digits),
                    systole_candidate: s.to_decimal(out.digits),
                    field_degree: facts.field_degree,
                }));
            }
            Ok(format!(
                "delta_{n} = {}\n2*delta_{n} = {} (systole candidate)\n",
                d.to_decimal(out.digits),
                s.to_decimal(out.digits)
            ))
        }
        LobellCommand::Ratio { n, out } => {
            let r = antiprism_ratio(n, out.digits + 2).map_err(err)?;
            if out.json {
                return Ok(to_json(
                    &serde_json::json!({ "n": n, "ratio": r.to_decimal(out.digits) }),
                ));
            }
            Ok(format!("{}\n", r.to_decimal(out.digits)))
        }
        LobellCommand::Faces { n, json } => {
            let fl = lobell_faces(n).map_err(err)?;
            let role = |r: &FaceRole| match r {
                FaceRole::Top => "top".to_string(),
                FaceRole::Bottom => "bottom".to_string(),
                FaceRole::Lateral { index, row } => {
                    format!("{}{index}", if *row == 0 { 'U' } else { 'W' })
                }
            };
            if json {
                let faces: Vec<_> = fl
                    .roles
                    .iter()
                    .zip(&fl.adjacency)
                    .enumerate()
                    .map(|(i, (r, adj))| serde_json::json!({ "index": i, "role": role(r), "adjacent": adj }))
                    .collect();
                return Ok(to_json(&serde_json::json!({
                    "faces": fl.face_count(),
                    "edges": fl.edge_count(),
                    "vertices": fl.vertex_count(),
                    "euler": fl.euler_characteristic(),
                    "faceList": faces,
                })));
            }
            let mut s = format!(
                "F = {}, E = {}, V = {}, F - E + V = {}\n",
                fl.face_count(),
                fl.edge_count(),
                fl.vertex_count(),
                fl.euler_characteristic()
            );
            for (i, (r, adj)) in fl.roles.iter().zip(&fl.adjacency).enumerate() {
                let adj: Vec<String> = adj.iter().map(|a| a.to_string()).collect();
                s += &format!("face {i} {}: {}\n", role(r), adj.join(" "));
            }
            Ok(s)
        }
    }
}

fn cmd_cover(cmd: CoverCommand) -> CmdResult {
    match cmd {
        CoverCommand::Search { n, top_eq_bottom } => {
            let fl = lobell_faces(n).map_err(|e| e.to_string())?;
            Ok(match find_coloring(&fl, top_eq_bottom) {
                Some(c) => c.to_string(),
                None => "none found (exhaustive)\n".to_string(),
            })
        }
        CoverCommand::Verify { n, path, out } => {
            let fl = lobell_faces(n).map_err(|e| e.to_string())?;
            let c =
                Coloring::parse(&read(&path)?).map_err(|e| format!("{}: {e}", path.display()))?;
            let r = verify_coloring(&fl, &c, out.digits + 2).map_err(|e| e.to_string())?;
            Ok(if out.json {
                to_json(&report::cover_json(&r, out.digits))
            } else {
                report::cover_text(&r, out.digits)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var(PRECISION_ENV) {
        match v.trim().parse::<u32>() {
            Ok(bits) => set_start_precision(bits),
            Err(_) => {
                eprintln!("error: {PRECISION_ENV} must be a positive integer, got '{v}'");
                return ExitCode::from(2);
            }
        }
    }
    let result = match cli.command {
        Command::Classify { path, out } => cmd_classify(&path, out),
        Command::Lobell(cmd) => cmd_lobell(cmd),
        Command::Cover(cmd) => cmd_cover(cmd),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
