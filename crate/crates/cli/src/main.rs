mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use desing::chart::LabelAlloc;
use desing::driver::{redsing, replay, DriverConfig, DriverError, TraceStep};
use desing::ideal::{dimension_of_basis, groebner, IdealError};
use desing::idealistic::{equiv_bounded, trick_validate, EquivVerdict, IdealisticError, IdealisticSpace};
use desing::io::{parse_rational, ParseError, ProblemError, ProblemFile};
use desing::monomial::{monomial_resolve, LogState, MonomialError};
use desing::poly::{CoordSubspace, PolyError, RationalPoint};
use desing::projection::{
    adjust, coefficient_ideals, cofactorial_order, extract_log_factor, CofactorialOrder, ProjectionContext,
    ProjectionError,
};
use serde_json::json;
use thiserror::Error;

use report::Report;

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error(transparent)]
    Idealistic(#[from] IdealisticError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Monomial(#[from] MonomialError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Emit {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "desing", version, about = "Exact blow-up computations on marked ideals")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "text")]
    emit: Emit,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Order δ at a point (default: the first seed, else the origin) or along a coordinate subspace.
    Order {
        file: PathBuf,
        /// Comma-separated rational coordinates.
        #[arg(long, conflicts_with = "along")]
        point: Option<String>,
        /// Comma-separated variable names of the subspace.
        #[arg(long)]
        along: Option<String>,
    },
    /// Reduced Gröbner basis of the singular ideal and its dimension.
    Sing { file: PathBuf },
    /// Controlled transforms in every chart of a blow-up.
    Blowup {
        file: PathBuf,
        #[arg(long)]
        center: String,
    },
    /// Coefficient ideals on the hypersurface z = 0.
    Project {
        file: PathBuf,
        #[arg(long)]
        z: String,
    },
    /// Logarithmic factor Z, co-factorial order μ and the adjusted list.
    Adjust {
        file: PathBuf,
        /// Adjustment mark (default μ).
        #[arg(long)]
        mark: Option<u32>,
    },
    /// Exponent game on the logarithmic factor.
    Monomial {
        file: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
    },
    /// Curve-divisor construction at a singular point.
    Trick {
        file: PathBuf,
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value_t = 1_000)]
        fuel: usize,
    },
    /// Bounded comparison of permissible test systems.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 10_000_000)]
        fuel: usize,
    },
    /// Full resolution with trace and per-leaf verification.
    Resolve {
        file: PathBuf,
        #[arg(long, default_value_t = DriverConfig::default().fuel)]
        fuel: usize,
    },
    /// Rebuilds the tree of a recorded trace (a `resolve --emit json` report or a bare step list).
    Replay { file: PathBuf, trace: PathBuf },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

fn load(path: &Path) -> Result<(ProblemFile, IdealisticSpace), CliError> {
    let problem = ProblemFile::from_json(&read(path)?)?;
    let space = problem.to_space()?;
    Ok((problem, space))
}

fn split_list(text: &str) -> Vec<&str> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn parse_point(text: &str, nvars: usize) -> Result<RationalPoint, CliError> {
    let coords = split_list(text).into_iter().map(parse_rational).collect::<Result<Vec<_>, _>>()?;
    if coords.len() != nvars {
        return Err(CliError::Usage(format!("point has {} coordinates, chart has {nvars}", coords.len())));
    }
    Ok(RationalPoint::new(coords))
}

fn parse_center(space: &IdealisticSpace, text: &str) -> Result<CoordSubspace, CliError> {
    let chart = space.chart();
    let vars = split_list(text)
        .into_iter()
        .map(|n| chart.var_index(n).map_err(|_| CliError::Usage(format!("unknown variable `{n}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CoordSubspace::new(vars)?)
}

/// Explicit point, else the first seed, else the origin.
fn chosen_point(problem: &ProblemFile, space: &IdealisticSpace, point: Option<&str>) -> Result<RationalPoint, CliError> {
    match point {
        Some(p) => parse_point(p, space.nvars()),
        None => Ok(problem.seed_points()?.into_iter().next().unwrap_or_else(|| RationalPoint::origin(space.nvars()))),
    }
}

fn order(file: &Path, point: Option<&str>, along: Option<&str>) -> Result<Report, CliError> {
    let (problem, space) = load(file)?;
    if let Some(along) = along {
        let center = parse_center(&space, along)?;
        let delta = space.delta_along(&center)?;
        let names = space.chart().names_of(center.vars());
        return Ok(Report::new(json!({"delta": delta.to_string(), "along": names}), delta.to_string()));
    }
    let p = chosen_point(&problem, &space, point)?;
    let delta = space.delta(&p)?;
    let coords: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
    Ok(Report::new(json!({"delta": delta.to_string(), "point": coords}), delta.to_string()))
}

fn sing(file: &Path) -> Result<Report, CliError> {
    let (_, space) = load(file)?;
    let names = space.chart().variables();
    let gb = groebner(&space.singular_ideal())?;
    let dim = dimension_of_basis(&gb);
    let basis: Vec<String> = gb.elements().iter().map(|p| p.display(names).to_string()).collect();
    let empty = gb.is_unit();
    let meets_region = !space.is_nonsingular()?;
    let text = format!("basis: {{{}}}\ndimension: {dim}\nsingular in region: {meets_region}", basis.join(", "));
    Ok(Report::new(json!({"basis": basis, "dimension": dim, "empty": empty, "singular_in_region": meets_region}), text))
}

fn blowup(file: &Path, center: &str) -> Result<Report, CliError> {
    let (_, space) = load(file)?;
    let center = parse_center(&space, center)?;
    let names = space.chart().names_of(center.vars());
    if !space.is_permissible_center(&center)? {
        let text = format!("center {{{}}} is not permissible", names.join(","));
        return Ok(Report::new(json!({"center": names, "permissible": false}), text).verdict(false));
    }
    let mut alloc = LabelAlloc::after(space.chart());
    let mut charts = Vec::new();
    let mut text = format!("center {{{}}}\n", names.join(","));
    for (map, child) in space.blow_up(&center, &mut alloc, 1)? {
        let w = map.exceptional_var().expect("blow-up maps carry an exceptional variable");
        let chart_name = space.chart().variables()[w].clone();
        match child {
            Some(child) => {
                charts.push(json!({"chart": chart_name, "present": true, "space": report::space_json(&child)}));
                text += &format!("chart {chart_name}:\n  {}\n", report::space_text(&child).replace('\n', "\n  "));
            }
            None => {
                charts.push(json!({"chart": chart_name, "present": false}));
                text += &format!("chart {chart_name}: misses the subspace\n");
            }
        }
    }
    Ok(Report::new(json!({"center": names, "permissible": true, "charts": charts}), text.trim_end().to_string()))
}

fn project(file: &Path, z: &str) -> Result<Report, CliError> {
    let (_, space) = load(file)?;
    let var = space.chart().var_index(z).map_err(|_| CliError::Usage(format!("unknown variable `{z}`")))?;
    let projected = coefficient_ideals(&ProjectionContext::new(space, var))?;
    Ok(Report::new(report::space_json(&projected), report::space_text(&projected)))
}

fn adjust_cmd(file: &Path, mark: Option<u32>) -> Result<Report, CliError> {
    let (_, space) = load(file)?;
    let space = space.normalize();
    let names = space.chart().variables();
    let fact = extract_log_factor(&space)?;
    let z = fact.factor.monomial(&space);
    let z_text = desing::poly::Poly::term(z, desing::poly::rat(1)).display(names).to_string();
    let mu = cofactorial_order(&space, &fact)?;
    let mut json = json!({"z": z_text, "mu": mu.to_string()});
    let mut text = format!("Z = {z_text}\nmu = {mu}");
    let chosen = match (mark, &mu) {
        (Some(m), _) => Some(m),
        (None, CofactorialOrder::Finite(m)) if *m > 0 => Some(*m),
        _ => None,
    };
    if let Some(m) = chosen {
        let adjusted = adjust(&space, &fact, m)?;
        let empty = adjusted.is_nonsingular()?;
        json["mark"] = json!(m);
        json["adjusted"] = report::space_json(&adjusted);
        json["sing_empty"] = json!(empty);
        text += &format!("\nadjusted at {m}:\n  {}\nSing empty: {empty}", report::space_text(&adjusted).replace('\n', "\n  "));
    }
    Ok(Report::new(json, text))
}

fn monomial(file: &Path, fuel: usize) -> Result<Report, CliError> {
    let (_, space) = load(file)?;
    let space = space.normalize();
    let fact = extract_log_factor(&space)?;
    let state = LogState::new(fact.factor.exponents.clone(), space.common_mark())?;
    let mut alloc = LabelAlloc::after(space.chart());
    let run = monomial_resolve(&state, &mut alloc, fuel)?;
    Ok(report::monomial_report(&state, &run))
}

fn trick(file: &Path, point: Option<&str>, fuel: usize) -> Result<Report, CliError> {
    let (problem, space) = load(file)?;
    let p = chosen_point(&problem, &space, point)?;
    Ok(report::trick_report(&trick_validate(&space, &p, fuel)?))
}

fn equiv(first: &Path, second: &Path, depth: usize, fuel: usize) -> Result<Report, CliError> {
    let (_, a) = load(first)?;
    let (_, b) = load(second)?;
    Ok(match equiv_bounded(&a, &b, depth, None, fuel)? {
        EquivVerdict::Same { systems } => Report::new(
            json!({"verdict": "same", "depth": depth, "systems": systems}),
            format!("same verdicts on {systems} test systems up to depth {depth}"),
        ),
        EquivVerdict::Counterexample { system, charts, permissible_for_first } => {
            let text = format!(
                "counterexample: {}\ncharts {:?}; last center permissible for the {} space only",
                report::test_system_text(&system),
                charts,
                if permissible_for_first { "first" } else { "second" }
            );
            let json = json!({
                "verdict": "counterexample",
                "system": system,
                "charts": charts,
                "permissible_for_first": permissible_for_first,
            });
            Report::new(json, text).verdict(false)
        }
    })
}

fn resolve(file: &Path, fuel: usize) -> Result<Report, CliError> {
    let (_, space) = load(file)?;
    let resolution = redsing(&space, &DriverConfig { fuel, ..DriverConfig::default() })?;
    let verification = resolution.verify()?;
    Ok(report::resolution_report(&resolution, &verification))
}

fn replay_cmd(file: &Path, trace: &Path) -> Result<Report, CliError> {
    let (_, space) = load(file)?;
    let value: serde_json::Value =
        serde_json::from_str(&read(trace)?).map_err(|e| CliError::Usage(format!("trace is not json: {e}")))?;
    let steps = value.get("trace").cloned().unwrap_or(value);
    let steps: Vec<TraceStep> =
        serde_json::from_value(steps).map_err(|e| CliError::Usage(format!("malformed trace: {e}")))?;
    let resolution = replay(&space, &steps)?;
    let verification = resolution.verify()?;
    Ok(report::resolution_report(&resolution, &verification))
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Order { file, point, along } => order(file, point.as_deref(), along.as_deref()),
        Command::Sing { file } => sing(file),
        Command::Blowup { file, center } => blowup(file, center),
        Command::Project { file, z } => project(file, z),
        Command::Adjust { file, mark } => adjust_cmd(file, *mark),
        Command::Monomial { file, fuel } => monomial(file, *fuel),
        Command::Trick { file, point, fuel } => trick(file, point.as_deref(), *fuel),
        Command::Equiv { first, second, depth, fuel } => equiv(first, second, *depth, *fuel),
        Command::Resolve { file, fuel } => resolve(file, *fuel),
        Command::Replay { file, trace } => replay_cmd(file, trace),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.emit {
                Emit::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("reports serialize")),
                Emit::Text => println!("{}", report.text),
            }
            if report.positive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Driver(DriverError::NotResolved(leaf))) => {
            eprintln!("not resolved: leaf {leaf} is still singular");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
