use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command as App};
use mlrelax_cli::{run, CliError, Command, Format, Grid, JobConfig, Kind, ParamSpec, Spacing};
use serde_json::Value;

fn param_arg(spec: &ParamSpec) -> Arg {
    let flag = spec.flag();
    let mut help = spec.help.to_string();
    match spec.default {
        mlrelax_cli::Default::Num(v) => help.push_str(&format!(" [default: {v:?}]")),
        mlrelax_cli::Default::Int(v) => help.push_str(&format!(" [default: {v}]")),
        mlrelax_cli::Default::Text(v) => help.push_str(&format!(" [default: {v}]")),
        _ => {}
    }
    let arg = Arg::new(spec.key).long(flag).help(help).action(ArgAction::Set);
    let arg = match spec.kind {
        Kind::Num => arg.value_parser(value_parser!(f64)).allow_negative_numbers(true),
        Kind::Int => arg.value_parser(value_parser!(u64)),
        Kind::Choice(options) => arg.value_parser(options.to_vec()),
    };
    arg.value_name(spec.key.to_uppercase())
}

fn grid_args() -> [Arg; 4] {
    [
        Arg::new("start")
            .long("start")
            .value_parser(value_parser!(f64))
            .allow_negative_numbers(true)
            .help("grid start"),
        Arg::new("stop")
            .long("stop")
            .value_parser(value_parser!(f64))
            .allow_negative_numbers(true)
            .help("grid stop"),
        Arg::new("count")
            .long("count")
            .value_parser(value_parser!(usize))
            .help("grid points (>= 2)"),
        Arg::new("spacing")
            .long("spacing")
            .value_parser(["linear", "log"])
            .help("grid spacing [default: linear]"),
    ]
}

fn cli() -> App {
    let mut app = App::new("mlrelax")
        .about("Mittag-Leffler / Prabhakar functions and relaxation solvers")
        .version(env!("CARGO_PKG_VERSION"))
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("FILE")
                .help("read a JSON job config; replaces the subcommand and its flags"),
        )
        .arg(
            Arg::new("output")
                .long("output")
                .global(true)
                .value_parser(["csv", "json"])
                .help("output format [default: csv]"),
        );
    for cmd in Command::ALL {
        let mut sub = App::new(cmd.name()).about(cmd.about());
        for spec in cmd.params() {
            sub = sub.arg(param_arg(spec));
        }
        if cmd.takes_grid() {
            sub = sub.args(grid_args());
        }
        app = app.subcommand(sub);
    }
    app
}

fn grid_from(m: &ArgMatches) -> Result<Option<Grid>, CliError> {
    let start = m.get_one::<f64>("start").copied();
    let stop = m.get_one::<f64>("stop").copied();
    let count = m.get_one::<usize>("count").copied();
    let spacing = m.get_one::<String>("spacing");
    match (start, stop, count) {
        (None, None, None) if spacing.is_none() => Ok(None),
        (Some(start), Some(stop), Some(count)) => Ok(Some(Grid {
            start,
            stop,
            count,
            spacing: spacing.map(|s| s.parse()).transpose()?.unwrap_or(Spacing::Linear),
        })),
        _ => Err(CliError::param("a grid needs --start, --stop and --count")),
    }
}

fn job_from(m: &ArgMatches) -> Result<JobConfig, CliError> {
    let output: Option<Format> = m.get_one::<String>("output").map(|s| s.parse()).transpose()?;
    if let Some(path) = m.get_one::<String>("config") {
        if m.subcommand()
            .is_some_and(|(_, sub)| sub.ids().any(|id| id != "config" && id != "output"))
        {
            return Err(CliError::param("--config cannot be combined with subcommand flags"));
        }
        let text = std::fs::read_to_string(path).map_err(|e| CliError::param(format!("cannot read {path}: {e}")))?;
        let mut job = JobConfig::from_json(&text)?;
        if let Some((name, _)) = m.subcommand() {
            if name != job.command.name() {
                return Err(CliError::param(format!(
                    "subcommand {name} disagrees with config command {}",
                    job.command
                )));
            }
        }
        if let Some(o) = output {
            job.output = o;
        }
        return Ok(job);
    }
    let (name, sub) = m
        .subcommand()
        .ok_or_else(|| CliError::param("no subcommand given (see --help)"))?;
    let command: Command = name.parse()?;
    let mut parameters = BTreeMap::new();
    for spec in command.params() {
        let v = match spec.kind {
            Kind::Num => sub.get_one::<f64>(spec.key).map(|v| Value::from(*v)),
            Kind::Int => sub.get_one::<u64>(spec.key).map(|v| Value::from(*v)),
            Kind::Choice(_) => sub.get_one::<String>(spec.key).map(|v| Value::from(v.clone())),
        };
        if let Some(v) = v {
            parameters.insert(spec.key.to_string(), v);
        }
    }
    let grid = if command.takes_grid() { grid_from(sub)? } else { None };
    Ok(JobConfig {
        command,
        parameters,
        output: output.unwrap_or_default(),
        grid,
    })
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let result = job_from(&matches).and_then(|job| run(&job).map(|t| (job.output, t)));
    match result {
        Ok((format, table)) => {
            let mut err = std::io::stderr().lock();
            for line in &table.diagnostics {
                let _ = writeln!(err, "{line}");
            }
            let mut out = std::io::stdout().lock();
            if out
                .write_all(table.render(format).as_bytes())
                .and_then(|_| out.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            if table.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
