use std::path::PathBuf;
use std::process::ExitCode;

use hornscan::config::{self, RunConfig};
use hornscan::design::WideningMode;
use hornscan::error::{Error, Result};
use hornscan::run::{run_compare, run_design, run_simulate, OutputBundle};

const USAGE: &str = "\
usage: hornscan <design|simulate|compare|sweep> [options]

subcommands:
  design     synthesize the horn outline and domain pattern
  simulate   design, then BPM-propagate every sweep voltage
  compare    design, then size the rectangular comparator
  sweep      alias for simulate

options:
  --config <path>           run configuration; omitted keys use the
                            published device (omit the flag entirely to
                            run the defaults)
  --out <dir>               output directory, created if absent (required)
  --widening-mode <mode>    override the widening convention:
                            design | selfconsistent
  --quiet                   suppress the summary on stdout
  -h, --help                show this help
";

struct Cli {
    command: String,
    config_path: Option<PathBuf>,
    out_dir: PathBuf,
    widening_mode: Option<WideningMode>,
    quiet: bool,
}

fn parse_args(mut args: impl Iterator<Item = String>) -> std::result::Result<Option<Cli>, String> {
    let mut command: Option<String> = None;
    let mut config_path = None;
    let mut out_dir = None;
    let mut widening_mode = None;
    let mut quiet = false;
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "-h" | "--help" => return Ok(None),
            "--config" => {
                let v = args.next().ok_or("--config needs a path")?;
                config_path = Some(PathBuf::from(v));
            }
            "--out" => {
                let v = args.next().ok_or("--out needs a directory")?;
                out_dir = Some(PathBuf::from(v));
            }
            "--widening-mode" => {
                let v = args.next().ok_or("--widening-mode needs a value")?;
                widening_mode = Some(WideningMode::from_label(&v).ok_or_else(|| {
                    format!("unknown widening mode {v:?} (expected design or selfconsistent)")
                })?);
            }
            "--quiet" => quiet = true,
            other if command.is_none() && !other.starts_with('-') => {
                command = Some(other.to_owned());
            }
            other => return Err(format!("unexpected argument {other:?}")),
        }
    }
    let command = command.ok_or("missing subcommand")?;
    if !matches!(
        command.as_str(),
        "design" | "simulate" | "compare" | "sweep"
    ) {
        return Err(format!("unknown subcommand {command:?}"));
    }
    let out_dir = out_dir.ok_or("missing required --out <dir>")?;
    Ok(Some(Cli {
        command,
        config_path,
        out_dir,
        widening_mode,
        quiet,
    }))
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut config = match &cli.config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            config::parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(mode) = cli.widening_mode {
        config.design.widening_mode = mode;
    }
    Ok(config)
}

fn execute(cli: &Cli) -> Result<OutputBundle> {
    let config = load_config(cli)?;
    match cli.command.as_str() {
        "design" => run_design(&config, &cli.out_dir),
        "compare" => run_compare(&config, &cli.out_dir),
        "simulate" | "sweep" => run_simulate(&config, &cli.out_dir),
        other => unreachable!("subcommand {other} already validated"),
    }
}

fn summarize(cli: &Cli, bundle: &OutputBundle) {
    let r = &bundle.report;
    println!(
        "{} ({}): dn = {:.4e}, theta_ext = {:.3} mrad, spots = {}",
        r.command, r.widening_mode, r.dn, r.horn.theta_ext_mrad, r.spots.total
    );
    println!(
        "horn: entrance {:.2} um, exit {:.2} um, poling ratio {:.3} ({})",
        r.horn.entrance_width_m * 1e6,
        r.horn.exit_width_m * 1e6,
        r.poling.ratio,
        if r.poling.pass { "safe" } else { "unsafe" }
    );
    if let Some(c) = &r.comparator {
        println!(
            "rect comparator: width {:.1} um, dn {:.4e}, voltage ratio {:.3}",
            c.rect_width_m * 1e6,
            c.rect_required_dn,
            c.voltage_ratio
        );
    }
    if let Some(f) = &r.fan {
        println!(
            "sweep: max theta_ext {:.3} mrad, fan spots {}",
            f.theta_max_ext_mrad, f.spots_total
        );
    }
    println!(
        "wrote {} files to {}",
        bundle.files.len(),
        cli.out_dir.display()
    );
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match parse_args(args.into_iter()) {
        Ok(None) => {
            print!("{USAGE}");
            return ExitCode::SUCCESS;
        }
        Ok(Some(cli)) => cli,
        Err(msg) => {
            eprintln!("error: {msg}");
            eprint!("{USAGE}");
            return ExitCode::from(2);
        }
    };
    match execute(&cli) {
        Ok(bundle) => {
            if !cli.quiet {
                summarize(&cli, &bundle);
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
