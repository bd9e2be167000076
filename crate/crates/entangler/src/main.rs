use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use entangler::{run, write_run, Config, Experiment, HarnessError};

/// Run a named two-atom entanglement experiment and write its tables.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    /// fig2a, fig2b, fig3, fig4, fig5, fig6, offset-fit, validate, sweep or steady-state
    experiment: String,
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; overrides the configuration.
    #[arg(long)]
    workers: Option<usize>,
    /// Seed; overrides the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

fn main_inner(cli: Cli) -> Result<(), HarnessError> {
    let experiment: Experiment = cli.experiment.parse().map_err(HarnessError::Config)?;
    let mut config = Config::load(&cli.config)?;
    if let Some(w) = cli.workers {
        config.workers = w;
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    config.validate()?;
    let output = run(experiment, &config)?;
    let timestamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string();
    for path in write_run(&cli.out, &output, &config, &timestamp)? {
        println!("{}", path.display());
    }
    Ok(())
}

/// Parses `args` and runs; returns the process exit code.
fn execute<I, S>(args: I) -> u8
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    match main_inner(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("entangler: {e}");
            e.exit_code() as u8
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(execute(std::env::args_os()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn run_with(dir: &std::path::Path, experiment: &str, config: &str, extra: &[&str]) -> u8 {
        let cfg = dir.join("config.json");
        fs::write(&cfg, config).unwrap();
        let out = dir.join("out");
        let mut args = vec![
            "entangler".to_string(),
            experiment.to_string(),
            "--config".into(),
            cfg.display().to_string(),
            "--out".into(),
            out.display().to_string(),
        ];
        args.extend(extra.iter().map(|s| s.to_string()));
        execute(args)
    }

    fn files(dir: &std::path::Path) -> Vec<String> {
        let mut names: Vec<String> = fs::read_dir(dir.join("out"))
            .map(|rd| rd.map(|e| e.unwrap().file_name().into_string().unwrap()).collect())
            .unwrap_or_default();
        names.sort();
        names
    }

    #[test]
    fn writes_csv_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let code = run_with(dir.path(), "fig2a", r#"{"grids": {"kappa": [0, 0.14]}}"#, &["--seed", "11"]);
        assert_eq!(code, 0);
        let names = files(dir.path());
        assert_eq!(names.len(), 2, "{names:?}");
        assert!(names[0].starts_with("fig2a_") && names[0].ends_with("_11.csv"));
        assert!(names[1].ends_with("_11.json"));
        let csv = fs::read_to_string(dir.path().join("out").join(&names[0])).unwrap();
        assert!(csv.starts_with("kappa,delta_omega,c_ss,"));
        assert_eq!(csv.lines().count(), 3);
        let meta: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("out").join(&names[1])).unwrap())
                .unwrap();
        assert_eq!(meta["seed"], 11);
        assert_eq!(meta["experiment"], "fig2a");
    }

    #[test]
    fn config_errors_exit_2() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_with(dir.path(), "fig2a", r#"{"bogus": 1}"#, &[]), 2);
        assert_eq!(run_with(dir.path(), "fig9", "{}", &[]), 2);
        assert_eq!(run_with(dir.path(), "fig2a", "{}", &["--workers", "0"]), 2);
        assert_eq!(execute(["entangler", "fig2a"]), 2);
        assert!(files(dir.path()).is_empty());
    }

    #[test]
    fn numerical_failure_exits_3() {
        let dir = tempfile::tempdir().unwrap();
        // a zero-width tolerance cannot be met within the step budget
        let code = run_with(
            dir.path(),
            "fig3",
            r#"{"t_final": 1.0, "tolerances": {"rtol": 1e-300, "atol": 1e-300}}"#,
            &[],
        );
        assert_eq!(code, 3);
    }
}
