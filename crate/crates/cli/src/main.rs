use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use theta_forge::registry::{self, Params};
use theta_forge::thetanum::ThetaContext;
use theta_forge_cli::campaign::{parse_campaign, run_campaign, Campaign, Entry, ModeChoice};
use theta_forge_cli::dsl::{eval, parse, Env, EvalError, Value};
use theta_forge_cli::{format_complex, parse_value};

#[derive(Parser)]
#[command(name = "theta-forge", version, about = "Verify theta-function and Macdonald identities")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a campaign from a JSON config, or a single identity.
    Verify {
        #[arg(long, conflicts_with = "id")]
        config: Option<std::path::PathBuf>,
        #[arg(long, required_unless_present = "config")]
        id: Option<String>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Size bound such as `n=3`, `m=[2,2]` or `D=4`; repeatable.
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
    },
    /// Evaluate an expression.
    Eval {
        #[arg(long)]
        expr: String,
        /// Binding such as `x=2+1i` or `x=[1, 2, 3]`; repeatable.
        #[arg(long = "bind", value_name = "K=V")]
        binds: Vec<String>,
        /// Elliptic nome; 0 gives theta(x) = 1 - x.
        #[arg(long, default_value = "0")]
        nome: String,
    },
    /// List registered identities with their modes and default bounds.
    ListIdentities,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    Numeric,
    Exact,
    Both,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn split_kv(s: &str) -> Result<(&str, &str), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| format!("expected K=V, got `{s}`"))
}

fn params_from(pairs: &[String]) -> Result<Params, String> {
    let mut obj = serde_json::Map::new();
    for p in pairs {
        let (k, v) = split_kv(p)?;
        let value: serde_json::Value = serde_json::from_str(v).map_err(|e| format!("`{p}`: {e}"))?;
        obj.insert(k.to_string(), value);
    }
    serde_json::from_value(serde_json::Value::Object(obj)).map_err(|e| e.to_string())
}

fn verify(campaign: Campaign) -> ExitCode {
    let result = run_campaign(&campaign, |r| println!("{}", r.to_json()));
    match result {
        Ok(res) => {
            for e in &res.errors {
                eprintln!("error: {e}");
            }
            ExitCode::from(res.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn eval_cmd(expr: &str, binds: &[String], nome: &str) -> ExitCode {
    let p = match parse_value(nome, ThetaContext::trivial()) {
        Ok(Value::Scalar(z)) => z,
        Ok(_) => return usage("the nome must be a scalar"),
        Err(e) => return usage(format!("nome: {e}")),
    };
    let ctx = if p == Complex64::new(0.0, 0.0) {
        ThetaContext::trivial()
    } else {
        match ThetaContext::new(p) {
            Ok(c) => c,
            Err(e) => return usage(e),
        }
    };
    let mut env = Env::new();
    for b in binds {
        let (k, v) = match split_kv(b) {
            Ok(kv) => kv,
            Err(e) => return usage(e),
        };
        match parse_value(v, ctx) {
            Ok(val) => env.bind(k, val),
            Err(e) => return usage(format!("binding `{k}`: {e}")),
        }
    }
    let ast = match parse(expr) {
        Ok(a) => a,
        Err(e) => return usage(e),
    };
    match eval(&ast, &env, ctx) {
        Ok(z) => {
            println!("{}", format_complex(z));
            ExitCode::SUCCESS
        }
        Err(e @ EvalError::Num(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => usage(e),
    }
}

fn list() -> ExitCode {
    for i in registry::list() {
        let modes: Vec<&str> = i.modes.iter().map(|m| m.as_str()).collect();
        let defaults = serde_json::to_string(&i.defaults).expect("params serialize");
        println!("{:<16} {:<14} {:<24} {}", i.id, modes.join(","), defaults, i.summary);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.cmd {
        Cmd::Verify {
            config: Some(path),
            ..
        } => match std::fs::read_to_string(&path) {
            Ok(text) => match parse_campaign(&text) {
                Ok(c) => verify(c),
                Err(e) => usage(e),
            },
            Err(e) => usage(format!("{}: {e}", path.display())),
        },
        Cmd::Verify {
            id,
            trials,
            seed,
            tol,
            mode,
            params,
            ..
        } => {
            let params = match params_from(&params) {
                Ok(p) => p,
                Err(e) => return usage(e),
            };
            let mode = mode.map(|m| match m {
                ModeArg::Numeric => ModeChoice::Numeric,
                ModeArg::Exact => ModeChoice::Exact,
                ModeArg::Both => ModeChoice::Both,
            });
            let entry = Entry {
                id: id.expect("clap requires --id without --config"),
                params,
                seed,
                trials,
                tol,
                mode,
            };
            verify(Campaign {
                identities: vec![entry],
                ..Campaign::default()
            })
        }
        Cmd::Eval { expr, binds, nome } => eval_cmd(&expr, &binds, &nome),
        Cmd::ListIdentities => list(),
    }
}
