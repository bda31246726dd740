use clap::Parser;

use ssdnn_cli::commands::{
    cmd_bench, cmd_bias, cmd_ci, cmd_fit, cmd_pi, cmd_predict, cmd_simulate, BenchArgs, BiasArgs,
    CiArgs, FitArgs, PiArgs, PredictArgs, SimulateArgs,
};

/// Subagging estimation for feed-forward ReLU regression networks:
/// dataset generation, ensemble fitting, confidence/prediction intervals,
/// bias-order estimation, and baseline benchmarking.
#[derive(Parser)]
#[command(name = "ssdnn", version, arg_required_else_help = true)]
enum Cli {
    Simulate(SimulateArgs),
    Fit(FitArgs),
    Predict(PredictArgs),
    Ci(CiArgs),
    Pi(PiArgs),
    Bias(BiasArgs),
    Bench(BenchArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not usage errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match &cli {
        Cli::Simulate(args) => cmd_simulate(args),
        Cli::Fit(args) => cmd_fit(args),
        Cli::Predict(args) => cmd_predict(args),
        Cli::Ci(args) => cmd_ci(args),
        Cli::Pi(args) => cmd_pi(args),
        Cli::Bias(args) => cmd_bias(args),
        Cli::Bench(args) => cmd_bench(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
