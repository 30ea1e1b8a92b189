use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cavity_gate_sim::cli::{
    cmd_gate, cmd_reduce, cmd_simulate, cmd_sweep, exit_code, parse_config, RunConfig,
};
use cavity_gate_sim::SimError;

#[derive(Parser)]
#[command(name = "cavity-gate-sim", about = "Cavity-mediated conditional phase gate simulator")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the full dynamics and emit a population/phase time series
    Simulate(CommonOpts),
    /// Evaluate the reduced (adiabatic-elimination) model parameters
    Reduce(CommonOpts),
    /// Run the four logical-basis gate inputs and score the gate
    Gate(CommonOpts),
    /// Grid sweep of gate metrics over parameter axes (from the config file)
    Sweep(CommonOpts),
}

#[derive(clap::Args)]
struct CommonOpts {
    /// JSON configuration file
    #[arg(long)]
    config: Option<String>,
    /// Scenario preset: fig2 | fig3 | fig2-dissipative | fig3-dissipative
    #[arg(long)]
    preset: Option<String>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<String>,
    /// Output format: csv | json
    #[arg(long)]
    format: Option<String>,
    /// Integrator relative tolerance
    #[arg(long)]
    rtol: Option<f64>,
    /// Run length in us (simulate; defaults to the gate duration)
    #[arg(long)]
    tmax: Option<f64>,
    /// Output sample interval in us
    #[arg(long)]
    sample: Option<f64>,
    /// Initial state as '+'-separated basis labels, e.g. "a10+010"
    #[arg(long)]
    initial: Option<String>,
    /// Rabi frequency in MHz
    #[arg(long)]
    omega: Option<f64>,
    /// Laser detuning in MHz
    #[arg(long)]
    delta_l: Option<f64>,
    /// Two-photon cavity detuning in MHz
    #[arg(long)]
    delta_c: Option<f64>,
    /// Atom-cavity coupling in MHz
    #[arg(long)]
    g: Option<f64>,
    /// Atomic decay rate in MHz
    #[arg(long)]
    gamma: Option<f64>,
    /// Cavity decay rate in MHz
    #[arg(long)]
    kappa: Option<f64>,
}

impl CommonOpts {
    fn build_config(&self) -> Result<RunConfig, SimError> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| SimError::Io(format!("{path}: {e}")))?;
                parse_config(&text)?
            }
            None => RunConfig::default(),
        };
        // flags override file settings
        merge(&mut config.preset, &self.preset);
        merge(&mut config.format, &self.format);
        merge(&mut config.rel_tol, &self.rtol);
        merge(&mut config.t_final_us, &self.tmax);
        merge(&mut config.sample_interval_us, &self.sample);
        merge(&mut config.initial_state, &self.initial);
        merge(&mut config.omega, &self.omega);
        merge(&mut config.delta_l, &self.delta_l);
        merge(&mut config.delta_c, &self.delta_c);
        merge(&mut config.g, &self.g);
        merge(&mut config.gamma, &self.gamma);
        merge(&mut config.kappa, &self.kappa);
        config.params()?;
        Ok(config)
    }
}

fn merge<T: Clone>(slot: &mut Option<T>, flag: &Option<T>) {
    if flag.is_some() {
        *slot = flag.clone();
    }
}

fn run(args: &Args) -> Result<(), SimError> {
    let (opts, output) = match &args.command {
        Command::Simulate(o) => (o, cmd_simulate(&o.build_config()?)?),
        Command::Reduce(o) => (o, cmd_reduce(&o.build_config()?)?),
        Command::Gate(o) => (o, cmd_gate(&o.build_config()?)?),
        Command::Sweep(o) => (o, cmd_sweep(&o.build_config()?)?),
    };
    match &opts.out {
        Some(path) => {
            std::fs::write(path, output).map_err(|e| SimError::Io(format!("{path}: {e}")))?
        }
        None => {
            std::io::stdout()
                .write_all(output.as_bytes())
                .map_err(|e| SimError::Io(format!("stdout: {e}")))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
