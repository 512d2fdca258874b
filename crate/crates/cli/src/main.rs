use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use szne_core::circuit::{decompose_to_basis, Circuit, FoldMode, FoldSpec};
use szne_core::harness::{
    collect_raw, expectations_csv, payload_from_raw, run_pipeline, sweep_from_raw, table_report,
    ExperimentConfig, Lab, MemorySource, QramConfig, RunPayload, Timing,
};
use szne_core::mitigate::{gaussian_estimator, mitigate, Algorithm, NoiseScaledResults};
use szne_core::qram::{build_qram_with, AddressPrep, QramLayout};
use szne_core::sim::{exact_noisy_distribution, sample_shots, DistributionMeta, NoiseModel};
use szne_core::tomo::tomography_circuits;
use szne_core::{Error, Result};

#[derive(Parser)]
#[command(name = "szne", version, about = "Zero-noise extrapolation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a bucket-brigade QRAM circuit as JSON.
    BuildQram(BuildQram),
    /// Emit the 3^m tomography circuits for a circuit.
    TomoCircuits(TomoCircuits),
    /// Sample one circuit under the noise model.
    Simulate(Simulate),
    /// Mitigate stored noise-scaled results.
    Mitigate(MitigateCmd),
    /// Run the full pipeline and write a run record.
    Experiment(Experiment),
    /// Sweep the estimator standard deviation.
    Sweep(Sweep),
    /// Summarize run records produced on identical data.
    Report(Report),
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildQram {
    /// Fixture name (classical2, quantum2, table1) or a JSON file of rows.
    #[arg(long, default_value = "classical2")]
    memory: String,
    /// Rescale memory rows to unit norm.
    #[arg(long)]
    normalize: bool,
    /// Skip reversing the routing after the transfer.
    #[arg(long)]
    no_uncompute: bool,
    /// Query one basis address instead of the uniform superposition.
    #[arg(long)]
    address: Option<usize>,
    /// Rewrite into the {X, SX, SXdg, RZ, CX} basis.
    #[arg(long)]
    decompose: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct TomoCircuits {
    #[arg(long)]
    circuit: PathBuf,
    /// Comma-separated tomography qubits.
    #[arg(long, value_delimiter = ',', required = true)]
    qubits: Vec<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct NoiseArgs {
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long)]
    readout: Option<f64>,
    /// Disable all noise.
    #[arg(long)]
    noiseless: bool,
}

impl NoiseArgs {
    fn model(&self) -> NoiseModel {
        let mut m = if self.noiseless {
            NoiseModel::noiseless()
        } else {
            NoiseModel::default()
        };
        if let Some(p) = self.p1 {
            m.p1 = p;
        }
        if let Some(p) = self.p2 {
            m.p2 = p;
        }
        if let Some(p) = self.readout {
            m.readout_flip = p;
        }
        m
    }
}

#[derive(Args)]
struct Simulate {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    measured: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    #[arg(long, default_value_t = 100)]
    trajectories: u64,
    #[arg(long, default_value_t = 1234)]
    seed: u64,
    /// Exact channel simulation instead of sampling.
    #[arg(long)]
    exact: bool,
    /// Locally fold the (decomposed) circuit to this factor first.
    #[arg(long)]
    lambda: Option<f64>,
    #[command(flatten)]
    noise: NoiseArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct MitigateCmd {
    /// Noise-scaled results JSON.
    #[arg(long)]
    results: PathBuf,
    #[arg(long, default_value = "filter")]
    algorithm: String,
    /// Noiseless per-setting probabilities (JSON array of arrays) for sZNE.
    #[arg(long)]
    ideal: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1234)]
    seed: u64,
    /// Also write per-outcome labels as CSV.
    #[arg(long)]
    labels_csv: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Overrides {
    /// Experiment config (JSON); defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    trajectories: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    #[arg(long)]
    algorithm: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Exact distributions (shots = 0).
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    fold_basis_change: Option<bool>,
    /// Memory fixture name.
    #[arg(long)]
    memory: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    budget: Option<f64>,
}

impl Overrides {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_json(&read(p)?)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(s) = self.shots {
            cfg.shots = s;
        }
        if let Some(k) = self.trajectories {
            cfg.trajectories = k;
        }
        if let Some(l) = &self.lambdas {
            cfg.lambdas = l.clone();
        }
        if let Some(a) = &self.algorithm {
            cfg.algorithm = a.parse()?;
        }
        if let Some(s) = self.sigma {
            cfg.sigma = s;
        }
        if self.exact {
            cfg.shots = 0;
        }
        if let Some(b) = self.fold_basis_change {
            cfg.fold_basis_change = b;
        }
        if let Some(m) = &self.memory {
            cfg.qram.memory = MemorySource::Fixture(m.clone());
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(b) = self.budget {
            cfg.budget = b;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct Experiment {
    #[command(flatten)]
    overrides: Overrides,
    /// Write wall-clock timing here; the record itself stays deterministic.
    #[arg(long)]
    timing: Option<PathBuf>,
    /// Extra algorithms to evaluate on the same data, one record each.
    #[arg(long, value_delimiter = ',')]
    compare: Vec<String>,
    /// Directory for the comparison records.
    #[arg(long)]
    compare_dir: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Sweep {
    #[command(flatten)]
    overrides: Overrides,
    /// Sweep sZNE′ instead of sZNE.
    #[arg(long)]
    prime: bool,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,
    /// Write the table as JSON instead of CSV.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Report {
    /// Run records from `experiment`.
    #[arg(required = true)]
    records: Vec<PathBuf>,
    /// Per-setting expectation comparison CSV.
    #[arg(long)]
    expectations: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    output: Output,
}

fn read(p: &Path) -> Result<String> {
    Ok(fs::read_to_string(p)?)
}

fn emit(out: &Output, text: &str) -> Result<()> {
    match &out.out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn build_qram_cmd(a: &BuildQram) -> Result<()> {
    let source = if Path::new(&a.memory).is_file() {
        MemorySource::Rows(serde_json::from_str(&read(Path::new(&a.memory))?)?)
    } else {
        MemorySource::Fixture(a.memory.clone())
    };
    let qram = QramConfig {
        memory: source,
        normalize: a.normalize,
        uncompute: !a.no_uncompute,
    };
    let mem = qram.memory_spec()?;
    let prep = a.address.map_or(AddressPrep::Superposition, AddressPrep::Basis);
    let mut c = build_qram_with(&mem, qram.uncompute, prep)?;
    if a.decompose {
        c = decompose_to_basis(&c)?;
    }
    let layout = QramLayout::new(mem.address_bits(), qram.uncompute);
    eprintln!(
        "{} qubits, {} gates, tomography qubits {:?}",
        c.num_qubits(),
        c.len(),
        layout.tomography_qubits()
    );
    emit(&a.output, &with_newline(c.to_json()?))
}

#[derive(Serialize)]
struct TomoEntry {
    setting: String,
    index: usize,
    measured: Vec<usize>,
    circuit: serde_json::Value,
}

fn tomo_cmd(a: &TomoCircuits) -> Result<()> {
    let base = Circuit::from_json(&read(&a.circuit)?)?;
    let entries = tomography_circuits(&base, &a.qubits)?
        .into_iter()
        .map(|t| {
            Ok(TomoEntry {
                setting: t.setting.label(),
                index: t.setting.index(),
                measured: t.measured,
                circuit: serde_json::from_str(&t.circuit.to_json()?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    emit(&a.output, &with_newline(serde_json::to_string_pretty(&entries)?))
}

fn simulate_cmd(a: &Simulate) -> Result<()> {
    let mut c = Circuit::from_json(&read(&a.circuit)?)?;
    let noise = a.noise.model();
    if let Some(lambda) = a.lambda {
        c = FoldSpec::new(lambda, FoldMode::Local, a.seed)?.apply(&decompose_to_basis(&c)?)?;
    }
    let dist = if a.exact {
        exact_noisy_distribution(&c, &noise, &a.measured)?
    } else {
        sample_shots(&c, &noise, &a.measured, a.shots, a.trajectories, a.seed)?
    };
    let rec = dist.to_record(DistributionMeta {
        setting: None,
        lambda: a.lambda,
        seed: (!a.exact).then_some(a.seed),
    });
    emit(&a.output, &with_newline(serde_json::to_string_pretty(&rec)?))
}

fn mitigate_cmd(a: &MitigateCmd) -> Result<()> {
    let res = NoiseScaledResults::from_json(&read(&a.results)?)?;
    let algorithm: Algorithm = a.algorithm.parse()?;
    let est = match (&a.ideal, algorithm.needs_estimator()) {
        (Some(p), true) => {
            let ideal: Vec<Vec<f64>> = serde_json::from_str(&read(p)?)?;
            Some(gaussian_estimator(&ideal, a.sigma, a.seed)?)
        }
        (None, true) => {
            return Err(Error::InvalidArgument(format!("{algorithm} needs --ideal")));
        }
        _ => None,
    };
    let report = mitigate(&res, algorithm, est.as_ref())?;
    if let Some(p) = &a.labels_csv {
        fs::write(p, report.labels_csv()?)?;
    }
    emit(&a.output, &with_newline(report.to_json()))
}

fn experiment_cmd(a: &Experiment) -> Result<()> {
    let cfg = a.overrides.config()?;
    let write_timing = |t: &Timing| -> Result<()> {
        if let Some(p) = &a.timing {
            fs::write(p, with_newline(serde_json::to_string_pretty(t)?))?;
        }
        Ok(())
    };
    if a.compare.is_empty() {
        let rec = run_pipeline(&cfg)?;
        write_timing(&rec.timing)?;
        return emit(&a.output, &with_newline(rec.payload.to_json()));
    }
    let started = Instant::now();
    let started_unix_ms = unix_ms();
    let lab = Lab::new();
    let raw = collect_raw(&cfg, &lab)?;
    let main = payload_from_raw(&raw, &cfg, cfg.algorithm, lab.noisy_calls())?;
    let dir = a.compare_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    for name in &a.compare {
        let alg: Algorithm = name.parse()?;
        let p = payload_from_raw(&raw, &cfg, alg, lab.noisy_calls())?;
        let file = dir.join(format!("run_{}.json", name.replace(':', "_")));
        fs::write(&file, with_newline(p.to_json()))?;
        eprintln!("{alg}: fidelity {:.6} -> {}", p.fidelity_target.fidelity, file.display());
    }
    write_timing(&Timing {
        started_unix_ms,
        finished_unix_ms: unix_ms(),
        wall_clock_s: started.elapsed().as_secs_f64(),
    })?;
    emit(&a.output, &with_newline(main.to_json()))
}

fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

fn sweep_cmd(a: &Sweep) -> Result<()> {
    let mut cfg = a.overrides.config()?;
    if a.prime {
        cfg.sigma_sweep.prime = true;
    }
    if let Some(r) = a.repetitions {
        cfg.sigma_sweep.repetitions = r;
    }
    if let Some(s) = &a.sigmas {
        cfg.sigma_sweep.sigmas = s.clone();
    }
    cfg.validate()?;
    let lab = Lab::new();
    let raw = collect_raw(&cfg, &lab)?;
    let table = sweep_from_raw(&raw, &cfg, lab.noisy_calls())?;
    if let Some(s) = table.crossing {
        eprintln!("crossing with the unmitigated baseline near sigma = {s:.4}");
    }
    let text = if a.json {
        with_newline(table.to_json())
    } else {
        table.to_csv()?
    };
    emit(&a.output, &text)
}

fn report_cmd(a: &Report) -> Result<()> {
    let records = a
        .records
        .iter()
        .map(|p| RunPayload::from_json(&read(p)?))
        .collect::<Result<Vec<_>>>()?;
    let summary = table_report(&records)?;
    if let Some(p) = &a.expectations {
        fs::write(p, expectations_csv(&records)?)?;
    }
    if !summary.any_disagreement {
        eprintln!("fidelity and expectation-fraction improvements agree for every record");
    }
    let text = if a.json {
        with_newline(summary.to_json())
    } else {
        summary.to_csv()?
    };
    emit(&a.output, &text)
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::BuildQram(a) => build_qram_cmd(a),
        Command::TomoCircuits(a) => tomo_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Mitigate(a) => mitigate_cmd(a),
        Command::Experiment(a) => experiment_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Report(a) => report_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = serde_json::json!({
                "error": { "category": e.category(), "message": e.to_string() }
            });
            eprintln!("{body}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
