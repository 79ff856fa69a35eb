use clap::{Args, Parser, Subcommand};
use harness::analysis::{average, cv_constancy, max_gap_by_lambda, rnn_fnn_differences, windows_by_r, Averaged};
use harness::{ExperimentConfig, HarnessError, Profile, ResultSink, SweepResult};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "synfire", version, about = "Synfire-chain theory and LIF simulation sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Layer-wise CV of a chain and the steady CV over a (W, r) grid.
    CvEvolution(Common),
    /// Packet and background correlation at the last layer against r.
    RSweep(Common),
    /// Attractor labels against packet size; annihilation and invasion sizes.
    WSweep(Common),
    /// Largest synfire gap over W against linking density.
    LambdaSweep(Common),
    /// Matched recurrent and feedforward networks.
    RnnVsFnn(Common),
    /// Theory-only r, W and lambda sweeps.
    Meanfield(Common),
    /// Analytic synfire region at the configured point.
    Region(Common),
    /// One chain run, written as a spike raster.
    Simulate(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// TOML config; unknown keys are rejected.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides run.output_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "desk")]
    profile: String,
    #[arg(long)]
    workers: Option<usize>,
    /// First seed; the configured number of seeds counts up from it.
    #[arg(long)]
    seed: Option<u64>,
}

fn load(c: &Common) -> harness::Result<ExperimentConfig> {
    let profile: Profile = c.profile.parse()?;
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::load(p, profile)?,
        None => ExperimentConfig::for_profile(profile),
    };
    if let Some(o) = &c.out {
        cfg.run.output_dir = o.clone();
    }
    if let Some(w) = c.workers {
        cfg.run.workers = w;
    }
    if let Some(s) = c.seed {
        let n = cfg.run.seeds.len() as u64;
        cfg.run.seeds = (s..s + n).collect();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn opt(v: Option<usize>) -> String {
    v.map_or("-".into(), |x| x.to_string())
}

fn print_curve(title: &str, rows: &[Averaged]) {
    println!("{title}");
    println!("  {:>7} {:>5} {:>7} {:>8} {:>8} {:>8} {:>9}  label", "r", "W", "lambda", "rho_in", "rho_out", "gap", "mu_out");
    for a in rows {
        println!(
            "  {:>7.3} {:>5} {:>7.3} {:>8.4} {:>8.4} {:>8.4} {:>9.3}  {}",
            a.r,
            a.w,
            a.lambda,
            a.rho_in,
            a.rho_out,
            a.gap(),
            a.mu_out_hz,
            a.label
        );
    }
}

fn summarize_windows(cfg: &ExperimentConfig, res: &SweepResult, tag: &str, reference: &str, notes: &mut Vec<String>) {
    let (e, d) = (cfg.attractor.epsilon, cfg.attractor.delta);
    for wdw in windows_by_r(&average(&res.records, tag, None, e, d)) {
        let line = format!("{tag}: r = {}: W_a = {}, W_i = {} ({reference})", wdw.r, opt(wdw.w_a), opt(wdw.w_i));
        println!("{line}");
        notes.push(line);
    }
}

fn run(cmd: Command) -> harness::Result<()> {
    let (name, common) = match &cmd {
        Command::CvEvolution(c) => ("cv_evolution", c),
        Command::RSweep(c) => ("r_sweep", c),
        Command::WSweep(c) => ("w_sweep", c),
        Command::LambdaSweep(c) => ("lambda_sweep", c),
        Command::RnnVsFnn(c) => ("rnn_vs_fnn", c),
        Command::Meanfield(c) => ("meanfield", c),
        Command::Region(c) => ("region", c),
        Command::Simulate(c) => ("simulate", c),
    };
    let cfg = load(common)?;
    let dir = cfg.run.output_dir.clone();
    let (e, d) = (cfg.attractor.epsilon, cfg.attractor.delta);
    let mut notes = Vec::new();
    if let Command::Region(_) = cmd {
        let rep = harness::run_region_solve(&cfg)?;
        let text = rep.render();
        print!("{text}");
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("region.txt"), &text)?;
        notes.extend(text.lines().map(str::to_string));
        harness::write_manifest(&dir, name, &cfg, &notes)?;
        return Ok(());
    }
    if let Command::Simulate(_) = cmd {
        std::fs::create_dir_all(&dir)?;
        let raster = dir.join("raster.csv");
        let res = harness::run_simulate(&cfg, &raster)?;
        let sink = ResultSink::open(&dir, name, &cfg)?;
        sink.write_point(&res.records)?;
        print_curve("simulate (last layer)", &average(&res.records, "simulate", None, e, d));
        println!("raster: {}", raster.display());
        harness::write_manifest(&dir, name, &cfg, &notes)?;
        return Ok(());
    }
    let sink = ResultSink::open(&dir, name, &cfg)?;
    let res = match cmd {
        Command::CvEvolution(_) => harness::run_cv_evolution(&cfg, Some(&sink))?,
        Command::RSweep(_) => harness::run_r_sweep(&cfg, Some(&sink))?,
        Command::WSweep(_) => harness::run_w_sweep(&cfg, Some(&sink))?,
        Command::LambdaSweep(_) => harness::run_lambda_sweep(&cfg, Some(&sink))?,
        Command::RnnVsFnn(_) => harness::run_rnn_vs_fnn(&cfg, Some(&sink))?,
        Command::Meanfield(_) => harness::run_meanfield_only(&cfg, Some(&sink))?,
        Command::Region(_) | Command::Simulate(_) => unreachable!(),
    };
    match name {
        "cv_evolution" => {
            for seed_detail in res.details.iter().filter(|x| x.experiment == "cv_evolution") {
                let cvs: Vec<String> = seed_detail.layers.iter().map(|l| format!("{:.3}", l.stats.cv_mean)).collect();
                println!("seed {}: CV by layer {}", seed_detail.seed, cvs.join(" "));
                if let Some((chi2, df, p)) = cv_constancy(seed_detail) {
                    println!("  constant-CV test: chi2 = {chi2:.1}, df = {df}, p = {p:.3e}");
                }
            }
            print_curve("steady CV grid (cv_mean column)", &average(&res.records, "cv_grid", None, e, d));
            for a in average(&res.records, "cv_grid", None, e, d) {
                println!("  W = {:>3}, r = {:.3}: CV = {:.4}", a.w, a.r, a.cv_mean);
            }
        }
        "r_sweep" => {
            let layer = Some(cfg.network.layers);
            print_curve("theory", &average(&res.records, "r_sweep/theory", layer, e, d));
            print_curve("simulation", &average(&res.records, "r_sweep/sim", layer, e, d));
        }
        "w_sweep" => {
            summarize_windows(&cfg, &res, "w_sweep/theory", "reference W_a = 31, W_i = 40", &mut notes);
            summarize_windows(&cfg, &res, "w_sweep/sim", "reference W_a = 24, W_i = 34", &mut notes);
        }
        "lambda_sweep" | "meanfield" => {
            let tags: &[&str] = if name == "meanfield" { &["meanfield/lambda_sweep"] } else { &["lambda_sweep/theory", "lambda_sweep/sim"] };
            for tag in tags {
                println!("{tag}: lambda, max gap, argmax W, mu_out (Hz)");
                for (l, g, w, mu) in max_gap_by_lambda(&average(&res.records, tag, None, e, d)) {
                    println!("  {l:.3} {g:.4} {w} {mu:.3}");
                }
            }
            if name == "meanfield" {
                print_curve("meanfield/r_sweep", &average(&res.records, "meanfield/r_sweep", Some(cfg.network.layers), e, d));
                summarize_windows(&cfg, &res, "meanfield/w_sweep", "reference W_a = 31, W_i = 40", &mut notes);
            }
        }
        "rnn_vs_fnn" => {
            let diffs = rnn_fnn_differences(&res.records);
            for (s, di, dout) in &diffs {
                println!("seed {s}: |d rho_in| = {di:.4}, |d rho_out| = {dout:.4}");
            }
            if !diffs.is_empty() {
                let n = diffs.len() as f64;
                println!(
                    "mean: |d rho_in| = {:.4}, |d rho_out| = {:.4}",
                    diffs.iter().map(|x| x.1).sum::<f64>() / n,
                    diffs.iter().map(|x| x.2).sum::<f64>() / n
                );
            }
        }
        _ => {}
    }
    println!("results: {}", sink.path().display());
    harness::write_manifest(&dir, name, &cfg, &notes)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(HarnessError::exit_code(&e) as u8)
        }
    }
}
