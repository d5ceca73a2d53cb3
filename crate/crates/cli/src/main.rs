//! `spin7`: identity verification suites, decomposition of user-supplied
//! tensors, flow experiment runner, and report emission.
//!
//! Exit codes: 0 success, 1 verification failure, 2 config error,
//! 3 runtime blow-up.

mod config;
mod tensor_io;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use spin7_core::algebra::standard_phi;
use spin7_core::error::CoreError;
use spin7_core::flow::{
    fit_exponential_decay, run_flow, singular_detector, write_series_csv, StopReason,
};
use spin7_core::lattice::{seeded_field_generator, write_snapshot, StencilOrder, StructureField};
use spin7_core::spaces::{decompose_four_form, decompose_three_form, project_two_form, TwoFormPart};
use spin7_core::verify::{run_catalogue, CatalogueOptions};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use config::ExperimentConfig;
use tensor_io::{read_tensor, write_tensor, Tensor, TensorKind};

#[derive(Parser)]
#[command(name = "spin7", version, about = "Spin(7) structures, torsion, and the harmonic flow on flat periodic lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pointwise identity catalogue and print a pass/fail table
    Verify {
        /// residual threshold for the identity checks
        #[arg(long, default_value_t = 1e-11)]
        threshold: f64,
        /// seed for the random pullbacks and probe tensors
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// number of random SO(8) pullbacks exercised
        #[arg(long, default_value_t = 20)]
        pullbacks: usize,
    },
    /// Decompose a tensor file into its irreducible components
    Decompose {
        /// input tensor file (see the tensor interchange format)
        input: PathBuf,
        /// expected kind; must match the file header when given
        #[arg(long)]
        kind: Option<String>,
        /// output directory for component files and the summary
        #[arg(long, default_value = "decomposed")]
        out: PathBuf,
        /// re-sum residual threshold
        #[arg(long, default_value_t = 1e-12)]
        threshold: f64,
    },
    /// Run a flow experiment from a TOML config
    Flow {
        /// experiment configuration file
        #[arg(long)]
        config: Option<PathBuf>,
        /// print a ready-to-edit example configuration and exit
        #[arg(long)]
        example_config: bool,
        /// output directory (overrides nothing else in the config)
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// override the generator seed
        #[arg(long)]
        seed: Option<u64>,
        /// override the stencil order (2 or 4)
        #[arg(long)]
        stencil: Option<u8>,
    },
    /// Summarize a completed flow run directory
    Report {
        /// run directory holding the summary and series files
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { threshold, seed, pullbacks } => cmd_verify(threshold, seed, pullbacks),
        Command::Decompose { input, kind, out, threshold } => {
            cmd_decompose(&input, kind.as_deref(), &out, threshold)
        }
        Command::Flow { config, example_config, out, seed, stencil } => {
            cmd_flow(config.as_deref(), example_config, &out, seed, stencil)
        }
        Command::Report { out } => cmd_report(&out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<CoreError>() {
                Some(CoreError::Blowup { .. }) => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn cmd_verify(threshold: f64, seed: u64, pullbacks: usize) -> Result<u8> {
    let phi = standard_phi();
    let results =
        run_catalogue(&phi, &CatalogueOptions { pullbacks, seed, threshold });
    println!("{:<26} {:>12} {:>10}  {:<6} description", "check", "residual", "threshold", "status");
    let mut failures = 0;
    for r in &results {
        let status = if r.pass() { "pass" } else { "FAIL" };
        if !r.pass() {
            failures += 1;
        }
        println!(
            "{:<26} {:>12.3e} {:>10.1e}  {:<6} {}",
            r.id, r.residual, r.threshold, status, r.description
        );
    }
    if failures == 0 {
        println!("all {} checks passed", results.len());
        Ok(0)
    } else {
        println!("{failures} of {} checks FAILED", results.len());
        Ok(1)
    }
}

fn cmd_decompose(input: &Path, kind: Option<&str>, out: &Path, threshold: f64) -> Result<u8> {
    let tensor = read_tensor(input)?;
    if let Some(k) = kind {
        let expected = TensorKind::parse(k)?;
        if expected != tensor.kind() {
            bail!(
                "kind mismatch: flag says {}, file header says {}",
                expected.label(),
                tensor.kind().label()
            );
        }
    }
    std::fs::create_dir_all(out)?;
    let phi = standard_phi();
    let mut summary = String::new();
    summary.push_str(&format!("kind = \"{}\"\n", tensor.kind().label()));
    let resum;
    match &tensor {
        Tensor::Two(beta) => {
            let b7 = project_two_form(beta, &phi, TwoFormPart::Seven);
            let b21 = project_two_form(beta, &phi, TwoFormPart::TwentyOne);
            resum = (b7.matrix() + b21.matrix() - beta.matrix()).abs().max();
            let total = beta.norm_sq();
            for (name, part) in [("part7", &b7), ("part21", &b21)] {
                write_tensor(&out.join(format!("{name}.tsr")), &Tensor::Two(*part))?;
                summary.push_str(&format!(
                    "[{name}]\nnorm_sq = {}\nfraction = {}\n",
                    part.norm_sq(),
                    part.norm_sq() / total.max(f64::MIN_POSITIVE)
                ));
            }
        }
        Tensor::Three(gamma) => {
            let (x, g48) = decompose_three_form(gamma, &phi);
            let g8 = spin7_core::spaces::vector_to_three_form(&x, &phi);
            resum = gamma.sub(&g8).sub(&g48).max_abs();
            let total = gamma.norm_sq();
            write_tensor(&out.join("part8.tsr"), &Tensor::Three(g8.clone()))?;
            write_tensor(&out.join("part48.tsr"), &Tensor::Three(g48.clone()))?;
            summary.push_str(&format!(
                "vector_part = [{}]\n",
                (0..8).map(|i| x[i].to_string()).collect::<Vec<_>>().join(", ")
            ));
            for (name, part) in [("part8", &g8), ("part48", &g48)] {
                summary.push_str(&format!(
                    "[{name}]\nnorm_sq = {}\nfraction = {}\n",
                    part.norm_sq(),
                    part.norm_sq() / total.max(f64::MIN_POSITIVE)
                ));
            }
        }
        Tensor::Four(sigma) => {
            let split = decompose_four_form(sigma, &phi);
            resum = split.sum().sub(sigma).max_abs();
            let total = sigma.norm_sq();
            for (name, part) in [
                ("part1", &split.part1),
                ("part7", &split.part7),
                ("part27", &split.part27),
                ("part35", &split.part35),
            ] {
                write_tensor(&out.join(format!("{name}.tsr")), &Tensor::Four(part.clone()))?;
                summary.push_str(&format!(
                    "[{name}]\nnorm_sq = {}\nfraction = {}\n",
                    part.norm_sq(),
                    part.norm_sq() / total.max(f64::MIN_POSITIVE)
                ));
            }
        }
    }
    summary.push_str(&format!("resum_residual = {resum}\n"));
    std::fs::write(out.join("summary.toml"), &summary)?;
    println!("{summary}");
    if resum > threshold {
        println!("re-sum residual {resum:e} exceeds threshold {threshold:e}");
        return Ok(1);
    }
    Ok(0)
}

fn cmd_flow(
    config_path: Option<&Path>,
    example: bool,
    out: &Path,
    seed: Option<u64>,
    stencil: Option<u8>,
) -> Result<u8> {
    if example {
        print!("{}", config::example_config().to_toml()?);
        return Ok(0);
    }
    let Some(config_path) = config_path else {
        bail!("either --config PATH or --example-config is required");
    };
    let mut cfg = ExperimentConfig::from_path(config_path)?;
    if let Some(s) = seed {
        cfg.generator.seed = s;
    }
    match stencil {
        Some(2) => cfg.flow.stencil = StencilOrder::Two,
        Some(4) => cfg.flow.stencil = StencilOrder::Four,
        Some(other) => bail!("--stencil must be 2 or 4, got {other}"),
        None => {}
    }
    let grid = cfg.grid.build()?;
    cfg.flow.validate(&grid)?;

    std::fs::create_dir_all(out)?;
    let fiber = seeded_field_generator(&grid, &cfg.generator)?;
    write_snapshot(&out.join("initial.s7f"), &fiber, cfg.generator.seed)?;
    let field = StructureField::from_fiber(&fiber);
    let (record, state) = run_flow(field, &cfg.flow, &cfg.monitors, Some(out))?;

    write_series_csv(&out.join(&cfg.output.series_csv), &record)?;

    let t_end = *record.times.last().unwrap();
    let half = record.times.len() / 2;
    let (rate, r2) = fit_exponential_decay(&record.times[half..], &record.div_l2[half..]);
    let window = record.doubling_window();
    let mask_size = if cfg.detector.enabled && record.energy_snapshots.len() > 1 {
        let mask = singular_detector(
            &record.energy_snapshots,
            &grid,
            t_end,
            cfg.detector.eps,
            cfg.detector.rho_bar,
            cfg.detector.ladder,
            cfg.monitors.kernel_images,
        )?;
        mask.iter().filter(|m| **m).count()
    } else {
        0
    };

    let aborted = matches!(record.stop, StopReason::Blowup { .. });
    let mut summary = String::new();
    summary.push_str(&format!("steps_completed = {}\n", record.times.len() - 1));
    summary.push_str(&format!("t_end = {t_end}\n"));
    summary.push_str(&format!("energy_initial = {}\n", record.energies[0]));
    summary.push_str(&format!("energy_final = {}\n", record.energies.last().unwrap()));
    summary.push_str(&format!(
        "sup_torsion_max = {}\n",
        record.sup_torsions.iter().fold(0.0f64, |m, v| m.max(*v))
    ));
    summary.push_str(&format!("sup_torsion_final = {}\n", record.sup_torsions.last().unwrap()));
    summary.push_str(&format!("div_l2_decay_rate = {rate}\n"));
    summary.push_str(&format!("div_l2_decay_r2 = {r2}\n"));
    summary.push_str(&format!("doubling_window = {window}\n"));
    summary.push_str(&format!("singular_mask_size = {mask_size}\n"));
    summary.push_str(&format!(
        "max_projection_residual = {}\n",
        record.projection_residuals.iter().fold(0.0f64, |m, v| m.max(*v))
    ));
    if let Some(entropy) = record.entropy {
        summary.push_str(&format!("entropy_lambda = {entropy}\n"));
    }
    match record.stop {
        StopReason::Completed => summary.push_str("stop = \"completed\"\n"),
        StopReason::EnergyPlateau { at_step } => {
            summary.push_str(&format!("stop = \"energy-plateau\"\nstopped_at_step = {at_step}\n"))
        }
        StopReason::Blowup { at_step, sup_torsion } => summary.push_str(&format!(
            "stop = \"blowup\"\nstopped_at_step = {at_step}\nblowup_sup_torsion = {sup_torsion}\n"
        )),
    }
    std::fs::write(out.join(&cfg.output.summary), &summary)?;
    // keep a copy of the effective config next to the results
    std::fs::write(out.join("config.toml"), cfg.to_toml()?)?;
    print!("{summary}");

    // final state checkpoint
    let final_fiber = state.field.to_fiber()?;
    write_snapshot(&out.join("final.s7f"), &final_fiber, cfg.generator.seed)?;

    if aborted {
        eprintln!(
            "flow aborted: sup|T| exceeded the blow-up threshold; diagnostics in {}",
            out.display()
        );
        return Ok(3);
    }
    Ok(0)
}

fn cmd_report(out: &Path) -> Result<u8> {
    let summary_path = out.join("summary.toml");
    let text = std::fs::read_to_string(&summary_path)
        .with_context(|| format!("reading {}", summary_path.display()))?;
    let parsed: toml::Table = text.parse().context("parsing summary")?;
    println!("flow run report ({}):", out.display());
    let get = |k: &str| parsed.get(k).map(|v| v.to_string()).unwrap_or_else(|| "?".into());
    println!("  steps completed   {}", get("steps_completed"));
    println!("  final time        {}", get("t_end"));
    println!("  energy            {} -> {}", get("energy_initial"), get("energy_final"));
    println!("  sup|T| max/final  {} / {}", get("sup_torsion_max"), get("sup_torsion_final"));
    println!("  divT^2 decay      rate {} (R^2 {})", get("div_l2_decay_rate"), get("div_l2_decay_r2"));
    println!("  doubling window   {}", get("doubling_window"));
    println!("  singular mask     {}", get("singular_mask_size"));
    if let Some(e) = parsed.get("entropy_lambda") {
        println!("  entropy lambda    {e}");
    }
    println!("  stop              {}", get("stop"));
    let series = out.join("config.toml");
    if series.exists() {
        println!("  config            {}", series.display());
    }
    Ok(0)
}
