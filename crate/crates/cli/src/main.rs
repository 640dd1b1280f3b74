//! Command-line driver for the immersed finite element elasticity
//! eigensolver: single-level eigenvalue runs, convergence studies, a
//! manufactured-solution check, and matrix/field exports.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ifem_core::driver::{
    convergence_study, export_field, export_matrices, run_eigen_case_keeping,
    source_convergence, write_convergence_csv, write_eigenvalues_csv, CaseConfig, LevelSummary,
};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "ifem",
    about = "Crouzeix-Raviart immersed finite elements for elasticity eigenvalue \
             problems with material interfaces on unfitted meshes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the eigenvalue problem on a single mesh level.
    Eig {
        #[command(flatten)]
        case: CaseArgs,
        /// Refinement parameter N (elements per edge direction).
        #[arg(long)]
        level: Option<usize>,
    },
    /// Run the full convergence study against the reference level.
    Converge {
        #[command(flatten)]
        case: CaseArgs,
    },
    /// Verify the discrete solution operator on a manufactured solution
    /// (no interface, mu = lambda = 1).
    SourceVerify {
        /// Comma-separated refinement parameters.
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
        levels: Vec<usize>,
    },
    /// Export the assembled operator and mass matrices in Matrix Market format.
    ExportMatrices {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Export an eigenfunction as a VTK legacy grid plus a CSV twin.
    ExportField {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        level: Option<usize>,
        /// 1-based eigenvalue index to export.
        #[arg(long, default_value_t = 1)]
        index: usize,
    },
}

#[derive(Args)]
struct CaseArgs {
    /// Path to a TOML case configuration.
    #[arg(long, conflicts_with = "example")]
    config: Option<PathBuf>,
    /// Built-in benchmark case (example1..example5, optional -swapped suffix).
    #[arg(long)]
    example: Option<String>,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CaseArgs {
    fn load(&self) -> Result<CaseConfig> {
        let mut cfg = match (&self.config, &self.example) {
            (Some(path), None) => CaseConfig::from_path(path)
                .with_context(|| format!("loading {}", path.display()))?,
            (None, Some(name)) => CaseConfig::builtin(name)?,
            (None, None) => bail!("one of --config or --example is required"),
            (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
        };
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        Ok(cfg)
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Eig { case, level } => {
            let cfg = case.load()?;
            let n = level.unwrap_or_else(|| cfg.single_level());
            let (result, _) = run_eigen_case_keeping(&cfg, n)?;
            println!(
                "N = {n} (h = {}), {} free dofs",
                result.h, result.num_free_dofs
            );
            for (i, (w, r)) in result
                .eigenvalues
                .iter()
                .zip(&result.residuals)
                .enumerate()
            {
                println!("  omega2[{}] = {:<12.6} residual {:.3e}", i + 1, w, r);
            }
            let path = cfg.output_dir.join("eigenvalues.csv");
            write_eigenvalues_csv(&path, &[LevelSummary::from(result)])?;
            println!("wrote {}", path.display());
        }
        Command::Converge { case } => {
            let cfg = case.load()?;
            let report = convergence_study(&cfg)?;
            print_convergence(&report);
            let mut all = report.levels.clone();
            all.push(report.reference.clone());
            let eig_path = cfg.output_dir.join("eigenvalues.csv");
            write_eigenvalues_csv(&eig_path, &all)?;
            let conv_path = cfg.output_dir.join("convergence.csv");
            write_convergence_csv(&conv_path, &report)?;
            println!("wrote {}", eig_path.display());
            println!("wrote {}", conv_path.display());
        }
        Command::SourceVerify { levels } => {
            let rates = source_convergence(&levels)?;
            println!("{:>6} {:>10} {:>14} {:>14}", "N", "h", "L2 error", "energy error");
            for (n, h, l2, en) in &rates.levels {
                println!("{n:>6} {h:>10.5} {l2:>14.6e} {en:>14.6e}");
            }
            println!(
                "estimated orders: L2 = {:.3}, energy = {:.3}",
                rates.l2_rate, rates.energy_rate
            );
        }
        Command::ExportMatrices { case, level } => {
            let cfg = case.load()?;
            let n = level.unwrap_or_else(|| cfg.single_level());
            let disc = ifem_core::driver::discretize(&cfg, n)?;
            let (a_path, m_path) = export_matrices(&disc.system, &cfg.output_dir)?;
            println!("wrote {}", a_path.display());
            println!("wrote {}", m_path.display());
        }
        Command::ExportField { case, level, index } => {
            let cfg = case.load()?;
            let n = level.unwrap_or_else(|| cfg.single_level());
            let (result, disc) = run_eigen_case_keeping(&cfg, n)?;
            if index == 0 || index > result.vectors.len() {
                bail!(
                    "eigenvalue index {index} out of range 1..={}",
                    result.vectors.len()
                );
            }
            let stem = format!("mode{index}_n{n}");
            let (vtk, csv) = export_field(
                &disc.mesh,
                &disc.bases,
                &disc.system.dofmap,
                &result.vectors[index - 1],
                &cfg.output_dir,
                &stem,
            )?;
            println!(
                "omega2[{index}] = {:.6} on N = {n}",
                result.eigenvalues[index - 1]
            );
            println!("wrote {}", vtk.display());
            println!("wrote {}", csv.display());
        }
    }
    Ok(())
}

fn print_convergence(report: &ifem_core::driver::ConvergenceReport) {
    println!(
        "reference: N = {} (h = {})",
        report.reference.n, report.reference.h
    );
    for (i, w) in report.reference.eigenvalues.iter().enumerate() {
        println!("  omega2_ref[{}] = {:.6}", i + 1, w);
    }
    for (l, lvl) in report.levels.iter().enumerate() {
        println!("N = {} (h = {}):", lvl.n, lvl.h);
        for i in 0..lvl.eigenvalues.len() {
            let order = match report.orders[l][i] {
                Some(o) => format!("{o:.2}"),
                None => "  - ".into(),
            };
            let flag = if report.ambiguous[l][i] { " [clustered]" } else { "" };
            println!(
                "  omega2[{}] = {:<12.6} error {:.4e} (ord {order}){flag}",
                i + 1,
                lvl.eigenvalues[i],
                report.errors[l][i],
            );
        }
    }
}
