use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use caustica::deformations::{chi_exponent, classify, spec_symmetry_flags, DeformationDoc, DeformationSpec};
use caustica::oracle::{
    residual_csv, residual_function, residual_sweep, scaling_fit_samples, sweep_csv, uniform_grid, ScalingFit,
    SupportEvaluator,
};
use caustica::persistence::{analyze_orders, correct_orders, PersistenceReport};
use caustica::{RotationNumber, TrigPoly};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;

/// Validated inputs shared by all subcommands.
pub struct Job {
    pub config: RunConfig,
    pub spec: DeformationSpec,
    pub rotations: Vec<RotationNumber>,
    pub out: PathBuf,
}

impl Job {
    pub fn new(config: RunConfig, out: PathBuf) -> Result<Self, CliError> {
        config.check_max_order()?;
        let rotations = config.rotations()?;
        let spec = config.deformation.clone().into_spec().map_err(|e| CliError::from_lib(e, "deformation"))?;
        fs::create_dir_all(&out).map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;
        Ok(Self { config, spec, rotations, out })
    }

    fn table(&self, orders: usize) -> Vec<TrigPoly> {
        self.spec.h_orders(orders)
    }

    fn chi(&self, rot: &RotationNumber) -> Option<usize> {
        let n = self.spec.degree();
        if n == 0 {
            return None;
        }
        let flags = spec_symmetry_flags(&self.spec, self.config.max_order, &self.config.tolerances);
        chi_exponent(classify(flags, Some((n, rot.q()))), n, rot.q()).ok()
    }

    fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
    }
}

fn file_stem(kind: &str, rot: &RotationNumber) -> String {
    format!("{kind}_{}_{}", rot.p(), rot.q())
}

fn order_cell(order: Option<usize>) -> String {
    order.map(|k| k.to_string()).unwrap_or_else(|| "none".into())
}

pub fn analyze(job: &Job) -> Result<(), CliError> {
    let max_order = job.config.max_order;
    let table = job.table(max_order);
    let tol = job.config.tolerances;
    let reports: Vec<Result<PersistenceReport, CliError>> = job
        .rotations
        .par_iter()
        .map(|&rot| {
            analyze_orders(table.clone(), rot, max_order, tol)
                .map(|(report, _)| report)
                .map_err(|e| CliError::from_lib(e, &rot.to_string()))
        })
        .collect();

    let mut csv = String::from("q,p,chi,verified_order,breaking_order\n");
    let mut table_out = format!("{:>4} {:>4} {:>5} {:>9} {:>9}\n", "q", "p", "chi", "verified", "breaking");
    for (rot, report) in job.rotations.iter().zip(reports) {
        let report = report?;
        job.write(&format!("{}.json", file_stem("report", rot)), &report.to_json())?;
        let chi = job.chi(rot).map(|c| c.to_string()).unwrap_or_default();
        let breaking = order_cell(report.breaking_order);
        let _ = writeln!(csv, "{},{},{},{},{}", rot.q(), rot.p(), chi, report.verified_order, breaking);
        let _ = writeln!(
            table_out,
            "{:>4} {:>4} {:>5} {:>9} {:>9}",
            rot.q(),
            rot.p(),
            chi,
            report.verified_order,
            breaking
        );
    }
    job.write("summary.csv", &csv)?;
    print!("{table_out}");
    Ok(())
}

struct Verification {
    verified_order: usize,
    fit: ScalingFit,
    sweep_csv: String,
    residual_csv: String,
}

impl Verification {
    fn expected(&self) -> f64 {
        (self.verified_order + 1) as f64
    }

    fn passes(&self) -> bool {
        match self.fit.slope {
            None => true,
            Some(s) => s >= self.expected() - 0.1,
        }
    }

    fn verdict(&self) -> &'static str {
        match (self.fit.beyond_measurable(), self.passes()) {
            (true, _) => "PASS (beyond measurable order)",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        }
    }
}

fn verify_one(job: &Job, rot: RotationNumber, eps: &[f64]) -> Result<Verification, CliError> {
    let max_order = job.config.max_order;
    let table = job.table(max_order + job.config.oracle.extra_orders);
    let (report, state) = analyze_orders(table[..max_order].to_vec(), rot, max_order, job.config.tolerances)
        .map_err(|e| CliError::from_lib(e, &rot.to_string()))?;
    let mut points = Vec::with_capacity(eps.len());
    for &e in eps {
        let point = residual_sweep(&state, &table, &[e], job.config.oracle.grid)
            .map_err(|err| CliError::from_lib(err, &format!("{rot} at epsilon {e}")))?;
        points.extend(point);
    }
    let fit = scaling_fit_samples(&points).map_err(|e| CliError::from_lib(e, &rot.to_string()))?;
    let largest = eps.iter().copied().fold(0.0, f64::max);
    let ev = SupportEvaluator::new(table, largest)
        .map_err(|err| CliError::from_lib(err, &format!("{rot} at epsilon {largest}")))?;
    let samples = residual_function(&state, &ev, &uniform_grid(job.config.oracle.grid));
    Ok(Verification {
        verified_order: report.verified_order,
        fit,
        sweep_csv: sweep_csv(&points),
        residual_csv: residual_csv(&samples),
    })
}

pub fn verify(job: &Job) -> Result<(), CliError> {
    let eps = job.config.eps_values()?;
    let results: Vec<Result<Verification, CliError>> =
        job.rotations.par_iter().map(|&rot| verify_one(job, rot, &eps)).collect();
    let mut csv = String::from("q,p,verified_order,expected_slope,slope,r_squared,verdict\n");
    let mut failures = Vec::new();
    for (rot, v) in job.rotations.iter().zip(results) {
        let v = v?;
        job.write(&format!("{}.csv", file_stem("sweep", rot)), &v.sweep_csv)?;
        job.write(&format!("{}.csv", file_stem("residual", rot)), &v.residual_csv)?;
        let slope = v.fit.slope.map(|s| s.to_string()).unwrap_or_default();
        let r2 = v.fit.r_squared.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(csv, "{},{},{},{},{},{},{}", rot.q(), rot.p(), v.verified_order, v.expected(), slope, r2, v.verdict());
        println!(
            "{rot}: verified order {}, expected slope {}, slope {}, {}",
            v.verified_order,
            v.expected(),
            v.fit.slope.map(|s| format!("{s:.3}")).unwrap_or_else(|| "-".into()),
            v.verdict()
        );
        if !v.passes() {
            failures.push(format!("{rot} (slope {slope} below {})", v.expected() - 0.1));
        }
    }
    job.write("verify.csv", &csv)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Oracle(format!("residual scaling check failed for {}", failures.join(", "))))
    }
}

pub fn correct(job: &Job) -> Result<(), CliError> {
    let target = job.config.max_order;
    let table = job.table(target);
    let tol = job.config.tolerances;
    let results: Vec<Result<Vec<TrigPoly>, CliError>> = job
        .rotations
        .par_iter()
        .map(|&rot| {
            let ctx = rot.to_string();
            let (corrected, _) =
                correct_orders(table.clone(), rot, target, tol).map_err(|e| CliError::from_lib(e, &ctx))?;
            let (report, _) =
                analyze_orders(corrected.clone(), rot, target, tol).map_err(|e| CliError::from_lib(e, &ctx))?;
            if report.verified_order != target {
                return Err(CliError::Internal(format!(
                    "{ctx}: corrected spec only verifies order {}",
                    report.verified_order
                )));
            }
            Ok(corrected)
        })
        .collect();
    for (rot, corrected) in job.rotations.iter().zip(results) {
        let corrected = corrected?;
        let changed: Vec<String> = corrected
            .iter()
            .zip(&table)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(k, _)| (k + 1).to_string())
            .collect();
        let doc = DeformationDoc::from_orders(&corrected, None);
        let json = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Internal(e.to_string()))?;
        let name = format!("{}.json", file_stem("corrected", rot));
        job.write(&name, &json)?;
        if changed.is_empty() {
            println!("{rot}: persists to order {target}; spec unchanged -> {}", display(&job.out, &name));
        } else {
            println!(
                "{rot}: corrected orders {} to persist to order {target} -> {}",
                changed.join(","),
                display(&job.out, &name)
            );
        }
    }
    Ok(())
}

fn display(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}
