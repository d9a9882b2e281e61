use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::eig::{OuterRecord, OuterTrace};
use crate::linalg::eigbasis::EigenBasis;
use crate::linalg::vector::norm2;

use super::config::RunConfig;
use super::CliError;

pub const OUTER_HEADER: &str =
    "i,lambda_re,lambda_im,rho_norm,abs_w1,norm_w2,Zw_norm,Zwt_norm,Zwt_over_tau,inner_its";
pub const OUTER_BLOCK_HEADER: &str =
    "i,lambda_re,lambda_im,rho_norm,W1_norm,W2_norm,Zw_norm,Zwt_norm,Zwt_over_tau,inner_its";
pub const INNER_HEADER: &str = "k,residual,bound25,bound26a";
pub const SUMMARY_HEADER: &str = "precond,theta_or_d,final_abs_w1,final_norm_w2,outer_total,inner_total";
pub const COMPARISON_HEADER: &str =
    "config,precond,theta_or_d,final_abs_w1,final_norm_w2,outer_total,inner_total,cumulative_inner";

/// 17 significant digits in scientific notation; blank for missing values.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.16e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Files written so far, removed again if the run fails.
pub struct OutputDir {
    dir: PathBuf,
    created_dir: bool,
    files: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            created_dir,
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, header: &str, rows: &[String]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        self.files.push(path.clone());
        let mut f = fs::File::create(&path).map_err(crate::Error::from)?;
        let mut text = String::with_capacity(64 * (rows.len() + 1));
        text.push_str(header);
        text.push('\n');
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        f.write_all(text.as_bytes()).map_err(crate::Error::from)?;
        Ok(())
    }

    pub fn cleanup(self) {
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}

/// `(|w₁|, ‖w⁽²⁾‖)` of a record, or the block split `(‖W₁‖, ‖W₂‖)`.
pub fn weight_split(r: &OuterRecord) -> Option<(f64, f64)> {
    if r.rhs.len() > 1 {
        return r.block_weights.as_ref().map(|b| (b.w1_norm, b.w2_norm));
    }
    r.weights.as_ref().map(|w| w.driving_split())
}

fn outer_row(r: &OuterRecord, basis: Option<&EigenBasis>) -> String {
    let split = weight_split(r);
    let z = basis.map(|b| b.z_norm2());
    let (zw, zwt) = match (z, &r.weights, &r.block_weights) {
        (Some(z), Some(w), _) if r.rhs.len() == 1 => {
            let wt = w.ft_norm.unwrap_or(w.wt_norm);
            (Some(z * norm2(w.driving())), Some(z * wt))
        }
        (Some(z), _, Some(bw)) => (Some(z * bw.w.frobenius_norm()), None),
        _ => (None, None),
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        r.i,
        num(r.lambda.re),
        num(r.lambda.im),
        num(r.rho_norm),
        opt(split.map(|s| s.0)),
        opt(split.map(|s| s.1)),
        opt(zw),
        opt(zwt),
        opt(zwt.map(|v| v / r.tau)),
        r.inner.iterations()
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub precond: String,
    pub theta_or_d: Option<f64>,
    pub final_abs_w1: Option<f64>,
    pub final_norm_w2: Option<f64>,
    pub outer_total: usize,
    pub inner_total: usize,
    pub cumulative_inner: Vec<usize>,
}

impl SummaryRow {
    pub fn new(cfg: &RunConfig, trace: &OuterTrace) -> Self {
        let last = trace.records.last().and_then(weight_split);
        let mut acc = 0;
        Self {
            precond: cfg.precond_label().to_string(),
            theta_or_d: cfg.theta_or_d(),
            final_abs_w1: last.map(|s| s.0),
            final_norm_w2: last.map(|s| s.1),
            outer_total: trace.outer_iterations(),
            inner_total: trace.inner_total(),
            cumulative_inner: trace
                .records
                .iter()
                .map(|r| {
                    acc += r.inner.iterations();
                    acc
                })
                .collect(),
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.precond,
            opt(self.theta_or_d),
            opt(self.final_abs_w1),
            opt(self.final_norm_w2),
            self.outer_total,
            self.inner_total
        )
    }

    pub fn comparison_csv(&self, name: &str) -> String {
        let cum: Vec<String> = self.cumulative_inner.iter().map(|c| c.to_string()).collect();
        format!("{name},{},{}", self.csv(), cum.join(";"))
    }
}

pub fn write_outputs(
    out: &mut OutputDir,
    cfg: &RunConfig,
    trace: &OuterTrace,
    basis: Option<&EigenBasis>,
    summary: &SummaryRow,
) -> Result<(), CliError> {
    let block = cfg.block > 1;
    if cfg.emit.outer {
        let rows: Vec<String> = trace.records.iter().map(|r| outer_row(r, basis)).collect();
        out.write("outer.csv", if block { OUTER_BLOCK_HEADER } else { OUTER_HEADER }, &rows)?;
    }
    if cfg.emit.inner {
        for r in &trace.records {
            let res = r.inner.residuals();
            let rows: Vec<String> = res
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let (b25, b26) = match &r.bounds {
                        Some(b) => (b.bound_25.get(k).copied(), b.bound_26a.get(k).copied()),
                        None => (None, None),
                    };
                    format!("{k},{},{},{}", num(*v), opt(b25), opt(b26))
                })
                .collect();
            out.write(&format!("inner_{}.csv", r.i), INNER_HEADER, &rows)?;
        }
    }
    if cfg.emit.weights && basis.is_some() {
        let mut rows = Vec::new();
        for r in &trace.records {
            if let Some(bw) = &r.block_weights {
                if block {
                    for l in 0..bw.w.ncols() {
                        for (j, v) in bw.w.col(l).iter().enumerate() {
                            rows.push(format!("{},{l},{j},{},{}", r.i, num(v.re), num(v.im)));
                        }
                    }
                    continue;
                }
            }
            if let Some(w) = &r.weights {
                for (j, v) in w.driving().iter().enumerate() {
                    rows.push(format!("{},0,{j},{},{}", r.i, num(v.re), num(v.im)));
                }
            }
        }
        out.write("weights.csv", "i,col,j,re,im", &rows)?;
    }
    if cfg.emit.summary {
        out.write("summary.csv", SUMMARY_HEADER, &[summary.csv()])?;
    }
    Ok(())
}
