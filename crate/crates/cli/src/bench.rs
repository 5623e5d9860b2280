//! Benchmark harness: runtime and accuracy of both transforms versus the
//! analytic reference signals, with log-log slope estimates.

use nft_core::discretize::{build_monodromy, default_transform, Scheme};
use nft_core::oracles::AnalyticCase;
use nft_core::spectra::{
    defocusing_spectra_sampling, filter_spectrum, main_spectrum_eigen, spectrum_error, Rect,
    SpectrumFilter,
};
use nft_core::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Focusing,
    Defocusing,
    All,
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub suite: String,
    pub ds: Vec<usize>,
    pub cells: Vec<BenchCell>,
    pub slopes: Vec<SlopeEstimate>,
}

#[derive(Debug, Serialize)]
pub struct BenchCell {
    pub suite: String,
    pub method: String,
    pub d: usize,
    pub runs: usize,
    pub min_wall_s: f64,
    pub per_sample_s: f64,
    pub error: Option<f64>,
    /// Focusing suite only: the same error over a full rectangle that also
    /// contains the real axis. Noticeably larger than `error` because every
    /// method struggles with the degenerate point at the zero radicand of
    /// the plane-wave family.
    pub error_full: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SlopeEstimate {
    pub suite: String,
    pub method: String,
    /// "total" for min wall time, "per_sample" for time per sample point.
    pub metric: String,
    pub slope: f64,
}

/// Timing protocol: minimum wall time over three runs per cell; cells are
/// executed sequentially so the measurements do not contend.
const RUNS: usize = 3;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct CellOutcome {
    min_wall_s: f64,
    error: Option<f64>,
    error_full: Option<f64>,
    failure: Option<String>,
}

fn run_cell(
    mut body: impl FnMut() -> Result<(Option<f64>, Option<f64>), String>,
) -> CellOutcome {
    let mut best = f64::INFINITY;
    let mut errors = (None, None);
    for _ in 0..RUNS {
        let t = Instant::now();
        match body() {
            Ok(e) => {
                best = best.min(t.elapsed().as_secs_f64());
                errors = e;
            }
            Err(msg) => {
                return CellOutcome {
                    min_wall_s: f64::NAN,
                    error: None,
                    error_full: None,
                    failure: Some(msg),
                }
            }
        }
    }
    CellOutcome { min_wall_s: best, error: errors.0, error_full: errors.1, failure: None }
}

fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let lx: Vec<f64> = points.iter().map(|(x, _)| x.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|(_, y)| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

pub fn run_bench(suite: Suite, ds: &[usize]) -> BenchReport {
    let mut cells: Vec<BenchCell> = Vec::new();

    if suite != Suite::Defocusing {
        let case = AnalyticCase::plane_wave_focusing(3.0, 3.0, 2.0 * PI);
        // The headline rectangle excludes the real axis; the full rectangle
        // includes it and therefore the hard degenerate point where the
        // family's radicand vanishes.
        let rect = Rect::new(c(-5.0, 1.0), c(5.0, 5.0));
        let rect_full = Rect::new(c(-5.0, -5.0), c(5.0, 5.0));
        let truth: Vec<Complex64> =
            case.exact_main_in(&rect).unwrap().iter().map(|p| p.z).collect();
        let truth_full: Vec<Complex64> =
            case.exact_main_in(&rect_full).unwrap().iter().map(|p| p.z).collect();
        for (scheme, method) in [
            (Scheme::ablowitz_ladik(), "eigen-al"),
            (Scheme::CrankNicolson, "eigen-cn"),
        ] {
            for &d in ds {
                let signal = case.signal(d);
                let outcome = run_cell(|| {
                    let rm =
                        build_monodromy(&signal, scheme, default_transform(scheme, signal.step()))
                            .map_err(|e| e.to_string())?;
                    let main = main_spectrum_eigen(&rm);
                    Ok((
                        Some(spectrum_error(&truth, &main.points, &rect)),
                        Some(spectrum_error(&truth_full, &main.points, &rect_full)),
                    ))
                });
                cells.push(BenchCell {
                    suite: "focusing".into(),
                    method: method.into(),
                    d,
                    runs: RUNS,
                    min_wall_s: outcome.min_wall_s,
                    per_sample_s: outcome.min_wall_s / d as f64,
                    error: outcome.error,
                    error_full: outcome.error_full,
                    failure: outcome.failure,
                });
            }
        }
    }

    if suite != Suite::Focusing {
        let case = AnalyticCase::one_band_defocusing(-3.0, 0.0, 2.0 * PI).unwrap();
        let truth = [c(-3.0, 0.0), c(0.0, 0.0)];
        let rect = Rect::new(c(-10.0, -1.0), c(10.0, 1.0));
        for &d in ds {
            let signal = case.signal(d);
            let outcome = run_cell(|| {
                let scheme = Scheme::ablowitz_ladik();
                let rm = build_monodromy(&signal, scheme, default_transform(scheme, signal.step()))
                    .map_err(|e| e.to_string())?;
                let main = main_spectrum_eigen(&rm);
                let filtered = filter_spectrum(
                    &main.points,
                    &SpectrumFilter {
                        rect: Some(Rect::new(c(-10.0, -0.5), c(10.0, 0.5))),
                        dedup_tol: 0.02,
                        drop_double_roots: true,
                    },
                );
                Ok((Some(spectrum_error(&truth, &filtered, &rect)), None))
            });
            cells.push(BenchCell {
                suite: "defocusing".into(),
                method: "eigen-al".into(),
                d,
                runs: RUNS,
                min_wall_s: outcome.min_wall_s,
                per_sample_s: outcome.min_wall_s / d as f64,
                error: outcome.error,
                error_full: None,
                failure: outcome.failure,
            });

            let outcome = run_cell(|| {
                let result = defocusing_spectra_sampling(&signal, -10.0, 10.0, 1, 5)
                    .map_err(|e| e.to_string())?;
                Ok((Some(spectrum_error(&truth, &result.main, &rect)), None))
            });
            cells.push(BenchCell {
                suite: "defocusing".into(),
                method: "sampling".into(),
                d,
                runs: RUNS,
                min_wall_s: outcome.min_wall_s,
                per_sample_s: outcome.min_wall_s / d as f64,
                error: outcome.error,
                error_full: None,
                failure: outcome.failure,
            });
        }
    }

    let mut slopes = Vec::new();
    let mut pairs: Vec<(String, String)> = cells
        .iter()
        .map(|cell| (cell.suite.clone(), cell.method.clone()))
        .collect();
    pairs.dedup();
    for (suite_name, method) in pairs {
        let total: Vec<(f64, f64)> = cells
            .iter()
            .filter(|cell| {
                cell.suite == suite_name
                    && cell.method == method
                    && cell.failure.is_none()
                    && cell.min_wall_s > 0.0
            })
            .map(|cell| (cell.d as f64, cell.min_wall_s))
            .collect();
        if total.len() >= 2 {
            slopes.push(SlopeEstimate {
                suite: suite_name.clone(),
                method: method.clone(),
                metric: "total".into(),
                slope: loglog_slope(&total),
            });
            let per_sample: Vec<(f64, f64)> =
                total.iter().map(|&(d, t)| (d, t / d)).collect();
            slopes.push(SlopeEstimate {
                suite: suite_name,
                method,
                metric: "per_sample".into(),
                slope: loglog_slope(&per_sample),
            });
        }
    }

    BenchReport {
        schema_version: crate::output::SCHEMA_VERSION,
        suite: match suite {
            Suite::Focusing => "focusing",
            Suite::Defocusing => "defocusing",
            Suite::All => "all",
        }
        .into(),
        ds: ds.to_vec(),
        cells,
        slopes,
    }
}

pub fn report_tsv(report: &BenchReport) -> String {
    let mut out = String::from(
        "suite\tmethod\tD\truns\tmin_wall_s\tper_sample_s\terror\terror_full\tfailure\n",
    );
    for cell in &report.cells {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            cell.suite,
            cell.method,
            cell.d,
            cell.runs,
            cell.min_wall_s,
            cell.per_sample_s,
            cell.error.map_or(String::from("-"), |e| e.to_string()),
            cell.error_full.map_or(String::from("-"), |e| e.to_string()),
            cell.failure.as_deref().unwrap_or("-"),
        ));
    }
    out
}
