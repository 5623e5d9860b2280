//! Output documents: spectrum JSON and Floquet TSV.

use nft_core::spectra::{FloquetPoint, SpectrumResult};
use nft_core::Complex64;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Spectrum output document; complex numbers are `[re, im]` pairs.
#[derive(Debug, Serialize)]
pub struct SpectrumDoc {
    pub schema_version: u32,
    pub method: String,
    pub main: Vec<[f64; 2]>,
    pub aux_ki: Vec<[f64; 2]>,
    pub aux_ma_rho: Vec<[f64; 2]>,
    pub aux_ma_xi: Vec<[f64; 2]>,
    pub diagnostics: DiagnosticsDoc,
}

#[derive(Debug, Serialize)]
pub struct DiagnosticsDoc {
    pub cancelled_roots: usize,
    pub max_residual: f64,
    pub root_finder_converged: bool,
    pub notes: Vec<String>,
}

fn pairs(points: &[Complex64]) -> Vec<[f64; 2]> {
    points.iter().map(|p| [p.re, p.im]).collect()
}

impl SpectrumDoc {
    pub fn from_result(result: &SpectrumResult) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            method: result.diagnostics.method.clone(),
            main: pairs(&result.main),
            aux_ki: pairs(&result.aux_ki),
            aux_ma_rho: pairs(&result.aux_ma_rho),
            aux_ma_xi: pairs(&result.aux_ma_xi),
            diagnostics: DiagnosticsDoc {
                cancelled_roots: result.diagnostics.cancelled_roots,
                max_residual: result.diagnostics.max_residual,
                root_finder_converged: result.diagnostics.root_finder_converged,
                notes: result.diagnostics.notes.clone(),
            },
        }
    }
}

/// Tab-separated `z  delta  clipped` rows with a comment header.
pub fn floquet_tsv(rows: &[FloquetPoint]) -> String {
    let mut out = String::from("# z\tdelta\tclipped\n");
    for row in rows {
        out.push_str(&format!("{}\t{}\t{}\n", row.z, row.delta, row.clipped));
    }
    out
}
