//! Signal file formats.
//!
//! The native format is CSV with a JSON metadata header line:
//!
//! ```text
//! #META {"ell": 6.283185307179586, "x0": 0.0, "kappa": -1, "akns": false}
//! 0,1.5,0.0
//! 1,1.4987,0.0680
//! ...
//! ```
//!
//! Rows are `index,re_q,im_q` (plus `,re_r,im_r` when `akns` is true) with
//! contiguous indices `0..D-1`. Files with a `.json` extension use the
//! equivalent JSON document instead. Floats are written in Rust's shortest
//! round-trip form, so write-then-read reproduces samples bit-exactly.

use anyhow::{anyhow, bail, Context, Result};
use nft_core::discretize::{Kappa, Signal};
use nft_core::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SignalFile {
    pub ell: f64,
    #[serde(default)]
    pub x0: f64,
    /// +1 focusing, -1 defocusing; ignored when `akns` is set.
    pub kappa: i8,
    #[serde(default)]
    pub akns: bool,
    pub q: Vec<[f64; 2]>,
    #[serde(default)]
    pub r: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Deserialize)]
struct CsvMeta {
    ell: f64,
    #[serde(default)]
    x0: f64,
    kappa: i8,
    #[serde(default)]
    akns: bool,
}

impl SignalFile {
    pub fn sample_count(&self) -> usize {
        self.q.len()
    }

    /// Convert to the solver signal type.
    pub fn to_signal(&self) -> Result<Signal> {
        let q: Vec<Complex64> = self.q.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        let signal = if self.akns {
            let r = self
                .r
                .as_ref()
                .ok_or_else(|| anyhow!("akns signal file lacks r samples"))?;
            let r: Vec<Complex64> = r.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
            Signal::new_akns(q, r, self.ell, self.x0)?
        } else {
            let kappa = match self.kappa {
                1 => Kappa::Focusing,
                -1 => Kappa::Defocusing,
                other => bail!("kappa must be +1 or -1, got {other}"),
            };
            Signal::new(q, self.ell, self.x0, kappa)?
        };
        Ok(signal)
    }

    pub fn from_signal(signal: &Signal) -> Self {
        Self {
            ell: signal.period(),
            x0: signal.x0(),
            kappa: if signal.kappa() == Kappa::Focusing { 1 } else { -1 },
            akns: signal.is_akns(),
            q: signal.q().iter().map(|v| [v.re, v.im]).collect(),
            r: signal.is_akns().then(|| {
                (0..signal.sample_count())
                    .map(|n| {
                        let r = signal.r_at(n);
                        [r.re, r.im]
                    })
                    .collect()
            }),
        }
    }
}

pub fn read_signal_file(path: &Path) -> Result<SignalFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read signal file {}", path.display()))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let file: SignalFile = serde_json::from_str(&text).context("malformed JSON signal file")?;
        validate(&file)?;
        return Ok(file);
    }
    parse_csv(&text)
}

fn validate(file: &SignalFile) -> Result<()> {
    if file.q.len() < 2 {
        bail!("signal file must contain at least two samples, got {}", file.q.len());
    }
    if file.akns {
        let r_len = file.r.as_ref().map_or(0, Vec::len);
        if r_len != file.q.len() {
            bail!("akns signal file has {} r samples for {} q samples", r_len, file.q.len());
        }
    }
    Ok(())
}

fn parse_csv(text: &str) -> Result<SignalFile> {
    let mut meta: Option<CsvMeta> = None;
    let mut q = Vec::new();
    let mut r = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(json) = line.strip_prefix("#META") {
            meta = Some(
                serde_json::from_str(json.trim())
                    .with_context(|| format!("malformed #META header on line {}", lineno + 1))?,
            );
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let meta_ref = meta
            .as_ref()
            .ok_or_else(|| anyhow!("sample row before #META header on line {}", lineno + 1))?;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let want = if meta_ref.akns { 5 } else { 3 };
        if fields.len() != want {
            bail!(
                "line {}: expected {want} comma-separated fields, got {}",
                lineno + 1,
                fields.len()
            );
        }
        let index: usize = fields[0]
            .parse()
            .with_context(|| format!("line {}: bad sample index", lineno + 1))?;
        if index != q.len() {
            bail!("line {}: sample index {index} is not contiguous (expected {})", lineno + 1, q.len());
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| anyhow!("line {}: bad float {s:?}", lineno + 1))
        };
        q.push([num(fields[1])?, num(fields[2])?]);
        if meta_ref.akns {
            r.push([num(fields[3])?, num(fields[4])?]);
        }
    }
    let meta = meta.ok_or_else(|| anyhow!("signal file has no #META header"))?;
    let file = SignalFile {
        ell: meta.ell,
        x0: meta.x0,
        kappa: meta.kappa,
        akns: meta.akns,
        q,
        r: if meta.akns { Some(r) } else { None },
    };
    validate(&file)?;
    Ok(file)
}

pub fn write_signal_file(path: &Path, file: &SignalFile) -> Result<()> {
    let text = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        serde_json::to_string_pretty(file)?
    } else {
        render_csv(file)
    };
    std::fs::write(path, text)
        .with_context(|| format!("cannot write signal file {}", path.display()))?;
    Ok(())
}

fn render_csv(file: &SignalFile) -> String {
    let meta = serde_json::json!({
        "ell": file.ell,
        "x0": file.x0,
        "kappa": file.kappa,
        "akns": file.akns,
    });
    let mut out = format!("#META {meta}\n");
    for (n, [re, im]) in file.q.iter().enumerate() {
        match &file.r {
            Some(r) => {
                let [rre, rim] = r[n];
                out.push_str(&format!("{n},{re},{im},{rre},{rim}\n"));
            }
            None => out.push_str(&format!("{n},{re},{im}\n")),
        }
    }
    out
}
