use std::path::Path;

use clap::Args;
use padic_wavelets::dilation::{cyclic_dilation, matrix_s, quincunx};
use padic_wavelets::metric::u_matrix;
use padic_wavelets::padic::rational::rat;
use padic_wavelets::{DeformedMetric, Error, RatMatrix, Result};

/// The matrix and metric a command works on.
#[derive(Args, Clone, Debug)]
pub struct Target {
    /// Prime; defaults to 2.
    #[arg(long)]
    pub prime: Option<u32>,
    /// Dimension, used by `cyclic`, `identity` and the metric presets.
    #[arg(long)]
    pub dim: Option<usize>,
    /// `S`, `Q`, `U`, `cyclic`, `identity`, or rows like `1,-1;1,1`.
    #[arg(long)]
    pub matrix: Option<String>,
    /// A metric file, `standard`, `flag`, `s`, `q`, or weights like
    /// `1/2,0` with an optional conjugation `@1,0;1,1`.
    #[arg(long)]
    pub metric: Option<String>,
}

impl Target {
    pub fn prime(&self) -> u32 {
        self.prime.unwrap_or(2)
    }

    /// The matrix, defaulting to `[p]`.
    pub fn matrix(&self) -> Result<RatMatrix> {
        let p = self.prime();
        let d = self.dim.unwrap_or(2);
        let Some(m) = self.matrix.as_deref() else {
            return Ok(RatMatrix::from_ints(&[&[p as i64]]));
        };
        let m = m.trim();
        let named = match m.to_ascii_lowercase().as_str() {
            "s" => Some(matrix_s()),
            "q" | "quincunx" => Some(quincunx()),
            "u" => Some(u_matrix()),
            "cyclic" => Some(cyclic_dilation(p, d)),
            "identity" | "e" => Some(RatMatrix::identity(d)),
            _ => None,
        };
        let a = match named {
            Some(a) => a,
            None => RatMatrix::parse_inline(m)?,
        };
        if let Some(d) = self.dim {
            if d != a.dim() {
                return Err(Error::DimensionMismatch { expected: d, got: a.dim() });
            }
        }
        Ok(a)
    }

    /// The metric, defaulting to the complete flag in the matrix dimension.
    pub fn metric(&self, d: usize) -> Result<DeformedMetric> {
        let p = self.prime();
        let m = match self.metric.as_deref().map(str::trim) {
            None | Some("flag") => DeformedMetric::complete_flag(p, d)?,
            Some("standard") => DeformedMetric::standard(p, d)?,
            Some("s") => DeformedMetric::metric_s(rat(1, 2))?,
            Some("q") => DeformedMetric::metric_q(rat(1, 2))?,
            Some(text) if Path::new(text).is_file() => {
                let body = std::fs::read_to_string(text).map_err(|e| Error::Parse(format!("{text}: {e}")))?;
                DeformedMetric::from_file_text(&body)?
            }
            Some(text) => DeformedMetric::parse_inline(p, text)?,
        };
        if m.prime() != p {
            return Err(Error::PrimeMismatch(p, m.prime()));
        }
        if m.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: m.dim() });
        }
        Ok(m)
    }
}
