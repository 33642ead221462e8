//! Measurement matrices: near-field, imaginary near-field, cross-correlation
//! of random-source total fields, and the empirical covariance of a random
//! source process. Also additive measurement noise.

use crate::error::{Error, Result};
use crate::forward::Medium;
use crate::geometry::{PointSet, PointSetSpec};
use crate::inversion::svd;
use crate::linalg::CMatrix;
use crate::point::Point;
use crate::seeding::{substream, TAG_NOISE, TAG_REALIZATION};
use crate::specfun::WaveContext;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixKind {
    NearField,
    ImaginaryNearField,
    CrossCorrelation,
    Covariance,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixKind::NearField => "NearField",
            MatrixKind::ImaginaryNearField => "ImaginaryNearField",
            MatrixKind::CrossCorrelation => "CrossCorrelation",
            MatrixKind::Covariance => "Covariance",
        })
    }
}

impl FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "NearField" | "N" => Ok(MatrixKind::NearField),
            "ImaginaryNearField" | "I" => Ok(MatrixKind::ImaginaryNearField),
            "CrossCorrelation" | "C" => Ok(MatrixKind::CrossCorrelation),
            "Covariance" => Ok(MatrixKind::Covariance),
            other => Err(Error::Parse(format!("unknown matrix kind {other:?}"))),
        }
    }
}

/// How a matrix was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Provenance {
    pub k: f64,
    pub sources: Option<PointSetSpec>,
    pub source_count: Option<usize>,
    pub beta: Option<f64>,
    pub realizations: Option<usize>,
    pub seed: Option<u64>,
    pub noise_amplitude: f64,
    pub noise_seed: Option<u64>,
    /// Spectral norm of the added noise.
    pub delta: f64,
}

#[derive(Debug, Clone)]
pub struct FieldMatrix {
    pub entries: CMatrix,
    pub kind: MatrixKind,
    pub receivers: PointSet,
    pub provenance: Provenance,
}

impl FieldMatrix {
    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn delta(&self) -> f64 {
        self.provenance.delta
    }
}

/// `N_jm = u^s(x_j, x_m)` for co-located sources and receivers.
pub fn near_field_matrix(receivers: &PointSet, medium: &Medium) -> Result<FieldMatrix> {
    let entries = medium.scattered_block(&receivers.points, &receivers.points)?;
    Ok(FieldMatrix {
        entries,
        kind: MatrixKind::NearField,
        receivers: receivers.clone(),
        provenance: Provenance { k: medium.ctx().k(), ..Default::default() },
    })
}

/// `I = N − conj(N)` entrywise.
pub fn imaginary_near_field_matrix(near: &FieldMatrix) -> Result<FieldMatrix> {
    if near.kind != MatrixKind::NearField {
        return Err(Error::KindMismatch { expected: MatrixKind::NearField.to_string(), found: near.kind.to_string() });
    }
    Ok(FieldMatrix {
        entries: near.entries.map(|z| z - z.conj()),
        kind: MatrixKind::ImaginaryNearField,
        receivers: near.receivers.clone(),
        provenance: near.provenance.clone(),
    })
}

/// `φ(x_j, x_m) − conj(φ(x_j, x_m)) = (i/2) J0(k|x_j − x_m|)`, continuous
/// across the diagonal where it equals `i/2`.
fn green_imaginary_bracket(ctx: &WaveContext, receivers: &[Point]) -> CMatrix {
    let k = ctx.k();
    CMatrix::from_fn(receivers.len(), receivers.len(), |j, m| {
        let r = receivers[j].dist(receivers[m]);
        Complex64::new(0.0, 0.5 * crate::specfun::j0(k * r))
    })
}

/// `C_jm = (2ik|Σ|/L) Σ_ℓ conj(u(x_j, z_ℓ)) u(x_m, z_ℓ) − [φ − conj φ](x_j, x_m)`
/// with `|Σ|` the length of the source curve.
pub fn cross_correlation_matrix(receivers: &PointSet, sources: &PointSet, medium: &Medium) -> Result<FieldMatrix> {
    if sources.is_empty() {
        return Err(Error::Geometry("cross-correlation needs at least one source".into()));
    }
    let ctx = medium.ctx();
    let total = medium.total_block(&receivers.points, &sources.points)?;
    let weight = Complex64::new(0.0, 2.0 * ctx.k() * sources.spec.curve_length() / sources.len() as f64);
    let correlation = total.conj().matmul(&total.transpose())?.scale(weight);
    let entries = correlation.sub(&green_imaginary_bracket(ctx, &receivers.points))?;
    Ok(FieldMatrix {
        entries,
        kind: MatrixKind::CrossCorrelation,
        receivers: receivers.clone(),
        provenance: Provenance {
            k: ctx.k(),
            sources: Some(sources.spec),
            source_count: Some(sources.len()),
            beta: Some(sources.spec.beta),
            ..Default::default()
        },
    })
}

/// Empirical covariance of `𝒰(x) = Σ_ℓ u(x, z_ℓ) n(z_ℓ)` over `realizations`
/// draws of complex Gaussian source amplitudes, each component of variance
/// `|Σ|/(2L)`:
/// `C_jm = 2ik (1/M) Σ_r 𝒰_r(x_j) conj(𝒰_r(x_m)) − [φ − conj φ](x_j, x_m)`.
pub fn covariance_matrix(
    receivers: &PointSet,
    sources: &PointSet,
    realizations: usize,
    seed: u64,
    medium: &Medium,
) -> Result<FieldMatrix> {
    if realizations == 0 {
        return Err(Error::Config("covariance needs at least one realization".into()));
    }
    if sources.is_empty() {
        return Err(Error::Geometry("covariance needs at least one source".into()));
    }
    let ctx = medium.ctx();
    let total = medium.total_block(&receivers.points, &sources.points)?;
    let l = sources.len();
    let std = (sources.spec.curve_length() / (2.0 * l as f64)).sqrt();
    // Each realization is a column of field samples at the receivers.
    let fields: Vec<Vec<Complex64>> = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, TAG_REALIZATION, r as u64);
            let amplitudes: Vec<Complex64> = (0..l)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im) * std
                })
                .collect();
            total.matvec(&amplitudes).expect("dimensions agree")
        })
        .collect();
    let samples = CMatrix::from_columns(receivers.len(), &fields);
    let average = samples.matmul(&samples.adjoint())?.scale(Complex64::new(1.0 / realizations as f64, 0.0));
    let entries =
        average.scale(Complex64::new(0.0, 2.0 * ctx.k())).sub(&green_imaginary_bracket(ctx, &receivers.points))?;
    Ok(FieldMatrix {
        entries,
        kind: MatrixKind::Covariance,
        receivers: receivers.clone(),
        provenance: Provenance {
            k: ctx.k(),
            sources: Some(sources.spec),
            source_count: Some(l),
            beta: Some(sources.spec.beta),
            realizations: Some(realizations),
            seed: Some(seed),
            ..Default::default()
        },
    })
}

/// The noise matrix `E_jm = amplitude · max|A| · (g₁ + i g₂)/√2`.
pub fn noise_matrix(matrix: &CMatrix, amplitude: f64, seed: u64) -> Result<CMatrix> {
    if !(amplitude >= 0.0) || !amplitude.is_finite() {
        return Err(Error::Domain(format!("noise amplitude must be nonnegative, got {amplitude}")));
    }
    let scale = amplitude * matrix.max_abs() / std::f64::consts::SQRT_2;
    let mut rng = substream(seed, TAG_NOISE, 0);
    Ok(CMatrix::from_fn(matrix.rows(), matrix.cols(), |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im) * scale
    }))
}

/// Adds relative complex Gaussian noise and records `δ = ‖E‖₂`.
pub fn add_noise(matrix: &FieldMatrix, amplitude: f64, seed: u64) -> Result<FieldMatrix> {
    let mut out = matrix.clone();
    out.provenance.noise_amplitude = amplitude;
    out.provenance.noise_seed = Some(seed);
    if amplitude == 0.0 {
        out.provenance.delta = 0.0;
        return Ok(out);
    }
    let noise = noise_matrix(&matrix.entries, amplitude, seed)?;
    out.provenance.delta = svd(&noise)?.largest();
    out.entries = matrix.entries.add(&noise)?;
    Ok(out)
}

const CSV_FIELDS: &str = "kind,J,k,seed,delta,noise_amplitude,L,beta,M";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the matrix as CSV: two comment lines (field names and values), a
/// `re,im` header and one line per entry in row-major order.
pub fn write_csv(matrix: &FieldMatrix, mut out: impl Write) -> Result<()> {
    let p = &matrix.provenance;
    writeln!(out, "# {CSV_FIELDS}")?;
    writeln!(
        out,
        "# {},{},{:.16e},{},{:.16e},{:.16e},{},{},{}",
        matrix.kind,
        matrix.dim(),
        p.k,
        opt(p.noise_seed.or(p.seed)),
        p.delta,
        p.noise_amplitude,
        opt(p.source_count),
        opt(p.beta.map(|b| format!("{b:.16e}"))),
        opt(p.realizations)
    )?;
    writeln!(out, "re,im")?;
    for z in matrix.entries.as_slice() {
        writeln!(out, "{:.16e},{:.16e}", z.re, z.im)?;
    }
    Ok(())
}

/// Matrix entries, kind and `δ` read back from [`write_csv`] output.
#[derive(Debug, Clone)]
pub struct CsvMatrix {
    pub kind: MatrixKind,
    pub k: f64,
    pub delta: f64,
    pub entries: CMatrix,
}

pub fn read_csv(input: impl BufRead) -> Result<CsvMatrix> {
    let mut lines = input.lines();
    let mut next = || -> Result<String> {
        lines.next().ok_or_else(|| Error::Parse("unexpected end of matrix CSV".into()))?.map_err(Error::from)
    };
    let names = next()?;
    if names.trim_start_matches("# ") != CSV_FIELDS {
        return Err(Error::Parse(format!("unexpected CSV field line {names:?}")));
    }
    let values = next()?;
    let fields: Vec<&str> = values.trim_start_matches("# ").split(',').collect();
    if fields.len() != 9 {
        return Err(Error::Parse(format!("expected 9 metadata fields, got {}", fields.len())));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
    let kind: MatrixKind = fields[0].parse()?;
    let j: usize = fields[1].parse().map_err(|e| Error::Parse(format!("J: {e}")))?;
    let k = num(fields[2])?;
    let delta = num(fields[4])?;
    if next()? != "re,im" {
        return Err(Error::Parse("missing re,im header".into()));
    }
    let mut data = Vec::with_capacity(j * j);
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let (re, im) = line.split_once(',').ok_or_else(|| Error::Parse(format!("bad entry line {line:?}")))?;
        data.push(Complex64::new(num(re)?, num(im)?));
    }
    Ok(CsvMatrix { kind, k, delta, entries: CMatrix::from_row_major(j, j, data)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{circle_points, PointRole};
    use std::f64::consts::TAU;

    fn receivers(n: usize) -> PointSet {
        circle_points(&PointSetSpec::full_circle(PointRole::Receiver, 5.0, n)).unwrap()
    }

    #[test]
    fn empty_medium_gives_zero_near_field() {
        let ctx = WaveContext::new(TAU).unwrap();
        let n = near_field_matrix(&receivers(6), &Medium::Free(ctx)).unwrap();
        assert_eq!(n.entries.max_abs(), 0.0);
    }

    #[test]
    fn imaginary_part_requires_near_field() {
        let ctx = WaveContext::new(TAU).unwrap();
        let n = near_field_matrix(&receivers(4), &Medium::Free(ctx)).unwrap();
        let i = imaginary_near_field_matrix(&n).unwrap();
        assert!(matches!(imaginary_near_field_matrix(&i), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn zero_amplitude_keeps_matrix() {
        let ctx = WaveContext::new(TAU).unwrap();
        let mut n = near_field_matrix(&receivers(4), &Medium::Free(ctx)).unwrap();
        n.entries = CMatrix::identity(4);
        let noisy = add_noise(&n, 0.0, 3).unwrap();
        assert_eq!(noisy.entries, n.entries);
        assert_eq!(noisy.delta(), 0.0);
    }

    #[test]
    fn csv_round_trip() {
        let ctx = WaveContext::new(TAU).unwrap();
        let mut n = near_field_matrix(&receivers(3), &Medium::Free(ctx)).unwrap();
        n.entries = CMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64 / 3.0, -(j as f64) * 1e-17));
        let noisy = add_noise(&n, 0.05, 9).unwrap();
        let mut buf = Vec::new();
        write_csv(&noisy, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.kind, MatrixKind::NearField);
        assert_eq!(back.entries, noisy.entries);
        assert_eq!(back.delta, noisy.delta());
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# kind,J,k,seed,delta,"));
        assert!(!text.contains('\r'));
    }
}
