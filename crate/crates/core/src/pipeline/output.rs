//! Output files: indicator CSVs, the P5 graymap and checksums.

use crate::error::Result;
use crate::inversion::IndicatorMap;
use sha2::{Digest, Sha256};
use std::io::Write;

/// `x,y,g_norm,alpha,residual` for every successful probe, bottom row first.
pub fn write_indicator_raw(map: &IndicatorMap, mut out: impl Write) -> Result<()> {
    writeln!(out, "x,y,g_norm,alpha,residual")?;
    for p in map.probes.iter().flatten() {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", p.z.x, p.z.y, p.g_norm, p.alpha, p.residual)?;
    }
    Ok(())
}

/// `x,y,raw,reciprocal,mask` for every grid cell, bottom row first.
pub fn write_indicator(map: &IndicatorMap, mut out: impl Write) -> Result<()> {
    writeln!(out, "x,y,raw,reciprocal,mask")?;
    for (i, z) in map.grid.points().iter().enumerate() {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{}",
            z.x,
            z.y,
            map.values[i],
            map.reciprocal[i],
            u8::from(map.mask[i])
        )?;
    }
    Ok(())
}

/// Binary graymap of the normalized reciprocal indicator, top row first.
pub fn write_pgm(map: &IndicatorMap, mut out: impl Write) -> Result<()> {
    let (nx, ny) = (map.grid.nx, map.grid.ny);
    write!(out, "P5\n{nx} {ny}\n255\n")?;
    let mut row = Vec::with_capacity(nx);
    for iy in (0..ny).rev() {
        row.clear();
        for ix in 0..nx {
            let v = map.reciprocal[map.index(ix, iy)];
            row.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
        }
        out.write_all(&row)?;
    }
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
