//! 8-bit binary PGM (`P5`) images.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use qgan_core::linalg::Matrix;

/// `floor(p·255 + 0.5)` after clamping to `[0, 1]`.
pub fn pixel_to_byte(p: f64) -> u8 {
    (p.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

/// Header plus raster, and the number of pixels that had to be clamped.
pub fn encode(rows: usize, cols: usize, pixels: &[f64]) -> anyhow::Result<(Vec<u8>, usize)> {
    if pixels.len() != rows * cols {
        bail!("{} pixels for a {rows}x{cols} image", pixels.len());
    }
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    let mut clamped = 0;
    for &p in pixels {
        if !(0.0..=1.0).contains(&p) {
            clamped += 1;
        }
        out.push(pixel_to_byte(p));
    }
    Ok((out, clamped))
}

pub fn write(path: &Path, rows: usize, cols: usize, pixels: &[f64]) -> anyhow::Result<()> {
    let (bytes, clamped) = encode(rows, cols, pixels)?;
    if clamped > 0 {
        log::warn!("{}: clamped {clamped} pixels outside [0, 1]", path.display());
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gray {
    pub rows: usize,
    pub cols: usize,
    pub bytes: Vec<u8>,
}

impl Gray {
    pub fn to_unit(&self) -> Vec<f64> {
        self.bytes.iter().map(|&b| f64::from(b) / 255.0).collect()
    }
}

fn next_token(data: &[u8], pos: &mut usize) -> anyhow::Result<String> {
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < data.len() && !data[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        bail!("unexpected end of PGM header");
    }
    Ok(String::from_utf8_lossy(&data[start..*pos]).into_owned())
}

pub fn decode(data: &[u8]) -> anyhow::Result<Gray> {
    let mut pos = 0;
    if next_token(data, &mut pos)? != "P5" {
        bail!("not a binary PGM (P5) file");
    }
    let cols: usize = next_token(data, &mut pos)?.parse().context("PGM width")?;
    let rows: usize = next_token(data, &mut pos)?.parse().context("PGM height")?;
    let maxval: usize = next_token(data, &mut pos)?.parse().context("PGM maxval")?;
    if maxval != 255 {
        bail!("only 8-bit PGM (maxval 255) is supported, found {maxval}");
    }
    pos += 1;
    let raster = data.get(pos..pos + rows * cols).context("truncated PGM raster")?;
    Ok(Gray {
        rows,
        cols,
        bytes: raster.to_vec(),
    })
}

pub fn read(path: &Path) -> anyhow::Result<Gray> {
    let data = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    decode(&data).with_context(|| format!("decoding {}", path.display()))
}

/// `*.pgm` files directly inside `dir`, sorted by name.
pub fn list_dir(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "pgm"))
        .collect();
    files.sort();
    Ok(files)
}

/// All images of one size from a directory, one row per file.
pub fn load_dir(dir: &Path) -> anyhow::Result<(Matrix, usize, usize)> {
    let files = list_dir(dir)?;
    let mut rows_cols = None;
    let mut data = Vec::new();
    for f in &files {
        let g = read(f)?;
        match rows_cols {
            None => rows_cols = Some((g.rows, g.cols)),
            Some(rc) if rc != (g.rows, g.cols) => {
                bail!("{} is {}x{}, expected {}x{}", f.display(), g.rows, g.cols, rc.0, rc.1)
            }
            _ => {}
        }
        data.extend(g.to_unit());
    }
    let (rows, cols) = rows_cols.unwrap_or((0, 0));
    Ok((Matrix::from_vec(files.len(), rows * cols, data)?, rows, cols))
}

/// Tiles images (rows of `images`, each `rows × cols`) into a grid with
/// `grid_cols` tiles per row; missing tiles stay black.
pub fn tile(images: &Matrix, rows: usize, cols: usize, grid_cols: usize) -> (Vec<f64>, usize, usize) {
    let n = images.rows();
    let grid_cols = grid_cols.max(1).min(n.max(1));
    let grid_rows = n.div_ceil(grid_cols).max(1);
    let (h, w) = (grid_rows * rows, grid_cols * cols);
    let mut out = vec![0.0; h * w];
    for i in 0..n {
        let (gr, gc) = (i / grid_cols, i % grid_cols);
        let img = images.row(i);
        for r in 0..rows {
            let dst = (gr * rows + r) * w + gc * cols;
            out[dst..dst + cols].copy_from_slice(&img[r * cols..(r + 1) * cols]);
        }
    }
    (out, h, w)
}
