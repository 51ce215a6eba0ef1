#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn write_idx(dir: &Path, images: &[Vec<u8>], labels: &[u8], rows: u32, cols: u32) {
    let mut img = Vec::new();
    for v in [2051u32, images.len() as u32, rows, cols] {
        img.extend_from_slice(&v.to_be_bytes());
    }
    images.iter().for_each(|i| img.extend_from_slice(i));
    let mut lbl = Vec::new();
    for v in [2049u32, labels.len() as u32] {
        lbl.extend_from_slice(&v.to_be_bytes());
    }
    lbl.extend_from_slice(labels);
    std::fs::create_dir_all(dir).unwrap();
    std::fs::write(dir.join("train-images-idx3-ubyte"), img).unwrap();
    std::fs::write(dir.join("train-labels-idx1-ubyte"), lbl).unwrap();
}

/// `n` 28×28 images: a bright bar whose column depends on the label, with
/// a little index-dependent texture. Labels cycle 0–9.
pub fn synthetic_digits(dir: &Path, n: usize) {
    let mut images = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = (i % 10) as u8;
        let bar = 4 + 2 * label as usize;
        let mut img = vec![0u8; 784];
        for r in 2..26 {
            for c in 0..28usize {
                let d = c.abs_diff(bar);
                if d <= 1 {
                    img[r * 28 + c] = 255 - (d as u8) * 60 - ((i * 7 + r) % 13) as u8;
                }
            }
        }
        images.push(img);
        labels.push(label);
    }
    write_idx(dir, &images, &labels, 28, 28);
}

pub fn qgan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgan"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("running qgan")
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

pub fn files_in(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

/// Byte contents of every file in `dir` by file name.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    files_in(dir)
        .into_iter()
        .filter(|f| f.is_file())
        .map(|f| (f.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&f).unwrap()))
        .collect()
}
