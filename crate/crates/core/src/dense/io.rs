//! Flat matrix dumps.
//!
//! CSV: one line per row, `re,im` pairs interleaved column by column.
//! Binary: the same row-major `re, im` sequence as little-endian `f64`, no
//! header; the dimension is `sqrt(len / 16)`.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::DenseOperator;
use crate::error::{Error, Result};

impl DenseOperator {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                let z = self.get(r, c);
                if c > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{:e},{:e}", z.re, z.im);
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<DenseOperator> {
        let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let dim = rows.len();
        let sites = dim_to_sites(dim)?;
        let mut mat = DMatrix::zeros(dim, dim);
        for (r, line) in rows.iter().enumerate() {
            let vals = line
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| Error::Parse {
                        line: r + 1,
                        message: format!("bad number `{s}`"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if vals.len() != 2 * dim {
                return Err(Error::Parse {
                    line: r + 1,
                    message: format!("expected {} values, got {}", 2 * dim, vals.len()),
                });
            }
            for c in 0..dim {
                mat[(r, c)] = Complex64::new(vals[2 * c], vals[2 * c + 1]);
            }
        }
        DenseOperator::from_matrix(sites, mat)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.dim() * self.dim() * 16);
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                let z = self.get(r, c);
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<DenseOperator> {
        if bytes.len() % 16 != 0 {
            return Err(Error::Parse { line: 0, message: "length is not a multiple of 16".into() });
        }
        let entries = bytes.len() / 16;
        let dim = (entries as f64).sqrt().round() as usize;
        if dim * dim != entries {
            return Err(Error::Parse { line: 0, message: format!("{entries} entries is not square") });
        }
        let sites = dim_to_sites(dim)?;
        let f = |i: usize| f64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().expect("8 bytes"));
        let mat = DMatrix::from_fn(dim, dim, |r, c| {
            let k = r * dim + c;
            Complex64::new(f(2 * k), f(2 * k + 1))
        });
        DenseOperator::from_matrix(sites, mat)
    }
}

fn dim_to_sites(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::Parse { line: 0, message: format!("dimension {dim} is not a power of two") });
    }
    Ok(dim.trailing_zeros() as usize)
}
