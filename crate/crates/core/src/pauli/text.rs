//! Line-oriented operator text format.
//!
//! ```text
//! # sites 3
//! 1.0000000000000000e0 0.0000000000000000e0 ZZI
//! 5.0000000000000000e-1 0.0000000000000000e0 IIX
//! ```
//!
//! Each term line is `<re> <im> <label>`, label site 1 first. Numbers are
//! written with 17 significant digits so parsing recovers the exact `f64`.
//! Blank lines and lines starting with `#` are ignored, except the optional
//! `# sites N` header which fixes the site count of an empty sum.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::{PauliLabel, PauliSum};
use crate::error::{Error, Result};

impl PauliSum {
    pub fn to_text(&self) -> String {
        let mut out = format!("# sites {}\n", self.sites);
        for (label, c) in self.iter() {
            let _ = writeln!(out, "{:.16e} {:.16e} {}", c.re, c.im, label.render(self.sites));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<PauliSum> {
        let mut header_sites = None;
        let mut sites = None;
        let mut terms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let mut words = comment.split_whitespace();
                if words.next() == Some("sites") {
                    let n = words.next().and_then(|w| w.parse::<usize>().ok()).ok_or_else(|| {
                        Error::Parse { line: line_no, message: "malformed `# sites N` header".into() }
                    })?;
                    header_sites = Some(n);
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [re, im, label] = fields[..] else {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected `<re> <im> <label>`, got {} fields", fields.len()),
                });
            };
            let parse_f = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad number `{s}`"),
                })
            };
            let coeff = Complex64::new(parse_f(re)?, parse_f(im)?);
            let (label, n) = PauliLabel::parse(label).ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("bad Pauli label `{label}`"),
            })?;
            match sites {
                None => sites = Some(n),
                Some(m) if m != n => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("label has {n} sites, earlier lines have {m}"),
                    })
                }
                _ => {}
            }
            terms.push((label, coeff));
        }
        let sites = match (header_sites, sites) {
            (Some(h), Some(s)) if h != s => {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("header declares {h} sites, terms have {s}"),
                })
            }
            (_, Some(s)) | (Some(s), None) => s,
            (None, None) => {
                return Err(Error::Parse {
                    line: 0,
                    message: "no terms and no `# sites N` header".into(),
                })
            }
        };
        PauliSum::from_terms(sites, terms)
    }
}
