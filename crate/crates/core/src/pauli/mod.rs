//! Exact algebra over sums of Pauli strings.
//!
//! A string over `N` sites is stored as a pair of bitmasks: bit `j - 1` of the
//! x-mask (z-mask) is set when site `j` carries an X (Z) component, so
//! `Y = (1, 1)`. All public interfaces use 1-based sites.
//!
//! Structural facts (two strings commute, a label is the identity on a traced
//! site) are decided on the masks alone, never on floating-point values.
//! Coefficients are merged and pruned below [`PRUNE_EPS`] on canonicalization.

mod dense;
mod sites;
mod text;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use sites::SiteSet;

/// Canonicalization drops merged coefficients whose modulus is below this.
pub const PRUNE_EPS: f64 = 1e-14;

/// Strings are packed into `u64` masks.
pub const MAX_SYMBOLIC_SITES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Index in the (I, X, Y, Z) basis order.
    pub fn index(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Phase `i^k` for `k` taken mod 4.
pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Coefficient-free tensor product of single-site Paulis.
///
/// Ordered lexicographically with site 1 most significant and `I < X < Y < Z`
/// per site, which is the canonical term order of [`PauliSum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PauliLabel {
    x: u64,
    z: u64,
}

impl PauliLabel {
    pub const IDENTITY: PauliLabel = PauliLabel { x: 0, z: 0 };

    pub fn from_masks(x: u64, z: u64) -> Self {
        PauliLabel { x, z }
    }

    /// Single non-identity factor at a 1-based `site`.
    pub fn single(site: usize, p: Pauli) -> Self {
        PauliLabel::IDENTITY.with(site, p)
    }

    pub fn x_mask(self) -> u64 {
        self.x
    }

    pub fn z_mask(self) -> u64 {
        self.z
    }

    /// Bits of every site with a non-identity factor.
    pub fn support_mask(self) -> u64 {
        self.x | self.z
    }

    pub fn weight(self) -> u32 {
        self.support_mask().count_ones()
    }

    pub fn is_identity(self) -> bool {
        self.support_mask() == 0
    }

    pub fn get(self, site: usize) -> Pauli {
        let bit = 1u64 << (site - 1);
        Pauli::from_bits(self.x & bit != 0, self.z & bit != 0)
    }

    pub fn with(mut self, site: usize, p: Pauli) -> Self {
        let bit = 1u64 << (site - 1);
        let (x, z) = p.bits();
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
        self
    }

    pub fn commutes_with(self, other: PauliLabel) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Product `self · other` as `(label, k)` with phase `i^k`.
    ///
    /// With `P = i^{|x∧z|} X^x Z^z`, moving `Z^{z1}` past `X^{x2}` costs
    /// `(-1)^{|z1∧x2|}`.
    pub fn product(self, other: PauliLabel) -> (PauliLabel, u32) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let k = (self.x & self.z).count_ones() + (other.x & other.z).count_ones()
            + 2 * (self.z & other.x).count_ones()
            + 3 * (x & z).count_ones();
        (PauliLabel { x, z }, k % 4)
    }

    pub fn render(self, sites: usize) -> String {
        (1..=sites).map(|s| self.get(s).as_char()).collect()
    }

    pub fn parse(s: &str) -> Option<(PauliLabel, usize)> {
        let mut label = PauliLabel::IDENTITY;
        let mut n = 0;
        for (i, c) in s.chars().enumerate() {
            if i >= MAX_SYMBOLIC_SITES {
                return None;
            }
            label = label.with(i + 1, Pauli::from_char(c)?);
            n = i + 1;
        }
        (n > 0).then_some((label, n))
    }

    /// Drops the sites outside `keep` and packs the rest downwards.
    pub(crate) fn compress(self, keep: u64) -> PauliLabel {
        PauliLabel { x: pext(self.x, keep), z: pext(self.z, keep) }
    }

    /// Inverse of [`compress`](Self::compress): spreads the low bits over `keep`.
    pub(crate) fn expand(self, keep: u64) -> PauliLabel {
        PauliLabel { x: pdep(self.x, keep), z: pdep(self.z, keep) }
    }
}

impl Ord for PauliLabel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let diff = (self.x ^ other.x) | (self.z ^ other.z);
        if diff == 0 {
            return std::cmp::Ordering::Equal;
        }
        let site = diff.trailing_zeros() as usize + 1;
        self.get(site).index().cmp(&other.get(site).index())
    }
}

impl PartialOrd for PauliLabel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn pext(value: u64, mask: u64) -> u64 {
    let mut out = 0;
    let mut m = mask;
    let mut k = 0;
    while m != 0 {
        let bit = m & m.wrapping_neg();
        if value & bit != 0 {
            out |= 1 << k;
        }
        k += 1;
        m &= m - 1;
    }
    out
}

fn pdep(value: u64, mask: u64) -> u64 {
    let mut out = 0;
    let mut m = mask;
    let mut k = 0;
    while m != 0 {
        let bit = m & m.wrapping_neg();
        if value & (1 << k) != 0 {
            out |= bit;
        }
        k += 1;
        m &= m - 1;
    }
    out
}

pub(crate) fn full_mask(sites: usize) -> u64 {
    if sites >= 64 {
        u64::MAX
    } else {
        (1u64 << sites) - 1
    }
}

fn check_sites(sites: usize) -> Result<()> {
    if sites > MAX_SYMBOLIC_SITES {
        return Err(Error::SymbolicLimit { sites, limit: MAX_SYMBOLIC_SITES });
    }
    Ok(())
}

fn check_site(site: usize, sites: usize) -> Result<()> {
    if site == 0 || site > sites {
        return Err(Error::SiteOutOfRange { site, sites });
    }
    Ok(())
}

/// A Pauli string with a complex coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliString {
    pub label: PauliLabel,
    pub coeff: Complex64,
    sites: usize,
}

impl PauliString {
    pub fn new(sites: usize, label: PauliLabel, coeff: Complex64) -> Result<Self> {
        check_sites(sites)?;
        if label.support_mask() & !full_mask(sites) != 0 {
            return Err(Error::SiteOutOfRange {
                site: 64 - label.support_mask().leading_zeros() as usize,
                sites,
            });
        }
        Ok(PauliString { label, coeff, sites })
    }

    pub fn identity(sites: usize) -> Self {
        PauliString { label: PauliLabel::IDENTITY, coeff: Complex64::new(1.0, 0.0), sites }
    }

    /// Parses a label such as `"ZZI"` with unit coefficient.
    pub fn from_label(label: &str) -> Result<Self> {
        let (label, sites) = PauliLabel::parse(label).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("bad Pauli label `{label}`"),
        })?;
        Ok(PauliString { label, coeff: Complex64::new(1.0, 0.0), sites })
    }

    /// `coeff · P` with one non-identity factor.
    pub fn single(sites: usize, site: usize, p: Pauli, coeff: Complex64) -> Result<Self> {
        check_sites(sites)?;
        check_site(site, sites)?;
        Ok(PauliString { label: PauliLabel::single(site, p), coeff, sites })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn label_string(&self) -> String {
        self.label.render(self.sites)
    }
}

/// Product of two strings; the phase `±1, ±i` is folded into the coefficient.
pub fn pauli_mul(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    if a.sites != b.sites {
        return Err(Error::SiteCountMismatch { left: a.sites, right: b.sites });
    }
    let (label, k) = a.label.product(b.label);
    Ok(PauliString { label, coeff: a.coeff * b.coeff * i_pow(k), sites: a.sites })
}

/// Canonical sum of Pauli strings on a fixed number of sites.
///
/// Terms are keyed by label, so no two terms share a label; coefficients with
/// modulus below [`PRUNE_EPS`] are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    sites: usize,
    terms: BTreeMap<PauliLabel, Complex64>,
}

impl PauliSum {
    pub fn zero(sites: usize) -> Self {
        assert!(sites <= MAX_SYMBOLIC_SITES, "at most {MAX_SYMBOLIC_SITES} sites");
        PauliSum { sites, terms: BTreeMap::new() }
    }

    pub fn identity(sites: usize) -> Self {
        PauliSum::from(PauliString::identity(sites))
    }

    /// Builds a canonical sum, merging repeated labels.
    pub fn from_terms<I>(sites: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliLabel, Complex64)>,
    {
        check_sites(sites)?;
        let mask = full_mask(sites);
        let mut acc = Accumulator::default();
        for (label, coeff) in terms {
            if label.support_mask() & !mask != 0 {
                return Err(Error::SiteOutOfRange {
                    site: 64 - label.support_mask().leading_zeros() as usize,
                    sites,
                });
            }
            acc.add(label, coeff);
        }
        Ok(acc.finish(sites))
    }

    /// Parses `[(coeff, "XIZ"), ...]`; all labels must have equal length.
    pub fn from_labels<C: Into<Complex64> + Copy>(terms: &[(C, &str)]) -> Result<Self> {
        let mut sites = None;
        let mut parsed = Vec::with_capacity(terms.len());
        for (line, (c, s)) in terms.iter().enumerate() {
            let (label, n) = PauliLabel::parse(s).ok_or_else(|| Error::Parse {
                line: line + 1,
                message: format!("bad Pauli label `{s}`"),
            })?;
            match sites {
                None => sites = Some(n),
                Some(m) if m != n => return Err(Error::SiteCountMismatch { left: m, right: n }),
                _ => {}
            }
            parsed.push((label, (*c).into()));
        }
        let sites = sites.ok_or_else(|| Error::Parse {
            line: 0,
            message: "empty term list does not fix a site count".into(),
        })?;
        PauliSum::from_terms(sites, parsed)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PauliLabel, Complex64)> + '_ {
        self.terms.iter().map(|(l, c)| (*l, *c))
    }

    pub fn strings(&self) -> impl Iterator<Item = PauliString> + '_ {
        self.iter().map(move |(label, coeff)| PauliString { label, coeff, sites: self.sites })
    }

    pub fn coeff(&self, label: PauliLabel) -> Complex64 {
        self.terms.get(&label).copied().unwrap_or_default()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Bits of every site touched by some term.
    pub fn support_mask(&self) -> u64 {
        self.terms.keys().fold(0, |m, l| m | l.support_mask())
    }

    /// Pauli strings are Hermitian, so the sum is Hermitian iff every
    /// coefficient is real.
    pub fn is_hermitian(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    pub fn is_hermitian_within(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Coefficient-wise conjugate, i.e. the adjoint.
    pub fn adjoint(&self) -> PauliSum {
        PauliSum {
            sites: self.sites,
            terms: self.terms.iter().map(|(l, c)| (*l, c.conj())).collect(),
        }
    }

    /// Full trace: `2^N` times the identity coefficient.
    pub fn trace(&self) -> Complex64 {
        self.coeff(PauliLabel::IDENTITY) * 2f64.powi(self.sites as i32)
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        let mut acc = Accumulator::default();
        for (l, c) in self.iter() {
            acc.add(l, c * factor);
        }
        acc.finish(self.sites)
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut acc = Accumulator::from_sum(self);
        for (l, c) in other.iter() {
            acc.add(l, c);
        }
        Ok(acc.finish(self.sites))
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut acc = Accumulator::from_sum(self);
        for (l, c) in other.iter() {
            acc.add(l, -c);
        }
        Ok(acc.finish(self.sites))
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut acc = Accumulator::default();
        for (la, ca) in self.iter() {
            for (lb, cb) in other.iter() {
                let (l, k) = la.product(lb);
                acc.add(l, ca * cb * i_pow(k));
            }
        }
        Ok(acc.finish(self.sites))
    }

    /// `[self, other]`. Commuting string pairs are skipped outright; each
    /// anticommuting pair contributes `2 · phase · product`.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut acc = Accumulator::default();
        for (la, ca) in self.iter() {
            for (lb, cb) in other.iter() {
                if la.commutes_with(lb) {
                    continue;
                }
                let (l, k) = la.product(lb);
                acc.add(l, 2.0 * ca * cb * i_pow(k));
            }
        }
        Ok(acc.finish(self.sites))
    }

    /// Symbolic partial trace over `traced`.
    ///
    /// Keeps only terms that are the identity on every traced site, scales them
    /// by `2^|traced|` and packs the labels onto the remaining sites.
    pub fn partial_trace(&self, traced: &SiteSet) -> Result<PauliSum> {
        if traced.sites() != self.sites {
            return Err(Error::SiteCountMismatch { left: self.sites, right: traced.sites() });
        }
        let traced_mask = traced.mask();
        let keep = full_mask(self.sites) & !traced_mask;
        let scale = 2f64.powi(traced.len() as i32);
        let mut acc = Accumulator::default();
        for (l, c) in self.iter() {
            if l.support_mask() & traced_mask == 0 {
                acc.add(l.compress(keep), c * scale);
            }
        }
        Ok(acc.finish(self.sites - traced.len()))
    }

    /// Splits `self = C0 ⊗ I + C1 ⊗ X + C2 ⊗ Y + C3 ⊗ Z` at `site`, returning
    /// `[C0, C1, C2, C3]` on the remaining `N - 1` sites.
    pub fn decompose_at_site(&self, site: usize) -> Result<[PauliSum; 4]> {
        check_site(site, self.sites)?;
        let keep = full_mask(self.sites) & !(1u64 << (site - 1));
        let mut parts: [BTreeMap<PauliLabel, Complex64>; 4] = Default::default();
        for (l, c) in self.iter() {
            let mu = l.get(site).index();
            parts[mu].insert(l.compress(keep), c);
        }
        let sites = self.sites - 1;
        Ok(parts.map(|terms| PauliSum { sites, terms }))
    }

    /// Inverse of [`decompose_at_site`](Self::decompose_at_site).
    pub fn compose_at_site(parts: [&PauliSum; 4], site: usize) -> Result<PauliSum> {
        let sites = parts[0].sites;
        for p in &parts[1..] {
            parts[0].check_same(p)?;
        }
        check_sites(sites + 1)?;
        check_site(site, sites + 1)?;
        let keep = full_mask(sites + 1) & !(1u64 << (site - 1));
        let mut acc = Accumulator::default();
        for (mu, part) in parts.iter().enumerate() {
            for (l, c) in part.iter() {
                acc.add(l.expand(keep).with(site, Pauli::ALL[mu]), c);
            }
        }
        Ok(acc.finish(sites + 1))
    }

    /// Tensor product `self ⊗ other` with `self` on the leading sites.
    pub fn tensor(&self, other: &PauliSum) -> Result<PauliSum> {
        let sites = self.sites + other.sites;
        check_sites(sites)?;
        let shift = self.sites;
        let mut acc = Accumulator::default();
        for (la, ca) in self.iter() {
            for (lb, cb) in other.iter() {
                let l = PauliLabel::from_masks(la.x | (lb.x << shift), la.z | (lb.z << shift));
                acc.add(l, ca * cb);
            }
        }
        Ok(acc.finish(sites))
    }

    /// Re-embeds an operator living on the sites of `positions` (ascending)
    /// into an `N`-site sum, identity elsewhere.
    pub fn embed(&self, positions: &SiteSet) -> Result<PauliSum> {
        if positions.len() != self.sites {
            return Err(Error::SiteCountMismatch { left: self.sites, right: positions.len() });
        }
        let keep = positions.mask();
        let terms = self.iter().map(|(l, c)| (l.expand(keep), c));
        PauliSum::from_terms(positions.sites(), terms)
    }

    fn check_same(&self, other: &PauliSum) -> Result<()> {
        if self.sites != other.sites {
            return Err(Error::SiteCountMismatch { left: self.sites, right: other.sites });
        }
        Ok(())
    }
}

impl From<PauliString> for PauliSum {
    fn from(s: PauliString) -> Self {
        let mut acc = Accumulator::default();
        acc.add(s.label, s.coeff);
        acc.finish(s.sites)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (l, c)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}·{}", c.re, l.render(self.sites))?;
            } else {
                write!(f, "({}{:+}i)·{}", c.re, c.im, l.render(self.sites))?;
            }
        }
        Ok(())
    }
}

/// Free commutator, matching the method on [`PauliSum`].
pub fn commutator(a: &PauliSum, b: &PauliSum) -> Result<PauliSum> {
    a.commutator(b)
}

#[derive(Default)]
struct Accumulator {
    terms: BTreeMap<PauliLabel, Complex64>,
}

impl Accumulator {
    fn from_sum(sum: &PauliSum) -> Self {
        Accumulator { terms: sum.terms.clone() }
    }

    fn add(&mut self, label: PauliLabel, coeff: Complex64) {
        *self.terms.entry(label).or_default() += coeff;
    }

    fn finish(mut self, sites: usize) -> PauliSum {
        self.terms.retain(|_, c| c.norm() >= PRUNE_EPS);
        PauliSum { sites, terms: self.terms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sum(terms: &[(Complex64, &str)]) -> PauliSum {
        PauliSum::from_labels(terms).unwrap()
    }

    #[test]
    fn single_site_products() {
        let x = PauliString::from_label("X").unwrap();
        let y = PauliString::from_label("Y").unwrap();
        let xx = pauli_mul(&x, &x).unwrap();
        assert!(xx.label.is_identity());
        assert_eq!(xx.coeff, c(1.0, 0.0));
        let xy = pauli_mul(&x, &y).unwrap();
        assert_eq!(xy.label_string(), "Z");
        assert_eq!(xy.coeff, c(0.0, 1.0));
        let yx = pauli_mul(&y, &x).unwrap();
        assert_eq!(yx.coeff, c(0.0, -1.0));
    }

    #[test]
    fn two_site_product_phase() {
        // Dense check: (Z⊗Z)(I⊗X) = Z⊗(ZX) = Z⊗(iY).
        let zz = PauliString::from_label("ZZ").unwrap();
        let x2 = PauliString::from_label("IX").unwrap();
        let p = pauli_mul(&zz, &x2).unwrap();
        assert_eq!(p.label_string(), "ZY");
        assert_eq!(p.coeff, c(0.0, 1.0));
    }

    #[test]
    fn product_length_mismatch() {
        let a = PauliString::from_label("X").unwrap();
        let b = PauliString::from_label("XX").unwrap();
        assert_eq!(pauli_mul(&a, &b), Err(Error::SiteCountMismatch { left: 1, right: 2 }));
    }

    #[test]
    fn commutator_examples() {
        let z1 = sum(&[(c(1.0, 0.0), "ZI")]);
        let zz = sum(&[(c(1.0, 0.0), "ZZ")]);
        assert!(z1.commutator(&zz).unwrap().is_zero());

        let x = sum(&[(c(1.0, 0.0), "X")]);
        let z = sum(&[(c(1.0, 0.0), "Z")]);
        assert_eq!(x.commutator(&z).unwrap(), sum(&[(c(0.0, -2.0), "Y")]));

        let x2 = sum(&[(c(1.0, 0.0), "IX")]);
        // Z ⊗ (XZ − ZX) = Z ⊗ (−2iY); the reversed order flips the sign.
        assert_eq!(x2.commutator(&zz).unwrap(), sum(&[(c(0.0, -2.0), "ZY")]));
        assert_eq!(zz.commutator(&x2).unwrap(), sum(&[(c(0.0, 2.0), "ZY")]));
    }

    #[test]
    fn partial_trace_examples() {
        let traced = SiteSet::from_sites(2, &[2]).unwrap();
        let zi = sum(&[(c(1.0, 0.0), "ZI")]);
        assert_eq!(zi.partial_trace(&traced).unwrap(), sum(&[(c(2.0, 0.0), "Z")]));
        let zz = sum(&[(c(1.0, 0.0), "ZZ")]);
        assert!(zz.partial_trace(&traced).unwrap().is_zero());

        let traced = SiteSet::from_sites(3, &[2, 3]).unwrap();
        let op = sum(&[(c(1.0, 0.0), "XII"), (c(1.0, 0.0), "YZI")]);
        assert_eq!(op.partial_trace(&traced).unwrap(), sum(&[(c(4.0, 0.0), "X")]));
    }

    #[test]
    fn partial_trace_of_everything_is_the_trace() {
        let op = sum(&[(c(0.5, 0.25), "III"), (c(1.0, 0.0), "XYZ")]);
        let all = SiteSet::all(3);
        let tr = op.partial_trace(&all).unwrap();
        assert_eq!(tr.sites(), 0);
        assert_eq!(tr.coeff(PauliLabel::IDENTITY), op.trace());
        assert_eq!(op.trace(), c(4.0, 2.0));
    }

    #[test]
    fn decompose_examples() {
        let zz = sum(&[(c(1.0, 0.0), "ZZ")]);
        let [c0, c1, c2, c3] = zz.decompose_at_site(2).unwrap();
        assert!(c0.is_zero() && c1.is_zero() && c2.is_zero());
        assert_eq!(c3, sum(&[(c(1.0, 0.0), "Z")]));

        let h = sum(&[(c(1.0, 0.0), "ZZI"), (c(1.0, 0.0), "IZZ")]);
        let [c0, c1, c2, c3] = h.decompose_at_site(2).unwrap();
        assert!(c0.is_zero() && c1.is_zero() && c2.is_zero());
        assert_eq!(c3, sum(&[(c(1.0, 0.0), "ZI"), (c(1.0, 0.0), "IZ")]));

        let x2 = sum(&[(c(1.0, 0.0), "IX")]);
        let [c0, c1, c2, c3] = x2.decompose_at_site(2).unwrap();
        assert!(c0.is_zero() && c2.is_zero() && c3.is_zero());
        assert_eq!(c1, PauliSum::identity(1));

        assert!(matches!(h.decompose_at_site(4), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(h.decompose_at_site(0), Err(Error::SiteOutOfRange { .. })));
    }

    #[test]
    fn compose_inverts_decompose() {
        let op = sum(&[(c(1.0, 0.5), "XYZI"), (c(-2.0, 0.0), "IZIX"), (c(0.3, 0.0), "ZZZZ")]);
        for site in 1..=4 {
            let parts = op.decompose_at_site(site).unwrap();
            let back =
                PauliSum::compose_at_site([&parts[0], &parts[1], &parts[2], &parts[3]], site)
                    .unwrap();
            assert_eq!(back, op);
        }
    }

    #[test]
    fn pruning_and_merging() {
        let s = PauliSum::from_terms(
            1,
            [
                (PauliLabel::single(1, Pauli::X), c(1.0, 0.0)),
                (PauliLabel::single(1, Pauli::X), c(-1.0, 1e-15)),
                (PauliLabel::single(1, Pauli::Z), c(2.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.coeff(PauliLabel::single(1, Pauli::Z)), c(2.0, 0.0));
    }

    #[test]
    fn label_order_is_lexicographic() {
        let mut labels: Vec<_> = ["ZI", "IX", "XZ", "II", "YY", "IZ"]
            .iter()
            .map(|s| PauliLabel::parse(s).unwrap().0)
            .collect();
        labels.sort();
        let names: Vec<_> = labels.iter().map(|l| l.render(2)).collect();
        assert_eq!(names, ["II", "IX", "IZ", "XZ", "YY", "ZI"]);
    }

    #[test]
    fn embed_and_tensor() {
        let zz = sum(&[(c(1.0, 0.0), "ZZ")]);
        let positions = SiteSet::from_sites(4, &[2, 4]).unwrap();
        assert_eq!(zz.embed(&positions).unwrap(), sum(&[(c(1.0, 0.0), "IZIZ")]));
        let x = sum(&[(c(2.0, 0.0), "X")]);
        assert_eq!(zz.tensor(&x).unwrap(), sum(&[(c(2.0, 0.0), "ZZX")]));
    }

    #[test]
    fn hermitian_flag() {
        assert!(sum(&[(c(1.0, 0.0), "XZ")]).is_hermitian());
        let a = sum(&[(c(0.0, 1.0), "XZ")]);
        assert!(!a.is_hermitian());
        assert_eq!(a.adjoint(), a.scale(c(-1.0, 0.0)));
    }
}
