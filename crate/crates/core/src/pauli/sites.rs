use crate::error::{Error, Result};

use super::{full_mask, MAX_SYMBOLIC_SITES};

/// A subset of the 1-based sites `1..=N` of a chain.
///
/// The blocks used throughout the crate are the system `S = 1..n-1`, the
/// environment `E = n..N`, and `Ẽ = n+1..N`, i.e. `E` without spin `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SiteSet {
    sites: usize,
    mask: u64,
}

impl SiteSet {
    pub fn empty(sites: usize) -> Self {
        assert!(sites <= MAX_SYMBOLIC_SITES);
        SiteSet { sites, mask: 0 }
    }

    pub fn all(sites: usize) -> Self {
        assert!(sites <= MAX_SYMBOLIC_SITES);
        SiteSet { sites, mask: full_mask(sites) }
    }

    pub fn from_sites(sites: usize, members: &[usize]) -> Result<Self> {
        if sites > MAX_SYMBOLIC_SITES {
            return Err(Error::SymbolicLimit { sites, limit: MAX_SYMBOLIC_SITES });
        }
        let mut mask = 0;
        for &s in members {
            if s == 0 || s > sites {
                return Err(Error::SiteOutOfRange { site: s, sites });
            }
            mask |= 1u64 << (s - 1);
        }
        Ok(SiteSet { sites, mask })
    }

    /// Sites `lo..=hi`; empty when `lo > hi`.
    pub fn range(sites: usize, lo: usize, hi: usize) -> Result<Self> {
        if lo > hi {
            return Ok(SiteSet::empty(sites));
        }
        let members: Vec<usize> = (lo..=hi).collect();
        SiteSet::from_sites(sites, &members)
    }

    /// `S = 1..n-1` for the cut at spin `n`.
    pub fn system(sites: usize, cut: usize) -> Result<Self> {
        check_cut(sites, cut)?;
        SiteSet::range(sites, 1, cut - 1)
    }

    /// `E = n..N`.
    pub fn environment(sites: usize, cut: usize) -> Result<Self> {
        check_cut(sites, cut)?;
        SiteSet::range(sites, cut, sites)
    }

    /// `Ẽ = n+1..N`.
    pub fn environment_tilde(sites: usize, cut: usize) -> Result<Self> {
        check_cut(sites, cut)?;
        SiteSet::range(sites, cut + 1, sites)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Bit `j - 1` is set for member `j`.
    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, site: usize) -> bool {
        site >= 1 && site <= self.sites && self.mask & (1u64 << (site - 1)) != 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.sites).filter(move |&s| self.contains(s))
    }

    pub fn complement(&self) -> SiteSet {
        SiteSet { sites: self.sites, mask: full_mask(self.sites) & !self.mask }
    }

    pub fn union(&self, other: &SiteSet) -> SiteSet {
        debug_assert_eq!(self.sites, other.sites);
        SiteSet { sites: self.sites, mask: self.mask | other.mask }
    }

    pub fn is_subset(&self, other: &SiteSet) -> bool {
        self.sites == other.sites && self.mask & !other.mask == 0
    }

    /// The same set seen on the chain with `site` deleted: members above it
    /// shift down by one.
    pub fn without_site(&self, site: usize) -> Result<SiteSet> {
        if site == 0 || site > self.sites {
            return Err(Error::SiteOutOfRange { site, sites: self.sites });
        }
        let members: Vec<usize> = self
            .iter()
            .filter(|&s| s != site)
            .map(|s| if s > site { s - 1 } else { s })
            .collect();
        SiteSet::from_sites(self.sites - 1, &members)
    }
}

fn check_cut(sites: usize, cut: usize) -> Result<()> {
    if cut < 2 || cut > sites {
        return Err(Error::InvalidConfig(format!(
            "cut n = {cut} must satisfy 2 <= n <= N = {sites}"
        )));
    }
    Ok(())
}
