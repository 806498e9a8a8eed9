//! The nested-commutator series `A_0 = R`, `A_{k+1} = [A_k, H]` and its
//! exact tracelessness checks.
//!
//! All verdicts here are structural: a partial trace "vanishes" when no term
//! survives canonical pruning, never because a norm fell below a threshold.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{partial_trace, DenseOperator};
use crate::error::{Error, Result};
use crate::model::split_at_spin;
use crate::pauli::{PauliSum, SiteSet};

/// Default series depth `K`.
pub const DEFAULT_DEPTH: usize = 12;

/// Default cap on the number of terms in any single `A_k`.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// Dense tolerance for the trace identities in [`verify_lemma1`].
pub const LEMMA1_DENSE_TOL: f64 = 1e-12;

/// `[A_0, …, A_K]` with the default term cap.
pub fn compute_a_series(r: &PauliSum, h: &PauliSum, depth: usize) -> Result<Vec<PauliSum>> {
    compute_a_series_capped(r, h, depth, DEFAULT_TERM_CAP)
}

/// `[A_0, …, A_K]`, failing with [`Error::TermCap`] at the first order whose
/// term count exceeds `cap`.
pub fn compute_a_series_capped(
    r: &PauliSum,
    h: &PauliSum,
    depth: usize,
    cap: usize,
) -> Result<Vec<PauliSum>> {
    if r.sites() != h.sites() {
        return Err(Error::SiteCountMismatch { left: r.sites(), right: h.sites() });
    }
    if r.len() > cap {
        return Err(Error::TermCap { order: 0, terms: r.len(), cap });
    }
    let mut out = Vec::with_capacity(depth + 1);
    out.push(r.clone());
    for k in 1..=depth {
        let next = out[k - 1].commutator(h)?;
        if next.len() > cap {
            return Err(Error::TermCap { order: k, terms: next.len(), cap });
        }
        out.push(next);
    }
    Ok(out)
}

/// One order of a [`SeriesReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderRecord {
    pub k: usize,
    pub terms: usize,
    /// `Tr_E(A_k)` has no surviving terms.
    pub tr_e_zero: bool,
    /// `Tr_Ẽ(C^(0))` has no surviving terms.
    pub c0_traceless: bool,
    /// `Tr_Ẽ(C^(3))` has no surviving terms.
    pub c3_traceless: bool,
    /// Largest coefficient magnitude left in `Tr_E(A_k)`; zero when empty.
    pub max_residual_coeff: f64,
}

/// Per-order tracelessness of a series with respect to the cut at spin `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub sites: usize,
    pub cut: usize,
    pub depth: usize,
    pub orders: Vec<OrderRecord>,
}

impl SeriesReport {
    pub fn all_traceless(&self) -> bool {
        self.orders.iter().all(|o| o.tr_e_zero)
    }

    /// Both flags of the graded decomposition hold at every order.
    pub fn all_graded_traceless(&self) -> bool {
        self.orders.iter().all(|o| o.c0_traceless && o.c3_traceless)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.orders.iter().find(|o| !o.tr_e_zero).map(|o| o.k)
    }

    /// `(C^(0), C^(3)` traceless at `k`) implies the same at `k + 1`, for
    /// every consecutive pair of recorded orders.
    pub fn induction_holds(&self) -> bool {
        self.orders.windows(2).all(|w| {
            let held = w[0].c0_traceless && w[0].c3_traceless;
            !held || (w[1].c0_traceless && w[1].c3_traceless)
        })
    }

    /// Whitespace-separated table with a one-line header.
    pub fn to_text(&self) -> String {
        let mut out = String::from("k terms trE_zero c0_zero c3_zero max_residual\n");
        for o in &self.orders {
            writeln!(
                out,
                "{} {} {} {} {} {:e}",
                o.k, o.terms, o.tr_e_zero, o.c0_traceless, o.c3_traceless, o.max_residual_coeff
            )
            .expect("writing to a String");
        }
        out
    }
}

/// `Ẽ` re-indexed onto the `N - 1` sites left after deleting spin `n`.
fn tilde_on_reduced(sites: usize, cut: usize) -> Result<SiteSet> {
    SiteSet::environment_tilde(sites, cut)?.without_site(cut)
}

/// Checks `Tr_E(A_k) = 0` for each order, with `E = {n, …, N}`, and records
/// `Tr_Ẽ C^(0)`, `Tr_Ẽ C^(3)` from the decomposition of `A_k` at spin `n`.
pub fn check_traceless_series(series: &[PauliSum], cut: usize) -> Result<SeriesReport> {
    let sites = series.first().map(PauliSum::sites).ok_or_else(|| {
        Error::Precondition("series must contain at least A_0".into())
    })?;
    let env = SiteSet::environment(sites, cut)?;
    let tilde = tilde_on_reduced(sites, cut)?;
    let mut orders = Vec::with_capacity(series.len());
    for (k, a) in series.iter().enumerate() {
        let residual = a.partial_trace(&env)?;
        let parts = a.decompose_at_site(cut)?;
        orders.push(OrderRecord {
            k,
            terms: a.len(),
            tr_e_zero: residual.is_zero(),
            c0_traceless: parts[0].partial_trace(&tilde)?.is_zero(),
            c3_traceless: parts[3].partial_trace(&tilde)?.is_zero(),
            max_residual_coeff: residual.max_abs_coeff(),
        });
    }
    Ok(SeriesReport { sites, cut, depth: series.len() - 1, orders })
}

/// Outcome of one inductive step `A_k ↦ A_{k+1} = [A_k, H]` at spin `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Step {
    /// `D^(3)` from the closed formula equals the `Z` component of `[A_k, H]`
    /// coefficient for coefficient.
    pub d3_routes_equal: bool,
    /// Largest coefficient of the difference between the two `D^(3)` routes.
    pub d3_max_deviation: f64,
    /// Same comparison for `D^(0) = [C^(0), H̃] + [C^(3), F]`.
    pub d0_routes_equal: bool,
    pub c0_traceless: bool,
    pub c3_traceless: bool,
    pub d0_traceless: bool,
    pub d3_traceless: bool,
}

impl Lemma2Step {
    /// Tracelessness of the inputs carries over to the outputs.
    pub fn induction_holds(&self) -> bool {
        !(self.c0_traceless && self.c3_traceless) || (self.d0_traceless && self.d3_traceless)
    }
}

/// Writes `H = Z_n ⊗ F + I_n ⊗ H̃` with `F = J_{n-1} Z_{n-1} + J_n Z_{n+1}`,
/// and compares the closed forms
///
/// - `D^(3) = [C^(0), F] + [C^(3), H̃]`
/// - `D^(0) = [C^(0), H̃] + [C^(3), F]`
///
/// with the decomposition of `[A_k, H]` at spin `n`.
pub fn check_lemma2_step(a_k: &PauliSum, h: &PauliSum, cut: usize) -> Result<Lemma2Step> {
    let split = split_at_spin(h, cut)?;
    let f = split.neighbour_field();
    let h_tilde = split.h_tilde();
    let c = a_k.decompose_at_site(cut)?;
    let d = a_k.commutator(h)?.decompose_at_site(cut)?;

    let d3 = c[0].commutator(&f)?.add(&c[3].commutator(&h_tilde)?)?;
    let d0 = c[0].commutator(&h_tilde)?.add(&c[3].commutator(&f)?)?;

    let tilde = tilde_on_reduced(h.sites(), cut)?;
    let traceless = |op: &PauliSum| op.partial_trace(&tilde).map(|t| t.is_zero());
    Ok(Lemma2Step {
        d3_routes_equal: d3 == d[3],
        d3_max_deviation: d3.sub(&d[3])?.max_abs_coeff(),
        d0_routes_equal: d0 == d[0],
        c0_traceless: traceless(&c[0])?,
        c3_traceless: traceless(&c[3])?,
        d0_traceless: traceless(&d[0])?,
        d3_traceless: traceless(&d[3])?,
    })
}

/// The three trace identities for an `E`-traceless `A`:
/// `Tr_E(A H_S) = 0`, `Tr_E(H_S A) = 0`, `Tr_E([A, H_E]) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    /// Structural emptiness of each symbolic partial trace.
    pub symbolic: [bool; 3],
    /// Max-entry norm of each dense partial trace.
    pub dense: [f64; 3],
}

impl Lemma1Report {
    pub fn holds(&self) -> bool {
        self.symbolic.iter().all(|&b| b) && self.dense.iter().all(|&d| d <= LEMMA1_DENSE_TOL)
    }
}

/// Audits the three trace identities on both engines.
///
/// `h_s` and `h_e` are given on all `N` sites and must be supported inside the
/// system and inside `environment` respectively; `a` must satisfy
/// `Tr_E(a) = 0` exactly.
pub fn verify_lemma1(
    a: &PauliSum,
    h_s: &PauliSum,
    h_e: &PauliSum,
    environment: &SiteSet,
) -> Result<Lemma1Report> {
    let e_mask = environment.mask();
    if h_s.support_mask() & e_mask != 0 {
        return Err(Error::Precondition("H_S acts on the environment".into()));
    }
    if h_e.support_mask() & !e_mask != 0 {
        return Err(Error::Precondition("H_E acts outside the environment".into()));
    }
    if !a.partial_trace(environment)?.is_zero() {
        return Err(Error::Precondition("Tr_E(A) is not zero".into()));
    }
    let products = [a.mul(h_s)?, h_s.mul(a)?, a.commutator(h_e)?];
    let mut symbolic = [false; 3];
    for (flag, p) in symbolic.iter_mut().zip(&products) {
        *flag = p.partial_trace(environment)?.is_zero();
    }

    let (ad, hsd, hed) = (a.to_dense()?, h_s.to_dense()?, h_e.to_dense()?);
    let dense_products = [ad.mul(&hsd), hsd.mul(&ad), ad.commutator(&hed)];
    let mut dense = [0.0; 3];
    for (slot, p) in dense.iter_mut().zip(&dense_products) {
        *slot = partial_trace(p, environment)?.max_abs();
    }
    Ok(Lemma1Report { symbolic, dense })
}

/// `Σ_{k=0}^{K} (it)^k / k! · A_k`, the truncated expansion of
/// `e^{-iHt} R e^{iHt}`.
pub fn bch_partial_sum(r: &PauliSum, h: &PauliSum, t: f64, depth: usize) -> Result<DenseOperator> {
    let series = compute_a_series(r, h, depth)?;
    let mut total = PauliSum::zero(r.sites());
    let mut weight = Complex64::new(1.0, 0.0);
    for (k, a) in series.iter().enumerate() {
        if k > 0 {
            weight *= Complex64::new(0.0, t) / k as f64;
        }
        total = total.add(&a.scale(weight))?;
    }
    total.to_dense()
}
