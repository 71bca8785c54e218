//! Truncated two-mode bosonic Fock space: Stokes operators, probe-state
//! factories, expectation values, and the Fock-Dicke basis bridge.
//!
//! Mode `a` is the horizontal polarization mode, `b` the vertical one. The
//! basis truncates each mode at `cutoff` photons (exclusive), so the full
//! space has dimension `cutoff^2`. Density matrices are stored blockwise by
//! total-photon sector pair; every channel except diattenuation is
//! number-conserving and acts block-diagonally in that layout.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::{c, C64, CMat, CVec};

/// Truncated two-mode Fock basis. `cutoff` is the exclusive per-mode photon
/// limit; the full dimension is `cutoff^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockBasis {
    cutoff: usize,
}

impl FockBasis {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::InvalidArgument(format!(
                "cutoff must be at least 2, got {cutoff}"
            )));
        }
        Ok(FockBasis { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff * self.cutoff
    }

    /// Largest total photon number representable.
    pub fn max_total(&self) -> usize {
        2 * (self.cutoff - 1)
    }

    /// Flat index of `|n1, n2>`.
    pub fn index(&self, n1: usize, n2: usize) -> usize {
        debug_assert!(n1 < self.cutoff && n2 < self.cutoff);
        n1 * self.cutoff + n2
    }

    /// Inverse of [`FockBasis::index`].
    pub fn labels(&self, index: usize) -> (usize, usize) {
        (index / self.cutoff, index % self.cutoff)
    }

    /// Fock labels in the total-photon sector `n`, ordered by `n1` ascending.
    /// In Dicke language these are `|S, m>` with `S = n/2`, `m = n1 - S`
    /// ascending from `-S` to `S` (truncated when `n >= cutoff`).
    pub fn sector_states(&self, n: usize) -> Vec<(usize, usize)> {
        let lo = n.saturating_sub(self.cutoff - 1);
        let hi = n.min(self.cutoff - 1);
        (lo..=hi).map(|n1| (n1, n - n1)).collect()
    }

    pub fn sector_dim(&self, n: usize) -> usize {
        if n > self.max_total() {
            0
        } else {
            let lo = n.saturating_sub(self.cutoff - 1);
            let hi = n.min(self.cutoff - 1);
            hi - lo + 1
        }
    }

    /// True when the sector `n` holds the complete spin-`n/2` multiplet.
    pub fn sector_complete(&self, n: usize) -> bool {
        n < self.cutoff
    }

    fn require_same(&self, other: &FockBasis) -> Result<()> {
        if self.cutoff != other.cutoff {
            return Err(Error::BasisMismatch {
                left: self.cutoff,
                right: other.cutoff,
            });
        }
        Ok(())
    }
}

/// Dicke labels `(2S, 2m)` of `|n1, n2>`, doubled so half-integers stay exact.
pub fn dicke_labels(n1: usize, n2: usize) -> (i64, i64) {
    ((n1 + n2) as i64, n1 as i64 - n2 as i64)
}

/// Fock labels of `|S, m>` given doubled arguments `(2S, 2m)`.
pub fn fock_labels(two_s: i64, two_m: i64) -> Result<(usize, usize)> {
    if two_m.abs() > two_s || (two_s + two_m) % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "invalid Dicke labels 2S={two_s}, 2m={two_m}"
        )));
    }
    Ok((((two_s + two_m) / 2) as usize, ((two_s - two_m) / 2) as usize))
}

/// Dense operator on the truncated two-mode space.
#[derive(Debug, Clone)]
pub struct TwoModeOperator {
    pub basis: FockBasis,
    pub matrix: CMat,
}

impl TwoModeOperator {
    pub fn new(basis: FockBasis, matrix: CMat) -> Self {
        assert_eq!(matrix.nrows(), basis.dim());
        assert_eq!(matrix.ncols(), basis.dim());
        TwoModeOperator { basis, matrix }
    }
}

/// Annihilation operator of the horizontal mode.
pub fn annihilation_a(basis: FockBasis) -> CMat {
    let d = basis.dim();
    let k = basis.cutoff();
    let mut m = CMat::zeros(d, d);
    for n1 in 1..k {
        for n2 in 0..k {
            m[(basis.index(n1 - 1, n2), basis.index(n1, n2))] = c((n1 as f64).sqrt(), 0.0);
        }
    }
    m
}

/// Annihilation operator of the vertical mode.
pub fn annihilation_b(basis: FockBasis) -> CMat {
    let d = basis.dim();
    let k = basis.cutoff();
    let mut m = CMat::zeros(d, d);
    for n1 in 0..k {
        for n2 in 1..k {
            m[(basis.index(n1, n2 - 1), basis.index(n1, n2))] = c((n2 as f64).sqrt(), 0.0);
        }
    }
    m
}

/// Stokes operators `[S0, S1, S2, S3]` on the truncated space.
///
/// `S0 = (a'a + b'b)/2`, `S1 = (a'b + b'a)/2`, `S2 = -i(a'b - b'a)/2`,
/// `S3 = (a'a - b'b)/2`. Entrywise exact on states with `n1 + n2 < cutoff`.
pub fn build_stokes_operators(basis: FockBasis) -> [TwoModeOperator; 4] {
    let a = annihilation_a(basis);
    let b = annihilation_b(basis);
    let ad = a.adjoint();
    let bd = b.adjoint();
    let na = &ad * &a;
    let nb = &bd * &b;
    let ab = &ad * &b;
    let ba = &bd * &a;
    let half = c(0.5, 0.0);
    let s0 = (&na + &nb) * half;
    let s1 = (&ab + &ba) * half;
    let s2 = (&ab - &ba) * c(0.0, -0.5);
    let s3 = (&na - &nb) * half;
    [s0, s1, s2, s3].map(|m| TwoModeOperator::new(basis, m))
}

/// Unit vector on the Poincare sphere, `(polar, azimuth)` in radians.
/// `(0, 0)` is the `S3` axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationAxis {
    pub polar: f64,
    pub azimuth: f64,
}

impl RotationAxis {
    pub fn new(polar: f64, azimuth: f64) -> Self {
        RotationAxis { polar, azimuth }
    }

    /// Cartesian components `(n1, n2, n3)`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.polar.sin_cos();
        let (sp, cp) = self.azimuth.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Full-space generator `n . S`.
    pub fn generator(&self, basis: FockBasis) -> CMat {
        let [_, s1, s2, s3] = build_stokes_operators(basis);
        let n = self.unit_vector();
        s1.matrix * c(n[0], 0.0) + s2.matrix * c(n[1], 0.0) + s3.matrix * c(n[2], 0.0)
    }
}

/// Restrict a full-space operator to the total-photon sector `n`, in the
/// sector ordering of [`FockBasis::sector_states`].
pub fn restrict_to_sector(basis: FockBasis, full: &CMat, n: usize) -> CMat {
    let states = basis.sector_states(n);
    let d = states.len();
    let mut m = CMat::zeros(d, d);
    for (i, &(a1, a2)) in states.iter().enumerate() {
        for (j, &(b1, b2)) in states.iter().enumerate() {
            m[(i, j)] = full[(basis.index(a1, a2), basis.index(b1, b2))];
        }
    }
    m
}

/// Two-mode density-matrix-like object stored blockwise by total-photon
/// sector pair. Block `(n, m)` holds the matrix elements between the
/// `n`-photon and `m`-photon subspaces, each in sector ordering.
///
/// The same container carries `d rho / d theta`, which is Hermitian and
/// traceless but not positive; positivity is checked explicitly via
/// [`TwoModeState::check_density`], not enforced on construction.
#[derive(Debug, Clone)]
pub struct TwoModeState {
    basis: FockBasis,
    blocks: BTreeMap<(usize, usize), CMat>,
}

impl TwoModeState {
    pub fn from_blocks(basis: FockBasis, blocks: BTreeMap<(usize, usize), CMat>) -> Self {
        for (&(n, m), b) in &blocks {
            assert_eq!(b.nrows(), basis.sector_dim(n));
            assert_eq!(b.ncols(), basis.sector_dim(m));
        }
        TwoModeState { basis, blocks }
    }

    /// Rank-one state `|psi><psi|` from a full-space vector.
    pub fn from_pure(basis: FockBasis, psi: &CVec) -> Self {
        assert_eq!(psi.len(), basis.dim());
        let norm = psi.norm();
        let mut sector_vecs: BTreeMap<usize, CVec> = BTreeMap::new();
        for n in 0..=basis.max_total() {
            let states = basis.sector_states(n);
            let v = CVec::from_iterator(
                states.len(),
                states.iter().map(|&(n1, n2)| psi[basis.index(n1, n2)]),
            );
            if v.norm() > 1e-15 * norm {
                sector_vecs.insert(n, v);
            }
        }
        let mut blocks = BTreeMap::new();
        for (&n, vn) in &sector_vecs {
            for (&m, vm) in &sector_vecs {
                blocks.insert((n, m), vn * vm.adjoint());
            }
        }
        TwoModeState { basis, blocks }
    }

    /// Blockwise view of a full density matrix. All sector pairs with any
    /// nonzero entry are kept.
    pub fn from_full(basis: FockBasis, full: &CMat) -> Self {
        assert_eq!(full.nrows(), basis.dim());
        let mut blocks = BTreeMap::new();
        for n in 0..=basis.max_total() {
            let rows = basis.sector_states(n);
            for m in 0..=basis.max_total() {
                let cols = basis.sector_states(m);
                let mut b = CMat::zeros(rows.len(), cols.len());
                let mut any = false;
                for (i, &(a1, a2)) in rows.iter().enumerate() {
                    for (j, &(b1, b2)) in cols.iter().enumerate() {
                        let v = full[(basis.index(a1, a2), basis.index(b1, b2))];
                        if v != c(0.0, 0.0) {
                            any = true;
                        }
                        b[(i, j)] = v;
                    }
                }
                if any {
                    blocks.insert((n, m), b);
                }
            }
        }
        TwoModeState { basis, blocks }
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn blocks(&self) -> &BTreeMap<(usize, usize), CMat> {
        &self.blocks
    }

    pub fn block(&self, n: usize, m: usize) -> Option<&CMat> {
        self.blocks.get(&(n, m))
    }

    /// Total-photon sectors appearing on either side of any block.
    pub fn sectors(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .blocks
            .keys()
            .flat_map(|&(n, m)| [n, m])
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Reassemble the full `dim x dim` matrix.
    pub fn to_full(&self) -> CMat {
        let d = self.basis.dim();
        let mut full = CMat::zeros(d, d);
        for (&(n, m), b) in &self.blocks {
            let rows = self.basis.sector_states(n);
            let cols = self.basis.sector_states(m);
            for (i, &(a1, a2)) in rows.iter().enumerate() {
                for (j, &(b1, b2)) in cols.iter().enumerate() {
                    full[(self.basis.index(a1, a2), self.basis.index(b1, b2))] = b[(i, j)];
                }
            }
        }
        full
    }

    pub fn trace(&self) -> C64 {
        let mut t = c(0.0, 0.0);
        for (&(n, m), b) in &self.blocks {
            if n == m {
                for i in 0..b.nrows() {
                    t += b[(i, i)];
                }
            }
        }
        t
    }

    pub fn purity(&self) -> f64 {
        // Tr rho^2 = sum_{n,m} Tr[B_{nm} B_{mn}] = sum |B_{nm}|_F^2 for Hermitian rho
        let mut p = 0.0;
        for b in self.blocks.values() {
            p += b.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        p
    }

    /// `Tr[rho A]` for a full-space operator.
    pub fn expectation(&self, op: &TwoModeOperator) -> Result<C64> {
        self.basis.require_same(&op.basis)?;
        let mut t = c(0.0, 0.0);
        for (&(n, m), b) in &self.blocks {
            let rows = self.basis.sector_states(n);
            let cols = self.basis.sector_states(m);
            for (i, &(a1, a2)) in rows.iter().enumerate() {
                for (j, &(b1, b2)) in cols.iter().enumerate() {
                    t += b[(i, j)] * op.matrix[(self.basis.index(b1, b2), self.basis.index(a1, a2))];
                }
            }
        }
        Ok(t)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn herm_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (&(n, m), b) in &self.blocks {
            match self.blocks.get(&(m, n)) {
                Some(bt) => {
                    let d = b - bt.adjoint();
                    worst = worst.max(d.iter().map(|z| z.norm()).fold(0.0, f64::max));
                }
                None => {
                    worst = worst.max(b.iter().map(|z| z.norm()).fold(0.0, f64::max));
                }
            }
        }
        worst
    }

    /// Smallest eigenvalue of the reconstructed full matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let full = self.to_full();
        match crate::linalg::hermitian_eigenvalues(&full) {
            Ok(vals) => vals.first().copied().unwrap_or(f64::INFINITY),
            Err(_) => f64::NAN,
        }
    }

    /// Check the density-matrix invariants: Hermitian to `1e-12`, unit trace
    /// to `1e-10`, positive semidefinite to `-1e-10`.
    pub fn check_density(&self) -> Result<()> {
        let h = self.herm_defect();
        if h > 1e-12 {
            return Err(Error::StateInvariant(format!(
                "Hermiticity defect {h:.3e} exceeds 1e-12"
            )));
        }
        let t = self.trace();
        if (t.re - 1.0).abs() > 1e-10 || t.im.abs() > 1e-10 {
            return Err(Error::StateInvariant(format!(
                "trace {t} deviates from 1 beyond 1e-10"
            )));
        }
        let lam = self.min_eigenvalue();
        if !(lam >= -1e-10) {
            return Err(Error::StateInvariant(format!(
                "minimum eigenvalue {lam:.3e} below -1e-10"
            )));
        }
        Ok(())
    }

    /// Mean total photon number.
    pub fn mean_photons(&self) -> f64 {
        let mut n_mean = 0.0;
        for (&(n, m), b) in &self.blocks {
            if n == m {
                let tr: f64 = (0..b.nrows()).map(|i| b[(i, i)].re).sum();
                n_mean += n as f64 * tr;
            }
        }
        n_mean
    }

    /// Map every block through `f`; block keys are preserved.
    pub(crate) fn map_blocks(&self, mut f: impl FnMut(usize, usize, &CMat) -> CMat) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|(&(n, m), b)| ((n, m), f(n, m, b)))
            .collect();
        TwoModeState {
            basis: self.basis,
            blocks,
        }
    }
}

/// NOON probe `(|N,0> + |0,N>)/sqrt(2)`.
pub fn make_noon(basis: FockBasis, n: usize) -> Result<TwoModeState> {
    if n >= basis.cutoff() {
        return Err(Error::Capacity(format!(
            "NOON N={n} needs cutoff > {n}, basis has {}",
            basis.cutoff()
        )));
    }
    let mut psi = CVec::zeros(basis.dim());
    if n == 0 {
        psi[basis.index(0, 0)] = c(1.0, 0.0);
    } else {
        let amp = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        psi[basis.index(n, 0)] = amp;
        psi[basis.index(0, n)] = amp;
    }
    Ok(TwoModeState::from_pure(basis, &psi))
}

/// Norm lost to truncation for `|alpha>` at the given cutoff (Poisson tail).
pub fn coherent_norm_deficit(basis: FockBasis, alpha: C64) -> f64 {
    let nbar = alpha.norm_sqr();
    let mut kept = 0.0;
    let mut term = (-nbar).exp();
    for k in 0..basis.cutoff() {
        kept += term;
        term *= nbar / (k + 1) as f64;
    }
    (1.0 - kept).max(0.0)
}

/// Coherent probe `|alpha>_a (x) |0>_b`, truncated and renormalized.
///
/// Guards against poor truncation: `|alpha|^2` must not exceed `cutoff/2`.
pub fn make_coherent(basis: FockBasis, alpha: C64) -> Result<TwoModeState> {
    let nbar = alpha.norm_sqr();
    let limit = basis.cutoff() as f64 / 2.0;
    let deficit = coherent_norm_deficit(basis, alpha);
    if nbar > limit {
        return Err(Error::TruncationGuard {
            mean_photons: nbar,
            limit,
            deficit,
        });
    }
    let mut psi = CVec::zeros(basis.dim());
    let mut amp = c((-nbar / 2.0).exp(), 0.0);
    for n in 0..basis.cutoff() {
        psi[basis.index(n, 0)] = amp;
        amp *= alpha / c(((n + 1) as f64).sqrt(), 0.0);
    }
    let norm = psi.norm();
    psi /= c(norm, 0.0);
    Ok(TwoModeState::from_pure(basis, &psi))
}

/// Pure King probe from a Majorana constellation; delegates to
/// [`crate::polarization::constellation_to_state`].
pub fn make_king(
    basis: FockBasis,
    constellation: &crate::polarization::MajoranaConstellation,
) -> Result<TwoModeState> {
    crate::polarization::constellation_to_state(basis, constellation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn basis() -> FockBasis {
        FockBasis::new(12).unwrap()
    }

    #[test]
    fn cutoff_below_two_rejected() {
        assert!(FockBasis::new(1).is_err());
        assert!(FockBasis::new(2).is_ok());
    }

    #[test]
    fn index_label_bijection() {
        let b = FockBasis::new(5).unwrap();
        for idx in 0..b.dim() {
            let (n1, n2) = b.labels(idx);
            assert_eq!(b.index(n1, n2), idx);
        }
    }

    #[test]
    fn dicke_bridge_round_trip() {
        let b = FockBasis::new(7).unwrap();
        for n1 in 0..b.cutoff() {
            for n2 in 0..b.cutoff() {
                let (two_s, two_m) = dicke_labels(n1, n2);
                assert_eq!(fock_labels(two_s, two_m).unwrap(), (n1, n2));
            }
        }
        assert!(fock_labels(3, 2).is_err());
        assert!(fock_labels(2, 4).is_err());
    }

    #[test]
    fn stokes_definition_spot_checks() {
        let b = basis();
        let [_, s1, _, s3] = build_stokes_operators(b);
        // <1,0| S3 |1,0> = +1/2
        let i10 = b.index(1, 0);
        assert_abs_diff_eq!(s3.matrix[(i10, i10)].re, 0.5, epsilon = 1e-14);
        // S1 |1,0> = (1/2)|0,1>
        let i01 = b.index(0, 1);
        assert_abs_diff_eq!(s1.matrix[(i01, i10)].re, 0.5, epsilon = 1e-14);
        for idx in 0..b.dim() {
            if idx != i01 {
                assert_abs_diff_eq!(s1.matrix[(idx, i10)].norm(), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn stokes_hermitian() {
        let b = basis();
        for op in build_stokes_operators(b) {
            let defect = (&op.matrix - op.matrix.adjoint())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(defect <= 1e-12);
        }
    }

    /// su(2) commutators and the Casimir identity on the photon-number-safe
    /// subspace (truncation spoils the top sectors only).
    #[test]
    fn su2_algebra_on_safe_subspace() {
        let b = FockBasis::new(8).unwrap();
        let [s0, s1, s2, s3] = build_stokes_operators(b);
        let ss = [&s1.matrix, &s2.matrix, &s3.matrix];
        let safe: Vec<usize> = (0..b.dim())
            .filter(|&i| {
                let (n1, n2) = b.labels(i);
                n1 + n2 <= b.cutoff() - 2
            })
            .collect();
        for i in 0..3 {
            for j in 0..3 {
                let comm = ss[i] * ss[j] - ss[j] * ss[i];
                let mut expect = CMat::zeros(b.dim(), b.dim());
                for (k, target) in ss.iter().enumerate() {
                    let eps = levi_civita(i, j, k);
                    if eps != 0.0 {
                        expect += *target * c(0.0, eps);
                    }
                }
                for &r in &safe {
                    for &cidx in &safe {
                        assert!((comm[(r, cidx)] - expect[(r, cidx)]).norm() <= 1e-12);
                    }
                }
            }
        }
        let casimir = ss[0] * ss[0] + ss[1] * ss[1] + ss[2] * ss[2];
        let s0s0p1 = &s0.matrix * (&s0.matrix + CMat::identity(b.dim(), b.dim()));
        for &r in &safe {
            for &cidx in &safe {
                assert!((casimir[(r, cidx)] - s0s0p1[(r, cidx)]).norm() <= 1e-11);
            }
        }
    }

    fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    }

    #[test]
    fn noon_basics() {
        let b = basis();
        let noon1 = make_noon(b, 1).unwrap();
        noon1.check_density().unwrap();
        let i10 = 1; // sector 1 holds (0,1),(1,0) ordered by n1
        let blk = noon1.block(1, 1).unwrap();
        assert_abs_diff_eq!(blk[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(blk[(i10, i10)].re, 0.5, epsilon = 1e-14);
        assert!(make_noon(b, 12).is_err());

        // variance of S3 for N=4 is N^2/4 = 4
        let noon4 = make_noon(b, 4).unwrap();
        let [_, _, _, s3] = build_stokes_operators(b);
        let s3sq = TwoModeOperator::new(b, &s3.matrix * &s3.matrix);
        let mean = noon4.expectation(&s3).unwrap().re;
        let var = noon4.expectation(&s3sq).unwrap().re - mean * mean;
        assert_abs_diff_eq!(var, 4.0, epsilon = 1e-12);

        // support only in sector (N, N)
        assert_eq!(noon4.sectors(), vec![4]);
        let [s0op, ..] = build_stokes_operators(b);
        let n_mean = 2.0 * noon4.expectation(&s0op).unwrap().re;
        assert_abs_diff_eq!(n_mean, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_basics() {
        let b = basis();
        let vac = make_coherent(b, c(0.0, 0.0)).unwrap();
        let blk = vac.block(0, 0).unwrap();
        assert_abs_diff_eq!(blk[(0, 0)].re, 1.0, epsilon = 1e-14);

        // alpha = 1 at cutoff 12: Poisson tail below 1e-8
        let deficit = coherent_norm_deficit(b, c(1.0, 0.0));
        assert!(deficit <= 1e-8);
        let coh = make_coherent(b, c(1.0, 0.0)).unwrap();
        coh.check_density().unwrap();
        let [_, _, _, s3] = build_stokes_operators(b);
        assert_abs_diff_eq!(coh.expectation(&s3).unwrap().re, 0.5, epsilon = 1e-8);

        // guard
        let err = make_coherent(b, c(3.0, 0.0)).unwrap_err();
        match err {
            Error::TruncationGuard { deficit, .. } => assert!(deficit > 0.0),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn expectation_basis_mismatch() {
        let b = basis();
        let other = FockBasis::new(4).unwrap();
        let st = make_noon(b, 1).unwrap();
        let [s0, ..] = build_stokes_operators(other);
        assert!(st.expectation(&s0).is_err());
    }

    #[test]
    fn vacuum_s0_expectation_zero() {
        let b = basis();
        let vac = make_coherent(b, c(0.0, 0.0)).unwrap();
        let [s0, ..] = build_stokes_operators(b);
        assert_abs_diff_eq!(vac.expectation(&s0).unwrap().re, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn noon2_s0_expectation_one() {
        let b = basis();
        let noon2 = make_noon(b, 2).unwrap();
        let [s0, ..] = build_stokes_operators(b);
        assert_abs_diff_eq!(noon2.expectation(&s0).unwrap().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rotation_axis_unit_norm() {
        for &(t, p) in &[(0.0, 0.0), (0.7, 1.3), (std::f64::consts::PI, 2.0)] {
            let n = RotationAxis::new(t, p).unit_vector();
            let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            assert!((norm - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn full_round_trip() {
        let b = FockBasis::new(4).unwrap();
        let st = make_noon(b, 2).unwrap();
        let full = st.to_full();
        let back = TwoModeState::from_full(b, &full);
        let diff = (st.to_full() - back.to_full())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-15);
    }
}
