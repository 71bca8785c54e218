//! Polarization analytics on single spin sectors: Majorana constellations,
//! Husimi function and Wehrl entropy, state multipoles, anticoherence, and
//! both degree-of-polarization measures.

mod angular;
mod kings;
mod majorana;
mod sphere;

pub use angular::{
    anticoherence_order, clebsch_gordan, cumulative_multipole, state_multipoles, tensor_basis,
    StateMultipoles,
};
pub use kings::{builtin_king, builtin_king_orders, verify_king, KingEntry};
pub use majorana::{
    constellation_amplitudes, constellation_to_state, majorana_roots, MajoranaConstellation,
};
pub use sphere::{
    bloch_coherent_vector, husimi_q, q_dop, q_multipole_component, spherical_harmonic,
    wehrl_entropy, SphereGrid, SphereNode,
};

use crate::error::{Error, Result};
use crate::hilbert::{build_stokes_operators, FockBasis, TwoModeState};
use crate::{c, CMat, CVec};

/// Density matrix restricted to a single total-photon sector `n = 2S`,
/// `(2S+1) x (2S+1)` in the Dicke ordering `m = -S..S`.
///
/// The matrix is not renormalized: its trace is the sector population.
#[derive(Debug, Clone)]
pub struct SpinSector {
    pub two_s: usize,
    pub matrix: CMat,
}

impl SpinSector {
    pub fn new(two_s: usize, matrix: CMat) -> Self {
        assert_eq!(matrix.nrows(), two_s + 1);
        assert_eq!(matrix.ncols(), two_s + 1);
        SpinSector { two_s, matrix }
    }

    /// Extract sector `n` from a blockwise state. The sector must be
    /// complete (untruncated) in the basis.
    pub fn from_state(state: &TwoModeState, n: usize) -> Result<Self> {
        if !state.basis().sector_complete(n) {
            return Err(Error::Capacity(format!(
                "sector {n} is truncated at cutoff {}",
                state.basis().cutoff()
            )));
        }
        let matrix = match state.block(n, n) {
            Some(b) => b.clone(),
            None => CMat::zeros(n + 1, n + 1),
        };
        Ok(SpinSector { two_s: n, matrix })
    }

    pub fn from_vector(psi: &SpinSectorVec) -> Self {
        SpinSector {
            two_s: psi.two_s,
            matrix: &psi.vector * psi.vector.adjoint(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..=self.two_s).map(|i| self.matrix[(i, i)].re).sum()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Renormalize to unit trace.
    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if t <= 0.0 {
            return Err(Error::StateInvariant(
                "sector population is zero, cannot normalize".into(),
            ));
        }
        Ok(SpinSector {
            two_s: self.two_s,
            matrix: &self.matrix * c(1.0 / t, 0.0),
        })
    }

    /// Maximally mixed state on the sector.
    pub fn maximally_mixed(two_s: usize) -> Self {
        let d = two_s + 1;
        SpinSector {
            two_s,
            matrix: CMat::identity(d, d) * c(1.0 / d as f64, 0.0),
        }
    }
}

/// Normalized pure state on a single sector, Dicke ordering `m = -S..S`.
#[derive(Debug, Clone)]
pub struct SpinSectorVec {
    pub two_s: usize,
    pub vector: CVec,
}

impl SpinSectorVec {
    pub fn new(two_s: usize, vector: CVec) -> Result<Self> {
        if vector.len() != two_s + 1 {
            return Err(Error::InvalidArgument(format!(
                "sector vector length {} does not match 2S+1 = {}",
                vector.len(),
                two_s + 1
            )));
        }
        let norm = vector.norm();
        if norm <= 0.0 {
            return Err(Error::InvalidArgument("zero sector vector".into()));
        }
        Ok(SpinSectorVec {
            two_s,
            vector: vector / c(norm, 0.0),
        })
    }

    /// Recover the pure-state vector from a rank-one sector density matrix.
    /// Fails for mixed sectors.
    pub fn from_density(sector: &SpinSector) -> Result<Self> {
        let norm = sector.normalized()?;
        let pur = norm.purity();
        if (pur - 1.0).abs() > 1e-8 {
            return Err(Error::StateInvariant(format!(
                "sector is mixed (purity {pur:.6}), expected a pure state"
            )));
        }
        // dominant column as the rank-one factor
        let (values, vectors) = crate::linalg::hermitian_eigen(&norm.matrix)?;
        let v = vectors.column(values.len() - 1).into_owned();
        SpinSectorVec::new(sector.two_s, v)
    }

    /// Embed into the full two-mode space as a density matrix.
    pub fn to_state(&self, basis: FockBasis) -> Result<TwoModeState> {
        let n = self.two_s;
        if !basis.sector_complete(n) {
            return Err(Error::Capacity(format!(
                "sector {n} needs cutoff > {n}, basis has {}",
                basis.cutoff()
            )));
        }
        let mut psi = CVec::zeros(basis.dim());
        for (i, amp) in self.vector.iter().enumerate() {
            // Dicke index i corresponds to n1 = i in sector ordering
            psi[basis.index(i, n - i)] = *amp;
        }
        Ok(TwoModeState::from_pure(basis, &psi))
    }
}

/// Semiclassical degree of polarization `|<S>| / <S0>` (in `[0, 1]`).
pub fn semiclassical_dop(rho: &TwoModeState) -> Result<f64> {
    let [s0, s1, s2, s3] = build_stokes_operators(rho.basis());
    let s0m = rho.expectation(&s0)?.re;
    if s0m <= 1e-14 {
        return Err(Error::UndefinedDop);
    }
    let v = [
        rho.expectation(&s1)?.re,
        rho.expectation(&s2)?.re,
        rho.expectation(&s3)?.re,
    ];
    Ok((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt() / s0m)
}
