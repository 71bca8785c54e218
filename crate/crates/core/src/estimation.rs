//! Quantum and classical Fisher information: analytic theta-derivative
//! propagation through pipelines, SLD construction, QFI for pure and mixed
//! states, CFI of POVM measurements, and the quantum Cramer-Rao bound.

use crate::channels::{apply_stage, ChannelPipeline, Stage};
use crate::error::{Error, Result};
use crate::hilbert::{restrict_to_sector, FockBasis, TwoModeOperator, TwoModeState};
use crate::{c, CMat, CVec};

pub const DEFAULT_EIGEN_CUT: f64 = 1e-12;

/// A state and its derivative with respect to the retarder angle.
#[derive(Debug, Clone)]
pub struct StateWithDerivative {
    pub rho: TwoModeState,
    pub drho: TwoModeState,
}

impl StateWithDerivative {
    /// Check the derivative invariants: traceless to 1e-10, Hermitian to
    /// 1e-12.
    pub fn validate(&self) -> Result<()> {
        let t = self.drho.trace();
        if t.norm() > 1e-10 {
            return Err(Error::StateInvariant(format!(
                "d rho / d theta has trace {t}, expected 0"
            )));
        }
        let h = self.drho.herm_defect();
        if h > 1e-12 {
            return Err(Error::StateInvariant(format!(
                "d rho / d theta Hermiticity defect {h:.3e}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfiMethod {
    Pure,
    MixedEigen,
}

/// QFI value plus bookkeeping on the eigenpair regularization.
#[derive(Debug, Clone, Copy)]
pub struct QfiResult {
    pub value: f64,
    /// Eigenpair terms dropped because their eigenvalue sum fell below the
    /// cut while the derivative matrix element did not vanish.
    pub spectrum_cut: usize,
    pub method: QfiMethod,
}

/// POVM on the truncated two-mode space; effects must sum to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    pub basis: FockBasis,
    pub effects: Vec<CMat>,
}

impl Povm {
    pub fn new(basis: FockBasis, effects: Vec<CMat>) -> Result<Self> {
        let d = basis.dim();
        let mut sum = CMat::zeros(d, d);
        for e in &effects {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::InvalidArgument("POVM effect has wrong shape".into()));
            }
            let min = crate::linalg::hermitian_eigenvalues(e)?
                .first()
                .copied()
                .unwrap_or(0.0);
            if min < -1e-10 {
                return Err(Error::InvalidArgument(format!(
                    "POVM effect has negative eigenvalue {min:.3e}"
                )));
            }
            sum += e;
        }
        let defect = (&sum - CMat::identity(d, d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if defect > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "POVM effects sum to identity with defect {defect:.3e}"
            )));
        }
        Ok(Povm { basis, effects })
    }
}

/// `i [G, rho]` blockwise, for a number-conserving Hermitian generator.
fn commutator_i(state: &TwoModeState, generator: &CMat) -> TwoModeState {
    let basis = state.basis();
    let mut cache: std::collections::BTreeMap<usize, CMat> = std::collections::BTreeMap::new();
    let mut get = |n: usize| -> CMat {
        cache
            .entry(n)
            .or_insert_with(|| restrict_to_sector(basis, generator, n))
            .clone()
    };
    state.map_blocks(|n, m, b| {
        let gn = get(n);
        let gm = get(m);
        (gn * b - b * gm) * c(0.0, 1.0)
    })
}

/// Propagate the probe and its analytic theta-derivative through the
/// pipeline. The derivative enters at the retarder stage as
/// `d/dtheta (R sigma R^dag) = i [S.n, R sigma R^dag]` and every downstream
/// stage, being a theta-independent linear map, is applied to both members.
pub fn derivative_through_pipeline(
    probe: &TwoModeState,
    pipeline: &ChannelPipeline,
    theta: f64,
) -> Result<StateWithDerivative> {
    pipeline.validate()?;
    let pipeline = pipeline.with_theta(theta);
    let basis = probe.basis();
    let mut rho = probe.clone();
    let mut drho: Option<TwoModeState> = None;
    for stage in &pipeline.stages {
        rho = apply_stage(&rho, stage);
        if let Some(d) = drho.take() {
            drho = Some(apply_stage(&d, stage));
        }
        if let Stage::Retarder(spec) = stage {
            let g = spec.axis.generator(basis);
            drho = Some(commutator_i(&rho, &g));
        }
    }
    let swd = StateWithDerivative {
        rho,
        drho: drho.expect("validated pipeline has a retarder"),
    };
    swd.validate()?;
    Ok(swd)
}

/// Central finite-difference derivative, used as an independent oracle for
/// the analytic propagation.
pub fn derivative_finite_difference(
    probe: &TwoModeState,
    pipeline: &ChannelPipeline,
    theta: f64,
    h: f64,
) -> Result<TwoModeState> {
    let plus = crate::channels::apply_pipeline(probe, pipeline, theta + h)?;
    let minus = crate::channels::apply_pipeline(probe, pipeline, theta - h)?;
    let scale = c(0.5 / h, 0.0);
    let mut blocks = plus.blocks().clone();
    for b in blocks.values_mut() {
        *b *= scale;
    }
    for (&k, bm) in minus.blocks() {
        blocks
            .entry(k)
            .and_modify(|b| *b -= bm * scale)
            .or_insert_with(|| -bm * scale);
    }
    Ok(TwoModeState::from_blocks(probe.basis(), blocks))
}

/// Pure-state QFI `4 [ <dpsi|dpsi> - |<dpsi|psi>|^2 ]`.
pub fn qfi_pure(psi: &CVec, dpsi: &CVec) -> Result<QfiResult> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "psi has norm {norm}, expected 1"
        )));
    }
    let dd = (dpsi.adjoint() * dpsi)[(0, 0)].re;
    let overlap = (dpsi.adjoint() * psi)[(0, 0)];
    let value = 4.0 * (dd - overlap.norm_sqr());
    Ok(QfiResult {
        value: clip_nonnegative(value)?,
        spectrum_cut: 0,
        method: QfiMethod::Pure,
    })
}

/// QFI of a unitary rotation family `psi(theta) = exp(i theta G) psi`:
/// `4 Var_psi(G)`.
pub fn qfi_pure_rotation(psi: &CVec, generator: &CMat) -> Result<QfiResult> {
    let dpsi = generator * psi * c(0.0, 1.0);
    qfi_pure(psi, &dpsi)
}

fn clip_nonnegative(value: f64) -> Result<f64> {
    if !(value >= -1e-9) {
        return Err(Error::StateInvariant(format!(
            "Fisher information {value:.3e} is negative beyond tolerance or non-finite"
        )));
    }
    Ok(value.max(0.0))
}

struct EigenData {
    values: Vec<f64>,
    /// derivative in the eigenbasis, `V^dag (drho) V`
    deriv: CMat,
    vectors: CMat,
}

fn eigen_data(swd: &StateWithDerivative) -> Result<EigenData> {
    let full = swd.rho.to_full();
    let (raw_values, vectors) = crate::linalg::hermitian_eigen(&full)?;
    let mut values = Vec::with_capacity(raw_values.len());
    for lam in raw_values {
        if lam < -1e-10 {
            return Err(Error::StateInvariant(format!(
                "state eigenvalue {lam:.3e} below -1e-10"
            )));
        }
        values.push(lam.max(0.0));
    }
    let dfull = swd.drho.to_full();
    let deriv = vectors.adjoint() * dfull * &vectors;
    Ok(EigenData { values, deriv, vectors })
}

/// Mixed-state QFI in the eigenbasis of rho:
/// `2 sum_{k,l} |<k|drho|l>|^2 / (lambda_k + lambda_l)` over pairs whose
/// eigenvalue sum exceeds `eigen_cut`.
pub fn qfi_mixed(swd: &StateWithDerivative, eigen_cut: f64) -> Result<QfiResult> {
    swd.validate()?;
    let ed = eigen_data(swd)?;
    let d = ed.values.len();
    let mut value = 0.0;
    let mut dropped = 0usize;
    for k in 0..d {
        for l in 0..d {
            let denom = ed.values[k] + ed.values[l];
            let num = ed.deriv[(k, l)].norm_sqr();
            if denom > eigen_cut {
                value += 2.0 * num / denom;
            } else if num.sqrt() > 1e-14 {
                dropped += 1;
            }
        }
    }
    Ok(QfiResult {
        value: clip_nonnegative(value)?,
        spectrum_cut: dropped,
        method: QfiMethod::MixedEigen,
    })
}

/// Symmetric logarithmic derivative: `L_{kl} = 2 (drho)_{kl}/(lambda_k +
/// lambda_l)` in the eigenbasis of rho, zero where the denominator falls
/// below `eigen_cut`.
pub fn sld(swd: &StateWithDerivative, eigen_cut: f64) -> Result<CMat> {
    swd.validate()?;
    let ed = eigen_data(swd)?;
    let d = ed.values.len();
    let mut l_eig = CMat::zeros(d, d);
    for k in 0..d {
        for l in 0..d {
            let denom = ed.values[k] + ed.values[l];
            if denom > eigen_cut {
                l_eig[(k, l)] = ed.deriv[(k, l)] * c(2.0 / denom, 0.0);
            }
        }
    }
    Ok(&ed.vectors * l_eig * ed.vectors.adjoint())
}

/// Classical Fisher information `sum_i (dp_i)^2 / p_i` of the POVM on the
/// pipeline output, with the analytic derivative. Terms with both a
/// negligible probability and a negligible derivative are dropped; a
/// vanishing probability with a surviving derivative is an error.
pub fn cfi_povm(
    probe: &TwoModeState,
    pipeline: &ChannelPipeline,
    theta: f64,
    povm: &Povm,
) -> Result<f64> {
    let swd = derivative_through_pipeline(probe, pipeline, theta)?;
    let mut cfi = 0.0;
    for (i, effect) in povm.effects.iter().enumerate() {
        let op = TwoModeOperator::new(povm.basis, effect.clone());
        let p = swd.rho.expectation(&op)?.re;
        let dp = swd.drho.expectation(&op)?.re;
        if p < 1e-14 {
            if dp.abs() < 1e-12 {
                continue;
            }
            return Err(Error::ProbabilitySingularity { outcome: i, p, dp });
        }
        cfi += dp * dp / p;
    }
    let qfi = qfi_mixed(&swd, DEFAULT_EIGEN_CUT)?;
    if cfi > qfi.value + 1e-8 {
        return Err(Error::StateInvariant(format!(
            "CFI {cfi:.12} exceeds QFI {:.12}",
            qfi.value
        )));
    }
    Ok(cfi)
}

/// Quantum Cramer-Rao bound `1 / (nu F_Q)` on the estimator variance.
pub fn qcrb(qfi: &QfiResult, nu: u64) -> Result<f64> {
    if nu < 1 {
        return Err(Error::InvalidArgument("nu must be at least 1".into()));
    }
    if qfi.value <= 0.0 {
        return Err(Error::UnboundedVariance);
    }
    Ok(1.0 / (nu as f64 * qfi.value))
}

/// Three two-outcome Pauli measurements on the one-photon sector, each
/// completed by a rest-of-space effect. The classical information the
/// one-photon sector carries about theta is the sum of the three CFI values.
pub fn pauli_povms(basis: FockBasis) -> Vec<Povm> {
    let d = basis.dim();
    let up = basis.index(1, 0);
    let dn = basis.index(0, 1);
    let inv_sqrt2 = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    // eigenvector pairs of sigma_x, sigma_y, sigma_z on span{|1,0>, |0,1>}
    let mut povms = Vec::with_capacity(3);
    for axis in 0..3 {
        let mut plus = CVec::zeros(d);
        let mut minus = CVec::zeros(d);
        match axis {
            0 => {
                plus[up] = inv_sqrt2;
                plus[dn] = inv_sqrt2;
                minus[up] = inv_sqrt2;
                minus[dn] = -inv_sqrt2;
            }
            1 => {
                plus[up] = inv_sqrt2;
                plus[dn] = inv_sqrt2 * c(0.0, 1.0);
                minus[up] = inv_sqrt2;
                minus[dn] = -inv_sqrt2 * c(0.0, 1.0);
            }
            _ => {
                plus[up] = c(1.0, 0.0);
                minus[dn] = c(1.0, 0.0);
            }
        }
        let p_plus = &plus * plus.adjoint();
        let p_minus = &minus * minus.adjoint();
        let rest = CMat::identity(d, d) - &p_plus - &p_minus;
        povms.push(Povm::new(basis, vec![p_plus, p_minus, rest]).expect("projective POVM"));
    }
    povms
}
