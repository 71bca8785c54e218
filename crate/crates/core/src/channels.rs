//! CPTP polarization channels: retarder, diattenuator, three depolarizer
//! models, and ordered pipeline composition.
//!
//! Every channel except the diattenuator conserves total photon number and
//! therefore acts independently on each sector-pair block of a
//! [`TwoModeState`]. The diattenuator couples sectors downward and is applied
//! on the reassembled full matrix.


use crate::error::{Error, Result};
use crate::hilbert::{restrict_to_sector, FockBasis, RotationAxis, TwoModeState};
use crate::{c, C64, CMat};

/// The retarder stage `R = exp(i theta S.n)`; `theta` is the estimand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetarderSpec {
    pub theta: f64,
    pub axis: RotationAxis,
}

impl RetarderSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() || !self.axis.polar.is_finite() || !self.axis.azimuth.is_finite()
        {
            return Err(Error::InvalidArgument("non-finite retarder spec".into()));
        }
        Ok(())
    }
}

/// Diattenuator: amplitude transmissivities `q` (mode a) and `r` (mode b) in
/// the frame rotated by Euler angles `(0, beta, gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiattenuatorSpec {
    pub q: f64,
    pub r: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl DiattenuatorSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("q", self.q), ("r", self.r)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "diattenuator {name} = {v} outside [0, 1]"
                )));
            }
        }
        if !self.beta.is_finite() || !self.gamma.is_finite() {
            return Err(Error::InvalidArgument("non-finite diattenuator angle".into()));
        }
        Ok(())
    }
}

/// Depolarizer model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DepolarizerSpec {
    /// Convex mixture of rotations about each Stokes axis, averaged over the
    /// six axis orderings when `permutation_average` is set.
    ConvexRotations {
        eta_min: f64,
        eta_max: f64,
        n_r: usize,
        sigma_r: f64,
        permutation_average: bool,
    },
    /// `exp(nu_t [D(S1) + D(S2) + D(S3)])`.
    IsotropicLindblad { nu_t: f64 },
    /// `exp(nu_t [D(S2) + D(S3)] + nu0_t D(S0))`.
    AnisotropicLindblad { nu_t: f64, nu0_t: f64 },
}

impl DepolarizerSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DepolarizerSpec::ConvexRotations {
                eta_min,
                eta_max,
                n_r,
                sigma_r,
                ..
            } => {
                if n_r < 1 {
                    return Err(Error::InvalidArgument("n_r must be at least 1".into()));
                }
                if !(eta_min <= eta_max) {
                    return Err(Error::InvalidArgument(format!(
                        "eta_min {eta_min} exceeds eta_max {eta_max}"
                    )));
                }
                if !(sigma_r > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "sigma_r = {sigma_r} must be positive"
                    )));
                }
                Ok(())
            }
            DepolarizerSpec::IsotropicLindblad { nu_t } => {
                if !(nu_t >= 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "nu_t = {nu_t} must be nonnegative"
                    )));
                }
                Ok(())
            }
            DepolarizerSpec::AnisotropicLindblad { nu_t, nu0_t } => {
                if !(nu_t >= 0.0) || !(nu0_t >= 0.0) {
                    return Err(Error::InvalidArgument(
                        "anisotropic rates must be nonnegative".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// One pipeline stage.
#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    Retarder(RetarderSpec),
    Diattenuator(DiattenuatorSpec),
    Depolarizer(DepolarizerSpec),
}

/// Decomposition order of the physical channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// Diattenuator, then retarder, then depolarizer.
    Forward,
    /// Depolarizer, then retarder, then diattenuator.
    Reverse,
    Custom,
}

/// Ordered list of stages with exactly one retarder (it carries the
/// estimand).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPipeline {
    pub order: Order,
    pub stages: Vec<Stage>,
}

impl ChannelPipeline {
    pub fn new(order: Order, stages: Vec<Stage>) -> Result<Self> {
        let p = ChannelPipeline { order, stages };
        p.validate()?;
        Ok(p)
    }

    /// `depolarizer . retarder . diattenuator` applied left to right from the
    /// diattenuator.
    pub fn forward(
        diattenuator: DiattenuatorSpec,
        retarder: RetarderSpec,
        depolarizer: DepolarizerSpec,
    ) -> Result<Self> {
        ChannelPipeline::new(
            Order::Forward,
            vec![
                Stage::Diattenuator(diattenuator),
                Stage::Retarder(retarder),
                Stage::Depolarizer(depolarizer),
            ],
        )
    }

    pub fn reverse(
        diattenuator: DiattenuatorSpec,
        retarder: RetarderSpec,
        depolarizer: DepolarizerSpec,
    ) -> Result<Self> {
        ChannelPipeline::new(
            Order::Reverse,
            vec![
                Stage::Depolarizer(depolarizer),
                Stage::Retarder(retarder),
                Stage::Diattenuator(diattenuator),
            ],
        )
    }

    /// Retarder only, for noiseless references.
    pub fn bare(retarder: RetarderSpec) -> Result<Self> {
        ChannelPipeline::new(Order::Custom, vec![Stage::Retarder(retarder)])
    }

    pub fn validate(&self) -> Result<()> {
        let mut retarders = 0usize;
        for s in &self.stages {
            match s {
                Stage::Retarder(r) => {
                    retarders += 1;
                    r.validate()?;
                }
                Stage::Diattenuator(d) => d.validate()?,
                Stage::Depolarizer(d) => d.validate()?,
            }
        }
        if retarders != 1 {
            return Err(Error::PipelineShape(format!(
                "pipeline must contain exactly one retarder stage, found {retarders}"
            )));
        }
        Ok(())
    }

    pub fn retarder(&self) -> &RetarderSpec {
        self.stages
            .iter()
            .find_map(|s| match s {
                Stage::Retarder(r) => Some(r),
                _ => None,
            })
            .expect("validated pipeline has a retarder")
    }

    /// Copy with the retarder angle replaced.
    pub fn with_theta(&self, theta: f64) -> Self {
        let stages = self
            .stages
            .iter()
            .map(|s| match s {
                Stage::Retarder(r) => Stage::Retarder(RetarderSpec { theta, axis: r.axis }),
                other => other.clone(),
            })
            .collect();
        ChannelPipeline {
            order: self.order,
            stages,
        }
    }
}

/// Sector-restricted unitary `exp(i angle G_n)` for a Hermitian full-space
/// generator, via its eigendecomposition.
fn sector_unitary(basis: FockBasis, generator: &CMat, n: usize, angle: f64) -> CMat {
    let g = restrict_to_sector(basis, generator, n);
    let (values, vectors) = crate::linalg::hermitian_eigen(&g)
        .expect("eigendecomposition of a sector-restricted generator");
    let d = values.len();
    let mut phase = CMat::zeros(d, d);
    for (i, lam) in values.iter().enumerate() {
        phase[(i, i)] = C64::new(0.0, angle * lam).exp();
    }
    &vectors * phase * vectors.adjoint()
}

fn conjugate_blockwise(state: &TwoModeState, unitary_for: impl Fn(usize) -> CMat) -> TwoModeState {
    let mut cache: std::collections::BTreeMap<usize, CMat> = std::collections::BTreeMap::new();
    let mut get = |n: usize| -> CMat {
        cache.entry(n).or_insert_with(|| unitary_for(n)).clone()
    };
    state.map_blocks(|n, m, b| {
        let un = get(n);
        let um = get(m);
        un * b * um.adjoint()
    })
}

/// Unitary retarder `rho -> R rho R^dag`, blockwise per sector.
pub fn apply_retarder(state: &TwoModeState, spec: &RetarderSpec) -> TwoModeState {
    let basis = state.basis();
    let g = spec.axis.generator(basis);
    conjugate_blockwise(state, |n| sector_unitary(basis, &g, n, spec.theta))
}

/// Frame rotation `R_ab(0, beta, gamma) = exp(-i beta S2) exp(-i gamma S3)`
/// as a conjugation, or its inverse.
fn frame_rotation(state: &TwoModeState, beta: f64, gamma: f64, inverse: bool) -> TwoModeState {
    use crate::hilbert::build_stokes_operators;
    let basis = state.basis();
    let [_, _, s2, s3] = build_stokes_operators(basis);
    if inverse {
        let a = conjugate_blockwise(state, |n| sector_unitary(basis, &s2.matrix, n, beta));
        conjugate_blockwise(&a, |n| sector_unitary(basis, &s3.matrix, n, gamma))
    } else {
        let a = conjugate_blockwise(state, |n| sector_unitary(basis, &s3.matrix, n, -gamma));
        conjugate_blockwise(&a, |n| sector_unitary(basis, &s2.matrix, n, -beta))
    }
}

/// Single-mode amplitude-loss Kraus operators with transmissivity `t`,
/// applied to the full matrix. `mode` 0 is `a`, 1 is `b`.
fn apply_mode_loss(basis: FockBasis, full: &CMat, transmissivity: f64, mode: usize) -> CMat {
    let k = basis.cutoff();
    let d = basis.dim();
    let mut binom = vec![vec![0.0f64; k]; k];
    for n in 0..k {
        binom[n][0] = 1.0;
        for j in 1..=n {
            binom[n][j] = binom[n - 1][j - 1] + if j <= n - 1 { binom[n - 1][j] } else { 0.0 };
        }
    }
    // amplitude of losing `l` photons out of `n`
    let amp = |n: usize, l: usize| -> f64 {
        (binom[n][l] * transmissivity.powi((n - l) as i32) * (1.0 - transmissivity).powi(l as i32))
            .sqrt()
    };
    let mut out = CMat::zeros(d, d);
    for l in 0..k {
        // K_l rho K_l^dag accumulated entrywise
        for r in 0..d {
            let (r1, r2) = basis.labels(r);
            let (rn, r_other) = if mode == 0 { (r1, r2) } else { (r2, r1) };
            if rn + l >= k {
                continue;
            }
            let rsrc_n = rn + l;
            let rsrc = if mode == 0 {
                basis.index(rsrc_n, r_other)
            } else {
                basis.index(r_other, rsrc_n)
            };
            let ra = amp(rsrc_n, l);
            if ra == 0.0 {
                continue;
            }
            for col in 0..d {
                let (c1, c2) = basis.labels(col);
                let (cn, c_other) = if mode == 0 { (c1, c2) } else { (c2, c1) };
                if cn + l >= k {
                    continue;
                }
                let csrc_n = cn + l;
                let csrc = if mode == 0 {
                    basis.index(csrc_n, c_other)
                } else {
                    basis.index(c_other, csrc_n)
                };
                let ca = amp(csrc_n, l);
                if ca == 0.0 {
                    continue;
                }
                out[(r, col)] += full[(rsrc, csrc)] * c(ra * ca, 0.0);
            }
        }
    }
    out
}

/// Diattenuator: per-mode amplitude loss with transmissivities `q`, `r` in
/// the `(beta, gamma)`-rotated frame.
pub fn apply_diattenuator(state: &TwoModeState, spec: &DiattenuatorSpec) -> TwoModeState {
    let basis = state.basis();
    let rotated = frame_rotation(state, spec.beta, spec.gamma, false);
    let mut full = rotated.to_full();
    full = apply_mode_loss(basis, &full, spec.q, 0);
    full = apply_mode_loss(basis, &full, spec.r, 1);
    let lossy = TwoModeState::from_full(basis, &full);
    frame_rotation(&lossy, spec.beta, spec.gamma, true)
}

/// Angle grid and renormalized Gaussian weights of the convex-rotation
/// depolarizer. A single grid point sits at the interval midpoint.
pub fn convex_rotation_grid(
    eta_min: f64,
    eta_max: f64,
    n_r: usize,
    sigma_r: f64,
) -> Vec<(f64, f64)> {
    let angles: Vec<f64> = if n_r == 1 {
        vec![0.5 * (eta_min + eta_max)]
    } else {
        (0..n_r)
            .map(|i| eta_min + (eta_max - eta_min) * i as f64 / (n_r - 1) as f64)
            .collect()
    };
    let mut weights: Vec<f64> = angles
        .iter()
        .map(|&e| (-e * e / (2.0 * sigma_r * sigma_r)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    angles.into_iter().zip(weights).collect()
}

/// One pass of the convex-rotation depolarizer with a fixed axis ordering
/// (`perm` indexes the Stokes axes `S1, S2, S3` as 0..2).
pub fn apply_convex_rotation_ordered(
    state: &TwoModeState,
    grid: &[(f64, f64)],
    perm: [usize; 3],
) -> TwoModeState {
    use crate::hilbert::build_stokes_operators;
    let basis = state.basis();
    let [_, s1, s2, s3] = build_stokes_operators(basis);
    let gens = [s1.matrix, s2.matrix, s3.matrix];
    let mut rho = state.clone();
    for &axis in &perm {
        let g = &gens[axis];
        let mut acc: Option<TwoModeState> = None;
        for &(eta, w) in grid {
            let rotated = conjugate_blockwise(&rho, |n| sector_unitary(basis, g, n, eta));
            let scaled = rotated.map_blocks(|_, _, b| b * c(w, 0.0));
            acc = Some(match acc {
                None => scaled,
                Some(a) => add_states(&a, &scaled),
            });
        }
        rho = acc.expect("grid is nonempty");
    }
    rho
}

fn add_states(a: &TwoModeState, b: &TwoModeState) -> TwoModeState {
    let mut blocks = a.blocks().clone();
    for (&k, bb) in b.blocks() {
        blocks
            .entry(k)
            .and_modify(|ab| *ab += bb)
            .or_insert_with(|| bb.clone());
    }
    TwoModeState::from_blocks(a.basis(), blocks)
}

/// The six orderings of the Stokes axes `(S1, S2, S3)` used by the
/// convex-rotation depolarizer.
pub const AXIS_PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Convex-rotation depolarizer: sequential convex rotation channels about
/// the three Stokes axes; with `permutation_average` the output is the
/// equal-weight mixture over all six axis orderings.
pub fn apply_convex_rotation_depolarizer(
    state: &TwoModeState,
    eta_min: f64,
    eta_max: f64,
    n_r: usize,
    sigma_r: f64,
    permutation_average: bool,
) -> TwoModeState {
    let grid = convex_rotation_grid(eta_min, eta_max, n_r, sigma_r);
    if !permutation_average {
        return apply_convex_rotation_ordered(state, &grid, AXIS_PERMUTATIONS[0]);
    }
    let mut acc: Option<TwoModeState> = None;
    for perm in AXIS_PERMUTATIONS {
        let out = apply_convex_rotation_ordered(state, &grid, perm);
        let scaled = out.map_blocks(|_, _, b| b * c(1.0 / 6.0, 0.0));
        acc = Some(match acc {
            None => scaled,
            Some(a) => add_states(&a, &scaled),
        });
    }
    acc.expect("six permutations")
}

/// Dense superoperator of the dissipator sum on the `(n, m)` sector-pair
/// block, for number-conserving Hermitian jump operators with rates.
/// Dissipator convention: `D(A) rho = 2 A rho A - A^2 rho - rho A^2`.
fn block_lindblad_superop(
    basis: FockBasis,
    jumps: &[(f64, &CMat)],
    n: usize,
    m: usize,
) -> CMat {
    let dn = basis.sector_dim(n);
    let dm = basis.sector_dim(m);
    let dim = dn * dm;
    let id_n = CMat::identity(dn, dn);
    let id_m = CMat::identity(dm, dm);
    let mut sup = CMat::zeros(dim, dim);
    for &(rate, full) in jumps {
        let an = restrict_to_sector(basis, full, n);
        let am = restrict_to_sector(basis, full, m);
        // col-major vec: vec(A X B) = (B^T (x) A) vec(X); A_m is Hermitian so
        // the right factor A_m^dag has transpose conj(A_m)
        let sandwich = am.map(|z| z.conj()).kronecker(&an);
        let left = id_m.clone().kronecker(&(&an * &an));
        let right = (&am * &am).transpose().kronecker(&id_n);
        sup += (sandwich * c(2.0, 0.0) - left - right) * c(rate, 0.0);
    }
    sup
}

/// Lindblad depolarizer `exp(L t)` applied blockwise.
pub fn apply_lindblad_depolarizer(state: &TwoModeState, spec: &DepolarizerSpec) -> TwoModeState {
    use crate::hilbert::build_stokes_operators;
    let basis = state.basis();
    let [s0, s1, s2, s3] = build_stokes_operators(basis);
    let jumps: Vec<(f64, &CMat)> = match *spec {
        DepolarizerSpec::IsotropicLindblad { nu_t } => {
            vec![(nu_t, &s1.matrix), (nu_t, &s2.matrix), (nu_t, &s3.matrix)]
        }
        DepolarizerSpec::AnisotropicLindblad { nu_t, nu0_t } => {
            vec![(nu_t, &s2.matrix), (nu_t, &s3.matrix), (nu0_t, &s0.matrix)]
        }
        DepolarizerSpec::ConvexRotations { .. } => {
            panic!("convex-rotation spec passed to the Lindblad applier")
        }
    };
    if jumps.iter().all(|&(r, _)| r == 0.0) {
        return state.clone();
    }
    state.map_blocks(|n, m, b| {
        let sup = block_lindblad_superop(basis, &jumps, n, m);
        let prop = sup.exp();
        let dn = b.nrows();
        let dm = b.ncols();
        let vec_in = CMat::from_iterator(dn * dm, 1, b.iter().copied());
        let vec_out = prop * vec_in;
        CMat::from_iterator(dn, dm, vec_out.iter().copied())
    })
}

/// Apply one stage.
pub fn apply_stage(state: &TwoModeState, stage: &Stage) -> TwoModeState {
    match stage {
        Stage::Retarder(r) => apply_retarder(state, r),
        Stage::Diattenuator(d) => apply_diattenuator(state, d),
        Stage::Depolarizer(DepolarizerSpec::ConvexRotations {
            eta_min,
            eta_max,
            n_r,
            sigma_r,
            permutation_average,
        }) => apply_convex_rotation_depolarizer(
            state,
            *eta_min,
            *eta_max,
            *n_r,
            *sigma_r,
            *permutation_average,
        ),
        Stage::Depolarizer(spec) => apply_lindblad_depolarizer(state, spec),
    }
}

/// Apply the whole pipeline with the retarder angle set to `theta`.
pub fn apply_pipeline(
    state: &TwoModeState,
    pipeline: &ChannelPipeline,
    theta: f64,
) -> Result<TwoModeState> {
    pipeline.validate()?;
    let pipeline = pipeline.with_theta(theta);
    let mut rho = state.clone();
    for stage in &pipeline.stages {
        rho = apply_stage(&rho, stage);
    }
    Ok(rho)
}

/// Mueller matrix of the pipeline, read out by propagating a tomographically
/// complete set of single-photon states at a small internal cutoff.
pub fn extract_mueller_matrix(pipeline: &ChannelPipeline, theta: f64) -> Result<nalgebra::Matrix4<f64>> {
    use crate::hilbert::build_stokes_operators;
    let basis = FockBasis::new(3)?;
    let stokes = build_stokes_operators(basis);
    let inv_sqrt2 = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut probes: Vec<crate::CVec> = Vec::new();
    // H, V, D, L single-photon states
    for setup in 0..4 {
        let mut psi = crate::CVec::zeros(basis.dim());
        match setup {
            0 => psi[basis.index(1, 0)] = c(1.0, 0.0),
            1 => psi[basis.index(0, 1)] = c(1.0, 0.0),
            2 => {
                psi[basis.index(1, 0)] = inv_sqrt2;
                psi[basis.index(0, 1)] = inv_sqrt2;
            }
            _ => {
                psi[basis.index(1, 0)] = inv_sqrt2;
                psi[basis.index(0, 1)] = inv_sqrt2 * c(0.0, 1.0);
            }
        }
        probes.push(psi);
    }
    let mut x = nalgebra::Matrix4::<f64>::zeros();
    let mut y = nalgebra::Matrix4::<f64>::zeros();
    for (j, psi) in probes.iter().enumerate() {
        let rho_in = TwoModeState::from_pure(basis, psi);
        let rho_out = apply_pipeline(&rho_in, pipeline, theta)?;
        for mu in 0..4 {
            x[(mu, j)] = rho_in.expectation(&stokes[mu])?.re;
            y[(mu, j)] = rho_out.expectation(&stokes[mu])?.re;
        }
    }
    let x_inv = x
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("probe Stokes matrix is singular".into()))?;
    Ok(y * x_inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::make_noon;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn basis() -> FockBasis {
        FockBasis::new(6).unwrap()
    }

    fn max_diff(a: &TwoModeState, b: &TwoModeState) -> f64 {
        (a.to_full() - b.to_full())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn retarder_theta_zero_is_identity() {
        let st = make_noon(basis(), 2).unwrap();
        let spec = RetarderSpec {
            theta: 0.0,
            axis: RotationAxis::new(0.7, 1.1),
        };
        let out = apply_retarder(&st, &spec);
        assert!(max_diff(&st, &out) <= 1e-14);
    }

    #[test]
    fn s3_eigenstate_invariant_under_s3_rotation() {
        let b = basis();
        let mut psi = crate::CVec::zeros(b.dim());
        psi[b.index(1, 0)] = c(1.0, 0.0);
        let st = TwoModeState::from_pure(b, &psi);
        let spec = RetarderSpec {
            theta: 1.234,
            axis: RotationAxis::new(0.0, 0.0),
        };
        let out = apply_retarder(&st, &spec);
        assert!(max_diff(&st, &out) <= 1e-13);
    }

    #[test]
    fn pi_rotation_about_s1_swaps_modes() {
        let b = basis();
        let mut psi = crate::CVec::zeros(b.dim());
        psi[b.index(1, 0)] = c(1.0, 0.0);
        let st = TwoModeState::from_pure(b, &psi);
        let spec = RetarderSpec {
            theta: PI,
            axis: RotationAxis::new(PI / 2.0, 0.0),
        };
        let out = apply_retarder(&st, &spec);
        let blk = out.block(1, 1).unwrap();
        // sector 1 ordering (0,1), (1,0): |0,1><0,1| is entry (0,0)
        assert_abs_diff_eq!(blk[(0, 0)].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn retarder_preserves_purity() {
        let st = make_noon(basis(), 3).unwrap();
        let spec = RetarderSpec {
            theta: 0.9,
            axis: RotationAxis::new(1.0, 0.3),
        };
        let out = apply_retarder(&st, &spec);
        assert_abs_diff_eq!(out.purity(), st.purity(), epsilon = 1e-12);
        out.check_density().unwrap();
    }

    #[test]
    fn diattenuator_identity_and_full_loss() {
        let st = make_noon(basis(), 2).unwrap();
        let identity = DiattenuatorSpec {
            q: 1.0,
            r: 1.0,
            beta: 0.4,
            gamma: 0.9,
        };
        assert!(max_diff(&st, &apply_diattenuator(&st, &identity)) <= 1e-12);

        let dark = DiattenuatorSpec {
            q: 0.0,
            r: 0.0,
            beta: 0.0,
            gamma: 0.0,
        };
        let out = apply_diattenuator(&st, &dark);
        let blk = out.block(0, 0).unwrap();
        assert_abs_diff_eq!(blk[(0, 0)].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn diattenuator_single_photon_mixture() {
        let b = basis();
        let mut psi = crate::CVec::zeros(b.dim());
        psi[b.index(1, 0)] = c(1.0, 0.0);
        let st = TwoModeState::from_pure(b, &psi);
        let spec = DiattenuatorSpec {
            q: 0.9,
            r: 0.9,
            beta: 0.0,
            gamma: 0.0,
        };
        let out = apply_diattenuator(&st, &spec);
        out.check_density().unwrap();
        let one = out.block(1, 1).unwrap();
        assert_abs_diff_eq!(one[(1, 1)].re, 0.9, epsilon = 1e-12);
        let vac = out.block(0, 0).unwrap();
        assert_abs_diff_eq!(vac[(0, 0)].re, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn convex_grid_conventions() {
        let g = convex_rotation_grid(-0.5, 0.5, 1, 0.1);
        assert_eq!(g.len(), 1);
        assert_abs_diff_eq!(g[0].0, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g[0].1, 1.0, epsilon = 1e-15);

        let g = convex_rotation_grid(-0.5, 0.5, 5, 0.2);
        assert_abs_diff_eq!(g.iter().map(|p| p.1).sum::<f64>(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g[0].0, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(g[4].0, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn convex_single_zero_angle_is_identity() {
        let st = make_noon(basis(), 2).unwrap();
        let out = apply_convex_rotation_depolarizer(&st, 0.0, 0.0, 1, 0.1, true);
        assert!(max_diff(&st, &out) <= 1e-13);
    }

    #[test]
    fn convex_sigma_to_zero_is_pure_rotation() {
        // grid contains 0 (odd count, symmetric interval); tiny sigma puts
        // all weight there
        let st = make_noon(basis(), 2).unwrap();
        let out = apply_convex_rotation_depolarizer(&st, -0.4, 0.4, 5, 1e-4, true);
        assert!(max_diff(&st, &out) <= 1e-12);
    }

    #[test]
    fn convex_depolarizer_reduces_purity() {
        let st = make_noon(basis(), 2).unwrap();
        let out =
            apply_convex_rotation_depolarizer(&st, -PI / 8.0, PI / 8.0, 6, PI / 32.0, true);
        out.check_density().unwrap();
        assert!(out.purity() < 1.0 - 1e-3);
    }

    #[test]
    fn lindblad_zero_rate_is_identity() {
        let st = make_noon(basis(), 2).unwrap();
        let out = apply_lindblad_depolarizer(&st, &DepolarizerSpec::IsotropicLindblad { nu_t: 0.0 });
        assert!(max_diff(&st, &out) <= 1e-14);
    }

    #[test]
    fn isotropic_long_time_fixed_point() {
        let b = basis();
        let mut psi = crate::CVec::zeros(b.dim());
        psi[b.index(1, 0)] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        psi[b.index(0, 1)] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let st = TwoModeState::from_pure(b, &psi);
        let out =
            apply_lindblad_depolarizer(&st, &DepolarizerSpec::IsotropicLindblad { nu_t: 50.0 });
        out.check_density().unwrap();
        let blk = out.block(1, 1).unwrap();
        assert_abs_diff_eq!(blk[(0, 0)].re, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(blk[(1, 1)].re, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(blk[(0, 1)].norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn lindblad_trace_and_positivity() {
        let st = make_noon(basis(), 3).unwrap();
        for spec in [
            DepolarizerSpec::IsotropicLindblad { nu_t: 0.003 },
            DepolarizerSpec::AnisotropicLindblad {
                nu_t: 0.01,
                nu0_t: 0.0,
            },
            DepolarizerSpec::AnisotropicLindblad {
                nu_t: 0.01,
                nu0_t: 0.02,
            },
        ] {
            let out = apply_lindblad_depolarizer(&st, &spec);
            out.check_density().unwrap();
        }
    }

    #[test]
    fn pipeline_shape_enforced() {
        let ret = RetarderSpec {
            theta: 0.1,
            axis: RotationAxis::new(0.0, 0.0),
        };
        assert!(ChannelPipeline::new(Order::Custom, vec![]).is_err());
        assert!(ChannelPipeline::new(
            Order::Custom,
            vec![Stage::Retarder(ret), Stage::Retarder(ret)]
        )
        .is_err());
        let p = ChannelPipeline::bare(ret).unwrap();
        assert_abs_diff_eq!(p.retarder().theta, 0.1);
        assert_abs_diff_eq!(p.with_theta(0.7).retarder().theta, 0.7);
    }

    #[test]
    fn forward_equals_reverse_with_identity_noise() {
        let st = make_noon(basis(), 2).unwrap();
        let ret = RetarderSpec {
            theta: 0.3,
            axis: RotationAxis::new(PI / 5.0, 0.0),
        };
        let diat = DiattenuatorSpec {
            q: 1.0,
            r: 1.0,
            beta: 0.0,
            gamma: 0.0,
        };
        let depol = DepolarizerSpec::IsotropicLindblad { nu_t: 0.0 };
        let fwd = apply_pipeline(&st, &ChannelPipeline::forward(diat, ret, depol).unwrap(), 0.3)
            .unwrap();
        let rev = apply_pipeline(&st, &ChannelPipeline::reverse(diat, ret, depol).unwrap(), 0.3)
            .unwrap();
        assert!(max_diff(&fwd, &rev) <= 1e-12);
    }

    #[test]
    fn mueller_identity_pipeline() {
        let ret = RetarderSpec {
            theta: 0.0,
            axis: RotationAxis::new(0.0, 0.0),
        };
        let m = extract_mueller_matrix(&ChannelPipeline::bare(ret).unwrap(), 0.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(m[(i, j)], expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn mueller_retarder_about_s3() {
        let theta = 0.77;
        let ret = RetarderSpec {
            theta,
            axis: RotationAxis::new(0.0, 0.0),
        };
        let m = extract_mueller_matrix(&ChannelPipeline::bare(ret).unwrap(), theta).unwrap();
        assert_abs_diff_eq!(m[(0, 0)], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m[(3, 3)], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m[(1, 1)], theta.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(m[(2, 2)], theta.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(m[(2, 1)].abs(), theta.sin().abs(), epsilon = 1e-12);
        assert_abs_diff_eq!(m[(1, 3)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn mueller_balanced_diattenuator() {
        let q = 0.7;
        let ret = RetarderSpec {
            theta: 0.0,
            axis: RotationAxis::new(0.0, 0.0),
        };
        let diat = DiattenuatorSpec {
            q,
            r: q,
            beta: 0.0,
            gamma: 0.0,
        };
        let depol = DepolarizerSpec::IsotropicLindblad { nu_t: 0.0 };
        let p = ChannelPipeline::forward(diat, ret, depol).unwrap();
        let m = extract_mueller_matrix(&p, 0.0).unwrap();
        assert_abs_diff_eq!(m[(0, 0)], q, epsilon = 1e-12);
        for i in 1..4 {
            assert_abs_diff_eq!(m[(i, i)], q, epsilon = 1e-12);
            assert_abs_diff_eq!(m[(0, i)], 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(m[(i, 0)], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn number_sector_closure() {
        let st = make_noon(basis(), 2).unwrap();
        let before = st.sectors();
        let ret = apply_retarder(
            &st,
            &RetarderSpec {
                theta: 0.4,
                axis: RotationAxis::new(1.0, 2.0),
            },
        );
        assert_eq!(ret.sectors(), before);
        let dep =
            apply_lindblad_depolarizer(&st, &DepolarizerSpec::IsotropicLindblad { nu_t: 0.1 });
        assert_eq!(dep.sectors(), before);
        let conv = apply_convex_rotation_depolarizer(&st, -0.3, 0.3, 4, 0.1, true);
        assert_eq!(conv.sectors(), before);
    }

    #[test]
    fn trace_preservation_across_channels() {
        let b = basis();
        let st = make_noon(b, 3).unwrap();
        let cases: Vec<TwoModeState> = vec![
            apply_diattenuator(
                &st,
                &DiattenuatorSpec {
                    q: 0.8,
                    r: 0.6,
                    beta: 0.3,
                    gamma: 0.7,
                },
            ),
            apply_lindblad_depolarizer(&st, &DepolarizerSpec::IsotropicLindblad { nu_t: 0.02 }),
            apply_convex_rotation_depolarizer(&st, -0.4, 0.4, 5, 0.15, true),
        ];
        for out in cases {
            assert_abs_diff_eq!(out.trace().re, 1.0, epsilon = 1e-10);
            assert!(out.min_eigenvalue() >= -1e-10);
        }
    }
}
