//! Helpers shared by the integration-test targets: a four-mode ancilla
//! construction for the diattenuator and a fixed-step RK4 integrator for the
//! Lindblad depolarizers.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qpolarimetry::channels::DiattenuatorSpec;
use qpolarimetry::hilbert::{build_stokes_operators, FockBasis};

pub type CMat = DMatrix<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Single-mode annihilation operator on `levels` Fock levels.
pub fn annihilation(levels: usize) -> CMat {
    let mut a = CMat::zeros(levels, levels);
    for n in 1..levels {
        a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
    }
    a
}

/// Operator acting on one slot of a four-mode product space, each mode with
/// `levels` Fock levels, ordering `|a, b, anc_a, anc_b>`.
pub fn embed(op: &CMat, slot: usize, levels: usize) -> CMat {
    let id = CMat::identity(levels, levels);
    let mut out = CMat::identity(1, 1);
    for s in 0..4 {
        let factor = if s == slot { op } else { &id };
        out = out.kronecker(factor);
    }
    out
}

/// Beamsplitter `exp(vartheta (x^dag y - x y^dag))` between slots `sx`, `sy`
/// with transmissivity `t = cos^2(vartheta)`.
pub fn beamsplitter(t: f64, sx: usize, sy: usize, levels: usize) -> CMat {
    let vartheta = t.sqrt().acos();
    let a = annihilation(levels);
    let x = embed(&a, sx, levels);
    let y = embed(&a, sy, levels);
    let gen = (x.adjoint() * &y - &x * y.adjoint()) * c(vartheta, 0.0);
    gen.exp()
}

/// Random density matrix of the given dimension.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> CMat {
    let g = CMat::from_fn(dim, dim, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let m = &g * g.adjoint();
    let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
    m * c(1.0 / tr, 0.0)
}

/// Diattenuator by the explicit ancilla construction: rotate the system
/// frame, couple each mode to a vacuum ancilla through a beamsplitter,
/// trace out the ancillas, rotate back.
pub fn diattenuator_ancilla_oracle(
    basis: FockBasis,
    rho_sys: &CMat,
    spec: &DiattenuatorSpec,
) -> CMat {
    let levels = basis.cutoff();
    let dim = levels * levels;

    // frame rotation exp(-i gamma S3) then exp(-i beta S2) on the system
    let [_, _, s2, s3] = build_stokes_operators(basis);
    let u_gamma = (s3.matrix.clone() * c(0.0, -spec.gamma)).exp();
    let u_beta = (s2.matrix.clone() * c(0.0, -spec.beta)).exp();
    let u_frame = u_beta * u_gamma;
    let rotated = &u_frame * rho_sys * u_frame.adjoint();

    // embed with vacuum ancillas: system slots 0, 1; ancilla slots 2, 3
    let full_dim = dim * dim;
    let mut big = CMat::zeros(full_dim, full_dim);
    for i in 0..dim {
        for j in 0..dim {
            // |n_a n_b 0 0> index: ((n_a * L + n_b) * L + 0) * L + 0
            big[(i * dim, j * dim)] = rotated[(i, j)];
        }
    }
    let u = beamsplitter(spec.q, 0, 2, levels) * beamsplitter(spec.r, 1, 3, levels);
    let evolved = &u * big * u.adjoint();

    // partial trace over the two ancilla slots
    let mut reduced = CMat::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = c(0.0, 0.0);
            for k in 0..dim {
                acc += evolved[(i * dim + k, j * dim + k)];
            }
            reduced[(i, j)] = acc;
        }
    }

    // undo the frame rotation
    u_frame.adjoint() * reduced * &u_frame
}

/// Dissipator `D(A) rho = 2 A rho A - A^2 rho - rho A^2` for Hermitian `A`.
pub fn dissipator(a: &CMat, rho: &CMat) -> CMat {
    let a2 = a * a;
    (a * rho * a) * c(2.0, 0.0) - &a2 * rho - rho * a2
}

/// Fixed-step RK4 integration of `d rho / dt = sum_k rate_k D(A_k) rho` from
/// t = 0 to t = 1.
pub fn rk4_lindblad(rho0: &CMat, jumps: &[(f64, &CMat)], steps: usize) -> CMat {
    let h = 1.0 / steps as f64;
    let f = |rho: &CMat| -> CMat {
        let mut out = CMat::zeros(rho.nrows(), rho.ncols());
        for &(rate, a) in jumps {
            out += dissipator(a, rho) * c(rate, 0.0);
        }
        out
    };
    let mut rho = rho0.clone();
    for _ in 0..steps {
        let k1 = f(&rho);
        let k2 = f(&(&rho + &k1 * c(h / 2.0, 0.0)));
        let k3 = f(&(&rho + &k2 * c(h / 2.0, 0.0)));
        let k4 = f(&(&rho + &k3 * c(h, 0.0)));
        rho += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(h / 6.0, 0.0);
    }
    rho
}
