//! Spherical quadrature, spherical harmonics, Husimi function, Wehrl
//! entropy, and the Q-function polarization measure.
//!
//! The grid is a product of Gauss-Legendre nodes in `cos(theta)` and a
//! uniform trapezoid in `phi`, exact for spherical harmonics up to the
//! declared order.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::{c, C64, CVec};

use super::angular::StateMultipoles;
use super::SpinSector;

#[derive(Debug, Clone, Copy)]
pub struct SphereNode {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
}

/// Product quadrature grid on the unit sphere.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    order: usize,
    nodes: Vec<SphereNode>,
}

impl SphereGrid {
    /// Grid integrating spherical harmonics `Y_Kq` exactly for `K <= order`.
    pub fn new(order: usize) -> Self {
        let n_theta = order + 1;
        let n_phi = 2 * order + 2;
        let gl = gauss_legendre(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        for &(x, w) in &gl {
            let theta = x.acos();
            for j in 0..n_phi {
                nodes.push(SphereNode {
                    theta,
                    phi: j as f64 * dphi,
                    weight: w * dphi,
                });
            }
        }
        SphereGrid { order, nodes }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[SphereNode] {
        &self.nodes
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.nodes.len());
        self.nodes
            .iter()
            .zip(values)
            .map(|(n, v)| n.weight * v)
            .sum()
    }

    fn require_order(&self, required: usize) -> Result<()> {
        if self.order < required {
            return Err(Error::GridOrder {
                order: self.order,
                required,
            });
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre recurrence.
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out
}

/// `(P_n(x), P_n'(x))`.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Spherical harmonic `Y_Kq(theta, phi)`, Condon-Shortley convention.
pub fn spherical_harmonic(k: usize, q: i64, theta: f64, phi: f64) -> C64 {
    let aq = q.unsigned_abs() as usize;
    assert!(aq <= k);
    let p = assoc_legendre(k, aq, theta.cos());
    let mut ln_ratio = 0.0;
    for j in (k - aq + 1)..=(k + aq) {
        ln_ratio += (j as f64).ln();
    }
    let norm = ((2.0 * k as f64 + 1.0) / (4.0 * PI) * (-ln_ratio).exp()).sqrt();
    let y = c(norm * p, 0.0) * C64::new(0.0, aq as f64 * phi).exp();
    if q >= 0 {
        y
    } else {
        let sign = if aq % 2 == 0 { 1.0 } else { -1.0 };
        y.conj() * c(sign, 0.0)
    }
}

/// Associated Legendre `P_l^m(x)` for `m >= 0`, with the Condon-Shortley
/// phase included.
fn assoc_legendre(l: usize, m: usize, x: f64) -> f64 {
    let sx = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 1.0;
    for i in 1..=m {
        pmm *= -((2 * i - 1) as f64) * sx;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = pmm;
    let mut pm2 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pm2;
    }
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        let mf = m as f64;
        let p = ((2.0 * lf - 1.0) * x * pm2 - (lf + mf - 1.0) * pm1) / (lf - mf);
        pm1 = pm2;
        pm2 = p;
    }
    pm2
}

/// Bloch (su(2)) coherent-state vector at `(theta, phi)` on the spin-`S`
/// sector, Dicke ordering. The north pole `theta = 0` is `|S, S>`, i.e. all
/// photons horizontal.
pub fn bloch_coherent_vector(two_s: usize, theta: f64, phi: f64) -> CVec {
    let n = two_s;
    let ct = (theta / 2.0).cos();
    let st = (theta / 2.0).sin();
    let mut v = CVec::zeros(n + 1);
    for i in 0..=n {
        // i = n1 = S + m photons in the horizontal mode
        let ln_binom = ln_choose(n, i);
        let mag = (0.5 * ln_binom).exp()
            * ct.powi(i as i32)
            * st.powi((n - i) as i32);
        v[i] = c(mag, 0.0) * C64::new(0.0, (n - i) as f64 * phi).exp();
    }
    v
}

fn ln_choose(n: usize, k: usize) -> f64 {
    let lf = |x: usize| (1..=x).map(|i| (i as f64).ln()).sum::<f64>();
    lf(n) - lf(k) - lf(n - k)
}

/// Husimi function `Q(theta, phi) = <z| rho |z>` sampled on the grid.
/// Requires grid order at least `2 * 2S` (band limit of `Q^2` integrals).
pub fn husimi_q(rho: &SpinSector, grid: &SphereGrid) -> Result<Vec<f64>> {
    grid.require_order(2 * rho.two_s)?;
    let mut out = Vec::with_capacity(grid.nodes().len());
    for node in grid.nodes() {
        let z = bloch_coherent_vector(rho.two_s, node.theta, node.phi);
        let q = (z.adjoint() * &rho.matrix * &z)[(0, 0)];
        out.push(q.re);
    }
    Ok(out)
}

/// Wehrl entropy `S_W = -(2S+1)/(4 pi) * int Q ln Q dOmega` with
/// `0 ln 0 = 0`. Lower-bounded by `2S/(2S+1)`, attained only by Bloch
/// coherent states.
pub fn wehrl_entropy(rho: &SpinSector, grid: &SphereGrid) -> Result<f64> {
    let q = husimi_q(rho, grid)?;
    let integrand: Vec<f64> = q
        .iter()
        .map(|&v| if v > 0.0 { v * v.ln() } else { 0.0 })
        .collect();
    Ok(-(rho.two_s as f64 + 1.0) / (4.0 * PI) * grid.integrate(&integrand))
}

/// Q-function degree of polarization `P_q = 1 - Sigma / (4 pi)` with
/// `Sigma = 1 / int Qn^2 dOmega`, where `Qn = (2S+1)/(4 pi) * Q` is the
/// unit-normalized Husimi distribution. Exactly 0 for the maximally
/// unpolarized state.
pub fn q_dop(rho: &SpinSector, grid: &SphereGrid) -> Result<f64> {
    let q = husimi_q(rho, grid)?;
    let scale = (rho.two_s as f64 + 1.0) / (4.0 * PI);
    let sq: Vec<f64> = q.iter().map(|&v| (scale * v) * (scale * v)).collect();
    let denom = grid.integrate(&sq);
    Ok(1.0 - 1.0 / (4.0 * PI * denom))
}

/// `K`-th multipole component of the Husimi function sampled on the grid:
/// `Q^(K) = sqrt(4 pi / (2S+1)) C^{SS}_{SS,K0} sum_q rho_Kq Y_Kq`.
/// Summing over all `K` reproduces [`husimi_q`] pointwise.
pub fn q_multipole_component(
    multipoles: &StateMultipoles,
    k: usize,
    grid: &SphereGrid,
) -> Result<Vec<f64>> {
    if k > multipoles.two_s {
        return Err(Error::InvalidArgument(format!(
            "multipole K = {k} exceeds 2S = {}",
            multipoles.two_s
        )));
    }
    let two_s = multipoles.two_s;
    let s = two_s as f64 / 2.0;
    let stretched = super::clebsch_gordan(s, s, k as f64, 0.0, s, s)?;
    let pref = (4.0 * PI / (two_s as f64 + 1.0)).sqrt() * stretched;
    let mut out = Vec::with_capacity(grid.nodes().len());
    for node in grid.nodes() {
        let mut acc = c(0.0, 0.0);
        for q in -(k as i64)..=k as i64 {
            acc += multipoles.get(k, q) * spherical_harmonic(k, q, node.theta, node.phi);
        }
        out.push(pref * acc.re);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarization::{state_multipoles, SpinSectorVec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_weight_is_sphere_area() {
        for order in [2, 5, 11] {
            let g = SphereGrid::new(order);
            assert_abs_diff_eq!(g.total_weight(), 4.0 * PI, epsilon = 1e-10);
        }
    }

    #[test]
    fn grid_integrates_harmonics_exactly() {
        let order = 8;
        let g = SphereGrid::new(order);
        for k in 0..=order {
            for q in -(k as i64)..=k as i64 {
                let mut acc = c(0.0, 0.0);
                for node in g.nodes() {
                    acc += spherical_harmonic(k, q, node.theta, node.phi) * c(node.weight, 0.0);
                }
                let expect = if k == 0 { (4.0 * PI).sqrt() } else { 0.0 };
                assert_abs_diff_eq!(acc.re, expect, epsilon = 1e-10);
                assert_abs_diff_eq!(acc.im, 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn harmonic_orthonormality_sampled() {
        let g = SphereGrid::new(10);
        for (k1, q1, k2, q2) in [(1, 0, 1, 0), (2, 1, 2, 1), (3, -2, 1, 0), (2, 1, 2, -1)] {
            let mut acc = c(0.0, 0.0);
            for node in g.nodes() {
                acc += spherical_harmonic(k1, q1, node.theta, node.phi).conj()
                    * spherical_harmonic(k2, q2, node.theta, node.phi)
                    * c(node.weight, 0.0);
            }
            let expect = if k1 == k2 && q1 == q2 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(acc.re, expect, epsilon = 1e-10);
        }
    }

    #[test]
    fn husimi_of_maximally_mixed_is_flat() {
        for two_s in 1..=4usize {
            let rho = SpinSector::maximally_mixed(two_s);
            let g = SphereGrid::new(2 * two_s + 2);
            let q = husimi_q(&rho, &g).unwrap();
            for v in &q {
                assert_abs_diff_eq!(*v, 1.0 / (two_s as f64 + 1.0), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn husimi_normalization_and_range() {
        // S = 3/2 pure state
        let mut v = CVec::zeros(4);
        v[0] = c(0.6, 0.1);
        v[2] = c(0.3, -0.4);
        v[3] = c(0.2, 0.0);
        let psi = SpinSectorVec::new(3, v).unwrap();
        let rho = SpinSector::from_vector(&psi);
        let g = SphereGrid::new(14);
        let q = husimi_q(&rho, &g).unwrap();
        for val in &q {
            assert!(*val >= -1e-12 && *val <= 1.0 + 1e-12);
        }
        let norm = (rho.two_s as f64 + 1.0) / (4.0 * PI) * g.integrate(&q);
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn husimi_self_overlap_at_pole() {
        let two_s = 3;
        let z = bloch_coherent_vector(two_s, 0.0, 0.0);
        let psi = SpinSectorVec::new(two_s, z).unwrap();
        let rho = SpinSector::from_vector(&psi);
        let q0 = {
            let z = bloch_coherent_vector(two_s, 0.0, 0.0);
            (z.adjoint() * &rho.matrix * &z)[(0, 0)].re
        };
        assert_abs_diff_eq!(q0, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn grid_order_guard() {
        let rho = SpinSector::maximally_mixed(4);
        let g = SphereGrid::new(3);
        assert!(matches!(
            husimi_q(&rho, &g),
            Err(crate::Error::GridOrder { .. })
        ));
    }

    #[test]
    fn wehrl_coherent_matches_bound() {
        for two_s in 1..=8usize {
            let z = bloch_coherent_vector(two_s, 1.1, 0.4);
            let psi = SpinSectorVec::new(two_s, z).unwrap();
            let rho = SpinSector::from_vector(&psi);
            // Q ln Q is not band-limited; the integrand has a logarithmic
            // derivative singularity at the antipode, so the quadrature
            // needs headroom beyond the harmonic band limit.
            let g = SphereGrid::new(6 * two_s + 20);
            let sw = wehrl_entropy(&rho, &g).unwrap();
            let bound = two_s as f64 / (two_s as f64 + 1.0);
            assert_abs_diff_eq!(sw, bound, epsilon = 1e-6);
        }
    }

    #[test]
    fn q_dop_of_maximally_mixed_is_zero() {
        for two_s in 1..=4usize {
            let rho = SpinSector::maximally_mixed(two_s);
            let g = SphereGrid::new(2 * two_s + 4);
            assert_abs_diff_eq!(q_dop(&rho, &g).unwrap(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn multipole_components_sum_to_husimi() {
        let mut v = CVec::zeros(5);
        v[0] = c(0.5, 0.0);
        v[1] = c(-0.2, 0.3);
        v[4] = c(0.4, 0.1);
        let psi = SpinSectorVec::new(4, v).unwrap();
        let rho = SpinSector::from_vector(&psi);
        let g = SphereGrid::new(2 * 4 + 2);
        let q = husimi_q(&rho, &g).unwrap();
        let mp = state_multipoles(&rho);
        let mut acc = vec![0.0; q.len()];
        for k in 0..=4 {
            let comp = q_multipole_component(&mp, k, &g).unwrap();
            for (a, b) in acc.iter_mut().zip(&comp) {
                *a += b;
            }
        }
        for (a, b) in acc.iter().zip(&q) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-8);
        }
        // K=0 component is constant; K=1 of maximally mixed vanishes
        let flat = q_multipole_component(&mp, 0, &g).unwrap();
        for v in &flat {
            assert_abs_diff_eq!(*v, flat[0], epsilon = 1e-12);
        }
        let mixed = SpinSector::maximally_mixed(4);
        let mp0 = state_multipoles(&mixed);
        for v in q_multipole_component(&mp0, 1, &g).unwrap() {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        }
    }
}
