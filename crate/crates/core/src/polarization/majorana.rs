//! Majorana representation: the bijection between pure spin-`S` sector
//! states and `2S` points on the Poincare sphere.
//!
//! The polynomial attached to a sector state `sum_j psi_j |j, n-j>` is
//! `P(z) = sum_j psi_j / sqrt(j! (n-j)!) z^j`; each finite root `xi` maps to
//! the point `theta = 2 atan|t|, phi = arg t` with `t = -xi`, and every unit
//! of degree deficit contributes a point at `theta = pi`.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hilbert::{FockBasis, TwoModeState};
use crate::{c, C64, CVec};

use super::SpinSectorVec;

/// List of `2S` points `(theta, phi)` on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaConstellation {
    points: Vec<(f64, f64)>,
}

impl MajoranaConstellation {
    /// Validates polar range and finiteness; `phi` is reduced mod `2 pi`.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument(
                "constellation must have at least one point".into(),
            ));
        }
        let mut cleaned = Vec::with_capacity(points.len());
        for (theta, phi) in points {
            if !theta.is_finite() || !phi.is_finite() {
                return Err(Error::InvalidArgument(
                    "constellation point is not finite".into(),
                ));
            }
            if !(0.0..=PI).contains(&theta) {
                return Err(Error::InvalidArgument(format!(
                    "polar angle {theta} outside [0, pi]"
                )));
            }
            cleaned.push((theta, phi.rem_euclid(2.0 * PI)));
        }
        Ok(MajoranaConstellation { points: cleaned })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Number of points, `2S` = total photons of the represented state.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Parse the plain-text format: one `theta phi` pair per line, radians,
    /// `#` comments and blank lines ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let theta: f64 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad_line(lineno))?;
            let phi: f64 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad_line(lineno))?;
            if it.next().is_some() {
                return Err(bad_line(lineno));
            }
            if theta.is_nan() || phi.is_nan() {
                return Err(Error::InvalidArgument(format!(
                    "NaN in constellation file at line {}",
                    lineno + 1
                )));
            }
            points.push((theta, phi));
        }
        MajoranaConstellation::new(points)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = String::new();
        for &(t, p) in &self.points {
            text.push_str(&format!("{t:.17} {p:.17}\n"));
        }
        std::fs::write(path, text)?;
        Ok(())
    }
}

fn bad_line(lineno: usize) -> Error {
    Error::InvalidArgument(format!(
        "malformed constellation line {} (want 'theta phi')",
        lineno + 1
    ))
}

/// Unnormalized sector amplitudes `psi_j` of the constellation product state
/// `prod_k (cos(theta_k/2) a^dag + e^{i phi_k} sin(theta_k/2) b^dag) |0>`,
/// together with the vector norm (the combinatorial normalization factor).
pub fn constellation_amplitudes(constellation: &MajoranaConstellation) -> (CVec, f64) {
    let n = constellation.len();
    // coeffs[j]: coefficient of (a^dag)^j (b^dag)^(n-j) in the product
    let mut coeffs = vec![c(0.0, 0.0); n + 1];
    coeffs[0] = c(1.0, 0.0);
    let mut deg = 0usize;
    for &(theta, phi) in constellation.points() {
        let ct = c((theta / 2.0).cos(), 0.0);
        let st = C64::new(0.0, phi).exp() * c((theta / 2.0).sin(), 0.0);
        for j in (0..=deg).rev() {
            let v = coeffs[j];
            coeffs[j + 1] += ct * v;
            coeffs[j] = st * v;
        }
        deg += 1;
    }
    let mut psi = CVec::zeros(n + 1);
    for j in 0..=n {
        let ln_ff = ln_fact(j) + ln_fact(n - j);
        psi[j] = coeffs[j] * c((0.5 * ln_ff).exp(), 0.0);
    }
    let norm = psi.norm();
    (psi, norm)
}

fn ln_fact(n: usize) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

/// Normalized pure state of a constellation, embedded in the two-mode space.
pub fn constellation_to_state(
    basis: FockBasis,
    constellation: &MajoranaConstellation,
) -> Result<TwoModeState> {
    let n = constellation.len();
    if !basis.sector_complete(n) {
        return Err(Error::Capacity(format!(
            "{n}-point constellation needs cutoff > {n}, basis has {}",
            basis.cutoff()
        )));
    }
    let (psi, norm) = constellation_amplitudes(constellation);
    let sector = SpinSectorVec::new(n, psi / c(norm, 0.0))?;
    sector.to_state(basis)
}

/// Majorana constellation of a pure sector state: roots of the Majorana
/// polynomial mapped to the sphere, with degree deficit contributing points
/// at `theta = pi`.
pub fn majorana_roots(psi: &SpinSectorVec) -> Result<MajoranaConstellation> {
    let n = psi.two_s;
    let mut coeffs = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let ln_ff = ln_fact(j) + ln_fact(n - j);
        coeffs.push(psi.vector[j] * c((-0.5 * ln_ff).exp(), 0.0));
    }
    // degree deficit: leading (high-j) zero coefficients map to theta = pi
    let scale = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut degree = n;
    while degree > 0 && coeffs[degree].norm() <= 1e-14 * scale {
        degree -= 1;
    }
    let deficit = n - degree;
    coeffs.truncate(degree + 1);
    let roots = poly_roots(&coeffs)?;
    let mut points = Vec::with_capacity(n);
    for xi in roots {
        let t = -xi;
        points.push((2.0 * t.norm().atan(), t.arg()));
    }
    for _ in 0..deficit {
        points.push((PI, 0.0));
    }
    MajoranaConstellation::new(points)
}

/// All complex roots of `sum_j coeffs[j] z^j` (leading coefficient nonzero)
/// by the Aberth-Ehrlich method with a Newton polish per root.
fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[degree];
    let monic: Vec<C64> = coeffs.iter().map(|&a| a / lead).collect();
    // deflate exact roots at the origin
    let zeros_at_origin = monic
        .iter()
        .take_while(|a| a.norm() <= 1e-300)
        .count();
    let reduced = &monic[zeros_at_origin..];
    let deg = reduced.len() - 1;
    let mut roots = vec![c(0.0, 0.0); zeros_at_origin];
    if deg == 0 {
        return Ok(roots);
    }

    let radius = 1.0 + reduced.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..deg)
        .map(|k| {
            let angle = 2.0 * PI * k as f64 / deg as f64 + 0.4;
            c(radius * angle.cos(), radius * angle.sin())
        })
        .collect();

    let eval = |x: C64| -> (C64, C64) {
        let mut p = c(0.0, 0.0);
        let mut dp = c(0.0, 0.0);
        for &a in reduced.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    };

    let mut converged = false;
    for _ in 0..400 {
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = if dp.norm() > 0.0 { p / dp } else { c(1e-8, 0.0) };
            let mut rep = c(0.0, 0.0);
            for j in 0..deg {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 1e-300 {
                        rep += c(1.0, 0.0) / diff;
                    }
                }
            }
            let denom = c(1.0, 0.0) - newton * rep;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step < 1e-14 {
            converged = true;
            break;
        }
    }
    // Newton polish
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*zi);
            if dp.norm() > 1e-300 {
                *zi -= p / dp;
            }
        }
    }
    if !converged {
        // accept if residuals are tiny anyway (clustered roots converge in
        // value before the step criterion triggers)
        let worst = z.iter().map(|&zi| eval(zi).0.norm()).fold(0.0, f64::max);
        if worst > 1e-8 {
            return Err(Error::RootFinding(format!(
                "worst residual {worst:.3e} after iteration cap"
            )));
        }
    }
    roots.extend(z);
    Ok(roots)
}
