//! Invariant suite behind `qpolar validate`: operator algebra, CPTP checks,
//! derivative cross-check, Wehrl bound, King-file anticoherence.

use crate::channels::apply_pipeline;
use crate::error::Result;
use crate::estimation::{derivative_finite_difference, derivative_through_pipeline};
use crate::hilbert::{build_stokes_operators, FockBasis};
use crate::polarization::{
    builtin_king, builtin_king_orders, constellation_amplitudes, verify_king, wehrl_entropy,
    SphereGrid, SpinSector, SpinSectorVec,
};
use crate::{c, CMat};

use super::config::ExperimentConfig;

/// One invariant check with its measured value and tolerance.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|x| x.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for x in &self.checks {
            let mark = if x.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "{mark}  {:<42} measured {:.3e}  tol {:.1e}{}\n",
                x.name,
                x.measured,
                x.tolerance,
                if x.detail.is_empty() {
                    String::new()
                } else {
                    format!("  ({})", x.detail)
                }
            ));
        }
        out
    }

    fn push(&mut self, name: &str, measured: f64, tolerance: f64, detail: String) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail,
        });
    }

    fn push_error(&mut self, name: &str, message: String) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed: false,
            measured: f64::INFINITY,
            tolerance: 0.0,
            detail: message,
        });
    }
}

fn max_entry(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Run the full invariant suite for a configuration. Failures are report
/// content, not errors; only unusable configs error out.
pub fn run_validation(config: &ExperimentConfig) -> Result<ValidationReport> {
    config.validate()?;
    let mut report = ValidationReport::default();
    let basis = config.basis()?;
    stokes_algebra_checks(&mut report, basis);
    probe_and_channel_checks(&mut report, config, basis);
    wehrl_checks(&mut report);
    king_checks(&mut report);
    Ok(report)
}

fn stokes_algebra_checks(report: &mut ValidationReport, basis: FockBasis) {
    let [s0, s1, s2, s3] = build_stokes_operators(basis);
    let ss = [&s1.matrix, &s2.matrix, &s3.matrix];
    let safe: Vec<usize> = (0..basis.dim())
        .filter(|&i| {
            let (n1, n2) = basis.labels(i);
            n1 + n2 <= basis.cutoff() - 2
        })
        .collect();
    let eps = |i: usize, j: usize, k: usize| -> f64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    };
    let mut worst_comm: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let mut diff = ss[i] * ss[j] - ss[j] * ss[i];
            for (k, target) in ss.iter().enumerate() {
                let e = eps(i, j, k);
                if e != 0.0 {
                    diff -= *target * c(0.0, e);
                }
            }
            for &r in &safe {
                for &col in &safe {
                    worst_comm = worst_comm.max(diff[(r, col)].norm());
                }
            }
        }
    }
    report.push("su(2) commutators (safe subspace)", worst_comm, 1e-12, String::new());

    let casimir = ss[0] * ss[0] + ss[1] * ss[1] + ss[2] * ss[2];
    let target = &s0.matrix * (&s0.matrix + CMat::identity(basis.dim(), basis.dim()));
    let mut worst_cas: f64 = 0.0;
    for &r in &safe {
        for &col in &safe {
            worst_cas = worst_cas.max((casimir[(r, col)] - target[(r, col)]).norm());
        }
    }
    report.push("Casimir S^2 = S0(S0+1) (safe subspace)", worst_cas, 1e-11, String::new());
}

fn probe_and_channel_checks(
    report: &mut ValidationReport,
    config: &ExperimentConfig,
    _basis: FockBasis,
) {
    let pipeline = match config.pipeline() {
        Ok(p) => p,
        Err(e) => {
            report.push_error("pipeline construction", e.to_string());
            return;
        }
    };
    let mut first_probe = None;
    for &n_mean in &config.photon_grid {
        let name = format!("probe construction (n = {n_mean})");
        match config.probe_state(n_mean) {
            Ok(state) => {
                let defect = match state.check_density() {
                    Ok(()) => 0.0,
                    Err(_) => state.herm_defect().max((state.trace().re - 1.0).abs()),
                };
                report.push(&name, defect, 1e-10, String::new());
                if first_probe.is_none() {
                    first_probe = Some(state);
                }
            }
            Err(e) => report.push_error(&name, e.to_string()),
        }
    }
    let Some(probe) = first_probe else {
        return;
    };

    match apply_pipeline(&probe, &pipeline, config.theta) {
        Ok(out) => {
            report.push(
                "channel trace preservation",
                (out.trace().re - 1.0).abs(),
                1e-10,
                String::new(),
            );
            report.push(
                "channel positivity",
                (-out.min_eigenvalue()).max(0.0),
                1e-10,
                String::new(),
            );
        }
        Err(e) => report.push_error("channel application", e.to_string()),
    }

    match (
        derivative_through_pipeline(&probe, &pipeline, config.theta),
        derivative_finite_difference(&probe, &pipeline, config.theta, 1e-5),
    ) {
        (Ok(swd), Ok(fd)) => {
            let diff = max_entry(&(swd.drho.to_full() - fd.to_full()));
            report.push("analytic vs finite-difference derivative", diff, 1e-7, String::new());
        }
        (Err(e), _) | (_, Err(e)) => {
            report.push_error("derivative cross-check", e.to_string())
        }
    }
}

fn wehrl_checks(report: &mut ValidationReport) {
    for two_s in 1..=4usize {
        let psi = crate::polarization::bloch_coherent_vector(two_s, 0.9, 1.7);
        let sector = SpinSector::new(two_s, &psi * psi.adjoint());
        // Q ln Q is not band-limited; extra quadrature headroom is needed
        // for the 1e-6 comparison against the coherent-state bound.
        let grid = SphereGrid::new(6 * two_s + 20);
        match wehrl_entropy(&sector, &grid) {
            Ok(sw) => {
                let bound = two_s as f64 / (two_s as f64 + 1.0);
                report.push(
                    &format!("Wehrl entropy of coherent state (2S = {two_s})"),
                    (sw - bound).abs(),
                    1e-6,
                    String::new(),
                );
            }
            Err(e) => report.push_error("Wehrl entropy", e.to_string()),
        }
    }
}

fn king_checks(report: &mut ValidationReport) {
    for n in builtin_king_orders() {
        let name = format!("King file anticoherence (n = {n})");
        match builtin_king(n).and_then(|entry| verify_king(&entry).map(|o| (entry, o))) {
            Ok((entry, order)) => {
                // residual multipole power at the claimed order
                let (amps, _) = constellation_amplitudes(&entry.constellation);
                let measured = match SpinSectorVec::new(n, amps) {
                    Ok(psi) => {
                        let mp = crate::polarization::state_multipoles(&SpinSector::from_vector(&psi));
                        (1..=order).map(|k| mp.band_power(k)).sum::<f64>().sqrt()
                    }
                    Err(_) => f64::INFINITY,
                };
                report.push(&name, measured, 1e-9, format!("order {order}"));
            }
            Err(e) => report.push_error(&name, e.to_string()),
        }
    }
}
