//! Clebsch-Gordan coefficients, irreducible tensor operators, state
//! multipoles, and the anticoherence order they certify.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::{c, C64, CMat};

use super::{SpinSector, SpinSectorVec};

const MAX_FACT: usize = 64;

fn ln_factorials() -> &'static [f64; MAX_FACT] {
    static TABLE: OnceLock<[f64; MAX_FACT]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; MAX_FACT];
        for i in 1..MAX_FACT {
            t[i] = t[i - 1] + (i as f64).ln();
        }
        t
    })
}

fn ln_fact(n: i64) -> f64 {
    ln_factorials()[n as usize]
}

fn to_doubled(x: f64, what: &str) -> Result<i64> {
    let d = 2.0 * x;
    let r = d.round();
    if !d.is_finite() || (d - r).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "{what} = {x} is not a half-integer"
        )));
    }
    Ok(r as i64)
}

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | J M>` in the Condon-Shortley
/// convention, via the Racah closed form with log-factorial accumulation.
/// Selection-rule violations return 0; non-half-integer arguments error.
pub fn clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64> {
    let tj1 = to_doubled(j1, "j1")?;
    let tm1 = to_doubled(m1, "m1")?;
    let tj2 = to_doubled(j2, "j2")?;
    let tm2 = to_doubled(m2, "m2")?;
    let tj = to_doubled(j, "J")?;
    let tm = to_doubled(m, "M")?;
    if tj1 < 0 || tj2 < 0 || tj < 0 {
        return Err(Error::InvalidArgument("negative angular momentum".into()));
    }
    if (tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj + tm) % 2 != 0 {
        return Err(Error::InvalidArgument(
            "m is not in the ladder of its j".into(),
        ));
    }
    Ok(cg_doubled(tj1, tm1, tj2, tm2, tj, tm))
}

/// Same as [`clebsch_gordan`] but with doubled integer arguments.
pub(crate) fn cg_doubled(tj1: i64, tm1: i64, tj2: i64, tm2: i64, tj: i64, tm: i64) -> f64 {
    if tm1 + tm2 != tm
        || tm1.abs() > tj1
        || tm2.abs() > tj2
        || tm.abs() > tj
        || tj > tj1 + tj2
        || tj < (tj1 - tj2).abs()
        || (tj1 + tj2 + tj) % 2 != 0
    {
        return 0.0;
    }
    // all factorial arguments below are true integers
    let i = |x: i64| -> i64 {
        debug_assert!(x % 2 == 0);
        x / 2
    };
    let ln_delta = 0.5
        * (ln_fact(i(tj1 + tj2 - tj)) + ln_fact(i(tj1 - tj2 + tj)) + ln_fact(i(-tj1 + tj2 + tj))
            - ln_fact(i(tj1 + tj2 + tj) + 1));
    let ln_pref = 0.5
        * ((tj as f64 + 1.0).ln()
            + ln_fact(i(tj + tm))
            + ln_fact(i(tj - tm))
            + ln_fact(i(tj1 - tm1))
            + ln_fact(i(tj1 + tm1))
            + ln_fact(i(tj2 - tm2))
            + ln_fact(i(tj2 + tm2)));
    let kmin = 0
        .max(i(tj2 - tj - tm1))
        .max(i(tj1 + tm2 - tj));
    let kmax = i(tj1 + tj2 - tj).min(i(tj1 - tm1)).min(i(tj2 + tm2));
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let ln_den = ln_fact(k)
            + ln_fact(i(tj1 + tj2 - tj) - k)
            + ln_fact(i(tj1 - tm1) - k)
            + ln_fact(i(tj2 + tm2) - k)
            + ln_fact(i(tj - tj2 + tm1) + k)
            + ln_fact(i(tj - tj1 - tm2) + k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (ln_delta + ln_pref - ln_den).exp();
    }
    sum
}

/// Irreducible tensor basis `T_Kq` on the spin-`S` sector, Dicke ordering.
/// Returned as `(K, q, matrix)` triples for `K = 0..2S`, `q = -K..K`.
/// Orthonormality `Tr[T_Kq T_K'q'^dag] = delta delta` is checked once per
/// `S` at construction.
pub fn tensor_basis(two_s: usize) -> Arc<Vec<(usize, i64, CMat)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(usize, i64, CMat)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(t) = guard.get(&two_s) {
        return Arc::clone(t);
    }
    let d = two_s + 1;
    let ts = two_s as i64;
    let mut tensors = Vec::new();
    for k in 0..=two_s {
        let tk = 2 * k as i64;
        for tq in (-tk..=tk).step_by(2) {
            let mut m = CMat::zeros(d, d);
            let scale = ((tk as f64 + 1.0) / (ts as f64 + 1.0)).sqrt();
            // |S,m'><S,m| entries: row index i' = (m'+S), col i = (m+S)
            for i in 0..d {
                let tm = 2 * i as i64 - ts;
                let tmp = tm + tq;
                if tmp.abs() > ts {
                    continue;
                }
                let ip = ((tmp + ts) / 2) as usize;
                m[(ip, i)] = c(scale * cg_doubled(ts, tm, tk, tq, ts, tmp), 0.0);
            }
            tensors.push((k, tq / 2, m));
        }
    }
    verify_orthonormal(&tensors);
    let arc = Arc::new(tensors);
    guard.insert(two_s, Arc::clone(&arc));
    arc
}

fn verify_orthonormal(tensors: &[(usize, i64, CMat)]) {
    for (a, (_, _, ta)) in tensors.iter().enumerate() {
        for (b, (_, _, tb)) in tensors.iter().enumerate() {
            let inner: C64 = (ta.adjoint() * tb).trace();
            let expect = if a == b { 1.0 } else { 0.0 };
            assert!(
                (inner.re - expect).abs() <= 1e-12 && inner.im.abs() <= 1e-12,
                "tensor basis lost orthonormality: pair ({a},{b}) gave {inner}"
            );
        }
    }
}

/// State multipoles `rho_Kq = Tr(rho T_Kq^dag)` of a sector state.
#[derive(Debug, Clone)]
pub struct StateMultipoles {
    pub two_s: usize,
    values: Vec<C64>,
}

impl StateMultipoles {
    pub fn get(&self, k: usize, q: i64) -> C64 {
        assert!(k <= self.two_s && q.abs() as usize <= k);
        self.values[k * k + (k as i64 + q) as usize]
    }

    /// `sum_q |rho_Kq|^2` for a single `K`.
    pub fn band_power(&self, k: usize) -> f64 {
        (-(k as i64)..=k as i64)
            .map(|q| self.get(k, q).norm_sqr())
            .sum()
    }

    /// `sum_{K,q} |rho_Kq|^2 = Tr rho^2` for a unit-trace sector state.
    pub fn total_power(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Expand a sector state over the irreducible tensor basis.
pub fn state_multipoles(rho: &SpinSector) -> StateMultipoles {
    let tensors = tensor_basis(rho.two_s);
    let mut values = Vec::with_capacity((rho.two_s + 1) * (rho.two_s + 1));
    for (_, _, t) in tensors.iter() {
        values.push((t.adjoint() * &rho.matrix).trace());
    }
    StateMultipoles {
        two_s: rho.two_s,
        values,
    }
}

/// Cumulative multipolar distribution `A_M = sum_{K=1}^{M} sum_q |rho_Kq|^2`.
pub fn cumulative_multipole(multipoles: &StateMultipoles, m: usize) -> Result<f64> {
    if m > multipoles.two_s {
        return Err(Error::InvalidArgument(format!(
            "cumulative order M = {m} exceeds 2S = {}",
            multipoles.two_s
        )));
    }
    Ok((1..=m).map(|k| multipoles.band_power(k)).sum())
}

/// Anticoherence order of a pure sector state: the largest `M` such that
/// `rho_Kq = 0` for all `1 <= K <= M` (tolerance 1e-9), equivalently all
/// Stokes moments up to order `M` are isotropic. Returns 0 for states with
/// a nonzero first moment.
pub fn anticoherence_order(psi: &SpinSectorVec) -> usize {
    let rho = SpinSector::from_vector(psi);
    let mp = state_multipoles(&rho);
    let mut order = 0;
    for k in 1..=psi.two_s {
        let band = mp.band_power(k).sqrt();
        if band <= 1e-9 {
            order = k;
        } else {
            break;
        }
    }
    order
}
