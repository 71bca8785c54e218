//! Built-in "King" probe constellations: point sets on the sphere whose
//! pure sector states are anticoherent to the stated order.
//!
//! The claimed order is not trusted data: `builtin_king` re-measures it via
//! `anticoherence_order` on every load and fails if the file disagrees.

use crate::error::{Error, Result};
use crate::hilbert::{FockBasis, TwoModeState};

use super::{
    anticoherence_order, constellation_amplitudes, constellation_to_state, MajoranaConstellation,
    SpinSectorVec,
};

/// One shipped constellation: `n` points (total photons `n = 2S`).
#[derive(Debug, Clone)]
pub struct KingEntry {
    pub n: usize,
    pub name: &'static str,
    pub claimed_order: usize,
    pub constellation: MajoranaConstellation,
}

struct RawEntry {
    n: usize,
    name: &'static str,
    claimed_order: usize,
    text: &'static str,
}

const RAW: &[RawEntry] = &[
    RawEntry { n: 2, name: "antipodal-pair", claimed_order: 1, text: include_str!("../../data/kings/king_02.txt") },
    RawEntry { n: 3, name: "equatorial-triangle", claimed_order: 1, text: include_str!("../../data/kings/king_03.txt") },
    RawEntry { n: 4, name: "tetrahedron", claimed_order: 2, text: include_str!("../../data/kings/king_04.txt") },
    RawEntry { n: 5, name: "trigonal-bipyramid", claimed_order: 1, text: include_str!("../../data/kings/king_05.txt") },
    RawEntry { n: 6, name: "octahedron", claimed_order: 3, text: include_str!("../../data/kings/king_06.txt") },
    RawEntry { n: 7, name: "pentagonal-bipyramid", claimed_order: 1, text: include_str!("../../data/kings/king_07.txt") },
    RawEntry { n: 8, name: "cube", claimed_order: 3, text: include_str!("../../data/kings/king_08.txt") },
    RawEntry { n: 9, name: "heptagonal-bipyramid", claimed_order: 1, text: include_str!("../../data/kings/king_09.txt") },
    RawEntry { n: 10, name: "pentagonal-antiprism", claimed_order: 3, text: include_str!("../../data/kings/king_10.txt") },
    RawEntry { n: 11, name: "nonagonal-bipyramid", claimed_order: 1, text: include_str!("../../data/kings/king_11.txt") },
    RawEntry { n: 12, name: "icosahedron", claimed_order: 5, text: include_str!("../../data/kings/king_12.txt") },
];

/// Photon numbers with a shipped constellation, ascending.
pub fn builtin_king_orders() -> Vec<usize> {
    RAW.iter().map(|r| r.n).collect()
}

/// Load the built-in `n`-point constellation, verifying its anticoherence
/// order against the claim.
pub fn builtin_king(n: usize) -> Result<KingEntry> {
    let raw = RAW
        .iter()
        .find(|r| r.n == n)
        .ok_or_else(|| Error::InvalidArgument(format!("no built-in King with n = {n} points")))?;
    let constellation = MajoranaConstellation::parse(raw.text)?;
    if constellation.len() != n {
        return Err(Error::StateInvariant(format!(
            "King file for n = {n} has {} points",
            constellation.len()
        )));
    }
    let entry = KingEntry {
        n,
        name: raw.name,
        claimed_order: raw.claimed_order,
        constellation,
    };
    verify_king(&entry)?;
    Ok(entry)
}

/// Re-measure the anticoherence order of a (possibly user-supplied) entry.
pub fn verify_king(entry: &KingEntry) -> Result<usize> {
    let (amps, _) = constellation_amplitudes(&entry.constellation);
    let psi = SpinSectorVec::new(entry.n, amps)?;
    let measured = anticoherence_order(&psi);
    if measured != entry.claimed_order {
        return Err(Error::StateInvariant(format!(
            "King '{}' claims anticoherence order {} but measures {}",
            entry.name, entry.claimed_order, measured
        )));
    }
    Ok(measured)
}

impl KingEntry {
    /// Embed the (validated) King state into the given basis.
    pub fn to_state(&self, basis: FockBasis) -> Result<TwoModeState> {
        constellation_to_state(basis, &self.constellation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtin_kings_validate() {
        for n in builtin_king_orders() {
            let entry = builtin_king(n).unwrap();
            assert_eq!(entry.n, n);
        }
    }

    #[test]
    fn tetrahedron_has_order_two() {
        let entry = builtin_king(4).unwrap();
        assert_eq!(entry.claimed_order, 2);
        assert_eq!(verify_king(&entry).unwrap(), 2);
    }

    #[test]
    fn missing_n_is_an_error() {
        assert!(builtin_king(13).is_err());
        assert!(builtin_king(1).is_err());
    }

    #[test]
    fn perturbed_tetrahedron_fails_validation() {
        let entry = builtin_king(4).unwrap();
        let mut pts = entry.constellation.points().to_vec();
        pts[1].0 += 0.02;
        let perturbed = KingEntry {
            constellation: MajoranaConstellation::new(pts).unwrap(),
            ..entry
        };
        let err = verify_king(&perturbed).unwrap_err();
        assert!(err.to_string().contains("anticoherence"));
    }
}
