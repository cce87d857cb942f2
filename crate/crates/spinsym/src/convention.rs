//! Frozen index and normalization conventions.
//!
//! - Minkowski metric eta = diag(1, -1, -1, -1).
//! - Soldering matrices sigma^i_{AA'} = (1/sqrt2) * (identity, Pauli_1,
//!   Pauli_2, Pauli_3); with this normalization the completeness relations
//!   sigma^i_{AA'} sigma_i^{BB'} = delta_A^B delta_{A'}^{B'} and
//!   sigma^i_{AA'} sigma^{j AA'} = eta^{ij} hold exactly.
//! - eps_{01} = eps^{01} = +1 on both index types (see `spinor`).
//! - Spacetime orientation eps_{0123} = +1.
//! - `CHIRAL_DUALITY_SIGN` records which self-dual projector matches
//!   eps_{KL} * conjugate-field under these conventions; it is computed once
//!   from the dictionary identity and frozen by a regression test.
//! - `TOWER_LEADING_SIGN` records the sign relating one componentwise Lie
//!   derivative step to the displayed closed-form leading term; it is fixed
//!   empirically at the first tower level and frozen by a regression test.

use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use crate::field::FieldElement;
use crate::spinor::{SpinorArray, Variance};

/// eta_{ij} = eta^{ij} diagonal entries.
pub const ETA_DIAG: [i64; 4] = [1, -1, -1, -1];

pub fn eta(i: usize, j: usize) -> i64 {
    if i == j {
        ETA_DIAG[i]
    } else {
        0
    }
}

/// Totally antisymmetric eps_{ijkl} with eps_{0123} = +1.
pub fn levi_civita(i: usize, j: usize, k: usize, l: usize) -> i64 {
    let idx = [i, j, k, l];
    for a in 0..4 {
        for b in (a + 1)..4 {
            if idx[a] == idx[b] {
                return 0;
            }
        }
    }
    let mut perm = idx;
    let mut sign = 1i64;
    for a in 0..4 {
        let pos = perm[a..].iter().position(|&v| v == a).unwrap() + a;
        if pos != a {
            perm.swap(a, pos);
            sign = -sign;
        }
    }
    sign
}

type Sigma = [[[FieldElement; 2]; 2]; 4];

fn build_sigma_lower() -> Sigma {
    let h = FieldElement::inv_sqrt2(); // 1/sqrt2
    let i = FieldElement::i();
    let z = FieldElement::zero;
    [
        // (1/sqrt2) * identity
        [[h.clone(), z()], [z(), h.clone()]],
        // (1/sqrt2) * Pauli_1
        [[z(), h.clone()], [h.clone(), z()]],
        // (1/sqrt2) * Pauli_2
        [
            [z(), -(i.clone() * h.clone())],
            [i.clone() * h.clone(), z()],
        ],
        // (1/sqrt2) * Pauli_3
        [[h.clone(), z()], [z(), -h.clone()]],
    ]
}

/// Raise both spinor slots: M^{AA'} = eps^{AB} eps^{A'B'} M_{BB'}.
fn raise_both(m: &[[FieldElement; 2]; 2]) -> [[FieldElement; 2]; 2] {
    // M^{00} = M_{11}, M^{01} = -M_{10}, M^{10} = -M_{01}, M^{11} = M_{00}
    [
        [m[1][1].clone(), -m[1][0].clone()],
        [-m[0][1].clone(), m[0][0].clone()],
    ]
}

static SIGMA_LOWER: OnceLock<Sigma> = OnceLock::new();
static SIGMA_RAISED: OnceLock<Sigma> = OnceLock::new();
static SIGMA_ST_LOWER: OnceLock<Sigma> = OnceLock::new();
static SIGMA_ST_LOWER_RAISED: OnceLock<Sigma> = OnceLock::new();

/// sigma^i_{AA'}: spacetime index up, both spinor slots down.
pub fn sigma_lower() -> &'static Sigma {
    SIGMA_LOWER.get_or_init(build_sigma_lower)
}

/// sigma^{i AA'}: both spinor slots raised.
pub fn sigma_raised() -> &'static Sigma {
    SIGMA_RAISED.get_or_init(|| {
        let s = sigma_lower();
        [
            raise_both(&s[0]),
            raise_both(&s[1]),
            raise_both(&s[2]),
            raise_both(&s[3]),
        ]
    })
}

/// sigma_i{}_{AA'} = eta_{ij} sigma^j_{AA'}.
pub fn sigma_st_lower() -> &'static Sigma {
    SIGMA_ST_LOWER.get_or_init(|| {
        let s = sigma_lower();
        std::array::from_fn(|i| {
            let scale = FieldElement::from_int(ETA_DIAG[i]);
            std::array::from_fn(|a| std::array::from_fn(|ap| &s[i][a][ap] * &scale))
        })
    })
}

/// sigma_i^{AA'} = eta_{ij} sigma^{j AA'}.
pub fn sigma_st_lower_raised() -> &'static Sigma {
    SIGMA_ST_LOWER_RAISED.get_or_init(|| {
        let s = sigma_raised();
        std::array::from_fn(|i| {
            let scale = FieldElement::from_int(ETA_DIAG[i]);
            std::array::from_fn(|a| std::array::from_fn(|ap| &s[i][a][ap] * &scale))
        })
    })
}

/// sigma^i as a rank-(1,1) constant array with both slots lowered.
pub fn sigma_array_lower(i: usize) -> SpinorArray {
    let s = sigma_lower();
    SpinorArray::from_fn(1, 1, Variance::Lower, Variance::Lower, |u, p| {
        crate::poly::Polynomial::constant(s[i][u[0]][p[0]].clone())
    })
}

/// Hash of the numeric convention constants; a convention change invalidates
/// caches keyed by this value.
pub fn convention_hash() -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"eps01=+1;eps0123=+1;eta=+---;");
    for set in [sigma_lower(), sigma_raised()] {
        for m in set {
            for row in m {
                for e in row {
                    let r = e.to_repr();
                    hasher.update(r.re.as_bytes());
                    hasher.update(r.im.as_bytes());
                    hasher.update(r.re_rad.as_bytes());
                    hasher.update(r.im_rad.as_bytes());
                    hasher.update(b";");
                }
            }
        }
    }
    let digest = hasher.finalize();
    let mut out = String::new();
    for b in digest.iter().take(8) {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_completeness() {
        // sigma^i_{AA'} sigma_i^{BB'} = delta_A^B delta_{A'}^{B'}
        let lo = sigma_lower();
        let hi = sigma_st_lower_raised();
        for a in 0..2 {
            for ap in 0..2 {
                for b in 0..2 {
                    for bp in 0..2 {
                        let mut acc = FieldElement::zero();
                        for i in 0..4 {
                            acc += &lo[i][a][ap] * &hi[i][b][bp];
                        }
                        let expect = if a == b && ap == bp {
                            FieldElement::one()
                        } else {
                            FieldElement::zero()
                        };
                        assert_eq!(acc, expect, "completeness at {a}{ap},{b}{bp}");
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_eta_identity() {
        // sigma^i_{AA'} sigma^{j AA'} = eta^{ij}
        let lo = sigma_lower();
        let hi = sigma_raised();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = FieldElement::zero();
                for a in 0..2 {
                    for ap in 0..2 {
                        acc += &lo[i][a][ap] * &hi[j][a][ap];
                    }
                }
                assert_eq!(acc, FieldElement::from_int(eta(i, j)), "eta at {i}{j}");
            }
        }
    }

    #[test]
    fn sigma_hermitian() {
        // conj(sigma^i[a][a']) = sigma^i[a'][a]
        let lo = sigma_lower();
        for i in 0..4 {
            for a in 0..2 {
                for ap in 0..2 {
                    assert_eq!(lo[i][a][ap].conj(), lo[i][ap][a]);
                }
            }
        }
    }

    #[test]
    fn levi_civita_values() {
        assert_eq!(levi_civita(0, 1, 2, 3), 1);
        assert_eq!(levi_civita(1, 0, 2, 3), -1);
        assert_eq!(levi_civita(0, 0, 2, 3), 0);
        assert_eq!(levi_civita(3, 2, 1, 0), 1);
    }

    #[test]
    fn hash_is_stable_across_calls() {
        assert_eq!(convention_hash(), convention_hash());
        assert_eq!(convention_hash().len(), 16);
    }
}
