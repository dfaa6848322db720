//! Stage two: the sanction score.
//!
//! The score is the 1D Wasserstein (earth mover's) distance between two
//! equal-size lobbies' bucket indices. For equal-size point sets the optimal
//! transport plan pairs the sorted elements, so the distance reduces to
//! `sum_i |u_(i) - v_(i)|`. Lower is fairer.

use crate::bucketing::{lobby_to_sorted_indices, BucketScheme};
use crate::error::{Error, Result};
use crate::model::Lobby;
use crate::scalar::Scalar;

/// Largest input [`assignment_oracle`] accepts.
pub const ORACLE_MAX_LEN: usize = 8;

fn check_lengths(u: &[usize], v: &[usize]) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    if u.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// Distance between two already-sorted index lists of equal length.
pub(crate) fn sorted_distance(u: &[usize], v: &[usize]) -> u64 {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(&a, &b)| a.abs_diff(b) as u64).sum()
}

/// Sanction score of two bucket-index lists. Inputs need not be sorted and
/// are left untouched.
pub fn sanction_score(u: &[usize], v: &[usize]) -> Result<u64> {
    check_lengths(u, v)?;
    let mut su = u.to_vec();
    let mut sv = v.to_vec();
    su.sort_unstable();
    sv.sort_unstable();
    Ok(sorted_distance(&su, &sv))
}

/// Sanction score of two lobbies under `scheme`, counting every player.
pub fn sanction_score_lobbies<T: Scalar>(
    a: &Lobby<T>,
    b: &Lobby<T>,
    scheme: &BucketScheme<T>,
) -> Result<u64> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            a: a.id.clone(),
            a_len: a.len(),
            b: b.id.clone(),
            b_len: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let u = lobby_to_sorted_indices(a, scheme);
    let v = lobby_to_sorted_indices(b, scheme);
    Ok(sorted_distance(&u, &v))
}

/// Minimum-cost perfect matching between `u` and `v` under `|a - b|` cost,
/// found by trying every permutation. Factorial cost; inputs are capped at
/// [`ORACLE_MAX_LEN`] elements.
pub fn assignment_oracle(u: &[usize], v: &[usize]) -> Result<u64> {
    check_lengths(u, v)?;
    if u.len() > ORACLE_MAX_LEN {
        return Err(Error::OracleTooLarge {
            len: u.len(),
            max: ORACLE_MAX_LEN,
        });
    }
    let mut perm: Vec<usize> = (0..v.len()).collect();
    let mut best = u64::MAX;
    permute(&mut perm, 0, &mut |p| {
        let cost: u64 = p.iter().enumerate().map(|(i, &j)| u[i].abs_diff(v[j]) as u64).sum();
        best = best.min(cost);
    });
    Ok(best)
}

fn permute(perm: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}
