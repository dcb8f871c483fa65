//! Quantitative Dickson bounds, dickson pairs and loop removal.

use std::ops::Range;

use num_bigint::BigUint;
use num_traits::One;

use crate::arena::{PlayPrefix, VertexId};
use crate::buchi::value_bound;
use crate::error::{Error, Result};
use crate::rr::{annotate_prefix, RrGame, WaitingVector};

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `b(s, 0..=k)`.
pub fn dickson_bounds_upto(s: u64, k: usize) -> Vec<BigUint> {
    let mut b = vec![BigUint::from(s) + 1u8];
    for i in 1..=k {
        let prod: BigUint = b.iter().product();
        let next = &b[i - 1] + BigUint::from(s) * factorial(i) * prod + 1u8;
        b.push(next);
    }
    b
}

/// Every play infix of length `b(s, k)` in a game with `s` vertices and `k`
/// conditions contains a dickson pair.
pub fn dickson_bound(s: u64, k: usize) -> BigUint {
    dickson_bounds_upto(s, k).pop().unwrap()
}

/// `2^(2^(k-1)) · (s+1)^(2^k) · k! · ∏_{j=1}^{k-1} (j!)^(2^(k-j-1))`, an upper
/// bound on [`dickson_bound`] for `k ≥ 1`.
pub fn dickson_bound_closed(s: u64, k: usize) -> Result<BigUint> {
    if s == 0 || k == 0 {
        return Err(Error::BadParams(
            "closed form needs s >= 1 and k >= 1".into(),
        ));
    }
    if k > 24 {
        return Err(Error::SizeLimit {
            what: "closed-form exponent".into(),
            needed: k as u128,
            limit: 24,
        });
    }
    let two = BigUint::from(2u8);
    let mut r = two.pow(1u32 << (k - 1));
    r *= (BigUint::from(s) + 1u8).pow(1u32 << k);
    r *= factorial(k);
    for j in 1..k {
        r *= factorial(j).pow(1u32 << (k - j - 1));
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DicksonPair {
    pub n1: usize,
    pub n2: usize,
}

fn is_dickson(annotated: &[(VertexId, WaitingVector)], n1: usize, n2: usize) -> bool {
    annotated[n1].0 == annotated[n2].0 && annotated[n1].1.dominated_by(&annotated[n2].1)
}

/// The lexicographically least dickson pair with both positions in `window`.
pub fn find_dickson_pair(
    annotated: &[(VertexId, WaitingVector)],
    window: Range<usize>,
) -> Option<DicksonPair> {
    let end = window.end.min(annotated.len());
    (window.start..end).find_map(|n1| {
        (n1 + 1..end)
            .find(|&n2| is_dickson(annotated, n1, n2))
            .map(|n2| DicksonPair { n1, n2 })
    })
}

/// Vertices of `w` paired with the waiting vectors of their prefixes.
pub fn annotate_with_vertices(
    game: &RrGame,
    w: &PlayPrefix,
) -> Result<Vec<(VertexId, WaitingVector)>> {
    Ok(w.vertices()
        .iter()
        .copied()
        .zip(annotate_prefix(game, w)?.into_iter().map(|(t, _)| t))
        .collect())
}

/// Cuts positions `n1+1..=n2` out of `w`. The waiting vectors of the
/// shortened prefix never exceed those of the original.
pub fn remove_loop(w: &PlayPrefix, pair: DicksonPair, game: &RrGame) -> Result<PlayPrefix> {
    let DicksonPair { n1, n2 } = pair;
    if n1 >= n2 || n2 >= w.len() {
        return Err(Error::InvalidPair(format!(
            "positions ({n1}, {n2}) do not fit a prefix of length {}",
            w.len()
        )));
    }
    let annotated = annotate_with_vertices(game, w)?;
    if annotated[n1].0 != annotated[n2].0 {
        return Err(Error::InvalidPair(format!(
            "different vertices at positions {n1} and {n2}"
        )));
    }
    if !annotated[n1].1.dominated_by(&annotated[n2].1) {
        return Err(Error::InvalidPair(format!(
            "waiting vector at {n1} is not dominated by the one at {n2}"
        )));
    }
    let v = w.vertices();
    let mut out = v[..=n1].to_vec();
    out.extend_from_slice(&v[n2 + 1..]);
    PlayPrefix::new(game.arena(), out)
}

/// For a non-dickson infix starting at position `m` with `len` positions:
/// for each `j < k` and each offset `n ≥ b(s, k-j-1)`, at most `j`
/// coordinates of the waiting vector exceed `b(s, k-j-1)`. Returns the first
/// violating `(j, n)`.
pub fn check_large_entries(
    annotated: &[(VertexId, WaitingVector)],
    m: usize,
    len: usize,
    s: u64,
    k: usize,
) -> Option<(usize, usize)> {
    let b = dickson_bounds_upto(s, k.saturating_sub(1));
    for j in 0..k {
        let bound = &b[k - j - 1];
        for n in 0..len {
            if BigUint::from(n) < *bound {
                continue;
            }
            let t = &annotated[m + n].1;
            let large = t.0.iter().filter(|&&x| BigUint::from(x) > *bound).count();
            if large > j {
                return Some((j, n));
            }
        }
    }
    None
}

/// `max{n : f_j(n) ≤ val_G} + b(s, k-1)` for every condition `j`.
pub fn synthesis_thresholds(game: &RrGame) -> Result<Vec<BigUint>> {
    let k = game.k();
    if k == 0 {
        return Ok(Vec::new());
    }
    let val = value_bound(game);
    let b = dickson_bound(game.s() as u64, k - 1);
    game.penalties()
        .iter()
        .map(|f| Ok(f.pseudo_inverse(&val)? + &b))
        .collect()
}
