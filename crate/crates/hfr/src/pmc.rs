//! Pointed matched circles: 4k marked points on a circle, a fixed-point-free
//! matching whose surgery yields one circle, and (in the symmetric case) the
//! reflection `tau(i) = 4k+1-i`.

use crate::error::{HfrError, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A pointed matched circle. Points are labelled 1..=n with n = 4k; the
/// basepoint sits in the gap after point n. `matching[i-1]` is the partner of
/// point i.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointedMatchedCircle {
    n: usize,
    matching: Vec<usize>,
}

/// A pointed matched circle whose matching commutes with the reflection
/// `tau(i) = n+1-i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RealPointedMatchedCircle {
    pmc: PointedMatchedCircle,
}

impl PointedMatchedCircle {
    /// Number of marked points (4k).
    pub fn points(&self) -> usize {
        self.n
    }

    /// Genus k of the surface the circle encodes.
    pub fn genus(&self) -> usize {
        self.n / 4
    }

    /// Partner of point i under the matching.
    pub fn matched(&self, i: usize) -> usize {
        self.matching[i - 1]
    }

    /// Matched pairs sorted by their smaller point.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n / 2);
        for i in 1..=self.n {
            let j = self.matched(i);
            if i < j {
                out.push((i, j));
            }
        }
        out
    }

    /// Index into `pairs()` of the pair containing point i.
    pub fn pair_index(&self, i: usize) -> usize {
        let (a, b) = (i.min(self.matched(i)), i.max(self.matched(i)));
        self.pairs().iter().position(|&p| p == (a, b)).expect("point belongs to some pair")
    }

    /// Relabels every point by i -> n+1-i, i.e. reads the circle in the
    /// opposite direction from the same basepoint.
    pub fn reverse(&self) -> PointedMatchedCircle {
        let n = self.n;
        let mut matching = vec![0; n];
        for i in 1..=n {
            matching[n - i] = n + 1 - self.matched(i);
        }
        PointedMatchedCircle { n, matching }
    }
}

/// Counts the circles obtained by surgering each matched pair: points stay
/// joined to their cyclic neighbours except that each pair's two points are
/// banded together. Valid circles yield exactly one component.
fn surgery_components(n: usize, matching: &[usize]) -> usize {
    // Model each point i as two edge-ends on the circle; after surgery the
    // permutation "step to the next point, then jump through the matching"
    // decomposes into cycles counting the resulting components.
    let step = |i: usize| -> usize {
        let next = if i == n { 1 } else { i + 1 };
        matching[next - 1]
    };
    let mut seen = vec![false; n + 1];
    let mut comps = 0;
    for start in 1..=n {
        if seen[start] {
            continue;
        }
        comps += 1;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = step(cur);
        }
    }
    comps
}

/// Builds a pointed matched circle from an explicit pairing list.
pub fn make_pmc(n: usize, pairs: &[(usize, usize)]) -> Result<PointedMatchedCircle> {
    if n == 0 || n % 4 != 0 {
        return Err(HfrError::BadCount(n));
    }
    let mut matching = vec![0usize; n];
    for &(a, b) in pairs {
        if a == 0 || b == 0 || a > n || b > n {
            return Err(HfrError::ParseError(format!("pair ({a},{b}) out of range 1..={n}")));
        }
        if a == b {
            return Err(HfrError::NotFixedPointFree(a));
        }
        for x in [a, b] {
            if matching[x - 1] != 0 {
                return Err(HfrError::NotFixedPointFree(x));
            }
        }
        matching[a - 1] = b;
        matching[b - 1] = a;
    }
    if let Some(i) = (1..=n).find(|&i| matching[i - 1] == 0) {
        return Err(HfrError::NotFixedPointFree(i));
    }
    let comps = surgery_components(n, &matching);
    if comps != 1 {
        return Err(HfrError::NotConnectedAfterSurgery(comps));
    }
    Ok(PointedMatchedCircle { n, matching })
}

/// The genus-k circle with pairs {4j+1,4j+3}, {4j+2,4j+4}: a connected sum of
/// k torus blocks.
pub fn split_pmc(k: usize) -> PointedMatchedCircle {
    assert!(k >= 1, "genus must be at least 1");
    let pairs: Vec<(usize, usize)> =
        (0..k).flat_map(|j| [(4 * j + 1, 4 * j + 3), (4 * j + 2, 4 * j + 4)]).collect();
    make_pmc(4 * k, &pairs).expect("split family is always valid")
}

/// The genus-k circle with pairs {i, i+2k}.
pub fn antipodal_pmc(k: usize) -> PointedMatchedCircle {
    assert!(k >= 1, "genus must be at least 1");
    let pairs: Vec<(usize, usize)> = (1..=2 * k).map(|i| (i, i + 2 * k)).collect();
    make_pmc(4 * k, &pairs).expect("antipodal family is always valid")
}

/// Upgrades a circle to a reflection-compatible one, checking M∘τ = τ∘M.
pub fn realify(pmc: &PointedMatchedCircle) -> Result<RealPointedMatchedCircle> {
    let n = pmc.points();
    let tau = |i: usize| n + 1 - i;
    for i in 1..=n {
        if pmc.matched(tau(i)) != tau(pmc.matched(i)) {
            return Err(HfrError::NotSymmetric(i));
        }
    }
    Ok(RealPointedMatchedCircle { pmc: pmc.clone() })
}

impl RealPointedMatchedCircle {
    pub fn circle(&self) -> &PointedMatchedCircle {
        &self.pmc
    }

    pub fn points(&self) -> usize {
        self.pmc.points()
    }

    pub fn genus(&self) -> usize {
        self.pmc.genus()
    }

    pub fn matched(&self, i: usize) -> usize {
        self.pmc.matched(i)
    }

    /// The reflection i -> 4k+1-i.
    pub fn tau(&self, i: usize) -> usize {
        self.pmc.points() + 1 - i
    }
}

/// True iff the quotient surface of the reflection is orientable, i.e. the
/// matching never pairs a lower-half point with an upper-half point.
pub fn quotient_orientable(rpmc: &RealPointedMatchedCircle) -> bool {
    let half = rpmc.points() / 2;
    (1..=half).all(|i| rpmc.matched(i) <= half)
}

impl fmt::Display for PointedMatchedCircle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};[", self.n)?;
        for (idx, (a, b)) in self.pairs().into_iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}-{b}")?;
        }
        write!(f, "]")
    }
}

/// Parses "split:k", "antipodal:k", or the explicit "n;[a-b,...]" form.
pub fn parse_pmc(text: &str) -> Result<PointedMatchedCircle> {
    if let Some(k) = text.strip_prefix("split:") {
        let k: usize =
            k.parse().map_err(|_| HfrError::UsageError(format!("bad genus in '{text}'")))?;
        if k == 0 {
            return Err(HfrError::UsageError("genus must be >= 1".into()));
        }
        return Ok(split_pmc(k));
    }
    if let Some(k) = text.strip_prefix("antipodal:") {
        let k: usize =
            k.parse().map_err(|_| HfrError::UsageError(format!("bad genus in '{text}'")))?;
        if k == 0 {
            return Err(HfrError::UsageError("genus must be >= 1".into()));
        }
        return Ok(antipodal_pmc(k));
    }
    let (count, rest) = text
        .split_once(";[")
        .ok_or_else(|| HfrError::ParseError(format!("unrecognized circle '{text}'")))?;
    let n: usize =
        count.trim().parse().map_err(|_| HfrError::ParseError(format!("bad count in '{text}'")))?;
    let body = rest
        .strip_suffix(']')
        .ok_or_else(|| HfrError::ParseError(format!("missing ']' in '{text}'")))?;
    let mut pairs = Vec::new();
    for piece in body.split(',').filter(|p| !p.is_empty()) {
        let (a, b) = piece
            .split_once('-')
            .ok_or_else(|| HfrError::ParseError(format!("bad pair '{piece}'")))?;
        let a = a.trim().parse().map_err(|_| HfrError::ParseError(format!("bad pair '{piece}'")))?;
        let b = b.trim().parse().map_err(|_| HfrError::ParseError(format!("bad pair '{piece}'")))?;
        pairs.push((a, b));
    }
    make_pmc(n, &pairs)
}
