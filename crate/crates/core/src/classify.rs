//! Common unfoldings: distinct parameter pairs whose single bands have the
//! same number of triangles, i.e. equal `S(a, b)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_params, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SValueGroup {
    pub s: i64,
    /// Pairs `(a, b)` with `0 < a ≤ b`, sorted by `a`.
    pub members: Vec<(i64, i64)>,
}

impl SValueGroup {
    /// `s / 4 = a² + ab + b²`.
    pub fn quarter(&self) -> i64 {
        self.s / 4
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CommonOptions {
    /// Also group pairs with `gcd(a, b) > 1` (multi-band deltahedra).
    pub include_non_coprime: bool,
}

/// `S(a, b) = 4(a² + ab + b²)`.
pub fn s_value(a: i64, b: i64) -> Result<i64> {
    check_params(a, b)?;
    Ok(4 * (a * a + a * b + b * b))
}

fn gcd(mut x: i64, mut y: i64) -> i64 {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

pub fn enumerate_common(s_max: i64) -> Vec<SValueGroup> {
    enumerate_common_with(s_max, CommonOptions::default())
}

/// All `S` values up to `s_max` shared by at least two normalized pairs.
pub fn enumerate_common_with(s_max: i64, opts: CommonOptions) -> Vec<SValueGroup> {
    let q_max = s_max / 4;
    // a² + ab + b² ≥ 3a² bounds the outer loop.
    let a_max = (1..).take_while(|a| 3 * a * a <= q_max).last().unwrap_or(0);
    let pairs: Vec<(i64, (i64, i64))> = (1..=a_max)
        .into_par_iter()
        .flat_map_iter(|a| {
            (a..)
                .map(move |b| (a, b))
                .take_while(move |&(a, b)| a * a + a * b + b * b <= q_max)
                .filter(move |&(a, b)| opts.include_non_coprime || gcd(a, b) == 1)
                .map(|(a, b)| (4 * (a * a + a * b + b * b), (a, b)))
        })
        .collect();

    let mut by_s: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
    for (s, pair) in pairs {
        by_s.entry(s).or_default().push(pair);
    }
    by_s.into_iter()
        .filter(|(_, m)| m.len() >= 2)
        .map(|(s, mut members)| {
            members.sort_unstable();
            SValueGroup { s, members }
        })
        .collect()
}
