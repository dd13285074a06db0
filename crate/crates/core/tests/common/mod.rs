//! Brute-force reference model of the faulty erasure-indicator tree.
//!
//! Every channel erasure and every decoder write fault is enumerated, each
//! pattern weighted by its probability. Nothing here calls into the library.

#![allow(dead_code)]

/// Exact statistics of the level-`n` erasure indicators.
pub struct Exhaustive {
    pub n: u32,
    /// `z[i] = Pr[E_i = 1]`, indexed with the first sign as the MSB and `−` as 0.
    pub z: Vec<f64>,
    /// `second[i][j] = E[E_i E_j]`.
    pub second: Vec<Vec<f64>>,
    /// Each pattern with its probability, kept for union probabilities.
    patterns: Vec<(f64, u64)>,
}

impl Exhaustive {
    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        self.second[i][j] - self.z[i] * self.z[j]
    }

    /// Exact probability that at least one channel in `info` is erased.
    pub fn union_probability(&self, info: &[usize]) -> f64 {
        let mask: u64 = info.iter().map(|&i| 1u64 << i).sum();
        self.patterns
            .iter()
            .filter(|(_, erased)| erased & mask != 0)
            .map(|(w, _)| w)
            .sum()
    }
}

/// Indicator of every level-`n` channel for one draw, as a bitmask.
///
/// `channel` holds `2^n` leaf erasures. `fault(level, sign_prefix, copy)`
/// says whether the write of that node faults. The node at `level` with sign
/// prefix `t` and copy `k` combines copies `k` and `k + 2^(n − level)` of
/// its parent prefix.
pub fn indicators(n: u32, channel: &[bool], fault: impl Fn(u32, usize, usize) -> bool) -> u64 {
    let len = 1usize << n;
    let mut level_nodes: Vec<Vec<bool>> = vec![channel.to_vec()];
    for level in 1..=n {
        let copies = len >> level;
        let mut next = Vec::with_capacity(1 << level);
        for (t, parent) in level_nodes.iter().enumerate() {
            let mut minus = vec![false; copies];
            let mut plus = vec![false; copies];
            for k in 0..copies {
                let (a, b) = (parent[k], parent[k + copies]);
                minus[k] = (a || b) || fault(level, 2 * t, k);
                plus[k] = (a && b) || fault(level, 2 * t + 1, k);
            }
            next.push(minus);
            next.push(plus);
        }
        level_nodes = next;
    }
    level_nodes
        .iter()
        .enumerate()
        .filter(|(_, node)| node[0])
        .map(|(i, _)| 1u64 << i)
        .sum()
}

/// Enumerates all patterns for a code of length `2^n` whose writes on levels
/// `1..=faulty_levels` fault independently with probability `delta`.
pub fn enumerate(n: u32, p: f64, delta: f64, faulty_levels: u32) -> Exhaustive {
    let len = 1usize << n;
    let fault_bits = faulty_levels as usize * len;
    let total_bits = len + fault_bits;
    assert!(total_bits <= 20, "enumeration too large");

    let mut z = vec![0.0; len];
    let mut second = vec![vec![0.0; len]; len];
    let mut patterns = Vec::with_capacity(1 << total_bits);
    for pattern in 0u64..(1 << total_bits) {
        let bit = |i: usize| pattern >> i & 1 == 1;
        let channel: Vec<bool> = (0..len).map(bit).collect();
        let erasures = channel.iter().filter(|&&e| e).count() as i32;
        let faults = (pattern >> len).count_ones() as i32;
        let weight = p.powi(erasures)
            * (1.0 - p).powi(len as i32 - erasures)
            * delta.powi(faults)
            * (1.0 - delta).powi(fault_bits as i32 - faults);
        if weight == 0.0 {
            continue;
        }
        let erased = indicators(n, &channel, |level, t, k| {
            level <= faulty_levels && bit(len + (level as usize - 1) * len + t * (len >> level) + k)
        });
        for i in (0..len).filter(|&i| erased >> i & 1 == 1) {
            z[i] += weight;
            for j in (0..len).filter(|&j| erased >> j & 1 == 1) {
                second[i][j] += weight;
            }
        }
        patterns.push((weight, erased));
    }
    Exhaustive {
        n,
        z,
        second,
        patterns,
    }
}
