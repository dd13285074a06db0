//! Polar encoder, erasure channel and the message-level SC decoder with
//! decoder-internal erasures.
//!
//! Codewords are `x = u · B_n · F^{⊗n}`. The decoder first undoes the
//! bit-reversal on the received word so that level `s` combines copies `k`
//! and `k + 2^{n−s}` of its parent type; the erasure-indicator oracle uses the
//! same layout.
//!
//! Every value written at levels `1..=n` has a fault flag, addressed by
//! `(level, position)` with `position = type · 2^{n−level} + copy`.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::construction::{CodeSpec, InfoSet};
use crate::error::{Error, Result};
use crate::format::CSV_HEADER;
use crate::polarization::{checked_pow2, FaultProb};

/// A single hard bit, always 0 or 1.
pub type Bit = u8;

/// Ternary SC message: `+1` is bit 0, `−1` is bit 1, `0` is an erasure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(i8)]
pub enum Message {
    Minus = -1,
    Erasure = 0,
    Plus = 1,
}

impl Message {
    #[inline]
    pub fn from_bit(bit: Bit) -> Self {
        if bit & 1 == 0 {
            Message::Plus
        } else {
            Message::Minus
        }
    }

    #[inline]
    pub fn value(self) -> i8 {
        self as i8
    }

    #[inline]
    fn from_sign(v: i8) -> Self {
        match v.signum() {
            1 => Message::Plus,
            -1 => Message::Minus,
            _ => Message::Erasure,
        }
    }

    pub fn is_erasure(self) -> bool {
        self == Message::Erasure
    }

    /// The bit a non-erased message stands for.
    pub fn hard_bit(self) -> Option<Bit> {
        match self {
            Message::Plus => Some(0),
            Message::Minus => Some(1),
            Message::Erasure => None,
        }
    }
}

/// Check-node update: the product of the two messages.
#[inline]
pub fn f_minus(m1: Message, m2: Message) -> Message {
    Message::from_sign(m1.value() * m2.value())
}

/// Variable-node update with partial sum `u`: the nearest integer to
/// `((−1)^u m1 + m2) / 2`, with `±1/2` resolved to the non-erased side.
/// Only two erased inputs (or two contradicting ones) give an erasure.
#[inline]
pub fn f_plus(m1: Message, m2: Message, u: Bit) -> Message {
    let m1 = if u & 1 == 1 { -m1.value() } else { m1.value() };
    Message::from_sign(m1 + m2.value())
}

#[inline]
fn bit_reverse(index: usize, n: u32) -> usize {
    if n == 0 {
        0
    } else {
        index.reverse_bits() >> (usize::BITS - n)
    }
}

fn check_len(len: usize, n: u32) -> Result<usize> {
    let expected = checked_pow2(n)?;
    if len != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: len,
        });
    }
    Ok(expected)
}

/// `u · B_n · F^{⊗n}` over GF(2).
pub fn polar_encode(u: &[Bit], n: u32) -> Result<Vec<Bit>> {
    if !u.len().is_power_of_two() {
        return Err(Error::invalid(format!(
            "input length {} is not a power of two",
            u.len()
        )));
    }
    let len = check_len(u.len(), n)?;
    let mut x: Vec<Bit> = (0..len).map(|j| u[bit_reverse(j, n)] & 1).collect();
    let mut half = 1;
    while half < len {
        for block in x.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half *= 2;
    }
    Ok(x)
}

/// Sends a codeword over a BEC(p).
pub fn transmit_bec<R: Rng + ?Sized>(x: &[Bit], p: f64, rng: &mut R) -> Vec<Message> {
    x.iter()
        .map(|&b| {
            if p > 0.0 && rng.random::<f64>() < p {
                Message::Erasure
            } else {
                Message::from_bit(b)
            }
        })
        .collect()
}

/// Decides whether the write at `(level, position)` is erased by the decoder.
pub trait FaultSource {
    fn is_faulted(&self, level: u32, position: usize) -> bool;
}

/// Fault flags for every write at levels `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultPattern {
    n: u32,
    words: Vec<u64>,
}

impl FaultPattern {
    pub fn none(n: u32) -> Self {
        let bits = (n as usize) << n;
        Self {
            n,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    pub fn all(n: u32) -> Self {
        let mut f = Self::none(n);
        for i in 0..f.total_flags() {
            f.set_flat(i);
        }
        f
    }

    /// Flags in level-major order: `flags[(level − 1) · 2^n + position]`.
    pub fn from_flags(n: u32, flags: &[bool]) -> Result<Self> {
        let mut f = Self::none(n);
        if flags.len() != f.total_flags() {
            return Err(Error::DimensionMismatch {
                expected: f.total_flags(),
                actual: flags.len(),
            });
        }
        for (i, _) in flags.iter().enumerate().filter(|(_, &b)| b) {
            f.set_flat(i);
        }
        Ok(f)
    }

    /// Independent Bernoulli(`delta`) flags on levels `1..=unprotected`;
    /// protected levels stay fault-free. Uses geometric gap sampling, so the
    /// cost is proportional to the number of faults.
    pub fn sample<R: Rng + ?Sized>(
        n: u32,
        delta: FaultProb,
        unprotected: u32,
        rng: &mut R,
    ) -> Self {
        let mut f = Self::none(n);
        f.resample(delta, unprotected, rng);
        f
    }

    /// Clears the pattern and draws fresh flags, reusing the allocation.
    pub fn resample<R: Rng + ?Sized>(&mut self, delta: FaultProb, unprotected: u32, rng: &mut R) {
        self.words.fill(0);
        let span = (unprotected.min(self.n) as usize) << self.n;
        let d = delta.get();
        if d <= 0.0 || span == 0 {
            return;
        }
        if d >= 1.0 {
            for i in 0..span {
                self.set_flat(i);
            }
            return;
        }
        let gaps = Geometric::new(d).expect("delta in (0, 1)");
        let mut pos: u64 = 0;
        loop {
            pos = pos.saturating_add(gaps.sample(rng));
            if pos >= span as u64 {
                break;
            }
            self.set_flat(pos as usize);
            pos += 1;
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn total_flags(&self) -> usize {
        (self.n as usize) << self.n
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn set(&mut self, level: u32, position: usize) {
        assert!(level >= 1 && level <= self.n && position < 1 << self.n);
        self.set_flat(((level as usize - 1) << self.n) + position);
    }

    #[inline]
    fn set_flat(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    fn get_flat(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }
}

impl FaultSource for FaultPattern {
    #[inline]
    fn is_faulted(&self, level: u32, position: usize) -> bool {
        debug_assert!(level >= 1 && level <= self.n);
        self.get_flat(((level as usize - 1) << self.n) + position)
    }
}

/// A decoder that never faults.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoFaults;

impl FaultSource for NoFaults {
    fn is_faulted(&self, _level: u32, _position: usize) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStatus {
    Decoded,
    FrameErasure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub status: DecodeStatus,
    /// The full input vector `u`; empty on a frame erasure.
    pub decoded_bits: Vec<Bit>,
    pub first_erased_index: Option<usize>,
}

impl DecodeResult {
    pub fn is_erasure(&self) -> bool {
        self.status == DecodeStatus::FrameErasure
    }
}

/// One memory write of a traced decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRecord {
    pub level: u32,
    pub position: usize,
    pub message: Message,
    pub fault: bool,
}

pub fn write_trace_csv<W: Write>(mut out: W, trace: &[TraceRecord]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    writeln!(out, "level,position,message,fault_flag")?;
    for r in trace {
        writeln!(
            out,
            "{},{},{},{}",
            r.level,
            r.position,
            r.message.value(),
            u8::from(r.fault)
        )?;
    }
    Ok(())
}

/// Reusable SC decoder state for one blocklength.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    n: u32,
    /// Messages per level; level `s` holds `2^{n−s}` copies of the active type.
    messages: Vec<Vec<Message>>,
    /// Re-encoded partial sums of the subtree last decoded at each level.
    partial: Vec<Vec<Bit>>,
    u_hat: Vec<Bit>,
}

struct Inputs<'a, F: ?Sized> {
    info: &'a [bool],
    frozen: &'a [Bit],
    faults: &'a F,
}

impl ScDecoder {
    pub fn new(n: u32) -> Result<Self> {
        let len = checked_pow2(n)?;
        let messages = (0..=n).map(|s| vec![Message::Erasure; len >> s]).collect();
        let partial = (0..=n).map(|s| vec![0; len >> s]).collect();
        Ok(Self {
            n,
            messages,
            partial,
            u_hat: vec![0; len],
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Decodes `y` given the information-set mask and the frozen values.
    ///
    /// Frozen positions take their known value whatever the computed message
    /// is; the first information position whose message is an erasure halts
    /// the decoder.
    pub fn decode<F: FaultSource + ?Sized>(
        &mut self,
        y: &[Message],
        info: &[bool],
        frozen: &[Bit],
        faults: &F,
        mut trace: Option<&mut Vec<TraceRecord>>,
    ) -> Result<DecodeResult> {
        let len = check_len(y.len(), self.n)?;
        check_len(info.len(), self.n)?;
        check_len(frozen.len(), self.n)?;
        for (k, slot) in self.messages[0].iter_mut().enumerate() {
            *slot = y[bit_reverse(k, self.n)];
        }
        if let Some(t) = trace.as_deref_mut() {
            t.extend(self.messages[0].iter().enumerate().map(|(k, &m)| TraceRecord {
                level: 0,
                position: k,
                message: m,
                fault: false,
            }));
        }
        let inputs = Inputs {
            info,
            frozen,
            faults,
        };
        match self.node(0, 0, &inputs, &mut trace) {
            Ok(()) => Ok(DecodeResult {
                status: DecodeStatus::Decoded,
                decoded_bits: self.u_hat[..len].to_vec(),
                first_erased_index: None,
            }),
            Err(index) => Ok(DecodeResult {
                status: DecodeStatus::FrameErasure,
                decoded_bits: Vec::new(),
                first_erased_index: Some(index),
            }),
        }
    }

    /// Decodes the subtree of type `t` at `level`. `Err` carries the halting index.
    fn node<F: FaultSource + ?Sized>(
        &mut self,
        level: u32,
        t: usize,
        inputs: &Inputs<'_, F>,
        trace: &mut Option<&mut Vec<TraceRecord>>,
    ) -> std::result::Result<(), usize> {
        let s = level as usize;
        if level == self.n {
            let m = self.messages[s][0];
            let bit = if inputs.info[t] {
                m.hard_bit().ok_or(t)?
            } else {
                inputs.frozen[t] & 1
            };
            self.u_hat[t] = bit;
            self.partial[s][0] = bit;
            return Ok(());
        }
        let half = self.messages[s].len() / 2;

        write_child(&mut self.messages, level, 2 * t, half, inputs.faults, trace, |par, k| {
            f_minus(par[k], par[k + half])
        });
        self.node(level + 1, 2 * t, inputs, trace)?;
        let (cur, below) = self.partial.split_at_mut(s + 1);
        cur[s][..half].copy_from_slice(&below[0][..half]);

        let left = &self.partial[s][..half];
        write_child(&mut self.messages, level, 2 * t + 1, half, inputs.faults, trace, |par, k| {
            f_plus(par[k], par[k + half], left[k])
        });
        self.node(level + 1, 2 * t + 1, inputs, trace)?;
        let (cur, below) = self.partial.split_at_mut(s + 1);
        let (lo, hi) = cur[s].split_at_mut(half);
        for k in 0..half {
            let b = below[0][k];
            lo[k] ^= b;
            hi[k] = b;
        }
        Ok(())
    }
}

/// Computes the `half` copies of `child_type` at `parent_level + 1`, applying
/// the fault flag of each write.
fn write_child<F, G>(
    messages: &mut [Vec<Message>],
    parent_level: u32,
    child_type: usize,
    half: usize,
    faults: &F,
    trace: &mut Option<&mut Vec<TraceRecord>>,
    update: G,
) where
    F: FaultSource + ?Sized,
    G: Fn(&[Message], usize) -> Message,
{
    let s = parent_level as usize;
    let level = parent_level + 1;
    let (lo, hi) = messages.split_at_mut(s + 1);
    let parent = &lo[s];
    for (k, slot) in hi[0][..half].iter_mut().enumerate() {
        let position = child_type * half + k;
        let fault = faults.is_faulted(level, position);
        let m = if fault {
            Message::Erasure
        } else {
            update(parent, k)
        };
        *slot = m;
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceRecord {
                level,
                position,
                message: m,
                fault,
            });
        }
    }
}

/// Decodes one received word. See [`ScDecoder::decode`].
pub fn sc_decode<F: FaultSource + ?Sized>(
    y: &[Message],
    spec: &CodeSpec,
    info: &InfoSet,
    frozen_values: &[Bit],
    faults: &F,
) -> Result<DecodeResult> {
    if info.n() != spec.n {
        return Err(Error::DimensionMismatch {
            expected: spec.blocklength(),
            actual: 1usize << info.n(),
        });
    }
    ScDecoder::new(spec.n)?.decode(y, &info.mask(), frozen_values, faults, None)
}

/// Like [`sc_decode`], also returning every memory write.
pub fn sc_decode_traced<F: FaultSource + ?Sized>(
    y: &[Message],
    spec: &CodeSpec,
    info: &InfoSet,
    frozen_values: &[Bit],
    faults: &F,
) -> Result<(DecodeResult, Vec<TraceRecord>)> {
    let mut trace = Vec::new();
    let result =
        ScDecoder::new(spec.n)?.decode(y, &info.mask(), frozen_values, faults, Some(&mut trace))?;
    Ok((result, trace))
}

/// Erasure indicators of the `2^n` synthetic channels at the root.
///
/// `channel_erasures` is in transmission order. A `−` node is erased if either
/// input is, a `+` node if both are; either is then erased if its write faults.
pub fn indicator_tree<F: FaultSource + ?Sized>(
    channel_erasures: &[bool],
    faults: &F,
    n: u32,
) -> Result<Vec<bool>> {
    let len = check_len(channel_erasures.len(), n)?;
    let mut current: Vec<bool> = (0..len)
        .map(|k| channel_erasures[bit_reverse(k, n)])
        .collect();
    for level in 1..=n {
        let copies = len >> level;
        let mut next = vec![false; len];
        for parent in 0..len / (2 * copies) {
            let base = parent * 2 * copies;
            for k in 0..copies {
                let (a, b) = (current[base + k], current[base + copies + k]);
                let minus = base + k;
                let plus = base + copies + k;
                next[minus] = (a || b) || faults.is_faulted(level, minus);
                next[plus] = (a && b) || faults.is_faulted(level, plus);
            }
        }
        current = next;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarization::ErasureProb;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const ALL: [Message; 3] = [Message::Minus, Message::Erasure, Message::Plus];

    #[test]
    fn message_updates() {
        use Message::*;
        assert_eq!(f_minus(Minus, Minus), Plus);
        assert_eq!(f_minus(Erasure, Plus), Erasure);
        assert_eq!(f_minus(Plus, Minus), Minus);
        assert_eq!(f_plus(Plus, Plus, 0), Plus);
        assert_eq!(f_plus(Plus, Plus, 1), Erasure);
        // one erased input: the other input decides
        assert_eq!(f_plus(Erasure, Plus, 0), Plus);
        assert_eq!(f_plus(Erasure, Plus, 1), Plus);
        assert_eq!(f_plus(Minus, Erasure, 1), Plus);
        assert_eq!(f_plus(Erasure, Erasure, 0), Erasure);
    }

    #[test]
    fn updates_follow_indicator_algebra() {
        for a in ALL {
            for b in ALL {
                let minus = f_minus(a, b).is_erasure();
                assert_eq!(minus, a.is_erasure() || b.is_erasure());
                for u in 0..2 {
                    let plus = f_plus(a, b, u);
                    // consistent inputs: a carries x1 ^ u, b carries x1
                    if let (Some(ba), Some(bb)) = (a.hard_bit(), b.hard_bit()) {
                        if ba ^ u != bb {
                            continue;
                        }
                    }
                    assert_eq!(plus.is_erasure(), a.is_erasure() && b.is_erasure());
                }
            }
        }
    }

    #[test]
    fn encoder_examples() {
        assert_eq!(polar_encode(&[1, 0], 1).unwrap(), vec![1, 0]);
        assert_eq!(polar_encode(&[1, 1], 1).unwrap(), vec![0, 1]);
        assert_eq!(polar_encode(&[0, 1], 1).unwrap(), vec![1, 1]);
        assert_eq!(polar_encode(&[0, 1, 0, 0], 2).unwrap(), vec![1, 0, 1, 0]);
        assert_eq!(polar_encode(&[0; 16], 4).unwrap(), vec![0; 16]);
        assert!(polar_encode(&[0; 6], 2).is_err());
        assert!(polar_encode(&[0; 8], 2).is_err());
    }

    #[test]
    fn encoder_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 0..11 {
            let u: Vec<Bit> = (0..1 << n).map(|_| rng.random_range(0..2)).collect();
            let x = polar_encode(&u, n).unwrap();
            assert_eq!(polar_encode(&x, n).unwrap(), u);
        }
    }

    #[test]
    fn channel_extremes_and_concentration() {
        let x: Vec<Bit> = vec![0, 1, 1, 0, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let clean = transmit_bec(&x, 0.0, &mut rng);
        assert_eq!(
            clean,
            vec![Message::Plus, Message::Minus, Message::Minus, Message::Plus, Message::Minus]
        );
        assert!(transmit_bec(&x, 1.0, &mut rng).iter().all(|m| m.is_erasure()));

        let big = vec![0; 1_000_000];
        let erased = transmit_bec(&big, 0.5, &mut rng)
            .iter()
            .filter(|m| m.is_erasure())
            .count() as f64;
        let sigma = (1e6f64 * 0.25).sqrt();
        assert!((erased - 5e5).abs() < 3.0 * sigma);
    }

    #[test]
    fn indicator_tree_examples() {
        let none = FaultPattern::none(3);
        assert_eq!(indicator_tree(&[false; 8], &none, 3).unwrap(), vec![false; 8]);
        assert_eq!(
            indicator_tree(&[true; 8], &FaultPattern::all(3), 3).unwrap(),
            vec![true; 8]
        );
        assert_eq!(indicator_tree(&[true; 8], &none, 3).unwrap(), vec![true; 8]);
        let n1 = indicator_tree(&[true, false], &FaultPattern::none(1), 1).unwrap();
        assert_eq!(n1, vec![true, false]);
    }

    fn spec(n: u32, k: usize) -> (CodeSpec, InfoSet) {
        let s = CodeSpec::new(
            n,
            k,
            ErasureProb::new(0.5).unwrap(),
            FaultProb::new(1e-3).unwrap(),
            0,
        )
        .unwrap();
        let info = s.info_set().unwrap();
        (s, info)
    }

    #[test]
    fn noiseless_decode_recovers_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 0..10 {
            for k in [0, 1, (1 << n) / 2, 1 << n] {
                let (s, info) = spec(n, k);
                let mask = info.mask();
                let u: Vec<Bit> = mask
                    .iter()
                    .map(|&m| if m { rng.random_range(0..2) } else { 0 })
                    .collect();
                let y = transmit_bec(&polar_encode(&u, n).unwrap(), 0.0, &mut rng);
                let r = sc_decode(&y, &s, &info, &vec![0; 1 << n], &NoFaults).unwrap();
                assert_eq!(r.status, DecodeStatus::Decoded);
                assert_eq!(r.decoded_bits, u);
            }
        }
    }

    #[test]
    fn nonzero_frozen_values_are_honoured() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (s, info) = spec(5, 10);
        let mask = info.mask();
        let frozen: Vec<Bit> = (0..32).map(|_| rng.random_range(0..2)).collect();
        let u: Vec<Bit> = (0..32)
            .map(|i| if mask[i] { rng.random_range(0..2) } else { frozen[i] })
            .collect();
        let y = transmit_bec(&polar_encode(&u, 5).unwrap(), 0.0, &mut rng);
        let r = sc_decode(&y, &s, &info, &frozen, &NoFaults).unwrap();
        assert_eq!(r.decoded_bits, u);
    }

    #[test]
    fn fully_faulty_decoder_halts_at_first_info_index() {
        for n in 1..8 {
            let (s, info) = spec(n, 3.min(1 << n));
            let y = vec![Message::Plus; 1 << n];
            let r = sc_decode(&y, &s, &info, &vec![0; 1 << n], &FaultPattern::all(n)).unwrap();
            assert_eq!(r.status, DecodeStatus::FrameErasure);
            assert_eq!(r.first_erased_index, Some(info.indices()[0]));
            assert!(r.decoded_bits.is_empty());
        }
    }

    #[test]
    fn dimension_mismatches_are_errors() {
        let (s, info) = spec(3, 2);
        assert!(sc_decode(&[Message::Plus; 4], &s, &info, &[0; 8], &NoFaults).is_err());
        assert!(sc_decode(&[Message::Plus; 8], &s, &info, &[0; 4], &NoFaults).is_err());
        assert!(indicator_tree(&[false; 3], &NoFaults, 2).is_err());
        assert!(FaultPattern::from_flags(2, &[false; 7]).is_err());
    }

    #[test]
    fn trace_covers_every_write_once() {
        let n = 4;
        let (s, info) = spec(n, 0);
        let mut faults = FaultPattern::none(n);
        faults.set(2, 5);
        let y = vec![Message::Plus; 16];
        let (r, trace) = sc_decode_traced(&y, &s, &info, &[0; 16], &faults).unwrap();
        assert_eq!(r.status, DecodeStatus::Decoded);
        assert_eq!(trace.len(), 16 * (n as usize + 1));
        for level in 1..=n {
            let mut seen: Vec<usize> = trace
                .iter()
                .filter(|t| t.level == level)
                .map(|t| t.position)
                .collect();
            seen.sort_unstable();
            assert_eq!(seen, (0..16).collect::<Vec<_>>());
        }
        let faulted: Vec<_> = trace.iter().filter(|t| t.fault).collect();
        assert_eq!(faulted.len(), 1);
        assert_eq!((faulted[0].level, faulted[0].position), (2, 5));
        assert!(faulted[0].message.is_erasure());

        let mut csv = Vec::new();
        write_trace_csv(&mut csv, &trace).unwrap();
        assert!(String::from_utf8(csv).unwrap().contains("\n2,5,0,1\n"));
    }

    #[test]
    fn sampled_fault_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 10;
        let d = FaultProb::new(0.01).unwrap();
        let f = FaultPattern::sample(n, d, n, &mut rng);
        let total = f.total_flags() as f64;
        let sigma = (total * 0.01 * 0.99).sqrt();
        assert!((f.count() as f64 - 0.01 * total).abs() < 4.0 * sigma);

        // protected upper levels stay clean
        let g = FaultPattern::sample(n, FaultProb::new(0.5).unwrap(), 3, &mut rng);
        for level in 4..=n {
            assert!((0..1 << n).all(|p| !g.is_faulted(level, p)));
        }
        assert_eq!(
            FaultPattern::sample(4, FaultProb::ONE, 4, &mut rng),
            FaultPattern::all(4)
        );
        assert_eq!(FaultPattern::sample(4, FaultProb::ZERO, 4, &mut rng).count(), 0);
    }
}
