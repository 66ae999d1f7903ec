//! Core domain types and quorum arithmetic.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Virtual time. The protocol itself never reads a clock; timestamps only
/// flow in through events so that timer expiries can be recorded.
pub type VirtualTime = u64;

/// Index of a process in the system, in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcessId(u32);

impl ProcessId {
    pub fn new(index: u32) -> Self {
        ProcessId(index)
    }

    pub fn index(&self) -> u32 {
        self.0
    }

    pub fn as_usize(&self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ProcessId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

/// Consensus round. Correct processes start at round 1 and only move up.
/// Round 0 is representable so that validation can reject it when a faulty
/// process sends it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Round(u64);

impl Round {
    pub const FIRST: Round = Round(1);

    pub fn new(value: u64) -> Self {
        Round(value)
    }

    pub fn get(&self) -> u64 {
        self.0
    }

    pub fn next(&self) -> Round {
        Round(self.0 + 1)
    }
}

impl fmt::Display for Round {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identifier of one consensus instance. Instances are totally ordered;
/// state machine replication runs them in sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstanceId(u64);

impl InstanceId {
    pub fn new(value: u64) -> Self {
        InstanceId(value)
    }

    pub fn get(&self) -> u64 {
        self.0
    }

    pub fn next(&self) -> InstanceId {
        InstanceId(self.0 + 1)
    }
}

impl fmt::Display for InstanceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Proposal value. Identity is byte equality; the protocol never interprets
/// the payload.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Value(Vec<u8>);

impl Value {
    pub fn new(payload: impl Into<Vec<u8>>) -> Self {
        Value(payload.into())
    }

    pub fn bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.0.len() * 2);
        for b in &self.0 {
            s.push_str(&format!("{b:02x}"));
        }
        s
    }

    pub fn from_hex(hex: &str) -> Option<Self> {
        if hex.len() % 2 != 0 {
            return None;
        }
        let mut out = Vec::with_capacity(hex.len() / 2);
        let bytes = hex.as_bytes();
        for pair in bytes.chunks(2) {
            let hi = (pair[0] as char).to_digit(16)?;
            let lo = (pair[1] as char).to_digit(16)?;
            out.push((hi * 16 + lo) as u8);
        }
        Some(Value(out))
    }
}

impl fmt::Display for Value {
    fmt_value_as_hex!();
}

macro_rules! fmt_value_as_hex {
    () => {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "{}", self.to_hex())
        }
    };
}
use fmt_value_as_hex;

/// Externally provided validity predicate. Every value carried by an
/// accepted message must satisfy it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExternalValidity {
    AcceptAll,
    RejectListed(BTreeSet<Value>),
}

impl ExternalValidity {
    pub fn reject(values: impl IntoIterator<Item = Value>) -> Self {
        ExternalValidity::RejectListed(values.into_iter().collect())
    }

    pub fn accepts(&self, value: &Value) -> bool {
        match self {
            ExternalValidity::AcceptAll => true,
            ExternalValidity::RejectListed(rejected) => !rejected.contains(value),
        }
    }
}

impl Default for ExternalValidity {
    fn default() -> Self {
        ExternalValidity::AcceptAll
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("n must be at least 1, got {0}")]
    EmptySystem(u32),
    #[error("n >= 3f+1 violated: n={n}, f={f}")]
    InsufficientResilience { n: u32, f: u32 },
}

/// Static system parameters shared by every module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemConfig {
    n: u32,
    f: u32,
    validity: ExternalValidity,
}

impl SystemConfig {
    pub fn new(n: u32, f: u32, validity: ExternalValidity) -> Result<Self, ConfigError> {
        if n == 0 {
            return Err(ConfigError::EmptySystem(n));
        }
        if n < 3 * f + 1 {
            return Err(ConfigError::InsufficientResilience { n, f });
        }
        Ok(SystemConfig { n, f, validity })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn validity(&self) -> &ExternalValidity {
        &self.validity
    }

    /// Messages from this many different processes form a quorum:
    /// `floor((n+f)/2) + 1`. Any two quorums intersect in at least `f+1`
    /// processes.
    pub fn quorum_size(&self) -> u32 {
        (self.n + self.f) / 2 + 1
    }

    /// How many round-change messages with a higher round are enough to
    /// adopt a new round: `f + 1` guarantees at least one came from a
    /// correct process.
    pub fn catchup_threshold(&self) -> u32 {
        self.f + 1
    }

    pub fn leader(&self, instance: InstanceId, round: Round) -> ProcessId {
        leader_for(instance, round, self.n)
    }

    pub fn contains(&self, process: ProcessId) -> bool {
        process.index() < self.n
    }
}

/// Largest `f` with `n >= 3f+1`.
pub fn max_faulty(n: u32) -> u32 {
    debug_assert!(n >= 1);
    (n - 1) / 3
}

/// Round-robin leader selection: `(instance + round - 1) mod n`. As the
/// round increases this rotates through all processes, so at least `f+1`
/// distinct processes eventually lead.
pub fn leader_for(instance: InstanceId, round: Round, n: u32) -> ProcessId {
    debug_assert!(round.get() >= 1);
    let slot = instance.get().wrapping_add(round.get() - 1);
    ProcessId::new((slot % n as u64) as u32)
}

/// Round timer duration: `base * 2^(round-1)`, saturating.
pub fn round_timeout(round: Round, base: u64) -> u64 {
    debug_assert!(round.get() >= 1 && base > 0);
    let exp = (round.get() - 1).min(63) as u32;
    base.saturating_mul(1u64 << exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n: u32, f: u32) -> SystemConfig {
        SystemConfig::new(n, f, ExternalValidity::AcceptAll).unwrap()
    }

    #[test]
    fn quorum_size_examples() {
        assert_eq!(config(4, 1).quorum_size(), 3);
        assert_eq!(config(7, 2).quorum_size(), 5);
        assert_eq!(config(1, 0).quorum_size(), 1);
    }

    #[test]
    fn max_faulty_examples() {
        assert_eq!(max_faulty(4), 1);
        assert_eq!(max_faulty(3), 0);
        assert_eq!(max_faulty(10), 3);
    }

    #[test]
    fn config_rejects_insufficient_resilience() {
        assert_eq!(
            SystemConfig::new(4, 2, ExternalValidity::AcceptAll),
            Err(ConfigError::InsufficientResilience { n: 4, f: 2 })
        );
        assert!(SystemConfig::new(0, 0, ExternalValidity::AcceptAll).is_err());
    }

    #[test]
    fn leader_examples() {
        assert_eq!(
            leader_for(InstanceId::new(0), Round::new(1), 4),
            ProcessId::new(0)
        );
        assert_eq!(
            leader_for(InstanceId::new(0), Round::new(5), 4),
            ProcessId::new(0)
        );
        assert_eq!(
            leader_for(InstanceId::new(3), Round::new(2), 4),
            ProcessId::new(0)
        );
    }

    #[test]
    fn leader_rotation_covers_all_processes() {
        for n in [1u32, 3, 4, 7] {
            for start in 1..=3u64 {
                let seen: std::collections::BTreeSet<_> = (0..n as u64)
                    .map(|k| leader_for(InstanceId::new(5), Round::new(start + k), n))
                    .collect();
                assert_eq!(seen.len(), n as usize);
            }
        }
    }

    #[test]
    fn timeout_examples() {
        assert_eq!(round_timeout(Round::new(1), 1000), 1000);
        assert_eq!(round_timeout(Round::new(3), 1000), 4000);
        assert_eq!(round_timeout(Round::new(10), 1), 512);
    }

    #[test]
    fn timeout_is_strictly_monotone() {
        let mut prev = 0;
        for r in 1..=20u64 {
            let t = round_timeout(Round::new(r), 7);
            assert!(t > prev);
            prev = t;
        }
    }

    #[test]
    fn quorum_overlap_bound_holds_for_all_small_systems() {
        // Any two quorums share at least f+1 processes:
        // 2 * quorum_size - n >= f + 1.
        for n in 4..=100u32 {
            let f = max_faulty(n);
            let q = config(n, f).quorum_size();
            assert!(
                2 * q >= n + f + 1,
                "overlap too small for n={n}, f={f}, q={q}"
            );
        }
    }

    #[test]
    fn validity_predicate_modes() {
        let beta = ExternalValidity::reject([Value::new(*b"bad")]);
        assert!(!beta.accepts(&Value::new(*b"bad")));
        assert!(beta.accepts(&Value::new(*b"good")));
        assert!(ExternalValidity::AcceptAll.accepts(&Value::new(*b"bad")));
    }

    #[test]
    fn value_hex_round_trip() {
        let v = Value::new(vec![0x00, 0xff, 0x10]);
        assert_eq!(v.to_hex(), "00ff10");
        assert_eq!(Value::from_hex("00ff10"), Some(v));
        assert_eq!(Value::from_hex("0"), None);
        assert_eq!(Value::from_hex("zz"), None);
    }
}
