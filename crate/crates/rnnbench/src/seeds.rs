//! Stable per-job seed derivation.
//!
//! Every random stream in a run flows from one top-level seed through
//! FNV-1a over a canonical key string, so jobs can execute in any order
//! (or in parallel) and still draw identical streams.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Derive a child seed from `top` and a canonical key such as
/// `"noise|dgp=TRW|rep=3"` or `"run|cell=GRU|dgp=T|rep=0|nh=2|w=4|run=1"`.
pub fn derive(top: u64, key: &str) -> u64 {
    let mut buf = Vec::with_capacity(8 + key.len());
    buf.extend_from_slice(&top.to_le_bytes());
    buf.extend_from_slice(key.as_bytes());
    fnv1a(&buf)
}
