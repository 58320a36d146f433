use std::sync::atomic::{AtomicU64, Ordering};

/// Default cap on `q` and on `q^n` for anything that materialises points.
pub const DEFAULT_SIZE_CAP: u64 = 1 << 20;
/// Default cap on the length of enumerated lists (directions, subspaces).
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

static SIZE_CAP: AtomicU64 = AtomicU64::new(DEFAULT_SIZE_CAP);

/// Current process-wide size cap.
pub fn size_cap() -> u64 {
    SIZE_CAP.load(Ordering::Relaxed)
}

/// Overrides the process-wide size cap (the CLI wires `KAKEYA_SIZE_CAP` here).
pub fn set_size_cap(cap: u64) {
    SIZE_CAP.store(cap.max(2), Ordering::Relaxed);
}

pub fn enumeration_cap() -> u64 {
    DEFAULT_ENUMERATION_CAP
}

pub(crate) fn check_cap(what: &'static str, value: u128, cap: u64) -> crate::Result<()> {
    if value > cap as u128 {
        Err(crate::Error::TooLarge { what, value, cap })
    } else {
        Ok(())
    }
}

/// `q^n` with overflow reported as exceeding the cap.
pub(crate) fn checked_pow(q: u64, n: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(q as u128)?;
    }
    Some(acc)
}

pub(crate) fn space_size(q: u32, n: usize) -> crate::Result<usize> {
    let cap = size_cap();
    let size = checked_pow(q as u64, n).unwrap_or(u128::MAX);
    check_cap("q^n", size, cap)?;
    Ok(size as usize)
}
