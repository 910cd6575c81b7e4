//! Accounting of big-integer storage.
//!
//! [`install`] replaces GMP's allocation functions with counting wrappers
//! around the system allocator. From then on every limb buffer (and every
//! heap scratch area GMP takes) is tallied in per-thread live and high-water
//! counters, so work on other threads does not leak into a measurement.
//! Small scratch areas that GMP keeps on the stack are not seen.

use std::alloc::{GlobalAlloc, Layout, System};
use std::cell::Cell;
use std::ffi::c_void;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Once;

use gmp_mpfr_sys::gmp;

static INSTALLED: AtomicBool = AtomicBool::new(false);
static INSTALL: Once = Once::new();
static WARN: Once = Once::new();

thread_local! {
    static LIVE: Cell<isize> = const { Cell::new(0) };
    static PEAK: Cell<isize> = const { Cell::new(0) };
}

// Same alignment malloc guarantees, so blocks GMP obtained before the hooks
// were installed can still be released through them.
const ALIGN: usize = 16;

fn layout(size: usize) -> Layout {
    Layout::from_size_align(size.max(1), ALIGN).expect("valid layout")
}

fn grow(bytes: usize) {
    // try_with: the slot may already be gone during thread teardown
    let _ = LIVE.try_with(|live| {
        let now = live.get() + bytes as isize;
        live.set(now);
        let _ = PEAK.try_with(|peak| peak.set(peak.get().max(now)));
    });
}

fn shrink(bytes: usize) {
    let _ = LIVE.try_with(|live| live.set(live.get() - bytes as isize));
}

extern "C" fn gmp_alloc(size: usize) -> *mut c_void {
    let p = unsafe { System.alloc(layout(size)) };
    if p.is_null() {
        std::process::abort();
    }
    grow(size);
    p.cast()
}

unsafe extern "C" fn gmp_realloc(ptr: *mut c_void, old: usize, new: usize) -> *mut c_void {
    let p = System.realloc(ptr.cast(), layout(old), new.max(1));
    if p.is_null() {
        std::process::abort();
    }
    shrink(old);
    grow(new);
    p.cast()
}

unsafe extern "C" fn gmp_free(ptr: *mut c_void, size: usize) {
    System.dealloc(ptr.cast(), layout(size));
    shrink(size);
}

/// Route GMP's allocations through the counters. Idempotent.
pub fn install() {
    INSTALL.call_once(|| {
        unsafe {
            gmp::set_memory_functions(Some(gmp_alloc), Some(gmp_realloc), Some(gmp_free));
        }
        INSTALLED.store(true, Ordering::Release);
    });
}

pub fn is_installed() -> bool {
    INSTALLED.load(Ordering::Acquire)
}

/// Run `f` and return its result with the peak number of big-integer bytes
/// it held live at once on this thread, above what was live when it
/// started. `None` (with a one-time warning on stderr) when [`install`] has
/// not been called.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, Option<u64>) {
    if !is_installed() {
        WARN.call_once(|| {
            eprintln!("warning: memory accounting unavailable; peak_mem reported as null")
        });
        return (f(), None);
    }
    let baseline = LIVE.with(Cell::get);
    let outer_peak = PEAK.with(|p| p.replace(baseline));
    let out = f();
    let peak = PEAK.with(|p| {
        let inner = p.get();
        p.set(inner.max(outer_peak));
        inner
    });
    (out, Some((peak - baseline).max(0) as u64))
}

/// Process resident-set high-water mark in bytes, where the platform
/// reports it.
pub fn rss_high_water() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hyperseries::BigInt;

    #[test]
    fn scopes() {
        install();
        let (_, empty) = measure(|| ());
        assert_eq!(empty, Some(0));

        let (x, bytes) = measure(|| BigInt::from(1) << 1023u32);
        assert_eq!(x.significant_bits(), 1024);
        assert!(bytes.unwrap() >= 128);

        // nested scopes do not hide the inner peak from the outer one
        let (inner, outer) = measure(|| {
            let (_, inner) = measure(|| BigInt::from(1) << 100_000u32);
            inner
        });
        assert!(outer.unwrap() >= inner.unwrap());
    }
}
