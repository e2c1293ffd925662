//! C ABI over the `itlinq` library.
//!
//! Networks and channel tables live behind opaque handles created by the
//! `*_new`/generator functions and released with the matching `*_free`.
//! Every fallible function returns an [`ItlinqStatus`]; on failure a message is
//! kept per thread and can be read with [`itlinq_last_error_message`].
//! Outputs are written through caller-owned pointers and only on success.
//!
//! Link flags cross the boundary as `uint8_t` (0 or 1) so the layout does not
//! depend on the C compiler's `bool`.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use itlinq::channel::{compute_gain_table, compute_snr_table, ChannelModel, Itu1411Params, LinkBudget, SnrTable};
use itlinq::itis::{exact_itis_cover, greedy_itis_cover, is_itis, theoretical_fraction_with_constant, CoverResult};
use itlinq::rates::link_rates;
use itlinq::rng::seeded;
use itlinq::scheduling::{
    fair_itlinq_schedule, flashlinq_schedule, itlinq_schedule, random_priority, FairItlinqParams, FlashLinqParams,
    ItlinqParams, PriorityOrder, RxAggregation, Schedule, SchemeTag,
};
use itlinq::topology::{gen_disk_topology, gen_square_topology, LinkTopology};
use itlinq::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItlinqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    LinkOutOfRange = 4,
    CapExceeded = 5,
    Panic = 6,
}

/// A set of links: source and destination positions.
pub struct ItlinqTopology(LinkTopology);

/// Linear SNR of each link and INR of each ordered pair.
pub struct ItlinqSnrTable(SnrTable);

/// ITU-R P.1411 line-of-sight parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ItlinqItu1411 {
    pub carrier_hz: f64,
    pub h_b_m: f64,
    pub h_m_m: f64,
    pub shadow_sigma_db: f64,
    pub antenna_gain_db_per_device: f64,
}

struct Failure {
    status: ItlinqStatus,
    message: String,
}

impl Failure {
    fn new(status: ItlinqStatus, message: impl Into<String>) -> Self {
        Self { status, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::DimensionMismatch { .. } => ItlinqStatus::DimensionMismatch,
            Error::LinkOutOfRange { .. } => ItlinqStatus::LinkOutOfRange,
            Error::CapExceeded { .. } => ItlinqStatus::CapExceeded,
            _ => ItlinqStatus::InvalidArgument,
        };
        Self::new(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("interior NULs removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

/// Run `f`, record its error message and turn panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ItlinqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            ItlinqStatus::Ok
        }
        Ok(Err(fail)) => {
            set_last_error(Some(fail.message));
            fail.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(Some(format!("internal panic: {msg}")));
            ItlinqStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure::new(ItlinqStatus::NullPointer, format!("{name} is NULL"))
}

unsafe fn input<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, name: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write<T>(p: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(value);
    Ok(())
}

unsafe fn priority_or_identity(p: *const usize, n: usize) -> Result<PriorityOrder, Failure> {
    if p.is_null() {
        return Ok(PriorityOrder::identity(n));
    }
    Ok(PriorityOrder::new(input(p, n, "priority")?.to_vec())?)
}

unsafe fn write_flags(out: *mut u8, schedule: &Schedule) -> Result<(), Failure> {
    let dst = output(out, schedule.n(), "active_out")?;
    for (d, &a) in dst.iter_mut().zip(&schedule.active) {
        *d = a as u8;
    }
    Ok(())
}

unsafe fn write_cover(
    cover: &CoverResult,
    n: usize,
    labels_out: *mut usize,
    kappa_out: *mut usize,
) -> Result<(), Failure> {
    if kappa_out.is_null() {
        return Err(null("kappa_out"));
    }
    if !labels_out.is_null() {
        let labels = output(labels_out, n, "labels_out")?;
        for (k, class) in cover.classes.iter().enumerate() {
            for &l in class {
                labels[l] = k;
            }
        }
    }
    kappa_out.write(cover.kappa);
    Ok(())
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call into the library on the
/// same thread.
#[no_mangle]
pub extern "C" fn itlinq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn itlinq_status_name(status: ItlinqStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        ItlinqStatus::Ok => b"ok\0",
        ItlinqStatus::NullPointer => b"null pointer\0",
        ItlinqStatus::InvalidArgument => b"invalid argument\0",
        ItlinqStatus::DimensionMismatch => b"dimension mismatch\0",
        ItlinqStatus::LinkOutOfRange => b"link out of range\0",
        ItlinqStatus::CapExceeded => b"exact solver cap exceeded\0",
        ItlinqStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Links with sources uniform on a disk of `radius_m` and each destination
/// uniform on the disk of radius `r0_m * n^(-beta)` around its source.
#[no_mangle]
pub unsafe extern "C" fn itlinq_topology_disk(
    n: usize,
    radius_m: f64,
    r0_m: f64,
    beta: f64,
    seed: u64,
    out: *mut *mut ItlinqTopology,
) -> ItlinqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let t = gen_disk_topology(n, radius_m, r0_m, beta, seed)?;
        out.write(Box::into_raw(Box::new(ItlinqTopology(t))));
        Ok(())
    })
}

/// Sources uniform in a square of `side_m`, link lengths uniform in
/// `[len_min_m, len_max_m]`.
#[no_mangle]
pub unsafe extern "C" fn itlinq_topology_square(
    n: usize,
    side_m: f64,
    len_min_m: f64,
    len_max_m: f64,
    seed: u64,
    out: *mut *mut ItlinqTopology,
) -> ItlinqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let t = gen_square_topology(n, side_m, len_min_m, len_max_m, seed)?;
        out.write(Box::into_raw(Box::new(ItlinqTopology(t))));
        Ok(())
    })
}

/// Release a topology. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn itlinq_topology_free(t: *mut ItlinqTopology) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

#[no_mangle]
pub unsafe extern "C" fn itlinq_topology_len(t: *const ItlinqTopology, n_out: *mut usize) -> ItlinqStatus {
    guard(|| write(n_out, handle(t, "topology")?.0.n(), "n_out"))
}

/// Copy positions as interleaved `x, y` pairs; each buffer holds `2 n` values.
#[no_mangle]
pub unsafe extern "C" fn itlinq_topology_points(
    t: *const ItlinqTopology,
    src_xy_out: *mut f64,
    dst_xy_out: *mut f64,
) -> ItlinqStatus {
    guard(|| {
        let t = &handle(t, "topology")?.0;
        let src = output(src_xy_out, 2 * t.n(), "src_xy_out")?;
        let dst = output(dst_xy_out, 2 * t.n(), "dst_xy_out")?;
        for i in 0..t.n() {
            src[2 * i] = t.src[i].x;
            src[2 * i + 1] = t.src[i].y;
            dst[2 * i] = t.dst[i].x;
            dst[2 * i + 1] = t.dst[i].y;
        }
        Ok(())
    })
}

/// Table from explicit linear values: `snr` has `n` entries, `inr` is the
/// row-major `n x n` matrix with `inr[i*n + j]` received at destination `i`
/// from source `j`. The diagonal of `inr` is ignored.
#[no_mangle]
pub unsafe extern "C" fn itlinq_snr_table_new(
    n: usize,
    snr: *const f64,
    inr: *const f64,
    out: *mut *mut ItlinqSnrTable,
) -> ItlinqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let snr = input(snr, n, "snr")?.to_vec();
        let inr = input(
            inr,
            n.checked_mul(n).ok_or_else(|| Failure::new(ItlinqStatus::InvalidArgument, "n too large"))?,
            "inr",
        )?
        .to_vec();
        let s = SnrTable::new(snr, inr)?;
        out.write(Box::into_raw(Box::new(ItlinqSnrTable(s))));
        Ok(())
    })
}

unsafe fn table_from_channel(
    t: *const ItlinqTopology,
    model: ChannelModel,
    tx_power_dbm: f64,
    noise_power_dbm: f64,
    seed: u64,
    out: *mut *mut ItlinqSnrTable,
) -> ItlinqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let t = &handle(t, "topology")?.0;
        let budget = LinkBudget { tx_power_dbm, noise_power_dbm, bandwidth_hz: 1.0 };
        budget.validate()?;
        let g = compute_gain_table(t, &model, &mut seeded(seed))?;
        let s = compute_snr_table(&g, &budget)?;
        out.write(Box::into_raw(Box::new(ItlinqSnrTable(s))));
        Ok(())
    })
}

/// Table under pure path loss `g0 d^(-alpha)`.
#[no_mangle]
pub unsafe extern "C" fn itlinq_snr_table_pathloss(
    t: *const ItlinqTopology,
    g0: f64,
    alpha: f64,
    tx_power_dbm: f64,
    noise_power_dbm: f64,
    out: *mut *mut ItlinqSnrTable,
) -> ItlinqStatus {
    table_from_channel(t, ChannelModel::PathLoss { g0, alpha }, tx_power_dbm, noise_power_dbm, 0, out)
}

/// Path loss times an independent unit-mean exponential fade per entry.
#[no_mangle]
pub unsafe extern "C" fn itlinq_snr_table_rayleigh(
    t: *const ItlinqTopology,
    g0: f64,
    alpha: f64,
    tx_power_dbm: f64,
    noise_power_dbm: f64,
    seed: u64,
    out: *mut *mut ItlinqSnrTable,
) -> ItlinqStatus {
    table_from_channel(t, ChannelModel::RayleighPathLoss { g0, alpha }, tx_power_dbm, noise_power_dbm, seed, out)
}

/// ITU-R P.1411 line-of-sight loss with log-normal shadowing drawn from `seed`.
#[no_mangle]
pub unsafe extern "C" fn itlinq_snr_table_itu1411(
    t: *const ItlinqTopology,
    params: *const ItlinqItu1411,
    tx_power_dbm: f64,
    noise_power_dbm: f64,
    seed: u64,
    out: *mut *mut ItlinqSnrTable,
) -> ItlinqStatus {
    let Some(p) = params.as_ref() else {
        return guard(|| Err(null("params")));
    };
    let model = ChannelModel::Itu1411(Itu1411Params {
        carrier_hz: p.carrier_hz,
        h_b_m: p.h_b_m,
        h_m_m: p.h_m_m,
        shadow_sigma_db: p.shadow_sigma_db,
        antenna_gain_db_per_device: p.antenna_gain_db_per_device,
    });
    table_from_channel(t, model, tx_power_dbm, noise_power_dbm, seed, out)
}

/// Release a table. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn itlinq_snr_table_free(s: *mut ItlinqSnrTable) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn itlinq_snr_table_len(s: *const ItlinqSnrTable, n_out: *mut usize) -> ItlinqStatus {
    guard(|| write(n_out, handle(s, "table")?.0.n(), "n_out"))
}

/// Copy the linear SNRs (`n` values) and INRs (`n * n`, row-major, zero
/// diagonal). Either buffer may be NULL to skip it.
#[no_mangle]
pub unsafe extern "C" fn itlinq_snr_table_values(
    s: *const ItlinqSnrTable,
    snr_out: *mut f64,
    inr_out: *mut f64,
) -> ItlinqStatus {
    guard(|| {
        let s = &handle(s, "table")?.0;
        if !snr_out.is_null() {
            output(snr_out, s.n(), "snr_out")?.copy_from_slice(s.snr_values());
        }
        if !inr_out.is_null() {
            output(inr_out, s.n() * s.n(), "inr_out")?.copy_from_slice(s.inr_values());
        }
        Ok(())
    })
}

/// Uniformly random permutation of `0..n`, highest priority first.
#[no_mangle]
pub unsafe extern "C" fn itlinq_random_priority(n: usize, seed: u64, perm_out: *mut usize) -> ItlinqStatus {
    guard(|| {
        let p = random_priority(n, &mut seeded(seed))?;
        output(perm_out, n, "perm_out")?.copy_from_slice(p.as_slice());
        Ok(())
    })
}

/// ITLinQ with threshold `M snr^eta` (`M` in dB). `priority` lists all `n`
/// links, highest first; NULL means `0, 1, ..., n-1`. Writes `n` flags.
#[no_mangle]
pub unsafe extern "C" fn itlinq_schedule_itlinq(
    s: *const ItlinqSnrTable,
    priority: *const usize,
    eta: f64,
    m_db: f64,
    active_out: *mut u8,
) -> ItlinqStatus {
    guard(|| {
        let s = &handle(s, "table")?.0;
        let p = priority_or_identity(priority, s.n())?;
        write_flags(active_out, &itlinq_schedule(s, &p, &ItlinqParams { eta, m_db })?)
    })
}

/// Fair ITLinQ: links whose SNR exceeds `snr_th_db` use `(eta_bar, m_bar_db)`
/// at their source check.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn itlinq_schedule_fair(
    s: *const ItlinqSnrTable,
    priority: *const usize,
    eta: f64,
    m_db: f64,
    snr_th_db: f64,
    eta_bar: f64,
    m_bar_db: f64,
    active_out: *mut u8,
) -> ItlinqStatus {
    guard(|| {
        let s = &handle(s, "table")?.0;
        let p = priority_or_identity(priority, s.n())?;
        let params = FairItlinqParams { base: ItlinqParams { eta, m_db }, snr_th_db, eta_bar, m_bar_db };
        write_flags(active_out, &fair_itlinq_schedule(s, &p, &params)?)
    })
}

/// FlashLinQ with SIR thresholds in dB. A nonzero `rx_max` compares against
/// the strongest earlier interferer instead of their sum.
#[no_mangle]
pub unsafe extern "C" fn itlinq_schedule_flashlinq(
    s: *const ItlinqSnrTable,
    priority: *const usize,
    gamma_tx_db: f64,
    gamma_rx_db: f64,
    rx_max: u8,
    active_out: *mut u8,
) -> ItlinqStatus {
    guard(|| {
        let s = &handle(s, "table")?.0;
        let p = priority_or_identity(priority, s.n())?;
        let rx_aggregation = if rx_max != 0 { RxAggregation::Max } else { RxAggregation::Sum };
        let params = FlashLinqParams { gamma_tx_db, gamma_rx_db, rx_aggregation };
        write_flags(active_out, &flashlinq_schedule(s, &p, &params)?)
    })
}

/// Whether the `len` distinct links in `links` form an ITIS.
#[no_mangle]
pub unsafe extern "C" fn itlinq_is_itis(
    s: *const ItlinqSnrTable,
    links: *const usize,
    len: usize,
    result_out: *mut u8,
) -> ItlinqStatus {
    guard(|| {
        let s = &handle(s, "table")?.0;
        let ok = is_itis(input(links, len, "links")?, s)?;
        write(result_out, ok as u8, "result_out")
    })
}

/// Greedy partition into ITISs, visiting links in `order` (NULL for
/// `0..n`). `labels_out` (optional, `n` entries) receives each link's class.
#[no_mangle]
pub unsafe extern "C" fn itlinq_greedy_itis_cover(
    s: *const ItlinqSnrTable,
    order: *const usize,
    labels_out: *mut usize,
    kappa_out: *mut usize,
) -> ItlinqStatus {
    guard(|| {
        let s = &handle(s, "table")?.0;
        let order = priority_or_identity(order, s.n())?;
        let cover = greedy_itis_cover(s, order.as_slice())?;
        write_cover(&cover, s.n(), labels_out, kappa_out)
    })
}

/// Minimum partition into ITISs; refuses networks larger than `cap` links.
#[no_mangle]
pub unsafe extern "C" fn itlinq_exact_itis_cover(
    s: *const ItlinqSnrTable,
    cap: usize,
    labels_out: *mut usize,
    kappa_out: *mut usize,
) -> ItlinqStatus {
    guard(|| {
        let s = &handle(s, "table")?.0;
        let cover = exact_itis_cover(s, cap)?;
        write_cover(&cover, s.n(), labels_out, kappa_out)
    })
}

/// Rates in bits/s/Hz with interference treated as noise for the `n` flags in
/// `active`. `rates_out` (optional) receives `n` per-link rates.
#[no_mangle]
pub unsafe extern "C" fn itlinq_link_rates(
    s: *const ItlinqSnrTable,
    active: *const u8,
    rates_out: *mut f64,
    sum_out: *mut f64,
) -> ItlinqStatus {
    guard(|| {
        let s = &handle(s, "table")?.0;
        if sum_out.is_null() {
            return Err(null("sum_out"));
        }
        let flags = input(active, s.n(), "active")?;
        let schedule = Schedule {
            active: flags.iter().map(|&a| a != 0).collect(),
            priority: PriorityOrder::identity(s.n()),
            scheme: SchemeTag::AllOn,
        };
        let report = link_rates(&schedule, s)?;
        if !rates_out.is_null() {
            output(rates_out, s.n(), "rates_out")?.copy_from_slice(&report.per_link_bits_s_hz);
        }
        sum_out.write(report.sum_bits_s_hz);
        Ok(())
    })
}

/// Guaranteed fraction `lambda` and gap (bits) for `n` links with exponent
/// `beta`; `constant` scales the `beta < 1` regime.
#[no_mangle]
pub unsafe extern "C" fn itlinq_theoretical_fraction(
    beta: f64,
    n: usize,
    constant: f64,
    lambda_out: *mut f64,
    gap_bits_out: *mut f64,
) -> ItlinqStatus {
    guard(|| {
        if lambda_out.is_null() || gap_bits_out.is_null() {
            return Err(null("lambda_out/gap_bits_out"));
        }
        let f = theoretical_fraction_with_constant(beta, n, constant)?;
        lambda_out.write(f.lambda);
        gap_bits_out.write(f.gap_bits);
        Ok(())
    })
}
