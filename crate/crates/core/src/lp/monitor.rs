use std::sync::atomic::{AtomicU64, Ordering};

/// Process-wide tally of optimal solves and their worst residuals.
#[derive(Debug, Default)]
pub struct DualityMonitor {
    solves: AtomicU64,
    worst_gap_bits: AtomicU64,
    worst_dual_infeasibility_bits: AtomicU64,
    breakdowns: AtomicU64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorSnapshot {
    pub solves: u64,
    pub worst_duality_gap: f64,
    pub worst_dual_infeasibility: f64,
    pub breakdowns: u64,
}

static MONITOR: DualityMonitor = DualityMonitor {
    solves: AtomicU64::new(0),
    worst_gap_bits: AtomicU64::new(0),
    worst_dual_infeasibility_bits: AtomicU64::new(0),
    breakdowns: AtomicU64::new(0),
};

pub fn duality_monitor() -> &'static DualityMonitor {
    &MONITOR
}

fn raise(slot: &AtomicU64, value: f64) {
    // nonnegative f64 bit patterns order like the floats themselves
    slot.fetch_max(value.max(0.0).to_bits(), Ordering::Relaxed);
}

impl DualityMonitor {
    pub(crate) fn record(&self, gap: f64, dual_infeasibility: f64) {
        self.solves.fetch_add(1, Ordering::Relaxed);
        raise(&self.worst_gap_bits, if gap.is_nan() { f64::INFINITY } else { gap });
        raise(&self.worst_dual_infeasibility_bits, dual_infeasibility);
    }

    pub(crate) fn record_breakdown(&self) {
        self.breakdowns.fetch_add(1, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> MonitorSnapshot {
        MonitorSnapshot {
            solves: self.solves.load(Ordering::Relaxed),
            worst_duality_gap: f64::from_bits(self.worst_gap_bits.load(Ordering::Relaxed)),
            worst_dual_infeasibility: f64::from_bits(self.worst_dual_infeasibility_bits.load(Ordering::Relaxed)),
            breakdowns: self.breakdowns.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.solves.store(0, Ordering::Relaxed);
        self.worst_gap_bits.store(0, Ordering::Relaxed);
        self.worst_dual_infeasibility_bits.store(0, Ordering::Relaxed);
        self.breakdowns.store(0, Ordering::Relaxed);
    }
}
