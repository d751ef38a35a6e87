use crate::table::MoveCostTable;

/// Outcome of a vertex-descent run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VdlsReport {
    pub sweeps: usize,
    pub moves: usize,
    /// Total raw cost reduction.
    pub improvement: u64,
}

/// Vertex descent: sweeps the exams in ascending order, moving each to its
/// cheapest slot, until a sweep improves nothing.
///
/// On ties the current slot is kept, otherwise the lowest slot index wins.
/// Works on the penalized cost, so it repairs conflicts as well.
pub fn vdls(table: &mut MoveCostTable<'_>) -> VdlsReport {
    let m = table.num_exams();
    let k = table.num_slots();
    let mut report = VdlsReport::default();
    loop {
        report.sweeps += 1;
        let mut sweep_gain = 0u64;
        for e in 0..m {
            let mut best_slot = table.slot(e);
            let mut best_delta = 0i64;
            for t in 0..k {
                let d = table.delta_raw(e, t);
                if d < best_delta {
                    best_delta = d;
                    best_slot = t;
                }
            }
            if best_delta < 0 {
                table.move_exam(e, best_slot);
                sweep_gain += best_delta.unsigned_abs();
                report.moves += 1;
            }
        }
        table.charge((m * k) as u64);
        report.improvement += sweep_gain;
        if sweep_gain == 0 {
            return report;
        }
    }
}
