use crate::error::{Error, Result};

/// Sentinel for an exam without a slot.
pub const UNASSIGNED: u32 = u32::MAX;

/// Exam to slot assignment, 0-based on both sides.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Timetable {
    slots: Vec<u32>,
    num_slots: usize,
}

impl Timetable {
    pub fn empty(num_exams: usize, num_slots: usize) -> Self {
        Self {
            slots: vec![UNASSIGNED; num_exams],
            num_slots,
        }
    }

    /// Builds a timetable from raw slot values; `UNASSIGNED` entries are allowed.
    pub fn from_slots(slots: Vec<u32>, num_slots: usize) -> Result<Self> {
        if let Some(&s) = slots
            .iter()
            .find(|&&s| s != UNASSIGNED && s as usize >= num_slots)
        {
            return Err(Error::SlotOutOfRange {
                slot: s as usize,
                num_slots,
            });
        }
        Ok(Self { slots, num_slots })
    }

    /// Builds a complete timetable from `k` disjoint exam sets covering all exams.
    pub fn from_partition(sets: &[Vec<u32>], num_exams: usize) -> Result<Self> {
        let mut t = Self::empty(num_exams, sets.len());
        for (slot, set) in sets.iter().enumerate() {
            for &e in set {
                let e = e as usize;
                if e >= num_exams {
                    return Err(Error::ExamOutOfRange { exam: e, num_exams });
                }
                if t.slots[e] != UNASSIGNED {
                    return Err(Error::AlreadyAssigned { exam: e });
                }
                t.slots[e] = slot as u32;
            }
        }
        t.check_complete()?;
        Ok(t)
    }

    pub fn num_exams(&self) -> usize {
        self.slots.len()
    }

    pub fn num_slots(&self) -> usize {
        self.num_slots
    }

    #[inline]
    pub fn slot(&self, exam: usize) -> Option<usize> {
        match self.slots[exam] {
            UNASSIGNED => None,
            s => Some(s as usize),
        }
    }

    #[inline]
    pub fn raw(&self) -> &[u32] {
        &self.slots
    }

    pub fn is_assigned(&self, exam: usize) -> bool {
        self.slots[exam] != UNASSIGNED
    }

    pub fn assign(&mut self, exam: usize, slot: usize) -> Result<()> {
        if slot >= self.num_slots {
            return Err(Error::SlotOutOfRange {
                slot,
                num_slots: self.num_slots,
            });
        }
        self.slots[exam] = slot as u32;
        Ok(())
    }

    pub fn unassign(&mut self, exam: usize) {
        self.slots[exam] = UNASSIGNED;
    }

    pub fn is_complete(&self) -> bool {
        self.slots.iter().all(|&s| s != UNASSIGNED)
    }

    pub fn check_complete(&self) -> Result<()> {
        match self.slots.iter().position(|&s| s == UNASSIGNED) {
            Some(exam) => Err(Error::Incomplete { exam }),
            None => Ok(()),
        }
    }

    pub fn assigned_count(&self) -> usize {
        self.slots.iter().filter(|&&s| s != UNASSIGNED).count()
    }

    /// Exam sets per slot, each in ascending exam order.
    pub fn partition(&self) -> Vec<Vec<u32>> {
        let mut sets = vec![Vec::new(); self.num_slots];
        for (e, &s) in self.slots.iter().enumerate() {
            if s != UNASSIGNED {
                sets[s as usize].push(e as u32);
            }
        }
        sets
    }

    /// Maps every slot `t` to `k - 1 - t`.
    pub fn reflected(&self) -> Self {
        let k = self.num_slots as u32;
        let slots = self
            .slots
            .iter()
            .map(|&s| if s == UNASSIGNED { s } else { k - 1 - s })
            .collect();
        Self {
            slots,
            num_slots: self.num_slots,
        }
    }
}
