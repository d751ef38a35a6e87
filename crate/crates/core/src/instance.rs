//! Toronto-format instance loading.
//!
//! A `.stu` file holds one student per line, each line listing the 1-based
//! indices of the exams that student sits. Exams are stored 0-based in
//! memory. The slot count is not part of the file format and must be
//! supplied separately.

use crate::error::{Error, Result};

/// An uncapacitated examination timetabling instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    name: String,
    num_exams: usize,
    num_slots: usize,
    /// Per-student enrollment, 0-based exam indices, sorted and deduplicated.
    students: Vec<Vec<u32>>,
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        num_exams: usize,
        num_slots: usize,
        mut students: Vec<Vec<u32>>,
    ) -> Result<Self> {
        if num_slots == 0 {
            return Err(Error::InvalidInstance("slot count must be positive".into()));
        }
        if num_slots > u32::MAX as usize - 1 || num_exams > u32::MAX as usize - 1 {
            return Err(Error::InvalidInstance("instance too large".into()));
        }
        if students.is_empty() {
            return Err(Error::InvalidInstance("instance has no students".into()));
        }
        for (s, list) in students.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if let Some(&e) = list.iter().find(|&&e| e as usize >= num_exams) {
                return Err(Error::InvalidInstance(format!(
                    "student {} enrolled in exam {} but instance has {} exams",
                    s + 1,
                    e + 1,
                    num_exams
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            num_exams,
            num_slots,
            students,
        })
    }

    /// Parses `.stu` text. The exam count is the largest index seen.
    pub fn parse_stu(name: impl Into<String>, text: &str, num_slots: usize) -> Result<Self> {
        let students = parse_enrollments(text)?;
        let num_exams = students
            .iter()
            .flat_map(|s| s.iter())
            .map(|&e| e as usize + 1)
            .max()
            .unwrap_or(0);
        Self::new(name, num_exams, num_slots, students)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_exams(&self) -> usize {
        self.num_exams
    }

    pub fn num_slots(&self) -> usize {
        self.num_slots
    }

    pub fn num_students(&self) -> usize {
        self.students.len()
    }

    pub fn students(&self) -> &[Vec<u32>] {
        &self.students
    }

    /// Per-exam enrollment counts.
    pub fn enrollments(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.num_exams];
        for s in &self.students {
            for &e in s {
                counts[e as usize] += 1;
            }
        }
        counts
    }

    /// Number of (student, exam pair) incidences: sum over students of C(|s|, 2).
    pub fn co_enrolled_pairs(&self) -> u64 {
        self.students
            .iter()
            .map(|s| {
                let n = s.len() as u64;
                n * n.saturating_sub(1) / 2
            })
            .sum()
    }

    /// Returns a copy with a different slot count.
    pub fn with_slots(mut self, num_slots: usize) -> Result<Self> {
        if num_slots == 0 {
            return Err(Error::InvalidInstance("slot count must be positive".into()));
        }
        self.num_slots = num_slots;
        Ok(self)
    }

    /// Widens the exam range, e.g. when a `.crs` file lists exams nobody sits.
    pub fn with_exam_count(mut self, num_exams: usize) -> Result<Self> {
        if num_exams < self.num_exams {
            return Err(Error::InvalidInstance(format!(
                "cannot shrink exam count from {} to {}",
                self.num_exams, num_exams
            )));
        }
        self.num_exams = num_exams;
        Ok(self)
    }
}

fn parse_enrollments(text: &str) -> Result<Vec<Vec<u32>>> {
    let mut students = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut exams = Vec::new();
        for token in line.split_whitespace() {
            let value: u64 = token.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("`{token}` is not a positive integer"),
            })?;
            if value == 0 || value > u32::MAX as u64 {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("exam index `{token}` out of range"),
                });
            }
            exams.push((value - 1) as u32);
        }
        exams.sort_unstable();
        exams.dedup();
        students.push(exams);
    }
    if students.is_empty() {
        return Err(Error::Empty);
    }
    Ok(students)
}

/// Contents of a `.crs` file: `(exam index, enrollment count)` lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CourseList {
    pub entries: Vec<(u32, u32)>,
}

impl CourseList {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let mut next = |what: &str| -> Result<u32> {
                let tok = fields.next().ok_or_else(|| Error::Parse {
                    line: idx + 1,
                    message: format!("missing {what}"),
                })?;
                tok.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("`{tok}` is not a valid {what}"),
                })
            };
            let exam = next("exam index")?;
            let count = next("enrollment count")?;
            if exam == 0 {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "exam index must be positive".into(),
                });
            }
            entries.push((exam, count));
        }
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self { entries })
    }

    pub fn num_exams(&self) -> usize {
        self.entries.iter().map(|&(e, _)| e as usize).max().unwrap_or(0)
    }

    /// Human-readable discrepancies against a parsed instance. Empty when
    /// the two files agree.
    pub fn discrepancies(&self, instance: &Instance) -> Vec<String> {
        let mut notes = Vec::new();
        if self.num_exams() != instance.num_exams() {
            notes.push(format!(
                "{}: .crs lists {} exams, .stu implies {}",
                instance.name(),
                self.num_exams(),
                instance.num_exams()
            ));
        }
        let counts = instance.enrollments();
        let mismatched = self
            .entries
            .iter()
            .filter(|&&(e, c)| counts.get(e as usize - 1).copied().unwrap_or(0) != c)
            .count();
        if mismatched > 0 {
            notes.push(format!(
                "{}: {} exams have enrollment counts differing from the .stu file",
                instance.name(),
                mismatched
            ));
        }
        notes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_line_file() {
        let inst = Instance::parse_stu("t", "1 2\n2 3\n", 4).unwrap();
        assert_eq!(inst.num_exams(), 3);
        assert_eq!(inst.num_students(), 2);
        assert_eq!(inst.students(), &[vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn crlf_blank_lines_and_duplicates() {
        let inst = Instance::parse_stu("t", "0001 0003 0001\r\n\r\n  \n2\r\n", 2).unwrap();
        assert_eq!(inst.num_exams(), 3);
        assert_eq!(inst.students(), &[vec![0, 2], vec![1]]);
    }

    #[test]
    fn malformed_token_reports_line() {
        let err = Instance::parse_stu("t", "1 2\n3 x\n", 2).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            Instance::parse_stu("t", "1 0\n", 2),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Instance::parse_stu("t", "-3\n", 2),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(matches!(Instance::parse_stu("t", "", 2), Err(Error::Empty)));
        assert!(matches!(Instance::parse_stu("t", "\n \r\n", 2), Err(Error::Empty)));
    }

    #[test]
    fn zero_slots_rejected() {
        assert!(Instance::parse_stu("t", "1 2\n", 0).is_err());
    }

    #[test]
    fn crs_cross_check() {
        let inst = Instance::parse_stu("t", "1 2\n2 3\n", 2).unwrap();
        let ok = CourseList::parse("1 1\n2 2\n3 1\n").unwrap();
        assert!(ok.discrepancies(&inst).is_empty());
        let off = CourseList::parse("1 1\n2 3\n3 1\n4 0\n").unwrap();
        assert_eq!(off.discrepancies(&inst).len(), 2);
        assert!(CourseList::parse("1\n").is_err());
    }

    #[test]
    fn co_enrolled_pairs_counts_student_pairs() {
        let inst = Instance::parse_stu("t", "1 2 3\n4\n1 4\n", 2).unwrap();
        assert_eq!(inst.co_enrolled_pairs(), 3 + 0 + 1);
    }
}
