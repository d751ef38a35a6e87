//! The Toronto benchmark: published instance metadata, slot counts and a
//! loader for `.stu`/`.crs` files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::instance::{CourseList, Instance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceInfo {
    pub name: &'static str,
    pub exams: usize,
    pub students: usize,
    pub slots: usize,
    /// Conflict density as published, two decimals.
    pub density: f64,
}

const fn info(name: &'static str, exams: usize, students: usize, slots: usize, density: f64) -> InstanceInfo {
    InstanceInfo { name, exams, students, slots, density }
}

/// Published sizes of the 13 Toronto instances.
pub const INSTANCES: [InstanceInfo; 13] = [
    info("car-f-92", 543, 18419, 32, 0.14),
    info("car-s-91", 682, 16925, 35, 0.13),
    info("ear-f-83", 190, 1125, 24, 0.27),
    info("hec-s-92", 81, 2823, 18, 0.42),
    info("kfu-s-93", 461, 5349, 20, 0.06),
    info("lse-f-91", 381, 2726, 18, 0.06),
    info("pur-s-93", 2419, 30032, 43, 0.03),
    info("rye-s-93", 486, 11483, 23, 0.07),
    info("sta-f-83", 139, 611, 13, 0.14),
    info("tre-s-92", 261, 4360, 23, 0.18),
    info("uta-s-92", 622, 21267, 35, 0.13),
    info("ute-s-92", 184, 2750, 10, 0.08),
    info("yor-f-83", 181, 941, 21, 0.29),
];

pub fn instance_info(name: &str) -> Option<&'static InstanceInfo> {
    INSTANCES.iter().find(|i| i.name.eq_ignore_ascii_case(name))
}

/// Instance name to slot count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotTable {
    slots: BTreeMap<String, usize>,
}

const BUNDLED_SLOTS: &str = include_str!("../data/slots.toml");

impl Default for SlotTable {
    fn default() -> Self {
        Self::parse(BUNDLED_SLOTS).expect("bundled slot table is valid")
    }
}

impl SlotTable {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, i64> =
            toml::from_str(text).map_err(|e| Error::Metadata(format!("slot table: {e}")))?;
        let mut slots = BTreeMap::new();
        for (name, k) in raw {
            if k <= 0 {
                return Err(Error::Metadata(format!("slot count for `{name}` must be positive")));
            }
            slots.insert(name.to_ascii_lowercase(), k as usize);
        }
        Ok(Self { slots })
    }

    /// Bundled defaults overlaid with the entries of `path`.
    pub fn with_overrides(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut table = Self::default();
        table.slots.extend(Self::parse(&text)?.slots);
        Ok(table)
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.slots.get(&name.to_ascii_lowercase()).copied()
    }
}

/// Short alias used by some distributions, e.g. `car92` for `car-f-92`.
fn short_alias(name: &str) -> Option<String> {
    let parts: Vec<&str> = name.split('-').collect();
    match parts.as_slice() {
        [stem, _, year] => Some(format!("{stem}{year}")),
        _ => None,
    }
}

/// Finds `<name>.<ext>` in `dir`, ignoring case and accepting the short alias.
pub fn find_file(dir: &Path, name: &str, ext: &str) -> Option<PathBuf> {
    let mut wanted = vec![format!("{name}.{ext}").to_ascii_lowercase()];
    if let Some(alias) = short_alias(name) {
        wanted.push(format!("{alias}.{ext}").to_ascii_lowercase());
    }
    let entries = fs::read_dir(dir).ok()?;
    let mut found: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.file_name()
                .and_then(|f| f.to_str())
                .is_some_and(|f| wanted.contains(&f.to_ascii_lowercase()))
        })
        .collect();
    found.sort();
    found.into_iter().next()
}

/// Loaded instance plus any notes from cross-checking the `.crs` file.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub instance: Instance,
    pub notes: Vec<String>,
}

/// Loads `name` from `dir`. The slot count comes from `override_k`, else
/// from `slots`. A `.crs` file next to the `.stu` file is cross-checked and
/// widens the exam range when it lists exams nobody is enrolled in.
pub fn load_instance(
    dir: &Path,
    name: &str,
    slots: &SlotTable,
    override_k: Option<usize>,
) -> Result<Loaded> {
    let canonical = name.to_ascii_lowercase();
    let k = override_k
        .or_else(|| slots.get(&canonical))
        .ok_or_else(|| Error::MissingSlots(name.to_string()))?;
    let stu = find_file(dir, &canonical, "stu").ok_or_else(|| {
        Error::UnknownInstance(format!("{name} (no .stu file in {})", dir.display()))
    })?;
    let text = fs::read_to_string(&stu).map_err(|source| Error::Io {
        path: stu.clone(),
        source,
    })?;
    let mut instance = Instance::parse_stu(canonical.clone(), &text, k)?;
    let mut notes = Vec::new();
    if let Some(crs) = find_file(dir, &canonical, "crs") {
        let text = fs::read_to_string(&crs).map_err(|source| Error::Io {
            path: crs.clone(),
            source,
        })?;
        let courses = CourseList::parse(&text)?;
        notes = courses.discrepancies(&instance);
        if courses.num_exams() > instance.num_exams() {
            instance = instance.with_exam_count(courses.num_exams())?;
        }
        for note in &notes {
            log::warn!("{note}");
        }
    }
    Ok(Loaded { instance, notes })
}
