//! Episodes, shifts and cohorts.
//!
//! An episode is one continuous hospital stay. Per-shift plans of care are
//! collapsed to a [`ShiftRecord`] carrying the shift timing and the nurse's
//! experience; diagnoses and interventions are kept at episode level as
//! presence sets.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use chrono::{DateTime, FixedOffset};

use crate::error::{Error, Result};
use crate::taxonomy::{NandaClass, NandaDomain, NicClass, NicDomain, Tag};

pub type Timestamp = DateTime<FixedOffset>;

pub const MIN_ADULT_AGE: u32 = 18;
pub const MIN_SHIFTS: usize = 2;

/// A NOC outcome with its three ratings on the 1 (worst) to 5 (best) scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NocOutcome {
    pub name: String,
    pub initial_rating: u8,
    pub expected_rating: u8,
    pub final_rating: u8,
}

impl NocOutcome {
    pub const PAIN_CONTROL: &'static str = "Pain Control";

    pub fn pain_control(initial: u8, expected: u8, final_rating: u8) -> Self {
        NocOutcome {
            name: Self::PAIN_CONTROL.to_owned(),
            initial_rating: initial,
            expected_rating: expected,
            final_rating,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftRecord {
    pub start_time: Timestamp,
    pub duration_hours: f64,
    /// Years the nurse on this shift has held the current position.
    pub nurse_experience_years: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub episode_id: String,
    pub age_years: u32,
    pub admission_time: Timestamp,
    pub discharge_time: Timestamp,
    pub shifts: Vec<ShiftRecord>,
    pub pain_control: NocOutcome,
    pub nanda_domains: BTreeSet<NandaDomain>,
    pub nanda_classes: BTreeSet<NandaClass>,
    pub nic_domains: BTreeSet<NicDomain>,
    pub nic_classes: BTreeSet<NicClass>,
    pub readmitted: bool,
}

impl Episode {
    pub fn has_tag(&self, tag: Tag) -> bool {
        match tag {
            Tag::NandaDomain(t) => self.nanda_domains.contains(&t),
            Tag::NicDomain(t) => self.nic_domains.contains(&t),
            Tag::NandaClass(t) => self.nanda_classes.contains(&t),
            Tag::NicClass(t) => self.nic_classes.contains(&t),
        }
    }

    pub fn insert_tag(&mut self, tag: Tag) {
        match tag {
            Tag::NandaDomain(t) => self.nanda_domains.insert(t),
            Tag::NicDomain(t) => self.nic_domains.insert(t),
            Tag::NandaClass(t) => self.nanda_classes.insert(t),
            Tag::NicClass(t) => self.nic_classes.insert(t),
        };
    }

    /// Present tags in canonical order.
    pub fn tags(&self) -> impl Iterator<Item = Tag> + '_ {
        self.nanda_domains
            .iter()
            .map(|&t| Tag::NandaDomain(t))
            .chain(self.nic_domains.iter().map(|&t| Tag::NicDomain(t)))
            .chain(self.nanda_classes.iter().map(|&t| Tag::NandaClass(t)))
            .chain(self.nic_classes.iter().map(|&t| Tag::NicClass(t)))
    }

    /// Mean nurse experience over the episode's shifts.
    pub fn mean_nurse_experience(&self) -> f64 {
        if self.shifts.is_empty() {
            return 0.0;
        }
        self.shifts
            .iter()
            .map(|s| s.nurse_experience_years)
            .sum::<f64>()
            / self.shifts.len() as f64
    }
}

/// A broken episode invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewShifts(usize),
    RatingOutOfRange { rating: &'static str, value: u8 },
    AgeBelowAdult(u32),
    DischargeNotAfterAdmission,
    NonPositiveShiftDuration { shift: usize },
    InvalidNurseExperience { shift: usize },
    EmptyEpisodeId,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewShifts(n) => write!(f, "shifts length < 2 (found {n})"),
            Violation::RatingOutOfRange { rating, value } => {
                write!(f, "rating outside 1–5 ({rating} = {value})")
            }
            Violation::AgeBelowAdult(age) => write!(f, "age below 18 ({age})"),
            Violation::DischargeNotAfterAdmission => {
                f.write_str("discharge_time not after admission_time")
            }
            Violation::NonPositiveShiftDuration { shift } => {
                write!(f, "shift {shift} has non-positive duration")
            }
            Violation::InvalidNurseExperience { shift } => {
                write!(f, "shift {shift} has negative or non-finite nurse experience")
            }
            Violation::EmptyEpisodeId => f.write_str("empty episode_id"),
        }
    }
}

/// Checks every episode invariant and names each one that fails.
pub fn validate_episode(e: &Episode) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    if e.episode_id.is_empty() {
        violations.push(Violation::EmptyEpisodeId);
    }
    if e.age_years < MIN_ADULT_AGE {
        violations.push(Violation::AgeBelowAdult(e.age_years));
    }
    if e.shifts.len() < MIN_SHIFTS {
        violations.push(Violation::TooFewShifts(e.shifts.len()));
    }
    if e.discharge_time <= e.admission_time {
        violations.push(Violation::DischargeNotAfterAdmission);
    }
    for (i, s) in e.shifts.iter().enumerate() {
        // also rejects NaN
        if !(s.duration_hours > 0.0 && s.duration_hours.is_finite()) {
            violations.push(Violation::NonPositiveShiftDuration { shift: i });
        }
        if !(s.nurse_experience_years >= 0.0 && s.nurse_experience_years.is_finite()) {
            violations.push(Violation::InvalidNurseExperience { shift: i });
        }
    }
    let noc = &e.pain_control;
    for (rating, value) in [
        ("initial", noc.initial_rating),
        ("expected", noc.expected_rating),
        ("final", noc.final_rating),
    ] {
        if !(1..=5).contains(&value) {
            violations.push(Violation::RatingOutOfRange { rating, value });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// A set of valid episodes with unique identifiers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Cohort {
    episodes: Vec<Episode>,
}

impl Cohort {
    pub fn new(episodes: Vec<Episode>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(episodes.len());
        for e in &episodes {
            validate_episode(e).map_err(|violations| Error::Validation {
                episode_id: e.episode_id.clone(),
                violations,
            })?;
            if !seen.insert(e.episode_id.as_str()) {
                return Err(Error::DuplicateId(e.episode_id.clone()));
            }
        }
        Ok(Cohort { episodes })
    }

    pub fn episodes(&self) -> &[Episode] {
        &self.episodes
    }

    pub fn len(&self) -> usize {
        self.episodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }

    pub fn into_episodes(self) -> Vec<Episode> {
        self.episodes
    }
}
