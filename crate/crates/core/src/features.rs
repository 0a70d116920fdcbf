//! Discretization of episodes into categorical feature vectors.
//!
//! Nine fixed features are derived from demographics, stay length, nurse
//! experience, outcome ratings and admission/discharge times. Taxonomy tags
//! become binary presence flags, kept only when their support across the
//! cohort is strictly above the catalog threshold.

use std::collections::HashSet;
use std::fmt;

use chrono::Timelike;
use serde::{Deserialize, Serialize};

use crate::cohort::{Cohort, Episode, ShiftRecord, Timestamp, MIN_ADULT_AGE};
use crate::error::{Error, Result};
use crate::taxonomy::Tag;

pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 0.05;

/// Token pair for binary presence features.
pub const ABSENT: &str = "0";
pub const PRESENT: &str = "1";

macro_rules! band_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $token:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn token(self) -> &'static str {
                match self {
                    $($name::$variant => $token),+
                }
            }

            /// Category index within [`Self::ALL`].
            pub fn code(self) -> u16 {
                self as u16
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.token())
            }
        }
    };
}

band_enum!(AgeBand {
    Young => "young",
    MiddleAged => "middle-aged",
    Old => "old",
    VeryOld => "very-old",
});

band_enum!(LosBand {
    Short => "short",
    Medium => "medium",
    Long => "long",
});

band_enum!(TeamExperience {
    Experienced => "experienced",
    Inexperienced => "inexperienced",
});

band_enum!(NocStatus {
    Met => "met",
    NotMet => "not-met",
});

band_enum!(ShiftBucket {
    Morning => "morning",
    Afternoon => "afternoon",
    Evening => "evening",
});

/// Young 18–49, middle-aged 50–64, old 65–84, very old 85 and up.
pub fn age_band(age_years: u32) -> Result<AgeBand> {
    match age_years {
        a if a < MIN_ADULT_AGE => Err(Error::Domain(format!(
            "age {a} is below the adult range"
        ))),
        18..=49 => Ok(AgeBand::Young),
        50..=64 => Ok(AgeBand::MiddleAged),
        65..=84 => Ok(AgeBand::Old),
        _ => Ok(AgeBand::VeryOld),
    }
}

/// Length of stay as the sum of shift hours.
pub fn los_hours(e: &Episode) -> f64 {
    e.shifts.iter().map(|s| s.duration_hours).sum()
}

/// Half-open bands: short [0, 48), medium [48, 120), long [120, ∞).
pub fn los_band(hours: f64) -> Result<LosBand> {
    if !(hours > 0.0) {
        return Err(Error::Domain(format!("length of stay {hours} is not positive")));
    }
    Ok(if hours < 48.0 {
        LosBand::Short
    } else if hours < 120.0 {
        LosBand::Medium
    } else {
        LosBand::Long
    })
}

pub const EXPERIENCED_NURSE_YEARS: f64 = 2.0;

/// Experienced iff strictly more than half the shifts were covered by a
/// nurse with at least two years in position.
pub fn team_experience(shifts: &[ShiftRecord]) -> Result<TeamExperience> {
    if shifts.is_empty() {
        return Err(Error::Domain("no shifts to assess nurse experience".into()));
    }
    let experienced = shifts
        .iter()
        .filter(|s| s.nurse_experience_years >= EXPERIENCED_NURSE_YEARS)
        .count();
    // integer form of experienced / total > 1/2
    Ok(if 2 * experienced > shifts.len() {
        TeamExperience::Experienced
    } else {
        TeamExperience::Inexperienced
    })
}

fn check_rating(which: &str, rating: u8) -> Result<()> {
    if (1..=5).contains(&rating) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{which} rating {rating} outside 1–5")))
    }
}

/// Met when the final rating is the same as or better than expected
/// (5 is best).
pub fn noc_met(expected: u8, final_rating: u8) -> Result<NocStatus> {
    check_rating("expected", expected)?;
    check_rating("final", final_rating)?;
    Ok(if final_rating >= expected {
        NocStatus::Met
    } else {
        NocStatus::NotMet
    })
}

/// Morning [07:00, 15:00), afternoon [15:00, 23:00), evening otherwise,
/// taken from the timestamp's own wall-clock time.
pub fn shift_bucket(t: &Timestamp) -> ShiftBucket {
    match t.hour() {
        7..=14 => ShiftBucket::Morning,
        15..=22 => ShiftBucket::Afternoon,
        _ => ShiftBucket::Evening,
    }
}

/// Fraction of episodes in which `tag` is present.
pub fn tag_support(tag: Tag, cohort: &Cohort) -> Result<f64> {
    if cohort.is_empty() {
        return Err(Error::EmptyCohort);
    }
    let hits = cohort.episodes().iter().filter(|e| e.has_tag(tag)).count();
    Ok(hits as f64 / cohort.len() as f64)
}

/// The nine features every catalog starts with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FixedFeature {
    AgeBand,
    LosBand,
    TeamExperience,
    NocMet,
    AdmissionShift,
    DischargeShift,
    InitialRating,
    ExpectedRating,
    FinalRating,
}

const RATING_TOKENS: [&str; 5] = ["1", "2", "3", "4", "5"];

impl FixedFeature {
    pub const ALL: [FixedFeature; 9] = [
        FixedFeature::AgeBand,
        FixedFeature::LosBand,
        FixedFeature::TeamExperience,
        FixedFeature::NocMet,
        FixedFeature::AdmissionShift,
        FixedFeature::DischargeShift,
        FixedFeature::InitialRating,
        FixedFeature::ExpectedRating,
        FixedFeature::FinalRating,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FixedFeature::AgeBand => "age_band",
            FixedFeature::LosBand => "los_band",
            FixedFeature::TeamExperience => "team_experience",
            FixedFeature::NocMet => "noc_met",
            FixedFeature::AdmissionShift => "admission_shift",
            FixedFeature::DischargeShift => "discharge_shift",
            FixedFeature::InitialRating => "initial_rating",
            FixedFeature::ExpectedRating => "expected_rating",
            FixedFeature::FinalRating => "final_rating",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn categories(self) -> Vec<&'static str> {
        fn tokens<T: Copy>(all: &[T], token: fn(T) -> &'static str) -> Vec<&'static str> {
            all.iter().map(|&b| token(b)).collect()
        }
        match self {
            FixedFeature::AgeBand => tokens(AgeBand::ALL, AgeBand::token),
            FixedFeature::LosBand => tokens(LosBand::ALL, LosBand::token),
            FixedFeature::TeamExperience => tokens(TeamExperience::ALL, TeamExperience::token),
            FixedFeature::NocMet => tokens(NocStatus::ALL, NocStatus::token),
            FixedFeature::AdmissionShift | FixedFeature::DischargeShift => {
                tokens(ShiftBucket::ALL, ShiftBucket::token)
            }
            FixedFeature::InitialRating
            | FixedFeature::ExpectedRating
            | FixedFeature::FinalRating => RATING_TOKENS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Categorical,
    Binary,
}

/// Where a feature's value comes from when featurizing an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSource {
    Fixed(FixedFeature),
    Tag(Tag),
    /// Not derived from episodes; such catalogs describe generic datasets.
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDef {
    pub name: String,
    pub kind: FeatureKind,
    pub categories: Vec<String>,
    pub source: FeatureSource,
}

impl FeatureDef {
    pub fn fixed(feature: FixedFeature) -> Self {
        FeatureDef {
            name: feature.name().to_owned(),
            kind: FeatureKind::Categorical,
            categories: feature.categories().into_iter().map(String::from).collect(),
            source: FeatureSource::Fixed(feature),
        }
    }

    pub fn tag(tag: Tag) -> Self {
        FeatureDef {
            name: tag.feature_name(),
            kind: FeatureKind::Binary,
            categories: vec![ABSENT.to_owned(), PRESENT.to_owned()],
            source: FeatureSource::Tag(tag),
        }
    }

    pub fn custom(name: impl Into<String>, categories: &[&str]) -> Self {
        FeatureDef {
            name: name.into(),
            kind: FeatureKind::Categorical,
            categories: categories.iter().map(|c| c.to_string()).collect(),
            source: FeatureSource::Custom,
        }
    }

    /// Resolves a pipeline feature name (fixed or tag) to its definition.
    pub fn from_name(name: &str) -> Result<Self> {
        if let Some(fixed) = FixedFeature::from_name(name) {
            return Ok(Self::fixed(fixed));
        }
        name.parse::<Tag>()
            .map(Self::tag)
            .map_err(|_| Error::UnknownFeature(name.to_owned()))
    }

    pub fn cardinality(&self) -> usize {
        self.categories.len()
    }

    pub fn code_of(&self, token: &str) -> Option<u16> {
        self.categories
            .iter()
            .position(|c| c == token)
            .map(|i| i as u16)
    }
}

/// Ordered feature definitions plus the support threshold that produced
/// them (absent when reconstructed from a matrix header).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CatalogRecord", into = "CatalogRecord")]
pub struct FeatureCatalog {
    features: Vec<FeatureDef>,
    support_threshold: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogRecord {
    support_threshold: Option<f64>,
    features: Vec<FeatureRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FeatureRecord {
    name: String,
    kind: FeatureKind,
    categories: Vec<String>,
}

impl From<FeatureCatalog> for CatalogRecord {
    fn from(c: FeatureCatalog) -> Self {
        CatalogRecord {
            support_threshold: c.support_threshold,
            features: c
                .features
                .into_iter()
                .map(|f| FeatureRecord {
                    name: f.name,
                    kind: f.kind,
                    categories: f.categories,
                })
                .collect(),
        }
    }
}

impl TryFrom<CatalogRecord> for FeatureCatalog {
    type Error = Error;

    fn try_from(r: CatalogRecord) -> Result<Self> {
        let mut features = Vec::with_capacity(r.features.len());
        for f in r.features {
            let def = match FeatureDef::from_name(&f.name) {
                Ok(known) => {
                    if known.kind != f.kind || known.categories != f.categories {
                        return Err(Error::MalformedMatrix(format!(
                            "catalog entry {:?} does not match the feature's categories",
                            f.name
                        )));
                    }
                    known
                }
                Err(_) => FeatureDef {
                    name: f.name,
                    kind: f.kind,
                    categories: f.categories,
                    source: FeatureSource::Custom,
                },
            };
            features.push(def);
        }
        FeatureCatalog::new(features, r.support_threshold)
    }
}

impl FeatureCatalog {
    pub fn new(features: Vec<FeatureDef>, support_threshold: Option<f64>) -> Result<Self> {
        let mut names = HashSet::new();
        for f in &features {
            if !names.insert(f.name.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate feature name {:?}",
                    f.name
                )));
            }
            if f.categories.len() < 2 {
                return Err(Error::InvalidParameter(format!(
                    "feature {:?} needs at least two categories",
                    f.name
                )));
            }
            if f.categories.len() > u16::MAX as usize {
                return Err(Error::InvalidParameter(format!(
                    "feature {:?} has too many categories",
                    f.name
                )));
            }
        }
        Ok(FeatureCatalog {
            features,
            support_threshold,
        })
    }

    /// Catalog for a matrix header, with categories taken from the known
    /// feature definitions.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let features = names
            .iter()
            .map(|n| FeatureDef::from_name(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(features, None)
    }

    pub fn features(&self) -> &[FeatureDef] {
        &self.features
    }

    pub fn feature(&self, index: usize) -> &FeatureDef {
        &self.features[index]
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn support_threshold(&self) -> Option<f64> {
        self.support_threshold
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.features.iter().map(FeatureDef::cardinality).collect()
    }

    /// Total width of a one-hot encoding of this catalog.
    pub fn one_hot_width(&self) -> usize {
        self.features.iter().map(FeatureDef::cardinality).sum()
    }

    pub fn tokens(&self, v: &FeatureVector) -> Vec<&str> {
        self.features
            .iter()
            .zip(v.codes())
            .map(|(f, &c)| f.categories[c as usize].as_str())
            .collect()
    }

    /// Checks width and category range of a vector.
    pub fn check(&self, v: &FeatureVector) -> Result<()> {
        if v.len() != self.len() {
            return Err(Error::MalformedVector {
                expected: self.len(),
                found: v.len(),
            });
        }
        for (f, &c) in self.features.iter().zip(v.codes()) {
            if c as usize >= f.cardinality() {
                return Err(Error::Domain(format!(
                    "code {c} out of range for feature {:?}",
                    f.name
                )));
            }
        }
        Ok(())
    }
}

/// Builds the catalog: nine fixed features, then a presence flag for each
/// tag whose support is strictly above `threshold`, in canonical tag order.
pub fn build_catalog(cohort: &Cohort, threshold: f64) -> Result<FeatureCatalog> {
    if !(0.0..1.0).contains(&threshold) {
        return Err(Error::InvalidParameter(format!(
            "support threshold {threshold} outside [0, 1)"
        )));
    }
    if cohort.is_empty() {
        return Err(Error::EmptyCohort);
    }
    let mut features: Vec<FeatureDef> = FixedFeature::ALL.into_iter().map(FeatureDef::fixed).collect();
    for tag in Tag::all() {
        if tag_support(tag, cohort)? > threshold {
            features.push(FeatureDef::tag(tag));
        }
    }
    FeatureCatalog::new(features, Some(threshold))
}

/// Category codes, one per catalog feature, in catalog order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureVector(Vec<u16>);

impl FeatureVector {
    pub fn new(codes: Vec<u16>) -> Self {
        FeatureVector(codes)
    }

    pub fn codes(&self) -> &[u16] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Fixed-feature values of one episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpisodeBands {
    pub age: AgeBand,
    pub los: LosBand,
    pub team: TeamExperience,
    pub noc: NocStatus,
    pub admission: ShiftBucket,
    pub discharge: ShiftBucket,
    pub initial: u8,
    pub expected: u8,
    pub final_rating: u8,
}

impl EpisodeBands {
    pub fn of(e: &Episode) -> Result<Self> {
        let noc = &e.pain_control;
        check_rating("initial", noc.initial_rating)?;
        Ok(EpisodeBands {
            age: age_band(e.age_years)?,
            los: los_band(los_hours(e))?,
            team: team_experience(&e.shifts)?,
            noc: noc_met(noc.expected_rating, noc.final_rating)?,
            admission: shift_bucket(&e.admission_time),
            discharge: shift_bucket(&e.discharge_time),
            initial: noc.initial_rating,
            expected: noc.expected_rating,
            final_rating: noc.final_rating,
        })
    }

    pub fn code(&self, feature: FixedFeature) -> u16 {
        match feature {
            FixedFeature::AgeBand => self.age.code(),
            FixedFeature::LosBand => self.los.code(),
            FixedFeature::TeamExperience => self.team.code(),
            FixedFeature::NocMet => self.noc.code(),
            FixedFeature::AdmissionShift => self.admission.code(),
            FixedFeature::DischargeShift => self.discharge.code(),
            FixedFeature::InitialRating => u16::from(self.initial - 1),
            FixedFeature::ExpectedRating => u16::from(self.expected - 1),
            FixedFeature::FinalRating => u16::from(self.final_rating - 1),
        }
    }
}

/// Feature vector of one episode under `catalog`; tags missing from the
/// catalog are dropped.
pub fn featurize(e: &Episode, catalog: &FeatureCatalog) -> Result<FeatureVector> {
    let bands = EpisodeBands::of(e)?;
    let codes = catalog
        .features()
        .iter()
        .map(|f| match f.source {
            FeatureSource::Fixed(fixed) => Ok(bands.code(fixed)),
            FeatureSource::Tag(tag) => Ok(u16::from(e.has_tag(tag))),
            FeatureSource::Custom => Err(Error::UnknownFeature(f.name.clone())),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FeatureVector(codes))
}

/// Categorical design matrix with binary labels (true = readmitted).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub catalog: FeatureCatalog,
    pub rows: Vec<FeatureVector>,
    pub labels: Vec<bool>,
}

impl Dataset {
    pub fn new(catalog: FeatureCatalog, rows: Vec<FeatureVector>, labels: Vec<bool>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::InvalidParameter(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        for r in &rows {
            catalog.check(r)?;
        }
        Ok(Dataset {
            catalog,
            rows,
            labels,
        })
    }

    /// Featurizes every episode of a cohort against `catalog`.
    pub fn from_cohort(cohort: &Cohort, catalog: FeatureCatalog) -> Result<Self> {
        let rows = cohort
            .episodes()
            .iter()
            .map(|e| featurize(e, &catalog))
            .collect::<Result<Vec<_>>>()?;
        let labels = cohort.episodes().iter().map(|e| e.readmitted).collect();
        Ok(Dataset {
            catalog,
            rows,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            catalog: self.catalog.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}
