//! Seeded synthetic cohorts with a planted, known readmission rule.
//!
//! Marginals default to the published cohort characteristics (age
//! 59.0 ± 18.4 years, length of stay 91.5 ± 98.5 hours, nurse experience
//! 1.7 ± 2.4 years). Labels come from an additive rule over discretized
//! features, thresholded at zero and then flipped with a fixed probability,
//! so the rule itself is the Bayes-optimal classifier with accuracy
//! `1 - noise_flip_prob`.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Duration, FixedOffset, TimeZone};
use rand::distr::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand::distr::weighted::WeightedIndex;
use rand_distr::{LogNormal, Normal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF};

use crate::cohort::{Cohort, Episode, NocOutcome, ShiftRecord, Timestamp};
use crate::error::{Error, Result};
use crate::features::{EpisodeBands, FeatureDef, FeatureSource};
use crate::taxonomy::{NandaClass, NandaDomain, NicClass, NicDomain, Tag};

pub const AGE_RANGE: (f64, f64) = (18.0, 100.0);
pub const EXPERIENCE_RANGE: (f64, f64) = (0.0, 40.0);
pub const SHIFT_HOURS: f64 = 8.0;
/// Shortest generated stay, in hours.
pub const MIN_LOS_HOURS: f64 = 1.0;

/// One additive term of the planted rule: `weight` is added to the
/// episode's score when `feature` takes the value `category`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalWeight {
    pub feature: String,
    pub category: String,
    pub weight: f64,
}

impl SignalWeight {
    pub fn new(feature: &str, category: &str, weight: f64) -> Self {
        SignalWeight {
            feature: feature.to_owned(),
            category: category.to_owned(),
            weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantedSignal {
    pub weights: Vec<SignalWeight>,
    /// Intercept of the rule. When absent, the intercept is calibrated on
    /// the generated sample so that the label prevalence matches the
    /// profile after noise flips.
    pub bias: Option<f64>,
    pub noise_flip_prob: f64,
}

impl Default for PlantedSignal {
    fn default() -> Self {
        let w = SignalWeight::new;
        PlantedSignal {
            weights: vec![
                w("age_band", "young", -0.5),
                w("age_band", "middle-aged", -1.5),
                w("age_band", "old", 0.5),
                w("age_band", "very-old", 1.5),
                w("los_band", "short", -1.0),
                w("los_band", "long", 1.0),
                w("final_rating", "1", 0.31),
                w("final_rating", "2", 0.14),
                w("final_rating", "3", 0.02),
                w("final_rating", "4", -0.09),
                w("final_rating", "5", -0.27),
                w("nanda_domain:Nutrition", "1", -0.33),
                w("nic_domain:Behavioral", "1", -0.29),
                w("discharge_shift", "morning", -0.17),
                w("discharge_shift", "afternoon", 0.23),
                w("discharge_shift", "evening", -0.04),
            ],
            bias: None,
            noise_flip_prob: 0.26,
        }
    }
}

/// Default marginal inclusion probability of each taxonomy tag.
pub fn default_tag_frequency(tag: Tag) -> f64 {
    use NandaClass as NC;
    use NandaDomain as ND;
    use NicClass as IC;
    use NicDomain as ID;
    match tag {
        Tag::NandaDomain(d) => match d {
            ND::ActivityRest => 0.14,
            ND::Comfort => 0.95,
            ND::CopingStressTolerance => 0.07,
            ND::Elimination => 0.10,
            ND::HealthPromotion => 0.06,
            ND::LifePrinciples => 0.06,
            ND::Nutrition => 0.18,
            ND::Perception => 0.06,
            ND::RoleRelationships => 0.06,
            ND::SafetyProtection => 0.16,
        },
        Tag::NicDomain(d) => match d {
            ID::Behavioral => 0.22,
            ID::Community => 0.06,
            ID::Family => 0.07,
            ID::HealthSystem => 0.10,
            ID::Safety => 0.12,
            ID::PhysiologicalBasic => 0.20,
            ID::PhysiologicalComplex => 0.15,
        },
        Tag::NandaClass(c) => match c {
            NC::ActivityExercise => 0.09,
            NC::CardiovascularPulmonaryResponses => 0.07,
            NC::Cognition => 0.06,
            NC::Hydration => 0.06,
            NC::Infection => 0.08,
            NC::PhysicalComfort => 0.93,
            NC::PhysicalInjury => 0.10,
            NC::PulmonarySystem => 0.06,
        },
        Tag::NicClass(c) => match c {
            IC::ActivityExerciseManagement => 0.08,
            IC::CognitiveTherapy => 0.06,
            IC::CommunicationEnhancement => 0.06,
            IC::DrugManagement => 0.88,
            IC::ElectrolyteAcidBaseManagement => 0.07,
            IC::ImmobilityManagement => 0.06,
            IC::InformationManagement => 0.06,
            IC::NutritionSupport => 0.08,
            IC::PatientEducation => 0.10,
            IC::PhysicalComfortPromotion => 0.90,
            IC::PsychologicalComfortPromotion => 0.07,
            IC::RespiratoryManagement => 0.07,
            IC::RiskManagement => 0.12,
            IC::SelfCareFacilitation => 0.06,
            IC::SkinWoundManagement => 0.08,
            IC::TissuePerfusionManagement => 0.06,
        },
    }
}

/// Generator configuration. Every field has a default, so profile files
/// only need to list what they override.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CohortProfile {
    pub n: usize,
    pub prevalence: f64,
    pub age_mean: f64,
    pub age_sd: f64,
    pub los_mean: f64,
    pub los_sd: f64,
    pub exp_mean: f64,
    pub exp_sd: f64,
    /// Tags missing from the map use [`default_tag_frequency`].
    pub tag_frequencies: BTreeMap<Tag, f64>,
    pub signal: PlantedSignal,
    pub seed: u64,
}

impl Default for CohortProfile {
    fn default() -> Self {
        CohortProfile {
            n: 2300,
            prevalence: 0.426,
            age_mean: 59.0,
            age_sd: 18.4,
            los_mean: 91.5,
            los_sd: 98.5,
            exp_mean: 1.7,
            exp_sd: 2.4,
            tag_frequencies: Tag::all()
                .into_iter()
                .map(|t| (t, default_tag_frequency(t)))
                .collect(),
            signal: PlantedSignal::default(),
            seed: 0,
        }
    }
}

impl CohortProfile {
    pub fn tag_frequency(&self, tag: Tag) -> f64 {
        self.tag_frequencies
            .get(&tag)
            .copied()
            .unwrap_or_else(|| default_tag_frequency(tag))
    }

    /// Fraction of rule-positive episodes needed before noise flips so that
    /// the expected prevalence after flipping equals `prevalence`.
    pub fn rule_positive_rate(&self) -> f64 {
        let p = self.signal.noise_flip_prob;
        (self.prevalence - p) / (1.0 - 2.0 * p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidProfile(msg));
        if self.n < 10 {
            return bad(format!("n = {} is below 10", self.n));
        }
        if !(self.prevalence > 0.0 && self.prevalence < 1.0) {
            return bad(format!("prevalence {} outside (0, 1)", self.prevalence));
        }
        for (name, sd) in [
            ("age_sd", self.age_sd),
            ("los_sd", self.los_sd),
            ("exp_sd", self.exp_sd),
        ] {
            if !(sd > 0.0 && sd.is_finite()) {
                return bad(format!("{name} must be positive"));
            }
        }
        if !(self.age_mean > AGE_RANGE.0 && self.age_mean < AGE_RANGE.1) {
            return bad(format!("age_mean {} outside (18, 100)", self.age_mean));
        }
        if !(self.exp_mean > EXPERIENCE_RANGE.0 && self.exp_mean < EXPERIENCE_RANGE.1) {
            return bad(format!("exp_mean {} outside (0, 40)", self.exp_mean));
        }
        if !(self.los_mean > MIN_LOS_HOURS && self.los_mean.is_finite()) {
            return bad(format!("los_mean {} must exceed {MIN_LOS_HOURS} hours", self.los_mean));
        }
        for (tag, f) in &self.tag_frequencies {
            if !(0.0..=1.0).contains(f) {
                return bad(format!("frequency of {tag} outside [0, 1]"));
            }
        }
        let p = self.signal.noise_flip_prob;
        if !(0.0..0.5).contains(&p) {
            return bad(format!("noise_flip_prob {p} outside [0, 0.5)"));
        }
        if self.signal.bias.is_none() {
            let q = self.rule_positive_rate();
            if !(q > 0.0 && q < 1.0) {
                return bad(format!(
                    "prevalence {} is unreachable with noise_flip_prob {p}",
                    self.prevalence
                ));
            }
        }
        if let Some(b) = self.signal.bias {
            if !b.is_finite() {
                return bad("bias must be finite".into());
            }
        }
        PlantedRule::resolve(&self.signal.weights, 0.0).map(|_| ())
    }
}

/// The planted rule with its weights resolved against feature codes.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedRule {
    terms: Vec<(FeatureSource, u16, f64)>,
    pub bias: f64,
}

impl PlantedRule {
    pub fn resolve(weights: &[SignalWeight], bias: f64) -> Result<Self> {
        let terms = weights
            .iter()
            .map(|w| {
                let def = FeatureDef::from_name(&w.feature)
                    .map_err(|_| Error::InvalidProfile(format!("unknown feature {:?}", w.feature)))?;
                let code = def.code_of(&w.category).ok_or_else(|| {
                    Error::InvalidProfile(format!(
                        "unknown category {:?} for feature {:?}",
                        w.category, w.feature
                    ))
                })?;
                if !w.weight.is_finite() {
                    return Err(Error::InvalidProfile(format!(
                        "weight for {}={} is not finite",
                        w.feature, w.category
                    )));
                }
                Ok((def.source, code, w.weight))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PlantedRule { terms, bias })
    }

    /// Sum of the weights whose (feature, category) the episode matches.
    pub fn raw_score(&self, e: &Episode) -> Result<f64> {
        let bands = EpisodeBands::of(e)?;
        Ok(self
            .terms
            .iter()
            .filter(|(source, code, _)| match *source {
                FeatureSource::Fixed(f) => bands.code(f) == *code,
                FeatureSource::Tag(t) => u16::from(e.has_tag(t)) == *code,
                FeatureSource::Custom => false,
            })
            .map(|(_, _, w)| w)
            .sum())
    }

    /// Rule label: positive iff `bias + raw_score > 0`.
    pub fn predict(&self, e: &Episode) -> Result<bool> {
        Ok(self.bias + self.raw_score(e)? > 0.0)
    }
}

/// Mean of N(mu, sd) truncated to [lo, hi].
fn truncated_normal_mean(mu: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    let std = statrs::distribution::Normal::new(0.0, 1.0).expect("standard normal");
    let (a, b) = ((lo - mu) / sd, (hi - mu) / sd);
    let mass = std.cdf(b) - std.cdf(a);
    mu + sd * (std.pdf(a) - std.pdf(b)) / mass
}

/// Location of the untruncated normal whose truncation to [lo, hi] has
/// mean `target`, keeping the scale fixed at `sd`.
fn location_for_truncated_mean(target: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    let (mut left, mut right) = (lo - 6.0 * sd, hi + 6.0 * sd);
    for _ in 0..200 {
        let mid = 0.5 * (left + right);
        let m = truncated_normal_mean(mid, sd, lo, hi);
        if m.is_nan() {
            // all mass outside the window; move toward it
            if mid < lo {
                left = mid;
            } else {
                right = mid;
            }
        } else if m < target {
            left = mid;
        } else {
            right = mid;
        }
    }
    0.5 * (left + right)
}

struct TruncatedNormal {
    inner: Normal<f64>,
    lo: f64,
    hi: f64,
}

impl TruncatedNormal {
    fn with_mean(mean: f64, sd: f64, lo: f64, hi: f64) -> Result<Self> {
        let mu = location_for_truncated_mean(mean, sd, lo, hi);
        let inner = Normal::new(mu, sd).map_err(|e| Error::InvalidProfile(e.to_string()))?;
        Ok(TruncatedNormal { inner, lo, hi })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        loop {
            let x = self.inner.sample(rng);
            if x >= self.lo && x <= self.hi {
                return x;
            }
        }
    }
}

/// Log-normal with the given mean and standard deviation.
/// Log-scale location and scale of the log-normal with the given mean and sd.
fn lognormal_params(mean: f64, sd: f64) -> (f64, f64) {
    let sigma2 = (1.0 + (sd / mean).powi(2)).ln();
    (mean.ln() - sigma2 / 2.0, sigma2.sqrt())
}

fn moment_matched_lognormal(mean: f64, sd: f64) -> Result<LogNormal<f64>> {
    let (mu, sigma) = lognormal_params(mean, sd);
    LogNormal::new(mu, sigma).map_err(|e| Error::InvalidProfile(e.to_string()))
}

const INITIAL_RATING_WEIGHTS: [f64; 5] = [0.15, 0.25, 0.30, 0.20, 0.10];
const EXPECTED_RATING_WEIGHTS: [f64; 5] = [0.02, 0.05, 0.18, 0.40, 0.35];
const FINAL_RATING_WEIGHTS: [f64; 5] = [0.04, 0.10, 0.26, 0.35, 0.25];

/// Splits a stay into consecutive 8-hour shifts, the last one truncated.
/// Stays under 16 hours become two equal shifts.
pub fn partition_shifts(los: f64) -> Vec<f64> {
    if los < 2.0 * SHIFT_HOURS {
        return vec![los / 2.0; 2];
    }
    let count = (los / SHIFT_HOURS).ceil() as usize;
    let mut hours = vec![SHIFT_HOURS; count];
    hours[count - 1] = los - SHIFT_HOURS * (count - 1) as f64;
    hours
}

fn study_start() -> Timestamp {
    FixedOffset::east_opt(0)
        .expect("UTC offset")
        .with_ymd_and_hms(2005, 1, 1, 0, 0, 0)
        .single()
        .expect("valid start date")
}

const STUDY_MINUTES: i64 = 3 * 365 * 24 * 60;

/// Intercept putting the number of rule-positive scores as close as possible
/// to `target` (ties toward fewer positives). Thresholds sit at midpoints
/// between distinct scores so no score lands exactly on zero.
fn calibrate_bias(scores: &[f64], target: usize) -> f64 {
    let mut sorted: Vec<f64> = scores.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    // candidates run from 0 positives upward
    let mut best_threshold = sorted[0] + 1.0;
    let mut best_gap = target;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        // scores[..j] are strictly above any threshold below sorted[i]
        let threshold = if j < sorted.len() {
            0.5 * (sorted[i] + sorted[j])
        } else {
            sorted[i] - 1.0
        };
        let gap = j.abs_diff(target);
        if gap < best_gap {
            best_gap = gap;
            best_threshold = threshold;
        }
        i = j;
    }
    -best_threshold
}

/// Generates a cohort together with the rule that labeled it (before noise).
pub fn generate_with_rule(profile: &CohortProfile) -> Result<(Cohort, PlantedRule)> {
    profile.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);

    let age = TruncatedNormal::with_mean(profile.age_mean, profile.age_sd, AGE_RANGE.0, AGE_RANGE.1)?;
    let experience = TruncatedNormal::with_mean(
        profile.exp_mean,
        profile.exp_sd,
        EXPERIENCE_RANGE.0,
        EXPERIENCE_RANGE.1,
    )?;
    let los = moment_matched_lognormal(profile.los_mean, profile.los_sd)?;
    let minutes = Uniform::new(0, STUDY_MINUTES).expect("non-empty range");
    let ratings = [
        WeightedIndex::new(INITIAL_RATING_WEIGHTS).expect("valid weights"),
        WeightedIndex::new(EXPECTED_RATING_WEIGHTS).expect("valid weights"),
        WeightedIndex::new(FINAL_RATING_WEIGHTS).expect("valid weights"),
    ];
    let tags: Vec<(Tag, f64)> = Tag::all()
        .into_iter()
        .map(|t| (t, profile.tag_frequency(t)))
        .collect();
    let start = study_start();
    let width = profile.n.to_string().len().max(5);

    let mut episodes = Vec::with_capacity(profile.n);
    for i in 0..profile.n {
        let age_years = age.sample(&mut rng).round().clamp(AGE_RANGE.0, AGE_RANGE.1) as u32;
        let stay = (los.sample(&mut rng).max(MIN_LOS_HOURS) * 100.0).round() / 100.0;
        let admission_time = start + Duration::minutes(minutes.sample(&mut rng));
        let discharge_time = admission_time + Duration::seconds((stay * 3600.0).round() as i64);

        let mut offset = 0.0_f64;
        let shifts = partition_shifts(stay)
            .into_iter()
            .map(|hours| {
                let shift = ShiftRecord {
                    start_time: admission_time + Duration::seconds((offset * 3600.0).round() as i64),
                    duration_hours: hours,
                    nurse_experience_years: (experience.sample(&mut rng) * 100.0).round() / 100.0,
                };
                offset += hours;
                shift
            })
            .collect();

        let [initial, expected, final_rating] =
            ratings.each_ref().map(|d| d.sample(&mut rng) as u8 + 1);

        let mut episode = Episode {
            episode_id: format!("E{:0width$}", i + 1),
            age_years,
            admission_time,
            discharge_time,
            shifts,
            pain_control: NocOutcome::pain_control(initial, expected, final_rating),
            nanda_domains: BTreeSet::new(),
            nanda_classes: BTreeSet::new(),
            nic_domains: BTreeSet::new(),
            nic_classes: BTreeSet::new(),
            readmitted: false,
        };
        for &(tag, freq) in &tags {
            if rng.random_bool(freq) {
                episode.insert_tag(tag);
            }
        }
        episodes.push(episode);
    }

    let unbiased = PlantedRule::resolve(&profile.signal.weights, 0.0)?;
    let scores = episodes
        .iter()
        .map(|e| unbiased.raw_score(e))
        .collect::<Result<Vec<_>>>()?;
    let bias = match profile.signal.bias {
        Some(b) => b,
        None => {
            let target = (profile.rule_positive_rate() * profile.n as f64).round() as usize;
            calibrate_bias(&scores, target)
        }
    };
    let rule = PlantedRule { bias, ..unbiased };

    let p = profile.signal.noise_flip_prob;
    for (e, score) in episodes.iter_mut().zip(&scores) {
        let planted = bias + score > 0.0;
        let flip = p > 0.0 && rng.random_bool(p);
        e.readmitted = planted ^ flip;
    }
    Ok((Cohort::new(episodes)?, rule))
}

pub fn generate_cohort(profile: &CohortProfile) -> Result<Cohort> {
    generate_with_rule(profile).map(|(cohort, _)| cohort)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub sd: f64,
}

impl Moments {
    /// Mean and unbiased standard deviation; sd is 0 for a single value.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Moments { mean, sd }
    }
}

/// Realized cohort statistics, mirroring the rows of a dataset
/// characteristics table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSummary {
    pub count: usize,
    pub readmitted: usize,
    pub prevalence: f64,
    pub age_years: Moments,
    pub los_hours: Moments,
    /// Per-episode mean nurse experience, summarized across episodes.
    pub nurse_experience_years: Moments,
    /// Set when the cohort has a single episode and sds are reported as 0.
    pub degenerate_sd: bool,
    pub tag_frequencies: Vec<(Tag, f64)>,
}

pub fn cohort_summary(cohort: &Cohort) -> Result<CohortSummary> {
    if cohort.is_empty() {
        return Err(Error::EmptyCohort);
    }
    let eps = cohort.episodes();
    let n = eps.len();
    let readmitted = eps.iter().filter(|e| e.readmitted).count();
    let ages: Vec<f64> = eps.iter().map(|e| f64::from(e.age_years)).collect();
    let stays: Vec<f64> = eps.iter().map(crate::features::los_hours).collect();
    let exp: Vec<f64> = eps.iter().map(Episode::mean_nurse_experience).collect();
    let tag_frequencies = Tag::all()
        .into_iter()
        .map(|t| (t, eps.iter().filter(|e| e.has_tag(t)).count() as f64 / n as f64))
        .collect();
    Ok(CohortSummary {
        count: n,
        readmitted,
        prevalence: readmitted as f64 / n as f64,
        age_years: Moments::of(&ages),
        los_hours: Moments::of(&stays),
        nurse_experience_years: Moments::of(&exp),
        degenerate_sd: n < 2,
        tag_frequencies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohort::validate_episode;
    use crate::cohort::tests::sample_episode;

    #[test]
    fn truncated_mean_calibration() {
        let mu = location_for_truncated_mean(1.7, 2.4, 0.0, 40.0);
        assert!(mu < 1.7);
        assert!((truncated_normal_mean(mu, 2.4, 0.0, 40.0) - 1.7).abs() < 1e-9);
        // symmetric window leaves the location unchanged
        let mu = location_for_truncated_mean(59.0, 18.4, 18.0, 100.0);
        assert!((mu - 59.0).abs() < 1e-9);
    }

    #[test]
    fn lognormal_moments() {
        let (mu, sigma): (f64, f64) = lognormal_params(91.5, 98.5);
        let mean = (mu + sigma * sigma / 2.0).exp();
        let var = ((sigma * sigma).exp() - 1.0) * (2.0 * mu + sigma * sigma).exp();
        assert!((mean - 91.5).abs() < 1e-9);
        assert!((var.sqrt() - 98.5).abs() < 1e-9);
    }

    #[test]
    fn shift_partition() {
        assert_eq!(partition_shifts(20.0), vec![8.0, 8.0, 4.0]);
        assert_eq!(partition_shifts(24.0), vec![8.0, 8.0, 8.0]);
        assert_eq!(partition_shifts(10.0), vec![5.0, 5.0]);
        assert_eq!(partition_shifts(16.0), vec![8.0, 8.0]);
        for los in [1.0, 15.99, 16.01, 91.5, 300.25] {
            let parts = partition_shifts(los);
            assert!(parts.len() >= 2);
            assert!(parts.iter().all(|&h| h > 0.0 && h <= SHIFT_HOURS));
            assert!((parts.iter().sum::<f64>() - los).abs() < 1e-9);
        }
    }

    #[test]
    fn calibration_hits_achievable_counts() {
        let scores = [0.0, 1.0, 1.0, 2.0, 3.0];
        let count = |bias: f64| scores.iter().filter(|&&s| s + bias > 0.0).count();
        assert_eq!(count(calibrate_bias(&scores, 0)), 0);
        assert_eq!(count(calibrate_bias(&scores, 1)), 1);
        assert_eq!(count(calibrate_bias(&scores, 2)), 2);
        // 3 is not achievable (1.0 is tied); nearest with ties toward fewer
        assert_eq!(count(calibrate_bias(&scores, 3)), 2);
        assert_eq!(count(calibrate_bias(&scores, 5)), 5);
        assert!(scores.iter().all(|s| s + calibrate_bias(&scores, 3) != 0.0));
    }

    #[test]
    fn generated_episodes_are_valid() {
        let profile = CohortProfile {
            n: 300,
            seed: 7,
            ..CohortProfile::default()
        };
        let cohort = generate_cohort(&profile).unwrap();
        assert_eq!(cohort.len(), 300);
        for e in cohort.episodes() {
            assert_eq!(validate_episode(e), Ok(()));
            let los = crate::features::los_hours(e);
            let span = (e.discharge_time - e.admission_time).num_seconds() as f64 / 3600.0;
            assert!((los - span).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_noise_labels_follow_the_rule() {
        let profile = CohortProfile {
            n: 10,
            seed: 3,
            signal: PlantedSignal {
                weights: vec![
                    SignalWeight::new("age_band", "young", -10.0),
                    SignalWeight::new("age_band", "old", 10.0),
                    SignalWeight::new("los_band", "long", 0.1),
                ],
                bias: Some(0.5),
                noise_flip_prob: 0.0,
            },
            ..CohortProfile::default()
        };
        let (cohort, rule) = generate_with_rule(&profile).unwrap();
        assert_eq!(rule.bias, 0.5);
        for e in cohort.episodes() {
            let score = rule.raw_score(e).unwrap() + 0.5;
            assert_eq!(e.readmitted, score > 0.0);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let profile = CohortProfile {
            n: 50,
            seed: 11,
            ..CohortProfile::default()
        };
        let a = generate_cohort(&profile).unwrap();
        let b = generate_cohort(&profile).unwrap();
        assert_eq!(a, b);
        let c = generate_cohort(&CohortProfile { seed: 12, ..profile }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_profiles() {
        let base = CohortProfile::default();
        for p in [
            CohortProfile { n: 9, ..base.clone() },
            CohortProfile { prevalence: 1.0, ..base.clone() },
            CohortProfile { age_sd: 0.0, ..base.clone() },
            CohortProfile { prevalence: 0.2, ..base.clone() },
            CohortProfile {
                signal: PlantedSignal { noise_flip_prob: 0.5, ..PlantedSignal::default() },
                ..base.clone()
            },
            CohortProfile {
                signal: PlantedSignal {
                    weights: vec![SignalWeight::new("age_band", "ancient", 1.0)],
                    ..PlantedSignal::default()
                },
                ..base.clone()
            },
            CohortProfile {
                tag_frequencies: [(Tag::NicDomain(NicDomain::Family), 1.5)].into_iter().collect(),
                ..base.clone()
            },
        ] {
            assert!(matches!(generate_cohort(&p), Err(Error::InvalidProfile(_))), "{p:?}");
        }
    }

    #[test]
    fn partial_profile_file_uses_defaults() {
        let p: CohortProfile = serde_json::from_str(
            r#"{"n": 40, "seed": 5, "tag_frequencies": {"nanda_domain:Nutrition": 0.5}}"#,
        )
        .unwrap();
        assert_eq!(p.n, 40);
        assert_eq!(p.age_mean, 59.0);
        assert_eq!(p.tag_frequency(Tag::NandaDomain(NandaDomain::Nutrition)), 0.5);
        let community = Tag::NicDomain(NicDomain::Community);
        assert_eq!(p.tag_frequency(community), default_tag_frequency(community));
        let text = serde_json::to_string(&CohortProfile::default()).unwrap();
        assert_eq!(serde_json::from_str::<CohortProfile>(&text).unwrap(), CohortProfile::default());
    }

    #[test]
    fn summary_basics() {
        let mut a = sample_episode("A");
        a.age_years = 40;
        let mut b = sample_episode("B");
        b.age_years = 60;
        b.readmitted = true;
        let s = cohort_summary(&Cohort::new(vec![a.clone(), b]).unwrap()).unwrap();
        assert_eq!(s.age_years.mean, 50.0);
        assert!((s.age_years.sd - 200f64.sqrt()).abs() < 1e-12);
        assert_eq!(s.prevalence, 0.5);
        assert!(!s.degenerate_sd);

        let single = cohort_summary(&Cohort::new(vec![a]).unwrap()).unwrap();
        assert_eq!(single.age_years.sd, 0.0);
        assert!(single.degenerate_sd);
        assert!(matches!(cohort_summary(&Cohort::default()), Err(Error::EmptyCohort)));
    }
}
