//! NANDA-I / NIC domain and class tags tracked per episode.
//!
//! Only the groupings that survive the frequency filter in the original
//! nursing data are modeled; each tag is either present or absent in an
//! episode. Declaration order is the canonical listing order and drives
//! feature order in the catalog.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

macro_rules! taxonomy_enum {
    ($(#[$meta:meta])* $name:ident, $prefix:literal { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            /// Prefix used for this group's feature names.
            pub const PREFIX: &'static str = $prefix;

            pub fn name(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(format!("unknown {} tag {:?}", $prefix, other)),
                }
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(self.name())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

taxonomy_enum!(
    /// NANDA-I diagnosis domain.
    NandaDomain, "nanda_domain" {
        ActivityRest => "Activity/Rest",
        Comfort => "Comfort",
        CopingStressTolerance => "Coping/Stress Tolerance",
        Elimination => "Elimination",
        HealthPromotion => "Health Promotion",
        LifePrinciples => "Life Principles",
        Nutrition => "Nutrition",
        Perception => "Perception",
        RoleRelationships => "Role Relationships",
        SafetyProtection => "Safety/Protection",
    }
);

taxonomy_enum!(
    /// NANDA-I diagnosis class.
    NandaClass, "nanda_class" {
        ActivityExercise => "Activity/Exercise",
        CardiovascularPulmonaryResponses => "Cardiovascular/Pulmonary Responses",
        Cognition => "Cognition",
        Hydration => "Hydration",
        Infection => "Infection",
        PhysicalComfort => "Physical Comfort",
        PhysicalInjury => "Physical Injury",
        PulmonarySystem => "Pulmonary System",
    }
);

taxonomy_enum!(
    /// NIC intervention domain.
    NicDomain, "nic_domain" {
        Behavioral => "Behavioral",
        Community => "Community",
        Family => "Family",
        HealthSystem => "Health System",
        Safety => "Safety",
        PhysiologicalBasic => "Physiological: Basic",
        PhysiologicalComplex => "Physiological: Complex",
    }
);

taxonomy_enum!(
    /// NIC intervention class.
    NicClass, "nic_class" {
        ActivityExerciseManagement => "Activity & Exercise Management",
        CognitiveTherapy => "Cognitive Therapy",
        CommunicationEnhancement => "Communication Enhancement",
        DrugManagement => "Drug Management",
        ElectrolyteAcidBaseManagement => "Electrolyte and Acid/Base Management",
        ImmobilityManagement => "Immobility Management",
        InformationManagement => "Information Management",
        NutritionSupport => "Nutrition Support",
        PatientEducation => "Patient Education",
        PhysicalComfortPromotion => "Physical Comfort Promotion",
        PsychologicalComfortPromotion => "Psychological Comfort Promotion",
        RespiratoryManagement => "Respiratory Management",
        RiskManagement => "Risk Management",
        SelfCareFacilitation => "Self-Care Facilitation",
        SkinWoundManagement => "Skin/Wound Management",
        TissuePerfusionManagement => "Tissue Perfusion Management",
    }
);

/// Any taxonomy tag, across the four groupings.
///
/// Text form is `<group>:<name>`, e.g. `nanda_domain:Nutrition`, which is
/// also the tag's feature name in catalogs and matrix headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    NandaDomain(NandaDomain),
    NicDomain(NicDomain),
    NandaClass(NandaClass),
    NicClass(NicClass),
}

impl Tag {
    /// Total number of tags: 10 + 7 + 8 + 16.
    pub const COUNT: usize = 41;

    /// All tags in canonical order: NANDA-I domains, NIC domains,
    /// NANDA-I classes, NIC classes.
    pub fn all() -> Vec<Tag> {
        let mut tags = Vec::with_capacity(Self::COUNT);
        tags.extend(NandaDomain::ALL.iter().copied().map(Tag::NandaDomain));
        tags.extend(NicDomain::ALL.iter().copied().map(Tag::NicDomain));
        tags.extend(NandaClass::ALL.iter().copied().map(Tag::NandaClass));
        tags.extend(NicClass::ALL.iter().copied().map(Tag::NicClass));
        tags
    }

    pub fn prefix(self) -> &'static str {
        match self {
            Tag::NandaDomain(_) => NandaDomain::PREFIX,
            Tag::NicDomain(_) => NicDomain::PREFIX,
            Tag::NandaClass(_) => NandaClass::PREFIX,
            Tag::NicClass(_) => NicClass::PREFIX,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Tag::NandaDomain(t) => t.name(),
            Tag::NicDomain(t) => t.name(),
            Tag::NandaClass(t) => t.name(),
            Tag::NicClass(t) => t.name(),
        }
    }

    pub fn feature_name(self) -> String {
        format!("{}:{}", self.prefix(), self.name())
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.prefix(), self.name())
    }
}

impl FromStr for Tag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (prefix, name) = s
            .split_once(':')
            .ok_or_else(|| format!("tag {s:?} lacks a group prefix"))?;
        match prefix {
            NandaDomain::PREFIX => name.parse().map(Tag::NandaDomain),
            NicDomain::PREFIX => name.parse().map(Tag::NicDomain),
            NandaClass::PREFIX => name.parse().map(Tag::NandaClass),
            NicClass::PREFIX => name.parse().map(Tag::NicClass),
            other => Err(format!("unknown tag group {other:?}")),
        }
    }
}

impl Serialize for Tag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Tag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_sizes() {
        assert_eq!(NandaDomain::ALL.len(), 10);
        assert_eq!(NandaClass::ALL.len(), 8);
        assert_eq!(NicDomain::ALL.len(), 7);
        assert_eq!(NicClass::ALL.len(), 16);
        assert_eq!(Tag::all().len(), Tag::COUNT);
    }

    #[test]
    fn names_round_trip() {
        for tag in Tag::all() {
            let text = tag.to_string();
            assert_eq!(text.parse::<Tag>().unwrap(), tag);
            assert_eq!(tag.feature_name(), text);
        }
        for d in NicDomain::ALL {
            assert_eq!(d.name().parse::<NicDomain>().unwrap(), *d);
        }
    }

    #[test]
    fn colon_inside_name() {
        let tag: Tag = "nic_domain:Physiological: Complex".parse().unwrap();
        assert_eq!(tag, Tag::NicDomain(NicDomain::PhysiologicalComplex));
    }

    #[test]
    fn rejects_unknown() {
        assert!("Nutrition".parse::<Tag>().is_err());
        assert!("nanda_domain:Sleep".parse::<Tag>().is_err());
        assert!("Physiological".parse::<NicDomain>().is_err());
    }

    #[test]
    fn canonical_order_is_sorted() {
        let tags = Tag::all();
        assert!(tags.windows(2).all(|w| w[0] < w[1]));
    }
}
