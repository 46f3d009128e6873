//! Rule-based adaptation.
//!
//! Eight a-priori rules turn a user profile plus device-interaction model
//! into a fully populated [`ActivityConfig`]. Rules are applied in layers:
//!
//! 1. one base rule chosen by disability (rules 1-4) assigns every
//!    presentation field;
//! 2. the arm-mobility refinements for physical disability (rules 6-8)
//!    assign the tracked arm;
//! 3. the wheelchair refinement (rule 5) assigns element spacing.
//!
//! A base rule whose motion-detection column is "dominant arm" resolves the
//! arm from the mobility model directly; rule 3 leaves it to layer 2.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::models::{ArmMobility, DeviceInteractionModel, Disability, Posture, Side, UserProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modality {
    Audio,
    Visual,
    AudioAndVisual,
}

impl Modality {
    pub fn has_audio(self) -> bool {
        matches!(self, Modality::Audio | Modality::AudioAndVisual)
    }

    pub fn has_visual(self) -> bool {
        matches!(self, Modality::Visual | Modality::AudioAndVisual)
    }

    /// Channels as a sorted list, the form used on the wire.
    pub fn channels(self) -> Vec<Channel> {
        let mut out = Vec::with_capacity(2);
        if self.has_audio() {
            out.push(Channel::Audio);
        }
        if self.has_visual() {
            out.push(Channel::Visual);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Channel {
    Audio,
    Visual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BackgroundStyle {
    Black,
    Image,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObjectColorScheme {
    Yellow,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InteractionMode {
    Collision,
    Gestures,
    DragAndDrop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementSpacing {
    Standard,
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ActivityConfig {
    pub instruction_modality: Modality,
    pub background_style: BackgroundStyle,
    pub object_color_scheme: ObjectColorScheme,
    pub interaction_mode: InteractionMode,
    pub feedback_modality: Modality,
    pub show_pictograms: bool,
    pub element_spacing: ElementSpacing,
    pub tracked_arm: Side,
}

impl ActivityConfig {
    /// Checks the per-disability constraints every derived config must meet.
    pub fn check_invariants(&self, disability: Disability, posture: Posture) -> Result<(), String> {
        let mut problems = Vec::new();
        match disability {
            Disability::Visual => {
                if self.background_style != BackgroundStyle::Black
                    || self.object_color_scheme != ObjectColorScheme::Yellow
                    || self.feedback_modality != Modality::Audio
                    || self.interaction_mode != InteractionMode::Collision
                {
                    problems.push("visual: needs black/yellow, audio feedback, collision");
                }
            }
            Disability::Hearing => {
                if self.instruction_modality != Modality::Visual
                    || self.interaction_mode != InteractionMode::Gestures
                    || self.feedback_modality != Modality::Visual
                {
                    problems.push("hearing: needs visual instructions/feedback and gestures");
                }
            }
            Disability::Autism => {
                if self.interaction_mode != InteractionMode::DragAndDrop
                    || !self.show_pictograms
                    || self.feedback_modality != Modality::AudioAndVisual
                {
                    problems.push("autism: needs drag and drop, pictograms, audio+visual feedback");
                }
            }
            Disability::Physical => {
                if self.interaction_mode != InteractionMode::Collision
                    || self.feedback_modality != Modality::AudioAndVisual
                {
                    problems.push("physical: needs collision and audio+visual feedback");
                }
                if posture == Posture::Seated && self.element_spacing != ElementSpacing::Reduced {
                    problems.push("physical seated: needs reduced spacing");
                }
            }
        }
        if self.show_pictograms && disability != Disability::Autism {
            problems.push("pictograms are only shown for autism");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems.join("; "))
        }
    }
}

/// Motion-detection column of a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArmSelector {
    Dominant,
    Fixed(Side),
}

/// Condition side of a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleCondition {
    Disability(Disability),
    PhysicalSeated,
    PhysicalMobility(MobilityClass),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MobilityClass {
    RightArmOnly,
    LeftArmOnly,
    BothArms,
}

impl RuleCondition {
    pub fn holds(&self, disability: Disability, device: &DeviceInteractionModel) -> bool {
        match *self {
            RuleCondition::Disability(d) => d == disability,
            RuleCondition::PhysicalSeated => {
                disability == Disability::Physical && device.posture == Posture::Seated
            }
            RuleCondition::PhysicalMobility(class) => {
                disability == Disability::Physical
                    && matches!(
                        (class, device.arm_mobility),
                        (MobilityClass::RightArmOnly, ArmMobility::RightArmOnly)
                            | (MobilityClass::LeftArmOnly, ArmMobility::LeftArmOnly)
                            | (MobilityClass::BothArms, ArmMobility::BothArms { .. })
                    )
            }
        }
    }
}

/// Partial assignment of config fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RuleEffect {
    pub instruction_modality: Option<Modality>,
    pub background_style: Option<BackgroundStyle>,
    pub object_color_scheme: Option<ObjectColorScheme>,
    pub interaction_mode: Option<InteractionMode>,
    pub feedback_modality: Option<Modality>,
    pub show_pictograms: Option<bool>,
    pub element_spacing: Option<ElementSpacing>,
    pub tracked_arm: Option<ArmSelector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdaptationRule {
    pub id: u8,
    pub label: &'static str,
    pub condition: RuleCondition,
    pub effect: RuleEffect,
}

const fn base_effect(
    instruction: Modality,
    background: BackgroundStyle,
    colors: ObjectColorScheme,
    mode: InteractionMode,
    feedback: Modality,
    pictograms: bool,
    arm: Option<ArmSelector>,
) -> RuleEffect {
    RuleEffect {
        instruction_modality: Some(instruction),
        background_style: Some(background),
        object_color_scheme: Some(colors),
        interaction_mode: Some(mode),
        feedback_modality: Some(feedback),
        show_pictograms: Some(pictograms),
        element_spacing: Some(ElementSpacing::Standard),
        tracked_arm: arm,
    }
}

const fn arm_effect(arm: ArmSelector) -> RuleEffect {
    RuleEffect {
        instruction_modality: None,
        background_style: None,
        object_color_scheme: None,
        interaction_mode: None,
        feedback_modality: None,
        show_pictograms: None,
        element_spacing: None,
        tracked_arm: Some(arm),
    }
}

pub static RULES: [AdaptationRule; 8] = [
    AdaptationRule {
        id: 1,
        label: "Visual",
        condition: RuleCondition::Disability(Disability::Visual),
        effect: base_effect(
            Modality::Audio,
            BackgroundStyle::Black,
            ObjectColorScheme::Yellow,
            InteractionMode::Collision,
            Modality::Audio,
            false,
            Some(ArmSelector::Dominant),
        ),
    },
    AdaptationRule {
        id: 2,
        label: "Hearing",
        condition: RuleCondition::Disability(Disability::Hearing),
        effect: base_effect(
            Modality::Visual,
            BackgroundStyle::Image,
            ObjectColorScheme::Normal,
            InteractionMode::Gestures,
            Modality::Visual,
            false,
            Some(ArmSelector::Dominant),
        ),
    },
    AdaptationRule {
        id: 3,
        label: "Physical",
        condition: RuleCondition::Disability(Disability::Physical),
        effect: base_effect(
            Modality::Audio,
            BackgroundStyle::Image,
            ObjectColorScheme::Normal,
            InteractionMode::Collision,
            Modality::AudioAndVisual,
            false,
            None,
        ),
    },
    AdaptationRule {
        id: 4,
        label: "Autism",
        condition: RuleCondition::Disability(Disability::Autism),
        effect: base_effect(
            Modality::Audio,
            BackgroundStyle::Image,
            ObjectColorScheme::Normal,
            InteractionMode::DragAndDrop,
            Modality::AudioAndVisual,
            true,
            Some(ArmSelector::Dominant),
        ),
    },
    AdaptationRule {
        id: 5,
        label: "Physical (wheelchair)",
        condition: RuleCondition::PhysicalSeated,
        effect: RuleEffect {
            instruction_modality: None,
            background_style: None,
            object_color_scheme: None,
            interaction_mode: None,
            feedback_modality: None,
            show_pictograms: None,
            element_spacing: Some(ElementSpacing::Reduced),
            tracked_arm: Some(ArmSelector::Dominant),
        },
    },
    AdaptationRule {
        id: 6,
        label: "Physical (mov. right arm)",
        condition: RuleCondition::PhysicalMobility(MobilityClass::RightArmOnly),
        effect: arm_effect(ArmSelector::Fixed(Side::Right)),
    },
    AdaptationRule {
        id: 7,
        label: "Physical (mov. left arm)",
        condition: RuleCondition::PhysicalMobility(MobilityClass::LeftArmOnly),
        effect: arm_effect(ArmSelector::Fixed(Side::Left)),
    },
    AdaptationRule {
        id: 8,
        label: "Physical (mov. both arms)",
        condition: RuleCondition::PhysicalMobility(MobilityClass::BothArms),
        effect: arm_effect(ArmSelector::Dominant),
    },
];

/// Layer order: base rules, then arm refinements, then posture refinement.
const LAYERS: [&[u8]; 3] = [&[1, 2, 3, 4], &[6, 7, 8], &[5]];

pub fn rule(id: u8) -> Option<&'static AdaptationRule> {
    RULES.iter().find(|r| r.id == id)
}

/// A derived config plus the ids of the rules that fired, in application order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub config: ActivityConfig,
    pub fired: Vec<u8>,
}

#[derive(Default)]
struct Partial {
    instruction_modality: Option<Modality>,
    background_style: Option<BackgroundStyle>,
    object_color_scheme: Option<ObjectColorScheme>,
    interaction_mode: Option<InteractionMode>,
    feedback_modality: Option<Modality>,
    show_pictograms: Option<bool>,
    element_spacing: Option<ElementSpacing>,
    tracked_arm: Option<Side>,
}

impl Partial {
    fn apply(&mut self, effect: &RuleEffect, mobility: ArmMobility) {
        fn set<T: Copy>(slot: &mut Option<T>, v: Option<T>) {
            if v.is_some() {
                *slot = v;
            }
        }
        set(&mut self.instruction_modality, effect.instruction_modality);
        set(&mut self.background_style, effect.background_style);
        set(&mut self.object_color_scheme, effect.object_color_scheme);
        set(&mut self.interaction_mode, effect.interaction_mode);
        set(&mut self.feedback_modality, effect.feedback_modality);
        set(&mut self.show_pictograms, effect.show_pictograms);
        set(&mut self.element_spacing, effect.element_spacing);
        let arm = effect.tracked_arm.map(|sel| match sel {
            ArmSelector::Dominant => mobility.preferred_arm(),
            ArmSelector::Fixed(side) => side,
        });
        set(&mut self.tracked_arm, arm);
    }

    fn finish(self) -> Option<ActivityConfig> {
        Some(ActivityConfig {
            instruction_modality: self.instruction_modality?,
            background_style: self.background_style?,
            object_color_scheme: self.object_color_scheme?,
            interaction_mode: self.interaction_mode?,
            feedback_modality: self.feedback_modality?,
            show_pictograms: self.show_pictograms?,
            element_spacing: self.element_spacing?,
            tracked_arm: self.tracked_arm?,
        })
    }
}

/// Runs the layered rule base over a disability and device model.
pub fn derive(disability: Disability, device: &DeviceInteractionModel) -> Derivation {
    let mut partial = Partial::default();
    let mut fired = Vec::new();
    for layer in LAYERS {
        for id in layer {
            let r = rule(*id).expect("layer ids are defined rules");
            if r.condition.holds(disability, device) {
                partial.apply(&r.effect, device.arm_mobility);
                fired.push(r.id);
            }
        }
    }
    let config = partial
        .finish()
        .expect("rule base assigns every field for every input");
    Derivation { config, fired }
}

pub fn derive_config(profile: &UserProfile, device: &DeviceInteractionModel) -> ActivityConfig {
    derive(profile.disability, device).config
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modality::Audio => "Audio",
            Modality::Visual => "Visual",
            Modality::AudioAndVisual => "Visual&Audio",
        })
    }
}

fn opt<T: fmt::Debug>(v: Option<T>) -> String {
    v.map(|v| format!("{v:?}")).unwrap_or_else(|| "-".into())
}

/// Renders the rule base as an aligned text table, one row per rule. Rows
/// 5-8 show the physical base row with the refinement overlaid.
pub fn dump_rules() -> String {
    let header = [
        "#", "Disability", "I", "BC", "3DC", "IM", "Fed", "G", "SVI", "D", "MD",
    ];
    let physical = rule(3).expect("rule 3").effect;
    let mut rows: Vec<[String; 11]> = Vec::new();
    for r in &RULES {
        let mut e = r.effect;
        if r.id >= 5 {
            let mut merged = physical;
            if e.element_spacing.is_some() {
                merged.element_spacing = e.element_spacing;
            }
            if e.tracked_arm.is_some() {
                merged.tracked_arm = e.tracked_arm;
            }
            e = merged;
        }
        let md = match e.tracked_arm {
            Some(ArmSelector::Dominant) => "Dominant arm".to_string(),
            Some(ArmSelector::Fixed(s)) => format!("{s} arm"),
            None => "-".to_string(),
        };
        let gestures = if e.interaction_mode == Some(InteractionMode::Gestures) {
            "Yes"
        } else {
            "No"
        };
        let yes_no = |b: Option<bool>| match b {
            Some(true) => "Yes".to_string(),
            Some(false) => "No".to_string(),
            None => "-".to_string(),
        };
        rows.push([
            r.id.to_string(),
            r.label.to_string(),
            e.instruction_modality.map(|m| m.to_string()).unwrap_or("-".into()),
            opt(e.background_style),
            opt(e.object_color_scheme),
            opt(e.interaction_mode),
            e.feedback_modality.map(|m| m.to_string()).unwrap_or("-".into()),
            gestures.to_string(),
            yes_no(e.show_pictograms),
            opt(e.element_spacing),
            md,
        ]);
    }
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &[&str]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(widths.iter())
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(&mut out, &header);
    for row in &rows {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        line(&mut out, &cells);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn device(posture: Posture, arm_mobility: ArmMobility) -> DeviceInteractionModel {
        DeviceInteractionModel {
            posture,
            rgb_camera_active: false,
            depth_distance: 2.0,
            arm_mobility,
        }
    }

    fn all_inputs() -> Vec<(Disability, ArmMobility, Posture)> {
        let mut v = Vec::new();
        for d in Disability::ALL {
            for m in ArmMobility::ALL {
                for p in [Posture::Standing, Posture::Seated] {
                    v.push((d, m, p));
                }
            }
        }
        v
    }

    #[test]
    fn rule_ids_are_one_to_eight() {
        let ids: Vec<u8> = RULES.iter().map(|r| r.id).collect();
        assert_eq!(ids, (1..=8).collect::<Vec<_>>());
    }

    #[test]
    fn totality_over_all_32_inputs() {
        let inputs = all_inputs();
        assert_eq!(inputs.len(), 32);
        for (d, m, p) in inputs {
            let cfg = derive(d, &device(p, m)).config;
            cfg.check_invariants(d, p)
                .unwrap_or_else(|e| panic!("{d:?} {m:?} {p:?}: {e}"));
        }
    }

    #[test]
    fn seated_only_changes_spacing() {
        for d in Disability::ALL {
            for m in ArmMobility::ALL {
                let standing = derive(d, &device(Posture::Standing, m)).config;
                let seated = derive(d, &device(Posture::Seated, m)).config;
                let seated_with_standard = ActivityConfig {
                    element_spacing: standing.element_spacing,
                    ..seated
                };
                assert_eq!(standing, seated_with_standard, "{d:?} {m:?}");
            }
        }
    }

    #[test]
    fn non_physical_arm_resolution() {
        for d in [Disability::Visual, Disability::Hearing, Disability::Autism] {
            let reference = derive(d, &device(Posture::Standing, ArmMobility::RightArmOnly)).config;
            for m in ArmMobility::ALL {
                let cfg = derive(d, &device(Posture::Standing, m)).config;
                assert_eq!(cfg.tracked_arm, m.preferred_arm());
                assert_eq!(
                    ActivityConfig {
                        tracked_arm: reference.tracked_arm,
                        ..cfg
                    },
                    reference
                );
            }
        }
    }

    #[test]
    fn physical_mobility_rules_fire() {
        let d = derive(
            Disability::Physical,
            &device(Posture::Seated, ArmMobility::LeftArmOnly),
        );
        assert_eq!(d.fired, vec![3, 7, 5]);
        let d = derive(
            Disability::Physical,
            &device(Posture::Standing, ArmMobility::BothArms { dominant: Side::Left }),
        );
        assert_eq!(d.fired, vec![3, 8]);
        assert_eq!(d.config.tracked_arm, Side::Left);
        let d = derive(
            Disability::Physical,
            &device(Posture::Standing, ArmMobility::RightArmOnly),
        );
        assert_eq!(d.fired, vec![3, 6]);
        assert_eq!(d.config.tracked_arm, Side::Right);
    }

    // Seated non-physical users keep standard spacing.
    #[test]
    fn seated_non_physical_keeps_standard_spacing() {
        for d in [Disability::Visual, Disability::Hearing, Disability::Autism] {
            let cfg = derive(d, &device(Posture::Seated, ArmMobility::RightArmOnly)).config;
            assert_eq!(cfg.element_spacing, ElementSpacing::Standard);
        }
    }

    #[test]
    fn dump_has_header_and_eight_rows() {
        let text = dump_rules();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 9);
        assert!(lines[0].starts_with("#  Disability"));
        assert!(lines[1].contains("Black") && lines[1].contains("Yellow"));
        assert!(lines[5].contains("Reduced"));
        assert!(lines[6].contains("Right arm"));
        assert!(lines[7].contains("Left arm"));
        assert!(lines[3].trim_end().ends_with('-'));
    }

    #[test]
    fn channels_follow_modality() {
        assert_eq!(Modality::Audio.channels(), vec![Channel::Audio]);
        assert_eq!(Modality::Visual.channels(), vec![Channel::Visual]);
        assert_eq!(
            Modality::AudioAndVisual.channels(),
            vec![Channel::Audio, Channel::Visual]
        );
    }
}
