//! User model and device-interaction model.
//!
//! The user model is a flat feature profile filled in by a tutor. The
//! device-interaction model records how that user meets the depth sensor:
//! posture, whether the RGB mirror is shown, the working distance and which
//! arms can be tracked.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Recommended user distance from the sensor, in meters (closed interval).
pub const RECOMMENDED_DEPTH_RANGE: (f64, f64) = (1.2, 3.5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Disability {
    Visual,
    Hearing,
    Physical,
    Autism,
}

impl Disability {
    pub const ALL: [Disability; 4] = [
        Disability::Visual,
        Disability::Hearing,
        Disability::Physical,
        Disability::Autism,
    ];
}

impl fmt::Display for Disability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Disability::Visual => "Visual",
            Disability::Hearing => "Hearing",
            Disability::Physical => "Physical",
            Disability::Autism => "Autism",
        };
        f.write_str(s)
    }
}

/// Which side of the body the user cannot reliably recognise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum LateralityProblem {
    #[default]
    None,
    CannotRecognizeLeft,
    CannotRecognizeRight,
}

impl LateralityProblem {
    /// The side a laterality activity should train, if any.
    pub fn trained_side(self) -> Option<Side> {
        match self {
            LateralityProblem::None => None,
            LateralityProblem::CannotRecognizeLeft => Some(Side::Left),
            LateralityProblem::CannotRecognizeRight => Some(Side::Right),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sex {
    F,
    M,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// -1 for left, +1 for right, in screen `u` direction.
    pub fn sign(self) -> i64 {
        match self {
            Side::Left => -1,
            Side::Right => 1,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "Left",
            Side::Right => "Right",
        })
    }
}

/// Opaque profile identifier, unique within a profile store.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProfileId(pub String);

impl ProfileId {
    pub fn new(id: impl Into<String>) -> Self {
        ProfileId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ProfileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UserProfile {
    pub id: ProfileId,
    pub full_name: String,
    pub age: u32,
    pub sex: Sex,
    pub laterality: LateralityProblem,
    pub disability: Disability,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: &'static str,
    pub reason: String,
}

/// Outcome of [`validate_profile`]. Violations are data, not faults.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationResult {
    pub violations: Vec<Violation>,
}

impl ValidationResult {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn fields(&self) -> Vec<&'static str> {
        self.violations.iter().map(|v| v.field).collect()
    }
}

impl fmt::Display for ValidationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{}: {}", v.field, v.reason))
            .collect();
        f.write_str(&parts.join("; "))
    }
}

pub fn validate_profile(profile: &UserProfile) -> ValidationResult {
    let mut violations = Vec::new();
    if profile.id.0.trim().is_empty() {
        violations.push(Violation {
            field: "id",
            reason: "must not be empty".into(),
        });
    }
    if profile.full_name.trim().is_empty() {
        violations.push(Violation {
            field: "fullName",
            reason: "must not be empty".into(),
        });
    }
    if profile.age == 0 || profile.age >= 120 {
        violations.push(Violation {
            field: "age",
            reason: format!("{} is outside 0 < age < 120", profile.age),
        });
    }
    ValidationResult { violations }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Posture {
    Standing,
    Seated,
}

/// Usable arms. There is no variant for zero arms: interaction needs at least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArmMobility {
    BothArms { dominant: Side },
    RightArmOnly,
    LeftArmOnly,
}

impl ArmMobility {
    pub const ALL: [ArmMobility; 4] = [
        ArmMobility::BothArms { dominant: Side::Left },
        ArmMobility::BothArms {
            dominant: Side::Right,
        },
        ArmMobility::RightArmOnly,
        ArmMobility::LeftArmOnly,
    ];

    /// The arm used when nothing more specific is requested: the dominant
    /// one, or the only one that moves.
    pub fn preferred_arm(self) -> Side {
        match self {
            ArmMobility::BothArms { dominant } => dominant,
            ArmMobility::RightArmOnly => Side::Right,
            ArmMobility::LeftArmOnly => Side::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DeviceInteractionModel {
    pub posture: Posture,
    pub rgb_camera_active: bool,
    /// Meters from the sensor.
    pub depth_distance: f64,
    pub arm_mobility: ArmMobility,
}

impl DeviceInteractionModel {
    pub fn validate(&self) -> ValidationResult {
        let mut violations = Vec::new();
        if !(self.depth_distance.is_finite() && self.depth_distance > 0.0) {
            violations.push(Violation {
                field: "depthDistance",
                reason: format!("{} is not a positive finite distance", self.depth_distance),
            });
        }
        ValidationResult { violations }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DepthCheck {
    WithinRecommended,
    OutsideRecommended(f64),
}

/// Checks the working distance against the sensor's recommended range.
/// Never rejects: the range is advice for the tutor.
pub fn validate_depth_distance(model: &DeviceInteractionModel) -> DepthCheck {
    let (lo, hi) = RECOMMENDED_DEPTH_RANGE;
    let d = model.depth_distance;
    if (lo..=hi).contains(&d) {
        DepthCheck::WithinRecommended
    } else {
        DepthCheck::OutsideRecommended(d)
    }
}
