//! Finite-state gesture recognition for raising the left or right arm.
//!
//! Each gesture is an ordered list of pose predicates. A listener watches
//! every frame for the first predicate; once it holds the gesture's timer
//! starts and each following frame may advance to the next predicate. The
//! gesture is reported on the frame that satisfies the last predicate, as
//! long as it arrives within `max_duration_ms` of the first one. Frames that
//! satisfy none of the expected predicates are transit frames and leave the
//! progress untouched.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::models::Side;
use crate::skeleton::{JointId, MissingJoint, SkeletonFrame, Trace};

/// Vertical dead-band around each threshold, in meters.
pub const DEAD_BAND_M: f64 = 0.03;
pub const DEFAULT_MAX_DURATION_MS: u64 = 1500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GestureId {
    RaiseLeftArm,
    RaiseRightArm,
}

impl GestureId {
    pub fn side(self) -> Side {
        match self {
            GestureId::RaiseLeftArm => Side::Left,
            GestureId::RaiseRightArm => Side::Right,
        }
    }

    pub fn for_side(side: Side) -> GestureId {
        match side {
            Side::Left => GestureId::RaiseLeftArm,
            Side::Right => GestureId::RaiseRightArm,
        }
    }

    pub fn mirrored(self) -> GestureId {
        GestureId::for_side(self.side().opposite())
    }
}

impl fmt::Display for GestureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GestureId::RaiseLeftArm => "RaiseLeftArm",
            GestureId::RaiseRightArm => "RaiseRightArm",
        })
    }
}

impl std::str::FromStr for GestureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "RaiseLeftArm" => Ok(GestureId::RaiseLeftArm),
            "RaiseRightArm" => Ok(GestureId::RaiseRightArm),
            other => Err(format!("unknown gesture {other:?}")),
        }
    }
}

/// Hand-height predicates for one arm. Within an arm at most one holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PosePredicate {
    HandBelowShoulder(Side),
    HandBetweenShoulderAndHead(Side),
    HandAboveHead(Side),
}

impl PosePredicate {
    pub fn joints(self) -> [JointId; 3] {
        let side = match self {
            PosePredicate::HandBelowShoulder(s)
            | PosePredicate::HandBetweenShoulderAndHead(s)
            | PosePredicate::HandAboveHead(s) => s,
        };
        [JointId::hand(side), JointId::shoulder(side), JointId::Head]
    }

    pub fn holds(self, frame: &SkeletonFrame) -> Result<bool, MissingJoint> {
        let [hand, shoulder, head] = self.joints();
        let hand = frame.joint(hand)?.y;
        let shoulder = frame.joint(shoulder)?.y;
        let head = frame.joint(head)?.y;
        let eps = DEAD_BAND_M;
        Ok(match self {
            PosePredicate::HandBelowShoulder(_) => hand < shoulder - eps,
            PosePredicate::HandBetweenShoulderAndHead(_) => {
                hand > shoulder + eps && hand < head - eps
            }
            PosePredicate::HandAboveHead(_) => hand > head + eps && hand > shoulder + eps,
        })
    }
}

impl fmt::Display for PosePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosePredicate::HandBelowShoulder(s) => write!(f, "HandBelowShoulder({s})"),
            PosePredicate::HandBetweenShoulderAndHead(s) => {
                write!(f, "HandBetweenShoulderAndHead({s})")
            }
            PosePredicate::HandAboveHead(s) => write!(f, "HandAboveHead({s})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GestureDefinition {
    pub gesture: GestureId,
    pub states: Vec<PosePredicate>,
    pub max_duration_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GestureError {
    #[error(transparent)]
    MissingJoint(#[from] MissingJoint),
    #[error("gesture {0} needs an initial, at least one intermediate and a final state")]
    TooFewStates(GestureId),
    #[error("gesture {0} needs a positive time limit")]
    ZeroDuration(GestureId),
}

impl GestureDefinition {
    /// Hand below the shoulder, then between shoulder and head, then above the head.
    pub fn raise_arm(side: Side, max_duration_ms: u64) -> Self {
        GestureDefinition {
            gesture: GestureId::for_side(side),
            states: vec![
                PosePredicate::HandBelowShoulder(side),
                PosePredicate::HandBetweenShoulderAndHead(side),
                PosePredicate::HandAboveHead(side),
            ],
            max_duration_ms,
        }
    }

    pub fn validate(&self) -> Result<(), GestureError> {
        if self.states.len() < 3 {
            return Err(GestureError::TooFewStates(self.gesture));
        }
        if self.max_duration_ms == 0 {
            return Err(GestureError::ZeroDuration(self.gesture));
        }
        Ok(())
    }
}

/// The two built-in gestures with the default time limit.
pub fn default_definitions() -> Vec<GestureDefinition> {
    vec![
        GestureDefinition::raise_arm(Side::Left, DEFAULT_MAX_DURATION_MS),
        GestureDefinition::raise_arm(Side::Right, DEFAULT_MAX_DURATION_MS),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GestureEvent {
    pub gesture: GestureId,
    pub start_ms: u64,
    pub end_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GestureProgress {
    /// Index of the next state to satisfy; 0 means idle.
    pub next: usize,
    /// When the initial state was entered; set iff `next > 0`.
    pub started_ms: Option<u64>,
}

/// Per-gesture progress, parallel to the definition list it is advanced with.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RecognizerState {
    pub progress: Vec<GestureProgress>,
}

impl RecognizerState {
    pub fn idle(defs: &[GestureDefinition]) -> Self {
        RecognizerState {
            progress: vec![GestureProgress::default(); defs.len()],
        }
    }
}

/// Feeds one frame to every gesture. Events are returned ordered by gesture id.
pub fn advance_recognizer(
    state: &RecognizerState,
    frame: &SkeletonFrame,
    defs: &[GestureDefinition],
) -> Result<(RecognizerState, Vec<GestureEvent>), GestureError> {
    for def in defs {
        for p in &def.states {
            for j in p.joints() {
                frame.joint(j)?;
            }
        }
    }
    let t = frame.timestamp_ms;
    let mut next_state = state.clone();
    next_state.progress.resize(defs.len(), GestureProgress::default());
    let mut events = Vec::new();
    for (def, progress) in defs.iter().zip(next_state.progress.iter_mut()) {
        if let Some(start) = progress.started_ms {
            if t.saturating_sub(start) > def.max_duration_ms {
                *progress = GestureProgress::default();
            }
        }
        match progress.started_ms {
            None => {
                if def.states[0].holds(frame)? {
                    *progress = GestureProgress {
                        next: 1,
                        started_ms: Some(t),
                    };
                }
            }
            Some(start) => {
                if def.states[progress.next].holds(frame)? {
                    progress.next += 1;
                    if progress.next == def.states.len() {
                        events.push(GestureEvent {
                            gesture: def.gesture,
                            start_ms: start,
                            end_ms: t,
                        });
                        *progress = GestureProgress::default();
                    }
                }
            }
        }
    }
    events.sort_by_key(|e| e.gesture);
    Ok((next_state, events))
}

/// Folds [`advance_recognizer`] over a trace from the idle state.
pub fn recognize_trace(
    trace: &Trace,
    defs: &[GestureDefinition],
) -> Result<Vec<GestureEvent>, GestureError> {
    for def in defs {
        def.validate()?;
    }
    let mut state = RecognizerState::idle(defs);
    let mut events = Vec::new();
    for frame in trace.frames() {
        let (next, mut emitted) = advance_recognizer(&state, frame, defs)?;
        state = next;
        events.append(&mut emitted);
    }
    Ok(events)
}

pub fn describe_definitions(defs: &[GestureDefinition]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "dead-band: {DEAD_BAND_M} m (hand y compared with same-side shoulder y and head y)"
    );
    for def in defs {
        let _ = writeln!(out, "{} (max {} ms)", def.gesture, def.max_duration_ms);
        for (i, p) in def.states.iter().enumerate() {
            let role = if i == 0 {
                "initial"
            } else if i + 1 == def.states.len() {
                "final"
            } else {
                "intermediate"
            };
            let rule = match p {
                PosePredicate::HandBelowShoulder(_) => "hand.y < shoulder.y - eps".to_string(),
                PosePredicate::HandBetweenShoulderAndHead(_) => {
                    "shoulder.y + eps < hand.y < head.y - eps".to_string()
                }
                PosePredicate::HandAboveHead(_) => {
                    "hand.y > head.y + eps and hand.y > shoulder.y + eps".to_string()
                }
            };
            let _ = writeln!(out, "  {i}. {role:<12} {p}: {rule}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::JointPosition;

    const SHOULDER_Y: f64 = 0.42;
    const HEAD_Y: f64 = 0.65;

    fn frame(t: u64, right_hand_y: f64) -> SkeletonFrame {
        SkeletonFrame::neutral(t).with_joint(
            JointId::HandRight,
            JointPosition::new(0.25, right_hand_y, 2.0),
        )
    }

    fn trace(points: &[(u64, f64)]) -> Trace {
        Trace::new(points.iter().map(|&(t, y)| frame(t, y)).collect()).unwrap()
    }

    const BELOW: f64 = SHOULDER_Y - 0.2;
    const BETWEEN: f64 = (SHOULDER_Y + HEAD_Y) / 2.0;
    const ABOVE: f64 = HEAD_Y + 0.2;

    #[test]
    fn predicates_are_exclusive_and_dead_band_is_empty() {
        let side = Side::Right;
        let preds = [
            PosePredicate::HandBelowShoulder(side),
            PosePredicate::HandBetweenShoulderAndHead(side),
            PosePredicate::HandAboveHead(side),
        ];
        let count = |y: f64| preds.iter().filter(|p| p.holds(&frame(0, y)).unwrap()).count();
        assert_eq!(count(BELOW), 1);
        assert_eq!(count(BETWEEN), 1);
        assert_eq!(count(ABOVE), 1);
        assert_eq!(count(SHOULDER_Y), 0);
        assert_eq!(count(SHOULDER_Y + 0.02), 0);
        assert_eq!(count(HEAD_Y - 0.01), 0);
    }

    #[test]
    fn raise_within_window_is_recognized() {
        let events = recognize_trace(
            &trace(&[(0, BELOW), (300, BETWEEN), (600, ABOVE)]),
            &default_definitions(),
        )
        .unwrap();
        assert_eq!(
            events,
            vec![GestureEvent {
                gesture: GestureId::RaiseRightArm,
                start_ms: 0,
                end_ms: 600
            }]
        );
    }

    #[test]
    fn slow_raise_times_out() {
        let events = recognize_trace(
            &trace(&[(0, BELOW), (900, BETWEEN), (1800, ABOVE)]),
            &default_definitions(),
        )
        .unwrap();
        assert!(events.is_empty());
    }

    #[test]
    fn skipping_the_intermediate_state_is_rejected() {
        let events =
            recognize_trace(&trace(&[(0, BELOW), (300, ABOVE)]), &default_definitions()).unwrap();
        assert!(events.is_empty());
    }

    #[test]
    fn empty_trace_has_no_events() {
        assert!(recognize_trace(&Trace::default(), &default_definitions())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn two_raises_give_two_events() {
        let events = recognize_trace(
            &trace(&[
                (0, BELOW),
                (200, BETWEEN),
                (400, ABOVE),
                (600, ABOVE),
                (1000, BETWEEN),
                (2000, BELOW),
                (2200, BETWEEN),
                (2400, ABOVE),
            ]),
            &default_definitions(),
        )
        .unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!((events[0].start_ms, events[0].end_ms), (0, 400));
        assert_eq!((events[1].start_ms, events[1].end_ms), (2000, 2400));
    }

    #[test]
    fn lowering_again_does_not_restart_the_timer() {
        // Committed to the attempt at t=0; the second low pose is a transit frame.
        let events = recognize_trace(
            &trace(&[(0, BELOW), (1000, BELOW), (1400, BETWEEN), (1600, ABOVE)]),
            &default_definitions(),
        )
        .unwrap();
        assert!(events.is_empty());
    }

    #[test]
    fn staying_below_gives_nothing() {
        let pts: Vec<(u64, f64)> = (0..20).map(|i| (i * 100, BELOW)).collect();
        assert!(recognize_trace(&trace(&pts), &default_definitions())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn transit_frames_do_not_reset() {
        let events = recognize_trace(
            &trace(&[
                (0, BELOW),
                (100, SHOULDER_Y),
                (200, BETWEEN),
                (300, HEAD_Y),
                (400, ABOVE),
            ]),
            &default_definitions(),
        )
        .unwrap();
        assert_eq!(events.len(), 1);
    }

    #[test]
    fn timeout_frame_can_start_a_new_attempt() {
        // Attempt from t=0 expires at t=1600, which is itself an initial pose.
        let events = recognize_trace(
            &trace(&[(0, BELOW), (1600, BELOW), (1700, BETWEEN), (1800, ABOVE)]),
            &default_definitions(),
        )
        .unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!((events[0].start_ms, events[0].end_ms), (1600, 1800));
    }

    #[test]
    fn boundary_duration_is_accepted() {
        let events = recognize_trace(
            &trace(&[(0, BELOW), (700, BETWEEN), (1500, ABOVE)]),
            &default_definitions(),
        )
        .unwrap();
        assert_eq!(events.len(), 1);
        let events = recognize_trace(
            &trace(&[(0, BELOW), (700, BETWEEN), (1501, ABOVE)]),
            &default_definitions(),
        )
        .unwrap();
        assert!(events.is_empty());
    }

    #[test]
    fn missing_joint_is_reported() {
        let mut f = SkeletonFrame::neutral(0);
        f.joints.remove(&JointId::Head);
        let err = advance_recognizer(
            &RecognizerState::idle(&default_definitions()),
            &f,
            &default_definitions(),
        )
        .unwrap_err();
        assert_eq!(err, GestureError::MissingJoint(MissingJoint(JointId::Head)));
    }

    #[test]
    fn definitions_are_validated() {
        let mut def = GestureDefinition::raise_arm(Side::Left, 1000);
        assert!(def.validate().is_ok());
        def.states.remove(1);
        assert_eq!(def.validate(), Err(GestureError::TooFewStates(GestureId::RaiseLeftArm)));
        let def = GestureDefinition::raise_arm(Side::Left, 0);
        assert_eq!(def.validate(), Err(GestureError::ZeroDuration(GestureId::RaiseLeftArm)));
    }

    #[test]
    fn describe_lists_states() {
        let text = describe_definitions(&default_definitions());
        assert!(text.contains("RaiseLeftArm (max 1500 ms)"));
        assert!(text.contains("HandBetweenShoulderAndHead(Right)"));
        assert_eq!(text.matches("intermediate").count(), 2);
    }
}
