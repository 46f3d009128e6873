//! Offline replay: a recorded skeleton trace drives an activity exactly as a
//! live session would, producing a session log.
//!
//! Frames are filtered for the user's posture, then turned into activity
//! inputs. In gesture mode the recognizer runs and each recognized gesture
//! becomes an input (frames without one become clock ticks); in the other
//! modes the tracked hand becomes a cursor. The activity clock starts at the
//! first frame's timestamp.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use thiserror::Error;

use crate::activity::{Activity, ActivityError, ActivityInput, ActivitySpec, ElementRole, Phase, BALL_ID, BASKET_ID};
use crate::adaptation::{ActivityConfig, InteractionMode};
use crate::analytics::SessionLog;
use crate::content::Content;
use crate::gesture::{advance_recognizer, default_definitions, GestureDefinition, GestureError, RecognizerState};
use crate::models::{Posture, ProfileId, Side};
use crate::skeleton::{filter_joints_for_posture, load_trace, map_hand_to_cursor, SkeletonFrame, Trace, TraceError};
use crate::store::{DataStore, ProfileRecord, StoreError};

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("unknown profile {0:?}")]
    UnknownProfile(String),
    #[error("cannot open trace {path}: {reason}")]
    TraceFile { path: String, reason: String },
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Gesture(#[from] GestureError),
    #[error(transparent)]
    Activity(#[from] ActivityError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Where a session sits in the evaluation schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionMeta {
    pub iteration: u32,
    pub session_index: u32,
}

impl Default for SessionMeta {
    fn default() -> Self {
        SessionMeta {
            iteration: 1,
            session_index: 1,
        }
    }
}

/// Turns frames into activity inputs for one configuration.
#[derive(Debug, Clone)]
pub struct FrameDriver {
    mode: InteractionMode,
    arm: Side,
    posture: Posture,
    defs: Vec<GestureDefinition>,
    recognizer: RecognizerState,
}

impl FrameDriver {
    pub fn new(config: &ActivityConfig, posture: Posture) -> Self {
        let defs = default_definitions();
        FrameDriver {
            mode: config.interaction_mode,
            arm: config.tracked_arm,
            posture,
            recognizer: RecognizerState::idle(&defs),
            defs,
        }
    }

    pub fn inputs(&mut self, frame: &SkeletonFrame) -> Result<Vec<ActivityInput>, ReplayError> {
        let frame = filter_joints_for_posture(frame, self.posture);
        let t_ms = frame.timestamp_ms;
        if self.mode == InteractionMode::Gestures {
            let (next, events) = advance_recognizer(&self.recognizer, &frame, &self.defs)?;
            self.recognizer = next;
            if events.is_empty() {
                return Ok(vec![ActivityInput::Tick { t_ms }]);
            }
            return Ok(events
                .into_iter()
                .map(|e| ActivityInput::GestureRecognized { gesture: e.gesture, t_ms })
                .collect());
        }
        let c = map_hand_to_cursor(&frame, self.arm).map_err(GestureError::from)?;
        Ok(vec![ActivityInput::CursorMoved { u: c.u, v: c.v, t_ms }])
    }
}

/// Every input the trace produces, in order.
pub fn replay_inputs(record: &ProfileRecord, config: &ActivityConfig, trace: &Trace) -> Result<Vec<ActivityInput>, ReplayError> {
    let mut driver = FrameDriver::new(config, record.device.posture);
    let mut out = Vec::new();
    for frame in trace.frames() {
        out.extend(driver.inputs(frame)?);
    }
    Ok(out)
}

/// Replays a trace for a profile. Inputs after the activity finishes are
/// ignored; a trace that ends early yields an incomplete log.
pub fn replay(
    record: &ProfileRecord,
    spec: ActivitySpec,
    content: &Content,
    trace: &Trace,
    meta: SessionMeta,
) -> Result<SessionLog, ReplayError> {
    let start_ms = trace.frames().first().map_or(0, |f| f.timestamp_ms);
    let (mut activity, _) = Activity::start(&record.profile, &record.device, spec, content, start_ms)?;
    let mut driver = FrameDriver::new(activity.config(), record.device.posture);
    'frames: for frame in trace.frames() {
        for input in driver.inputs(frame)? {
            activity.apply(input)?;
            if activity.is_done() {
                break 'frames;
            }
        }
    }
    Ok(session_log(record, &activity, meta))
}

pub fn session_log(record: &ProfileRecord, activity: &Activity, meta: SessionMeta) -> SessionLog {
    SessionLog {
        user_id: record.profile.id.clone(),
        disability: record.profile.disability,
        iteration: meta.iteration,
        session_index: meta.session_index,
        activity_kind: activity.spec().kind,
        results: activity.results().to_vec(),
        incomplete: !activity.is_done(),
    }
}

/// Loads the profile, content and trace from the store and replays them.
pub fn run_replay(
    store: &DataStore,
    profile_id: &ProfileId,
    spec: ActivitySpec,
    trace_path: &Path,
    meta: SessionMeta,
) -> Result<SessionLog, ReplayError> {
    let record = store
        .profile(profile_id)?
        .ok_or_else(|| ReplayError::UnknownProfile(profile_id.to_string()))?;
    let content = store.content()?;
    let file = File::open(trace_path).map_err(|e| ReplayError::TraceFile {
        path: trace_path.display().to_string(),
        reason: e.to_string(),
    })?;
    let trace = load_trace(BufReader::new(file))?;
    replay(&record, spec, &content, &trace, meta)
}

/// Synthetic trace building.
pub mod script {
    use super::*;
    use crate::activity::ActivityKind;
    use crate::skeleton::{JointId, JointPosition, REACH_M};

    /// A cursor position no activity element overlaps.
    pub const REST: (f64, f64) = (0.5, 0.95);
    pub const FRAME_STEP_MS: u64 = 200;

    /// A neutral frame with the tracked hand placed so it maps to `(u, v)`.
    pub fn cursor_frame(t_ms: u64, arm: Side, u: f64, v: f64) -> SkeletonFrame {
        let base = SkeletonFrame::neutral(t_ms);
        let shoulder = base.joints[&JointId::shoulder(arm)];
        let hand = JointPosition::new(
            shoulder.x + (u - 0.5) * REACH_M,
            shoulder.y - (v - 0.5) * REACH_M,
            shoulder.z,
        );
        base.with_joint(JointId::hand(arm), hand)
    }

    /// A neutral frame with one hand at height `y`.
    pub fn hand_height_frame(t_ms: u64, side: Side, y: f64) -> SkeletonFrame {
        let base = SkeletonFrame::neutral(t_ms);
        let hand = base.joints[&JointId::hand(side)];
        base.with_joint(JointId::hand(side), JointPosition::new(hand.x, y, hand.z))
    }

    pub const HAND_BELOW_Y: f64 = -0.15;
    pub const HAND_BETWEEN_Y: f64 = 0.535;
    pub const HAND_ABOVE_Y: f64 = 0.80;

    /// One arm raise: below, between, above, and back down, `step_ms` apart.
    pub fn raise_frames(side: Side, t0: u64, step_ms: u64) -> Vec<SkeletonFrame> {
        [HAND_BELOW_Y, HAND_BETWEEN_Y, HAND_ABOVE_Y, HAND_BELOW_Y]
            .iter()
            .enumerate()
            .map(|(i, &y)| hand_height_frame(t0 + i as u64 * step_ms, side, y))
            .collect()
    }

    fn element_pos(activity: &Activity, id: &str) -> (f64, f64) {
        let e = activity
            .state()
            .elements
            .iter()
            .find(|e| e.id == id)
            .expect("element on stage");
        (e.u, e.v)
    }

    /// Plays the activity without mistakes and records the trace that does it.
    pub fn autoplay(record: &ProfileRecord, spec: ActivitySpec, content: &Content, start_ms: u64) -> Result<Trace, ReplayError> {
        let (mut activity, _) = Activity::start(&record.profile, &record.device, spec, content, start_ms)?;
        let config = activity.config().clone();
        let arm = config.tracked_arm;
        let mut driver = FrameDriver::new(&config, record.device.posture);
        let mut frames = Vec::new();
        let mut t = start_ms;
        let mut push = |frame: SkeletonFrame, activity: &mut Activity| -> Result<(), ReplayError> {
            for input in driver.inputs(&frame)? {
                if !activity.is_done() {
                    activity.apply(input)?;
                }
            }
            frames.push(frame);
            Ok(())
        };
        let first = match config.interaction_mode {
            InteractionMode::Gestures => SkeletonFrame::neutral(t),
            _ => cursor_frame(t, arm, REST.0, REST.1),
        };
        push(first, &mut activity)?;
        while !activity.is_done() {
            let plan: Vec<(f64, f64)> = match config.interaction_mode {
                InteractionMode::Gestures => {
                    let side = match spec.kind {
                        ActivityKind::Laterality(side) => side,
                        ActivityKind::ConceptAssociation(_) => {
                            let st = activity.state();
                            let first_option = st.elements.iter().find(|e| e.role == ElementRole::Option);
                            if first_option.map(|e| &e.id) == st.prompt_target_id.as_ref() {
                                Side::Left
                            } else {
                                Side::Right
                            }
                        }
                    };
                    for frame in raise_frames(side, t + FRAME_STEP_MS, FRAME_STEP_MS) {
                        t = frame.timestamp_ms;
                        push(frame, &mut activity)?;
                    }
                    continue;
                }
                InteractionMode::Collision => match spec.kind {
                    ActivityKind::Laterality(_) => vec![element_pos(&activity, BALL_ID), REST],
                    ActivityKind::ConceptAssociation(_) => {
                        let target = activity.state().prompt_target_id.clone().expect("prompt");
                        vec![element_pos(&activity, &target), REST]
                    }
                },
                InteractionMode::DragAndDrop => match spec.kind {
                    ActivityKind::Laterality(_) => {
                        vec![element_pos(&activity, BALL_ID), element_pos(&activity, BASKET_ID), REST]
                    }
                    ActivityKind::ConceptAssociation(_) => {
                        let st = activity.state();
                        let option = st.elements.iter().find(|e| e.role == ElementRole::Option).expect("option");
                        let target = content
                            .items
                            .iter()
                            .find(|i| i.option_id == option.id)
                            .expect("option comes from content")
                            .matches_target_id
                            .clone();
                        vec![(option.u, option.v), element_pos(&activity, &target), REST]
                    }
                },
            };
            let repetition = activity.state().repetition_index;
            for (u, v) in plan {
                t += FRAME_STEP_MS;
                push(cursor_frame(t, arm, u, v), &mut activity)?;
                // Hold still until a pending selection commits.
                while matches!(activity.state().phase, Phase::ConfirmWindow { .. }) {
                    t += FRAME_STEP_MS;
                    push(cursor_frame(t, arm, u, v), &mut activity)?;
                }
                if activity.is_done() || activity.state().repetition_index != repetition {
                    break;
                }
            }
        }
        Ok(Trace::new(frames)?)
    }
}

#[cfg(test)]
mod tests {
    use super::script::*;
    use super::*;
    use crate::activity::{ActivityKind, CONFIRM_WINDOW_MS};
    use crate::content::Topic;
    use crate::models::{ArmMobility, DeviceInteractionModel, Disability, LateralityProblem, Sex, UserProfile};
    use crate::skeleton::save_trace;

    fn record(disability: Disability, laterality: LateralityProblem, posture: Posture) -> ProfileRecord {
        ProfileRecord {
            profile: UserProfile {
                id: ProfileId::new("u1"),
                full_name: "Replay User".into(),
                age: 9,
                sex: Sex::Other,
                laterality,
                disability,
            },
            device: DeviceInteractionModel {
                posture,
                rgb_camera_active: false,
                depth_distance: 2.0,
                arm_mobility: ArmMobility::BothArms { dominant: Side::Right },
            },
        }
    }

    #[test]
    fn ten_laterality_repetitions_from_geometry() {
        let rec = record(Disability::Visual, LateralityProblem::CannotRecognizeRight, Posture::Standing);
        let mut frames = vec![cursor_frame(0, Side::Right, REST.0, REST.1)];
        let mut t = 0;
        for _ in 0..10 {
            for k in 0..4 {
                t += 300;
                frames.push(cursor_frame(t, Side::Right, 0.5 + 0.1 * k as f64, 0.5));
                t += 300;
                frames.push(cursor_frame(t, Side::Right, REST.0, REST.1));
            }
        }
        let trace = Trace::new(frames).unwrap();
        let log = replay(
            &rec,
            ActivitySpec::new(ActivityKind::Laterality(Side::Right)),
            &Content::builtin(),
            &trace,
            SessionMeta::default(),
        )
        .unwrap();
        assert_eq!(log.results.len(), 10);
        assert!(log.results.iter().all(|r| r.errors == 0));
        assert!(!log.incomplete);
    }

    #[test]
    fn gesture_raises_complete_hearing_concept() {
        let rec = record(Disability::Hearing, LateralityProblem::None, Posture::Standing);
        let spec = ActivitySpec::new(ActivityKind::ConceptAssociation(Topic::Animals));
        let trace = autoplay(&rec, spec, &Content::builtin(), 0).unwrap();
        let log = replay(&rec, spec, &Content::builtin(), &trace, SessionMeta::default()).unwrap();
        assert_eq!(log.results.len(), 10);
        assert!(log.results.iter().all(|r| r.errors == 0));
    }

    #[test]
    fn truncated_trace_is_incomplete() {
        let rec = record(Disability::Physical, LateralityProblem::None, Posture::Seated);
        let spec = ActivitySpec::new(ActivityKind::ConceptAssociation(Topic::Vehicles));
        let trace = autoplay(&rec, spec, &Content::builtin(), 1000).unwrap();
        let full = replay(&rec, spec, &Content::builtin(), &trace, SessionMeta::default()).unwrap();
        assert_eq!(full.results.len(), 10);
        assert!(full.results.iter().all(|r| r.duration_seconds * 1000 + 500 >= CONFIRM_WINDOW_MS));
        let half = Trace::new(trace.frames()[..trace.len() / 2].to_vec()).unwrap();
        let log = replay(&rec, spec, &Content::builtin(), &half, SessionMeta::default()).unwrap();
        assert!(log.incomplete);
        assert!(!log.results.is_empty() && log.results.len() < 10);
        assert_eq!(log.results[..], full.results[..log.results.len()]);
    }

    #[test]
    fn every_variant_autoplays() {
        let kinds = [
            ActivityKind::ConceptAssociation(Topic::Animals),
            ActivityKind::Laterality(Side::Left),
        ];
        for d in Disability::ALL {
            for posture in [Posture::Standing, Posture::Seated] {
                for kind in kinds {
                    let rec = record(d, LateralityProblem::CannotRecognizeLeft, posture);
                    let spec = ActivitySpec::new(kind);
                    let trace = autoplay(&rec, spec, &Content::builtin(), 0).unwrap();
                    let log = replay(&rec, spec, &Content::builtin(), &trace, SessionMeta::default()).unwrap();
                    assert_eq!(log.results.len(), 10, "{d:?} {posture:?} {kind}");
                    assert!(log.results.iter().all(|r| r.errors == 0), "{d:?} {kind}");
                }
            }
        }
    }

    #[test]
    fn replay_from_store_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let store = DataStore::open(dir.path()).unwrap();
        let rec = record(Disability::Autism, LateralityProblem::None, Posture::Standing);
        store.add_profile(rec.clone()).unwrap();
        let spec = ActivitySpec::new(ActivityKind::ConceptAssociation(Topic::Animals));
        let trace = autoplay(&rec, spec, &Content::builtin(), 0).unwrap();
        let path = store.traces_dir().join("t.jsonl");
        save_trace(&trace, File::create(&path).unwrap()).unwrap();
        let id = ProfileId::new("u1");
        let a = run_replay(&store, &id, spec, &path, SessionMeta::default()).unwrap();
        let b = run_replay(&store, &id, spec, &path, SessionMeta::default()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(matches!(
            run_replay(&store, &ProfileId::new("nobody"), spec, &path, SessionMeta::default()),
            Err(ReplayError::UnknownProfile(_))
        ));
    }

    #[test]
    fn empty_trace_gives_empty_incomplete_log() {
        let rec = record(Disability::Visual, LateralityProblem::None, Posture::Standing);
        let spec = ActivitySpec::new(ActivityKind::ConceptAssociation(Topic::Animals));
        let log = replay(&rec, spec, &Content::builtin(), &Trace::default(), SessionMeta::default()).unwrap();
        assert!(log.incomplete && log.results.is_empty());
    }
}
