//! Activity state machines: concept association and laterality training.
//!
//! An [`Activity`] is laid out from a derived [`ActivityConfig`] and then
//! driven by timestamped inputs (cursor positions, recognized gestures and
//! clock ticks). Each input yields feedback events and, when a repetition
//! ends, a [`RepetitionResult`]. Everything runs on the input timestamps; no
//! wall clock is read.
//!
//! Geometry is a normalized 2D stage, `u` to the right and `v` downwards.
//! Selection is edge-triggered: an element reacts when the cursor starts to
//! overlap it, not on every frame it stays there.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adaptation::{derive_config, ActivityConfig, Channel, ElementSpacing, InteractionMode, Modality};
use crate::content::{Content, ContentError, ContentItem, Topic};
use crate::gesture::GestureId;
use crate::models::{validate_profile, DeviceInteractionModel, Side, UserProfile};
use crate::skeleton::CursorPosition;

pub const DEFAULT_REPETITIONS: u32 = 10;
/// Time a collision selection stays revisable before it is committed.
pub const CONFIRM_WINDOW_MS: u64 = 2000;

pub const OPTION_RADIUS: f64 = 0.08;
pub const CURSOR_RADIUS: f64 = 0.04;
pub const BALL_RADIUS: f64 = 0.06;
pub const BASKET_RADIUS: f64 = 0.10;
const PROMPT_RADIUS: f64 = 0.06;

/// Factor applied to each element's horizontal offset from the centre under reduced spacing.
pub const REDUCED_SPACING_FACTOR: f64 = 0.5;

// Laterality positions are kept in thousandths of the stage width so shifts
// and goal checks are exact.
const CENTER_MILLI: i64 = 500;
const STEP_STANDARD_MILLI: i64 = 100;
const STEP_REDUCED_MILLI: i64 = 50;
const GOAL_OFFSET_MILLI: i64 = 400;
const BASKET_START_OFFSET_MILLI: i64 = 200;

pub const BALL_ID: &str = "ball";
pub const BASKET_ID: &str = "basket";
pub const PROMPT_ID: &str = "prompt";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActivityKind {
    ConceptAssociation(Topic),
    Laterality(Side),
}

impl fmt::Display for ActivityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActivityKind::ConceptAssociation(t) => write!(f, "concept:{t}"),
            ActivityKind::Laterality(Side::Left) => f.write_str("laterality:left"),
            ActivityKind::Laterality(Side::Right) => f.write_str("laterality:right"),
        }
    }
}

impl FromStr for ActivityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| format!("activity {s:?} is not kind:argument"))?;
        match (kind, arg) {
            ("concept", topic) => Ok(ActivityKind::ConceptAssociation(topic.parse()?)),
            ("laterality", "left") => Ok(ActivityKind::Laterality(Side::Left)),
            ("laterality", "right") => Ok(ActivityKind::Laterality(Side::Right)),
            _ => Err(format!("unknown activity {s:?}")),
        }
    }
}

impl Serialize for ActivityKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ActivityKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActivitySpec {
    pub kind: ActivityKind,
    pub repetitions: u32,
}

impl ActivitySpec {
    pub fn new(kind: ActivityKind) -> Self {
        ActivitySpec {
            kind,
            repetitions: DEFAULT_REPETITIONS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementRole {
    Option,
    Target,
    Ball,
    Basket,
    Prompt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SceneElement {
    pub id: String,
    pub u: f64,
    pub v: f64,
    pub radius: f64,
    pub role: ElementRole,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pictogram_id: Option<String>,
}

impl SceneElement {
    fn distance_to(&self, u: f64, v: f64) -> f64 {
        ((self.u - u).powi(2) + (self.v - v).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Phase {
    AwaitingInput,
    ConfirmWindow { selected_id: String, deadline_ms: u64 },
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeedbackKind {
    Positive,
    Negative,
    SelectionFrame(String),
    Instructions(Modality),
    SceneChanged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackEvent {
    pub kind: FeedbackKind,
    pub modalities: Vec<Channel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RepetitionResult {
    pub repetition_index: u32,
    pub duration_seconds: u64,
    pub errors: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActivityInput {
    CursorMoved { u: f64, v: f64, t_ms: u64 },
    GestureRecognized { gesture: GestureId, t_ms: u64 },
    Tick { t_ms: u64 },
}

impl ActivityInput {
    pub fn t_ms(&self) -> u64 {
        match *self {
            ActivityInput::CursorMoved { t_ms, .. }
            | ActivityInput::GestureRecognized { t_ms, .. }
            | ActivityInput::Tick { t_ms } => t_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ActivityError {
    #[error("profile is invalid: {0}")]
    InvalidProfile(String),
    #[error("laterality activity for the {requested} side does not match the profile ({profile})")]
    SpecMismatch { requested: Side, profile: String },
    #[error("an activity needs at least one repetition")]
    NoRepetitions,
    #[error(transparent)]
    Content(#[from] ContentError),
    #[error("the activity is already done")]
    InputAfterDone,
    #[error("input at {got} ms is earlier than the previous input at {previous} ms")]
    NonMonotonicTimestamp { previous: u64, got: u64 },
}

/// Laterality board, in thousandths of the stage width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LateralityBoard {
    pub ball_milli: i64,
    pub basket_milli: Option<i64>,
    pub goal_milli: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActivityState {
    pub repetition_index: u32,
    pub elements: Vec<SceneElement>,
    pub prompt_target_id: Option<String>,
    pub board: Option<LateralityBoard>,
    pub dragging: Option<String>,
    pub repetition_start_ms: u64,
    pub errors_this_repetition: u32,
    pub phase: Phase,
    pub completed: Vec<RepetitionResult>,
    /// Element currently under the cursor, for edge-triggered reactions.
    pub hover: Option<String>,
    pub last_cursor: Option<CursorPosition>,
    pub clock_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepOutcome {
    pub events: Vec<FeedbackEvent>,
    pub completed: Option<RepetitionResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Activity {
    spec: ActivitySpec,
    config: ActivityConfig,
    pool: Vec<ContentItem>,
    state: ActivityState,
}

fn round_half_up_seconds(ms: u64) -> u64 {
    (ms + 500) / 1000
}

fn spaced(u: f64, spacing: ElementSpacing) -> f64 {
    match spacing {
        ElementSpacing::Standard => u,
        ElementSpacing::Reduced => 0.5 + (u - 0.5) * REDUCED_SPACING_FACTOR,
    }
}

impl Activity {
    /// Derives the config, lays out the first repetition and emits the
    /// opening instructions and scene.
    pub fn start(
        profile: &UserProfile,
        device: &DeviceInteractionModel,
        spec: ActivitySpec,
        content: &Content,
        start_ms: u64,
    ) -> Result<(Activity, Vec<FeedbackEvent>), ActivityError> {
        let check = validate_profile(profile);
        if !check.is_ok() {
            return Err(ActivityError::InvalidProfile(check.to_string()));
        }
        let check = device.validate();
        if !check.is_ok() {
            return Err(ActivityError::InvalidProfile(check.to_string()));
        }
        if spec.repetitions == 0 {
            return Err(ActivityError::NoRepetitions);
        }
        let config = derive_config(profile, device);
        let pool = match spec.kind {
            ActivityKind::Laterality(side) => {
                if profile.laterality.trained_side() != Some(side) {
                    return Err(ActivityError::SpecMismatch {
                        requested: side,
                        profile: format!("{:?}", profile.laterality),
                    });
                }
                Vec::new()
            }
            ActivityKind::ConceptAssociation(topic) => {
                content.validate()?;
                let pool = content.for_topic(topic);
                let needed = option_count(config.interaction_mode);
                if pool.len() < needed {
                    return Err(ContentError::NotEnoughItems {
                        topic,
                        available: pool.len(),
                        needed,
                    }
                    .into());
                }
                pool
            }
        };
        let mut activity = Activity {
            spec,
            config,
            pool,
            state: ActivityState {
                repetition_index: 1,
                elements: Vec::new(),
                prompt_target_id: None,
                board: None,
                dragging: None,
                repetition_start_ms: start_ms,
                errors_this_repetition: 0,
                phase: Phase::AwaitingInput,
                completed: Vec::new(),
                hover: None,
                last_cursor: None,
                clock_ms: start_ms,
            },
        };
        let mut events = Vec::new();
        activity.begin_repetition(1, start_ms, &mut events);
        Ok((activity, events))
    }

    pub fn config(&self) -> &ActivityConfig {
        &self.config
    }

    pub fn spec(&self) -> &ActivitySpec {
        &self.spec
    }

    pub fn state(&self) -> &ActivityState {
        &self.state
    }

    pub fn is_done(&self) -> bool {
        self.state.phase == Phase::Done
    }

    pub fn results(&self) -> &[RepetitionResult] {
        &self.state.completed
    }

    /// Applies one input. On error the state is left untouched.
    pub fn apply(&mut self, input: ActivityInput) -> Result<StepOutcome, ActivityError> {
        if self.is_done() {
            return Err(ActivityError::InputAfterDone);
        }
        let t = input.t_ms();
        if t < self.state.clock_ms {
            return Err(ActivityError::NonMonotonicTimestamp {
                previous: self.state.clock_ms,
                got: t,
            });
        }
        self.state.clock_ms = t;
        let mut out = StepOutcome::default();

        if let Phase::ConfirmWindow {
            selected_id,
            deadline_ms,
        } = &self.state.phase
        {
            if t >= *deadline_ms {
                let selected = selected_id.clone();
                self.state.phase = Phase::AwaitingInput;
                self.commit_choice(&selected, t, &mut out);
                if self.is_done() {
                    return Ok(out);
                }
            }
        }

        match input {
            ActivityInput::CursorMoved { u, v, .. } => {
                let cursor = CursorPosition::new(u, v);
                self.state.last_cursor = Some(cursor);
                self.on_cursor(cursor, t, &mut out);
            }
            ActivityInput::GestureRecognized { gesture, .. } => self.on_gesture(gesture, t, &mut out),
            ActivityInput::Tick { .. } => {}
        }
        Ok(out)
    }

    fn feedback(&self, kind: FeedbackKind) -> FeedbackEvent {
        let modalities = match &kind {
            FeedbackKind::Positive | FeedbackKind::Negative => self.config.feedback_modality.channels(),
            FeedbackKind::Instructions(m) => m.channels(),
            FeedbackKind::SelectionFrame(_) | FeedbackKind::SceneChanged => vec![Channel::Visual],
        };
        FeedbackEvent { kind, modalities }
    }

    fn begin_repetition(&mut self, index: u32, t: u64, events: &mut Vec<FeedbackEvent>) {
        let st = &mut self.state;
        st.repetition_index = index;
        st.repetition_start_ms = t;
        st.errors_this_repetition = 0;
        st.dragging = None;
        st.phase = Phase::AwaitingInput;
        match self.spec.kind {
            ActivityKind::ConceptAssociation(_) => self.layout_concept(index),
            ActivityKind::Laterality(side) => self.layout_laterality(index, side),
        }
        self.state.hover = self.state.last_cursor.and_then(|c| self.hit(c));
        events.push(self.feedback(FeedbackKind::Instructions(self.config.instruction_modality)));
        events.push(self.feedback(FeedbackKind::SceneChanged));
    }

    fn layout_concept(&mut self, index: u32) {
        let mode = self.config.interaction_mode;
        let k = option_count(mode);
        let n = self.pool.len();
        let offset = (index as usize - 1) % n;
        let items: Vec<ContentItem> = (0..k).map(|i| self.pool[(offset + i) % n].clone()).collect();
        let spacing = self.config.element_spacing;
        let pictograms = self.config.show_pictograms;
        let mut elements = Vec::new();
        let prompt;
        match mode {
            InteractionMode::Gestures | InteractionMode::Collision => {
                let us: &[f64] = if mode == InteractionMode::Gestures {
                    &[0.25, 0.75]
                } else {
                    &[0.15, 0.5, 0.85]
                };
                for (item, &u) in items.iter().zip(us) {
                    elements.push(SceneElement {
                        id: item.option_id.clone(),
                        u: spaced(u, spacing),
                        v: 0.5,
                        radius: OPTION_RADIUS,
                        role: ElementRole::Option,
                        label: Some(item.label.clone()),
                        pictogram_id: pictograms.then(|| item.pictogram_id.clone()),
                    });
                }
                let target = &items[(index as usize - 1) % k];
                prompt = Some(target.option_id.clone());
                elements.insert(
                    0,
                    SceneElement {
                        id: PROMPT_ID.into(),
                        u: 0.5,
                        v: 0.12,
                        radius: PROMPT_RADIUS,
                        role: ElementRole::Prompt,
                        label: Some(target.label.clone()),
                        pictogram_id: None,
                    },
                );
            }
            InteractionMode::DragAndDrop => {
                let vs = [0.25, 0.5, 0.75];
                elements.push(SceneElement {
                    id: PROMPT_ID.into(),
                    u: 0.5,
                    v: 0.08,
                    radius: PROMPT_RADIUS,
                    role: ElementRole::Prompt,
                    label: Some("match".into()),
                    pictogram_id: None,
                });
                for (i, item) in items.iter().enumerate() {
                    elements.push(SceneElement {
                        id: item.option_id.clone(),
                        u: spaced(0.2, spacing),
                        v: vs[i],
                        radius: OPTION_RADIUS,
                        role: ElementRole::Option,
                        label: Some(item.label.clone()),
                        pictogram_id: pictograms.then(|| item.pictogram_id.clone()),
                    });
                }
                for (i, item) in items.iter().enumerate() {
                    elements.push(SceneElement {
                        id: item.matches_target_id.clone(),
                        u: spaced(0.8, spacing),
                        v: vs[(i + 1) % k],
                        radius: OPTION_RADIUS,
                        role: ElementRole::Target,
                        label: None,
                        pictogram_id: pictograms.then(|| item.matches_target_id.clone()),
                    });
                }
                prompt = None;
            }
        }
        self.state.elements = elements;
        self.state.prompt_target_id = prompt;
    }

    fn step_milli(&self) -> i64 {
        match self.config.element_spacing {
            ElementSpacing::Standard => STEP_STANDARD_MILLI,
            ElementSpacing::Reduced => STEP_REDUCED_MILLI,
        }
    }

    fn layout_laterality(&mut self, index: u32, side: Side) {
        let dir = side.sign();
        let goal = CENTER_MILLI + dir * GOAL_OFFSET_MILLI;
        let basket = (self.config.interaction_mode == InteractionMode::DragAndDrop).then(|| {
            let offset = (BASKET_START_OFFSET_MILLI + self.step_milli() * (index as i64 - 1))
                .min(GOAL_OFFSET_MILLI);
            CENTER_MILLI + dir * offset
        });
        self.state.board = Some(LateralityBoard {
            ball_milli: CENTER_MILLI,
            basket_milli: basket,
            goal_milli: goal,
        });
        let mut elements = vec![SceneElement {
            id: BALL_ID.into(),
            u: 0.5,
            v: 0.5,
            radius: BALL_RADIUS,
            role: ElementRole::Ball,
            label: None,
            pictogram_id: None,
        }];
        if let Some(b) = basket {
            elements.push(SceneElement {
                id: BASKET_ID.into(),
                u: b as f64 / 1000.0,
                v: 0.5,
                radius: BASKET_RADIUS,
                role: ElementRole::Basket,
                label: None,
                pictogram_id: None,
            });
        }
        self.state.elements = elements;
        self.state.prompt_target_id = None;
    }

    fn element(&self, id: &str) -> Option<&SceneElement> {
        self.state.elements.iter().find(|e| e.id == id)
    }

    fn element_mut(&mut self, id: &str) -> Option<&mut SceneElement> {
        self.state.elements.iter_mut().find(|e| e.id == id)
    }

    /// The grabbable element under the cursor, nearest first.
    fn hit(&self, c: CursorPosition) -> Option<String> {
        let grabbable = |role: ElementRole| match self.spec.kind {
            ActivityKind::ConceptAssociation(_) => role == ElementRole::Option,
            ActivityKind::Laterality(_) => role == ElementRole::Ball,
        };
        self.state
            .elements
            .iter()
            .filter(|e| grabbable(e.role) && self.state.dragging.as_deref() != Some(e.id.as_str()))
            .map(|e| (e.distance_to(c.u, c.v), e))
            .filter(|(d, e)| *d < CURSOR_RADIUS + e.radius)
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, e)| e.id.clone())
    }

    fn on_cursor(&mut self, c: CursorPosition, t: u64, out: &mut StepOutcome) {
        if self.config.interaction_mode == InteractionMode::Gestures {
            return;
        }
        if self.state.dragging.is_some() {
            self.drag_to(c, t, out);
            return;
        }
        let now = self.hit(c);
        let entered = now.is_some() && now != self.state.hover;
        self.state.hover = now.clone();
        let Some(id) = now.filter(|_| entered) else {
            return;
        };
        match (self.spec.kind, self.config.interaction_mode) {
            (_, InteractionMode::DragAndDrop) => {
                self.state.dragging = Some(id);
                self.drag_to(c, t, out);
            }
            (ActivityKind::ConceptAssociation(_), _) => {
                self.state.phase = Phase::ConfirmWindow {
                    selected_id: id.clone(),
                    deadline_ms: t + CONFIRM_WINDOW_MS,
                };
                out.events.push(self.feedback(FeedbackKind::SelectionFrame(id)));
            }
            (ActivityKind::Laterality(side), _) => {
                self.shift_ball(side, t, out);
                self.state.hover = self.state.last_cursor.and_then(|c| self.hit(c));
            }
        }
    }

    fn drag_to(&mut self, c: CursorPosition, t: u64, out: &mut StepOutcome) {
        let Some(id) = self.state.dragging.clone() else {
            return;
        };
        if let Some(e) = self.element_mut(&id) {
            e.u = c.u;
            e.v = c.v;
        }
        out.events.push(self.feedback(FeedbackKind::SceneChanged));
        let dragged = self.element(&id).cloned().expect("dragged element is on stage");
        match self.spec.kind {
            ActivityKind::Laterality(_) => {
                let basket = self
                    .element(BASKET_ID)
                    .filter(|b| b.distance_to(dragged.u, dragged.v) < dragged.radius + b.radius);
                if basket.is_some() {
                    self.state.dragging = None;
                    self.complete_repetition(t, out);
                }
            }
            ActivityKind::ConceptAssociation(_) => {
                let target = self
                    .state
                    .elements
                    .iter()
                    .filter(|e| e.role == ElementRole::Target)
                    .map(|e| (e.distance_to(dragged.u, dragged.v), e))
                    .filter(|(d, e)| *d < dragged.radius + e.radius)
                    .min_by(|a, b| a.0.total_cmp(&b.0))
                    .map(|(_, e)| e.id.clone());
                let Some(target) = target else {
                    return;
                };
                self.state.dragging = None;
                let correct = self
                    .pool
                    .iter()
                    .any(|i| i.option_id == id && i.matches_target_id == target);
                if correct {
                    self.complete_repetition(t, out);
                } else {
                    self.reject(out);
                    self.return_home(&id);
                    out.events.push(self.feedback(FeedbackKind::SceneChanged));
                    self.state.hover = self.state.last_cursor.and_then(|c| self.hit(c));
                }
            }
        }
    }

    fn return_home(&mut self, id: &str) {
        let index = self.state.repetition_index;
        let saved_hover = self.state.hover.clone();
        let current = std::mem::take(&mut self.state.elements);
        self.layout_concept(index);
        let home = self.element(id).cloned();
        self.state.elements = current;
        if let (Some(home), Some(e)) = (home, self.element_mut(id)) {
            e.u = home.u;
            e.v = home.v;
        }
        self.state.hover = saved_hover;
    }

    fn on_gesture(&mut self, gesture: GestureId, t: u64, out: &mut StepOutcome) {
        if self.config.interaction_mode != InteractionMode::Gestures {
            return;
        }
        match self.spec.kind {
            ActivityKind::ConceptAssociation(_) => {
                let options: Vec<String> = self
                    .state
                    .elements
                    .iter()
                    .filter(|e| e.role == ElementRole::Option)
                    .map(|e| e.id.clone())
                    .collect();
                let chosen = match gesture.side() {
                    Side::Left => options.first(),
                    Side::Right => options.last(),
                };
                if let Some(chosen) = chosen.cloned() {
                    self.commit_choice(&chosen, t, out);
                }
            }
            ActivityKind::Laterality(side) => {
                if gesture.side() == side {
                    self.shift_ball(side, t, out);
                } else {
                    self.reject(out);
                }
            }
        }
    }

    fn shift_ball(&mut self, side: Side, t: u64, out: &mut StepOutcome) {
        let step = self.step_milli();
        let Some(board) = self.state.board.as_mut() else {
            return;
        };
        board.ball_milli = (board.ball_milli + side.sign() * step).clamp(0, 1000);
        let reached = match side {
            Side::Right => board.ball_milli >= board.goal_milli,
            Side::Left => board.ball_milli <= board.goal_milli,
        };
        let u = board.ball_milli as f64 / 1000.0;
        if let Some(ball) = self.element_mut(BALL_ID) {
            ball.u = u;
        }
        out.events.push(self.feedback(FeedbackKind::SceneChanged));
        if reached {
            self.complete_repetition(t, out);
        }
    }

    fn commit_choice(&mut self, selected: &str, t: u64, out: &mut StepOutcome) {
        if self.state.prompt_target_id.as_deref() == Some(selected) {
            self.complete_repetition(t, out);
        } else {
            self.reject(out);
        }
    }

    fn reject(&mut self, out: &mut StepOutcome) {
        self.state.errors_this_repetition += 1;
        out.events.push(self.feedback(FeedbackKind::Negative));
    }

    fn complete_repetition(&mut self, t: u64, out: &mut StepOutcome) {
        out.events.push(self.feedback(FeedbackKind::Positive));
        let result = RepetitionResult {
            repetition_index: self.state.repetition_index,
            duration_seconds: round_half_up_seconds(t - self.state.repetition_start_ms),
            errors: self.state.errors_this_repetition,
        };
        self.state.completed.push(result);
        out.completed = Some(result);
        if self.state.repetition_index >= self.spec.repetitions {
            self.state.phase = Phase::Done;
            self.state.dragging = None;
        } else {
            let next = self.state.repetition_index + 1;
            self.begin_repetition(next, t, &mut out.events);
        }
    }

    /// Checks the structural invariants of the current state.
    pub fn check_invariants(&self) -> Result<(), String> {
        let st = &self.state;
        let reps = self.spec.repetitions;
        if st.repetition_index == 0 || st.repetition_index > reps {
            return Err(format!("repetition index {} out of 1..={reps}", st.repetition_index));
        }
        if st.completed.len() as u32 > reps {
            return Err("more results than repetitions".into());
        }
        if (st.phase == Phase::Done) != (st.completed.len() as u32 == reps) {
            return Err("done iff every repetition completed".into());
        }
        if st.dragging.is_some() && self.config.interaction_mode != InteractionMode::DragAndDrop {
            return Err("dragging outside drag-and-drop mode".into());
        }
        if matches!(st.phase, Phase::ConfirmWindow { .. })
            && self.config.interaction_mode != InteractionMode::Collision
        {
            return Err("confirm window outside collision mode".into());
        }
        for e in &st.elements {
            if !(0.0..=1.0).contains(&e.u) || !(0.0..=1.0).contains(&e.v) {
                return Err(format!("element {} off stage at ({}, {})", e.id, e.u, e.v));
            }
            if e.radius <= 0.0 {
                return Err(format!("element {} has non-positive radius", e.id));
            }
            let wants_pictogram = self.config.show_pictograms
                && matches!(e.role, ElementRole::Option | ElementRole::Target);
            if wants_pictogram != e.pictogram_id.is_some() {
                return Err(format!("element {} pictogram presence is wrong", e.id));
            }
        }
        for (i, r) in st.completed.iter().enumerate() {
            if r.repetition_index != i as u32 + 1 {
                return Err("results out of order".into());
            }
        }
        Ok(())
    }
}

fn option_count(mode: InteractionMode) -> usize {
    match mode {
        InteractionMode::Gestures => 2,
        InteractionMode::Collision | InteractionMode::DragAndDrop => 3,
    }
}
