//! Live-session protocol, independent of the transport.
//!
//! Each line is a JSON object with a `type` field. The client says `hello`
//! with a profile id, `start`s an activity and then streams `pointer`,
//! `gesture` and `tick` messages carrying their own timestamps. The server
//! answers with `config`, `scene`, `selection`, `feedback`, `progress`,
//! `done` and `error` messages. No wall clock is read, so the same input
//! lines always produce the same output lines.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::activity::{Activity, ActivityInput, ActivityKind, ActivitySpec, FeedbackKind, SceneElement, DEFAULT_REPETITIONS};
use crate::adaptation::{ActivityConfig, Channel};
use crate::analytics::SessionLog;
use crate::gesture::GestureId;
use crate::models::ProfileId;
use crate::replay::{session_log, SessionMeta};
use crate::store::{DataStore, ProfileRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum ClientMessage {
    Hello {
        profile_id: ProfileId,
    },
    Start {
        activity: ActivityKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        repetitions: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        iteration: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        session_index: Option<u32>,
    },
    Pointer {
        u: f64,
        v: f64,
        t: u64,
    },
    Gesture {
        name: GestureId,
        t: u64,
    },
    Tick {
        t: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FeedbackName {
    Positive,
    Negative,
    Instructions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum ServerMessage {
    Config(ActivityConfig),
    Scene {
        elements: Vec<SceneElement>,
        rgb_mirror: bool,
    },
    Selection {
        element_id: String,
    },
    Feedback {
        kind: FeedbackName,
        modalities: Vec<Channel>,
    },
    Progress {
        repetition: u32,
        errors: u32,
    },
    Done {
        summary: SessionLog,
    },
    Error {
        reason: String,
    },
}

impl ServerMessage {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("server messages serialize")
    }

    fn error(reason: impl Into<String>) -> Self {
        ServerMessage::Error { reason: reason.into() }
    }
}

/// One connection's state. Messages must be fed in arrival order.
#[derive(Debug)]
pub struct SessionHandler {
    store: Arc<DataStore>,
    profile: Option<ProfileRecord>,
    activity: Option<Activity>,
    meta: SessionMeta,
    /// Timestamp of the latest client message; the activity starts here.
    clock_ms: u64,
    finished: bool,
}

impl SessionHandler {
    pub fn new(store: Arc<DataStore>) -> Self {
        SessionHandler {
            store,
            profile: None,
            activity: None,
            meta: SessionMeta::default(),
            clock_ms: 0,
            finished: false,
        }
    }

    pub fn activity(&self) -> Option<&Activity> {
        self.activity.as_ref()
    }

    /// Parses and handles one line. Malformed lines get an error reply and
    /// leave the session as it was.
    pub fn handle_line(&mut self, line: &str) -> Vec<ServerMessage> {
        match serde_json::from_str::<ClientMessage>(line) {
            Ok(msg) => self.handle(msg),
            Err(e) => vec![ServerMessage::error(format!("malformed message: {e}"))],
        }
    }

    pub fn handle(&mut self, msg: ClientMessage) -> Vec<ServerMessage> {
        match msg {
            ClientMessage::Hello { profile_id } => self.hello(profile_id),
            ClientMessage::Start {
                activity,
                repetitions,
                iteration,
                session_index,
            } => {
                let spec = ActivitySpec {
                    kind: activity,
                    repetitions: repetitions.unwrap_or(DEFAULT_REPETITIONS),
                };
                let meta = SessionMeta {
                    iteration: iteration.unwrap_or(1),
                    session_index: session_index.unwrap_or(1),
                };
                self.start(spec, meta)
            }
            ClientMessage::Pointer { u, v, t } => {
                if !(u.is_finite() && v.is_finite()) {
                    return vec![ServerMessage::error("pointer coordinates must be finite")];
                }
                self.input(ActivityInput::CursorMoved { u, v, t_ms: t })
            }
            ClientMessage::Gesture { name, t } => self.input(ActivityInput::GestureRecognized { gesture: name, t_ms: t }),
            ClientMessage::Tick { t } => {
                if self.activity.is_none() {
                    if t < self.clock_ms {
                        return vec![ServerMessage::error(format!(
                            "tick at {t} ms is earlier than {} ms",
                            self.clock_ms
                        ))];
                    }
                    self.clock_ms = t;
                    return Vec::new();
                }
                self.input(ActivityInput::Tick { t_ms: t })
            }
        }
    }

    fn hello(&mut self, id: ProfileId) -> Vec<ServerMessage> {
        if self.activity.is_some() {
            return vec![ServerMessage::error("an activity is already running on this connection")];
        }
        match self.store.profile(&id) {
            Ok(Some(record)) => {
                self.profile = Some(record);
                Vec::new()
            }
            Ok(None) => vec![ServerMessage::error(format!("unknown profile {id}"))],
            Err(e) => vec![ServerMessage::error(e.to_string())],
        }
    }

    fn start(&mut self, spec: ActivitySpec, meta: SessionMeta) -> Vec<ServerMessage> {
        let Some(record) = &self.profile else {
            return vec![ServerMessage::error("say hello with a profile id first")];
        };
        if self.activity.is_some() {
            return vec![ServerMessage::error("only one activity per connection")];
        }
        let content = match self.store.content() {
            Ok(c) => c,
            Err(e) => return vec![ServerMessage::error(e.to_string())],
        };
        match Activity::start(&record.profile, &record.device, spec, &content, self.clock_ms) {
            Ok((activity, events)) => {
                let mut out = vec![ServerMessage::Config(activity.config().clone())];
                self.activity = Some(activity);
                self.meta = meta;
                // The opening instructions follow the scene they describe.
                let (scene, rest): (Vec<_>, Vec<_>) =
                    events.into_iter().partition(|e| e.kind == FeedbackKind::SceneChanged);
                self.translate(scene.into_iter().chain(rest), None, &mut out);
                out
            }
            Err(e) => vec![ServerMessage::error(e.to_string())],
        }
    }

    fn input(&mut self, input: ActivityInput) -> Vec<ServerMessage> {
        if self.finished {
            return vec![ServerMessage::error("the activity is already done")];
        }
        let Some(activity) = self.activity.as_mut() else {
            return vec![ServerMessage::error("no activity has been started")];
        };
        let outcome = match activity.apply(input) {
            Ok(o) => o,
            Err(e) => return vec![ServerMessage::error(e.to_string())],
        };
        self.clock_ms = input.t_ms();
        let mut out = Vec::new();
        self.translate(outcome.events.into_iter(), outcome.completed, &mut out);
        let activity = self.activity.as_ref().expect("activity present");
        if activity.is_done() {
            self.finished = true;
            let record = self.profile.as_ref().expect("profile set before start");
            let log = session_log(record, activity, self.meta);
            if let Err(e) = self.store.append_session(&log) {
                out.push(ServerMessage::error(format!("session not saved: {e}")));
            }
            out.push(ServerMessage::Done { summary: log });
        }
        out
    }

    fn translate(
        &self,
        events: impl Iterator<Item = crate::activity::FeedbackEvent>,
        completed: Option<crate::activity::RepetitionResult>,
        out: &mut Vec<ServerMessage>,
    ) {
        let activity = self.activity.as_ref().expect("activity present");
        let rgb_mirror = self.profile.as_ref().is_some_and(|r| r.device.rgb_camera_active);
        for event in events {
            let msg = match event.kind {
                FeedbackKind::SceneChanged => ServerMessage::Scene {
                    elements: activity.state().elements.clone(),
                    rgb_mirror,
                },
                FeedbackKind::SelectionFrame(id) => ServerMessage::Selection { element_id: id },
                FeedbackKind::Positive | FeedbackKind::Negative | FeedbackKind::Instructions(_) => {
                    let kind = match event.kind {
                        FeedbackKind::Positive => FeedbackName::Positive,
                        FeedbackKind::Negative => FeedbackName::Negative,
                        _ => FeedbackName::Instructions,
                    };
                    let positive = kind == FeedbackName::Positive;
                    out.push(ServerMessage::Feedback {
                        kind,
                        modalities: event.modalities,
                    });
                    if let (true, Some(r)) = (positive, completed) {
                        out.push(ServerMessage::Progress {
                            repetition: r.repetition_index,
                            errors: r.errors,
                        });
                    }
                    continue;
                }
            };
            out.push(msg);
        }
    }
}
