//! Skeleton frames, trace files and the hand-to-cursor mapping.
//!
//! Frames arrive already skeletonized: 25 named joints in sensor camera
//! space (meters, x right, y up, z away from the sensor). A trace file holds
//! one frame per line as a JSON record:
//!
//! ```text
//! {"t":0,"joints":{"Head":[0.0,0.6,2.0],"HandRight":[0.2,0.1,1.9],...}}
//! ```
//!
//! Joints missing from a line are carried forward from the previous frame;
//! the first frame must list all of them.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{Posture, Side};

/// Half-width of the shoulder-centred box mapped onto the screen, in meters.
pub const REACH_M: f64 = 0.5;

macro_rules! joints {
    ($($name:ident),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum JointId {
            $($name),*
        }

        impl JointId {
            pub const ALL: [JointId; 25] = [$(JointId::$name),*];

            pub fn name(self) -> &'static str {
                match self {
                    $(JointId::$name => stringify!($name)),*
                }
            }
        }

        impl FromStr for JointId {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $(stringify!($name) => Ok(JointId::$name),)*
                    other => Err(format!("unknown joint {other:?}")),
                }
            }
        }
    };
}

joints!(
    Head,
    Neck,
    SpineShoulder,
    SpineMid,
    SpineBase,
    ShoulderLeft,
    ShoulderRight,
    ElbowLeft,
    ElbowRight,
    WristLeft,
    WristRight,
    HandLeft,
    HandRight,
    HandTipLeft,
    HandTipRight,
    ThumbLeft,
    ThumbRight,
    HipLeft,
    HipRight,
    KneeLeft,
    KneeRight,
    AnkleLeft,
    AnkleRight,
    FootLeft,
    FootRight,
);

impl JointId {
    pub fn is_upper_body(self) -> bool {
        !matches!(
            self,
            JointId::HipLeft
                | JointId::HipRight
                | JointId::KneeLeft
                | JointId::KneeRight
                | JointId::AnkleLeft
                | JointId::AnkleRight
                | JointId::FootLeft
                | JointId::FootRight
        )
    }

    pub fn hand(side: Side) -> JointId {
        match side {
            Side::Left => JointId::HandLeft,
            Side::Right => JointId::HandRight,
        }
    }

    pub fn shoulder(side: Side) -> JointId {
        match side {
            Side::Left => JointId::ShoulderLeft,
            Side::Right => JointId::ShoulderRight,
        }
    }

    /// The same joint on the other side of the body; centre-line joints map to themselves.
    pub fn mirrored(self) -> JointId {
        use JointId::*;
        match self {
            ShoulderLeft => ShoulderRight,
            ShoulderRight => ShoulderLeft,
            ElbowLeft => ElbowRight,
            ElbowRight => ElbowLeft,
            WristLeft => WristRight,
            WristRight => WristLeft,
            HandLeft => HandRight,
            HandRight => HandLeft,
            HandTipLeft => HandTipRight,
            HandTipRight => HandTipLeft,
            ThumbLeft => ThumbRight,
            ThumbRight => ThumbLeft,
            HipLeft => HipRight,
            HipRight => HipLeft,
            KneeLeft => KneeRight,
            KneeRight => KneeLeft,
            AnkleLeft => AnkleRight,
            AnkleRight => AnkleLeft,
            FootLeft => FootRight,
            FootRight => FootLeft,
            centre => centre,
        }
    }
}

impl fmt::Display for JointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct JointPosition {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl JointPosition {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        JointPosition { x, y, z }
    }

    pub fn offset(self, dx: f64, dy: f64, dz: f64) -> Self {
        JointPosition::new(self.x + dx, self.y + dy, self.z + dz)
    }

    pub fn is_valid(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.z > 0.0
    }
}

impl From<[f64; 3]> for JointPosition {
    fn from(v: [f64; 3]) -> Self {
        JointPosition::new(v[0], v[1], v[2])
    }
}

impl From<JointPosition> for [f64; 3] {
    fn from(p: JointPosition) -> Self {
        [p.x, p.y, p.z]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonFrame {
    #[serde(rename = "t")]
    pub timestamp_ms: u64,
    pub joints: BTreeMap<JointId, JointPosition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("joint {0} is missing from the frame")]
pub struct MissingJoint(pub JointId);

impl SkeletonFrame {
    pub fn joint(&self, id: JointId) -> Result<JointPosition, MissingJoint> {
        self.joints.get(&id).copied().ok_or(MissingJoint(id))
    }

    pub fn is_complete(&self) -> bool {
        self.joints.len() == JointId::ALL.len()
    }

    /// A standing person 2 m from the sensor, arms hanging down. Used to
    /// build synthetic traces.
    pub fn neutral(timestamp_ms: u64) -> Self {
        use JointId::*;
        let z = 2.0;
        let table: [(JointId, f64, f64); 25] = [
            (Head, 0.0, 0.65),
            (Neck, 0.0, 0.52),
            (SpineShoulder, 0.0, 0.45),
            (SpineMid, 0.0, 0.20),
            (SpineBase, 0.0, -0.05),
            (ShoulderLeft, -0.18, 0.42),
            (ShoulderRight, 0.18, 0.42),
            (ElbowLeft, -0.22, 0.15),
            (ElbowRight, 0.22, 0.15),
            (WristLeft, -0.24, -0.08),
            (WristRight, 0.24, -0.08),
            (HandLeft, -0.25, -0.15),
            (HandRight, 0.25, -0.15),
            (HandTipLeft, -0.25, -0.22),
            (HandTipRight, 0.25, -0.22),
            (ThumbLeft, -0.22, -0.16),
            (ThumbRight, 0.22, -0.16),
            (HipLeft, -0.10, -0.08),
            (HipRight, 0.10, -0.08),
            (KneeLeft, -0.10, -0.50),
            (KneeRight, 0.10, -0.50),
            (AnkleLeft, -0.10, -0.90),
            (AnkleRight, 0.10, -0.90),
            (FootLeft, -0.10, -0.95),
            (FootRight, 0.10, -0.95),
        ];
        let joints = table
            .iter()
            .map(|&(id, x, y)| (id, JointPosition::new(x, y, z)))
            .collect();
        SkeletonFrame {
            timestamp_ms,
            joints,
        }
    }

    pub fn with_joint(mut self, id: JointId, pos: JointPosition) -> Self {
        self.joints.insert(id, pos);
        self
    }

    /// Negates x and swaps left/right joints.
    pub fn mirrored(&self) -> Self {
        let joints = self
            .joints
            .iter()
            .map(|(id, p)| (id.mirrored(), JointPosition::new(-p.x, p.y, p.z)))
            .collect();
        SkeletonFrame {
            timestamp_ms: self.timestamp_ms,
            joints,
        }
    }
}

/// Restricts a frame to the joints tracked in the given posture. Seated
/// users are tracked from the hips up; standing users keep every joint.
pub fn filter_joints_for_posture(frame: &SkeletonFrame, posture: Posture) -> SkeletonFrame {
    match posture {
        Posture::Standing => frame.clone(),
        Posture::Seated => SkeletonFrame {
            timestamp_ms: frame.timestamp_ms,
            joints: frame
                .joints
                .iter()
                .filter(|(id, _)| id.is_upper_body())
                .map(|(id, p)| (*id, *p))
                .collect(),
        },
    }
}

/// Normalized screen position, `u` to the right and `v` downwards, clamped to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CursorPosition {
    pub u: f64,
    pub v: f64,
}

impl CursorPosition {
    pub fn new(u: f64, v: f64) -> Self {
        CursorPosition {
            u: u.clamp(0.0, 1.0),
            v: v.clamp(0.0, 1.0),
        }
    }
}

/// Maps the tracked hand into a shoulder-centred reach box: the shoulder
/// sits at the screen centre and `REACH_M` of hand travel spans half the
/// screen. Depth is ignored.
pub fn map_hand_to_cursor(frame: &SkeletonFrame, arm: Side) -> Result<CursorPosition, MissingJoint> {
    let hand = frame.joint(JointId::hand(arm))?;
    let shoulder = frame.joint(JointId::shoulder(arm))?;
    let u = (hand.x - shoulder.x) / REACH_M + 0.5;
    let v = (shoulder.y - hand.y) / REACH_M + 0.5;
    Ok(CursorPosition::new(
        if u.is_nan() { 0.5 } else { u },
        if v.is_nan() { 0.5 } else { v },
    ))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("line {0}: malformed frame record")]
    MalformedLine(usize),
    #[error("line {0}: timestamp does not increase")]
    NonMonotonicTimestamp(usize),
    #[error("first frame does not list every joint")]
    IncompleteFirstFrame,
    #[error("reading trace: {0}")]
    Io(String),
}

/// Ordered frames with strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    frames: Vec<SkeletonFrame>,
}

impl Trace {
    /// Builds a trace from frames, enforcing strictly increasing timestamps.
    /// The reported line number is the 1-based frame index.
    pub fn new(frames: Vec<SkeletonFrame>) -> Result<Self, TraceError> {
        for (i, pair) in frames.windows(2).enumerate() {
            if pair[1].timestamp_ms <= pair[0].timestamp_ms {
                return Err(TraceError::NonMonotonicTimestamp(i + 2));
            }
        }
        Ok(Trace { frames })
    }

    pub fn frames(&self) -> &[SkeletonFrame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn into_frames(self) -> Vec<SkeletonFrame> {
        self.frames
    }

    pub fn mirrored(&self) -> Trace {
        Trace {
            frames: self.frames.iter().map(SkeletonFrame::mirrored).collect(),
        }
    }
}

#[derive(Deserialize)]
struct RawFrame {
    t: u64,
    joints: BTreeMap<String, [f64; 3]>,
}

/// Reads a trace, forward-filling joints a line leaves out. Blank lines are skipped.
pub fn load_trace(source: impl BufRead) -> Result<Trace, TraceError> {
    let mut frames: Vec<SkeletonFrame> = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| TraceError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawFrame =
            serde_json::from_str(&line).map_err(|_| TraceError::MalformedLine(line_no))?;
        let mut joints = match frames.last() {
            Some(prev) => {
                if raw.t <= prev.timestamp_ms {
                    return Err(TraceError::NonMonotonicTimestamp(line_no));
                }
                prev.joints.clone()
            }
            None => BTreeMap::new(),
        };
        for (name, xyz) in raw.joints {
            let id: JointId = name.parse().map_err(|_| TraceError::MalformedLine(line_no))?;
            let pos = JointPosition::from(xyz);
            if !pos.is_valid() {
                return Err(TraceError::MalformedLine(line_no));
            }
            joints.insert(id, pos);
        }
        let frame = SkeletonFrame {
            timestamp_ms: raw.t,
            joints,
        };
        if frames.is_empty() && !frame.is_complete() {
            return Err(TraceError::IncompleteFirstFrame);
        }
        frames.push(frame);
    }
    Ok(Trace { frames })
}

/// Writes every frame in full, one JSON record per line.
pub fn save_trace(trace: &Trace, mut out: impl Write) -> std::io::Result<()> {
    for frame in trace.frames() {
        serde_json::to_writer(&mut out, frame)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn joint_names_round_trip() {
        assert_eq!(JointId::ALL.len(), 25);
        for j in JointId::ALL {
            assert_eq!(j.name().parse::<JointId>().unwrap(), j);
            assert_eq!(j.mirrored().mirrored(), j);
        }
        assert_eq!(JointId::ALL.iter().filter(|j| j.is_upper_body()).count(), 17);
    }

    #[test]
    fn standing_filter_is_identity() {
        let f = SkeletonFrame::neutral(0);
        assert_eq!(filter_joints_for_posture(&f, Posture::Standing), f);
    }

    #[test]
    fn seated_filter_drops_lower_body() {
        let f = SkeletonFrame::neutral(0);
        let seated = filter_joints_for_posture(&f, Posture::Seated);
        assert_eq!(seated.joints.len(), 17);
        assert!(seated.joints.keys().all(|j| j.is_upper_body()));
        assert!(seated.joint(JointId::KneeLeft).is_err());
        assert_eq!(filter_joints_for_posture(&seated, Posture::Seated), seated);
    }

    fn frame_with_hand(dx: f64, dy: f64) -> SkeletonFrame {
        let f = SkeletonFrame::neutral(0);
        let s = f.joints[&JointId::ShoulderRight];
        f.with_joint(JointId::HandRight, s.offset(dx, dy, 0.0))
    }

    #[test]
    fn cursor_examples() {
        let c = map_hand_to_cursor(&frame_with_hand(0.0, 0.0), Side::Right).unwrap();
        assert_eq!((c.u, c.v), (0.5, 0.5));
        let c = map_hand_to_cursor(&frame_with_hand(0.25, 0.0), Side::Right).unwrap();
        assert_eq!((c.u, c.v), (1.0, 0.5));
        let c = map_hand_to_cursor(&frame_with_hand(-1.0, 0.6), Side::Right).unwrap();
        assert_eq!((c.u, c.v), (0.0, 0.0));
    }

    #[test]
    fn cursor_needs_tracked_arm_joints() {
        let mut f = SkeletonFrame::neutral(0);
        f.joints.remove(&JointId::HandLeft);
        assert_eq!(
            map_hand_to_cursor(&f, Side::Left),
            Err(MissingJoint(JointId::HandLeft))
        );
        assert!(map_hand_to_cursor(&f, Side::Right).is_ok());
    }

    fn line(t: u64, joints: &[(JointId, [f64; 3])]) -> String {
        let map: BTreeMap<&str, [f64; 3]> = joints.iter().map(|(j, p)| (j.name(), *p)).collect();
        serde_json::json!({ "t": t, "joints": map }).to_string()
    }

    fn full_line(t: u64) -> String {
        let f = SkeletonFrame::neutral(t);
        serde_json::to_string(&f).unwrap()
    }

    #[test]
    fn load_minimal_trace() {
        let text = format!("{}\n{}\n", full_line(0), line(33, &[]));
        let trace = load_trace(text.as_bytes()).unwrap();
        assert_eq!(trace.len(), 2);
        assert_eq!(trace.frames()[1].joints, trace.frames()[0].joints);
    }

    #[test]
    fn load_forward_fills() {
        let text = format!(
            "{}\n{}\n",
            full_line(0),
            line(33, &[(JointId::HandRight, [0.5, 0.5, 1.5])])
        );
        let trace = load_trace(text.as_bytes()).unwrap();
        let f1 = &trace.frames()[1];
        assert!(f1.is_complete());
        assert_eq!(f1.joints[&JointId::HandRight], JointPosition::new(0.5, 0.5, 1.5));
        assert_eq!(f1.joints[&JointId::Head], trace.frames()[0].joints[&JointId::Head]);
    }

    #[test]
    fn load_rejects_equal_timestamps() {
        let text = format!("{}\n{}\n", full_line(33), line(33, &[]));
        assert_eq!(
            load_trace(text.as_bytes()),
            Err(TraceError::NonMonotonicTimestamp(2))
        );
    }

    #[test]
    fn load_rejects_incomplete_first_frame() {
        let mut f = SkeletonFrame::neutral(0);
        f.joints.remove(&JointId::HandLeft);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(load_trace(text.as_bytes()), Err(TraceError::IncompleteFirstFrame));
    }

    #[test]
    fn load_rejects_garbage() {
        let text = format!("{}\nnot json\n", full_line(0));
        assert_eq!(load_trace(text.as_bytes()), Err(TraceError::MalformedLine(2)));
        let text = format!("{}\n{}\n", full_line(0), line(10, &[]).replace("joints", "j"));
        assert_eq!(load_trace(text.as_bytes()), Err(TraceError::MalformedLine(2)));
        let bad_joint = r#"{"t":5,"joints":{"Tail":[0,0,1]}}"#;
        let text = format!("{}\n{bad_joint}\n", full_line(0));
        assert_eq!(load_trace(text.as_bytes()), Err(TraceError::MalformedLine(2)));
        let bad_z = line(5, &[(JointId::Head, [0.0, 0.0, -1.0])]);
        let text = format!("{}\n{bad_z}\n", full_line(0));
        assert_eq!(load_trace(text.as_bytes()), Err(TraceError::MalformedLine(2)));
    }

    #[test]
    fn empty_source_is_empty_trace() {
        assert!(load_trace("".as_bytes()).unwrap().is_empty());
        assert!(load_trace("\n\n".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn trace_new_checks_order() {
        let frames = vec![SkeletonFrame::neutral(5), SkeletonFrame::neutral(5)];
        assert_eq!(Trace::new(frames), Err(TraceError::NonMonotonicTimestamp(2)));
    }

    fn arb_position() -> impl Strategy<Value = JointPosition> {
        (-3.0f64..3.0, -3.0f64..3.0, 0.01f64..6.0).prop_map(|(x, y, z)| JointPosition::new(x, y, z))
    }

    fn arb_trace() -> impl Strategy<Value = Trace> {
        prop::collection::vec((1u64..500, prop::collection::vec(arb_position(), 25)), 0..8).prop_map(
            |steps| {
                let mut t = 0;
                let frames = steps
                    .into_iter()
                    .map(|(dt, positions)| {
                        t += dt;
                        SkeletonFrame {
                            timestamp_ms: t,
                            joints: JointId::ALL.iter().copied().zip(positions).collect(),
                        }
                    })
                    .collect();
                Trace::new(frames).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn save_then_load_is_identity(trace in arb_trace()) {
            let mut buf = Vec::new();
            save_trace(&trace, &mut buf).unwrap();
            let back = load_trace(buf.as_slice()).unwrap();
            prop_assert_eq!(back, trace);
        }

        #[test]
        fn cursor_is_translation_invariant(
            dx in -0.6f64..0.6, dy in -0.6f64..0.6,
            ox in -5.0f64..5.0, oy in -5.0f64..5.0, oz in -1.0f64..1.0,
        ) {
            let base = frame_with_hand(dx, dy);
            let shifted = SkeletonFrame {
                timestamp_ms: 0,
                joints: base.joints.iter().map(|(j, p)| (*j, p.offset(ox, oy, oz))).collect(),
            };
            let a = map_hand_to_cursor(&base, Side::Right).unwrap();
            let b = map_hand_to_cursor(&shifted, Side::Right).unwrap();
            prop_assert!((a.u - b.u).abs() < 1e-9 && (a.v - b.v).abs() < 1e-9);
        }

        #[test]
        fn cursor_stays_on_screen(hx in -1e6f64..1e6, hy in -1e6f64..1e6, sx in -1e6f64..1e6, sy in -1e6f64..1e6) {
            let f = SkeletonFrame::neutral(0)
                .with_joint(JointId::HandLeft, JointPosition::new(hx, hy, 1.0))
                .with_joint(JointId::ShoulderLeft, JointPosition::new(sx, sy, 1.0));
            let c = map_hand_to_cursor(&f, Side::Left).unwrap();
            prop_assert!((0.0..=1.0).contains(&c.u) && (0.0..=1.0).contains(&c.v));
        }
    }
}
