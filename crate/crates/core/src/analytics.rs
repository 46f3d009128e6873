//! Session logs and the evaluation arithmetic run over them: per-user time
//! statistics, group time curves and group error means, plus text and JSON
//! report rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::activity::{ActivityKind, RepetitionResult};
use crate::models::{Disability, ProfileId};

pub const SESSIONS_PER_ITERATION: u32 = 3;
pub const REPETITIONS_PER_SESSION: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionLog {
    pub user_id: ProfileId,
    pub disability: Disability,
    pub iteration: u32,
    pub session_index: u32,
    pub activity_kind: ActivityKind,
    pub results: Vec<RepetitionResult>,
    #[serde(default)]
    pub incomplete: bool,
}

impl SessionLog {
    pub fn total_errors(&self) -> u32 {
        self.results.iter().map(|r| r.errors).sum()
    }

    fn duration_of(&self, repetition: u32) -> Option<u64> {
        self.results
            .iter()
            .find(|r| r.repetition_index == repetition)
            .map(|r| r.duration_seconds)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("no values to summarize")]
    EmptyInput,
    #[error("value {0} is negative or not finite")]
    InvalidValue(f64),
    #[error("no data for user {user}, session {session}, repetition {repetition}")]
    MissingData {
        user: String,
        session: u32,
        repetition: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DescriptiveStats {
    pub mean: f64,
    pub sample_sd: f64,
    pub cv: f64,
}

/// Mean, sample standard deviation (n−1) and coefficient of variation.
/// The CV is 0 for a single value or a zero mean.
pub fn descriptive_stats(values: &[f64]) -> Result<DescriptiveStats, AnalyticsError> {
    if values.is_empty() {
        return Err(AnalyticsError::EmptyInput);
    }
    if let Some(&bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(AnalyticsError::InvalidValue(bad));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok(DescriptiveStats {
            mean,
            sample_sd: 0.0,
            cv: 0.0,
        });
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let sample_sd = (ss / (n - 1.0)).sqrt();
    let cv = if mean > 0.0 { sample_sd / mean } else { 0.0 };
    Ok(DescriptiveStats { mean, sample_sd, cv })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UserStats {
    pub user_id: ProfileId,
    pub disability: Disability,
    pub iteration: u32,
    pub stats: DescriptiveStats,
}

/// Users appearing in the iteration, in first-seen order, with their disability.
fn users_in(logs: &[SessionLog], iteration: u32) -> Vec<(ProfileId, Disability)> {
    let mut users: Vec<(ProfileId, Disability)> = Vec::new();
    for log in logs.iter().filter(|l| l.iteration == iteration) {
        if !users.iter().any(|(u, _)| *u == log.user_id) {
            users.push((log.user_id.clone(), log.disability));
        }
    }
    users
}

fn session<'a>(logs: &'a [SessionLog], user: &ProfileId, iteration: u32, s: u32) -> Option<&'a SessionLog> {
    logs.iter()
        .find(|l| l.iteration == iteration && l.session_index == s && l.user_id == *user)
}

/// Statistics over every repetition time a user logged in an iteration,
/// sessions in order.
pub fn user_stats(logs: &[SessionLog], iteration: u32) -> Result<Vec<UserStats>, AnalyticsError> {
    let users = users_in(logs, iteration);
    if users.is_empty() {
        return Err(AnalyticsError::EmptyInput);
    }
    users
        .into_iter()
        .map(|(user, disability)| {
            let mut values = Vec::new();
            for s in 1..=SESSIONS_PER_ITERATION {
                if let Some(log) = session(logs, &user, iteration, s) {
                    values.extend(log.results.iter().map(|r| r.duration_seconds as f64));
                }
            }
            Ok(UserStats {
                stats: descriptive_stats(&values)?,
                user_id: user,
                disability,
                iteration,
            })
        })
        .collect()
}

pub type GroupCurves = [[f64; REPETITIONS_PER_SESSION as usize]; SESSIONS_PER_ITERATION as usize];

/// `curves[s][r]` is the mean over users of repetition `r + 1`'s duration in session `s + 1`.
pub fn group_repetition_means(logs: &[SessionLog], iteration: u32) -> Result<GroupCurves, AnalyticsError> {
    let users = users_in(logs, iteration);
    if users.is_empty() {
        return Err(AnalyticsError::EmptyInput);
    }
    let mut curves = [[0.0; REPETITIONS_PER_SESSION as usize]; SESSIONS_PER_ITERATION as usize];
    for s in 1..=SESSIONS_PER_ITERATION {
        for r in 1..=REPETITIONS_PER_SESSION {
            let mut sum = 0.0;
            for (user, _) in &users {
                let d = session(logs, user, iteration, s)
                    .and_then(|l| l.duration_of(r))
                    .ok_or_else(|| AnalyticsError::MissingData {
                        user: user.to_string(),
                        session: s,
                        repetition: r,
                    })?;
                sum += d as f64;
            }
            curves[(s - 1) as usize][(r - 1) as usize] = sum / users.len() as f64;
        }
    }
    Ok(curves)
}

/// Mean over users of the total errors in each session. Unrounded.
pub fn group_error_means(logs: &[SessionLog], iteration: u32) -> Result<[f64; 3], AnalyticsError> {
    let users = users_in(logs, iteration);
    if users.is_empty() {
        return Err(AnalyticsError::EmptyInput);
    }
    let mut means = [0.0; 3];
    for s in 1..=SESSIONS_PER_ITERATION {
        let mut sum = 0.0;
        for (user, _) in &users {
            let log = session(logs, user, iteration, s).ok_or_else(|| AnalyticsError::MissingData {
                user: user.to_string(),
                session: s,
                repetition: 1,
            })?;
            sum += log.total_errors() as f64;
        }
        means[(s - 1) as usize] = sum / users.len() as f64;
    }
    Ok(means)
}

/// Rounds for presentation only; analytics results stay unrounded.
pub fn round_to(value: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (value * scale).round() / scale
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Table4,
    Timeseries,
    Errors,
}

impl std::str::FromStr for ReportKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table4" => Ok(ReportKind::Table4),
            "timeseries" => Ok(ReportKind::Timeseries),
            "errors" => Ok(ReportKind::Errors),
            other => Err(format!("unknown report {other:?} (expected table4, timeseries or errors)")),
        }
    }
}

pub fn report_json(kind: ReportKind, logs: &[SessionLog], iteration: u32) -> Result<Value, AnalyticsError> {
    Ok(match kind {
        ReportKind::Table4 => json!({
            "report": "table4",
            "iteration": iteration,
            "users": user_stats(logs, iteration)?,
        }),
        ReportKind::Timeseries => json!({
            "report": "timeseries",
            "iteration": iteration,
            "sessions": group_repetition_means(logs, iteration)?,
        }),
        ReportKind::Errors => json!({
            "report": "errors",
            "iteration": iteration,
            "means": group_error_means(logs, iteration)?,
        }),
    })
}

pub fn report_text(kind: ReportKind, logs: &[SessionLog], iteration: u32) -> Result<String, AnalyticsError> {
    let mut out = String::new();
    match kind {
        ReportKind::Table4 => {
            let rows = user_stats(logs, iteration)?;
            let width = rows.iter().map(|r| r.user_id.as_str().len()).max().unwrap_or(4).max(4);
            writeln!(out, "{:<10}  {:<width$}  {:>8}  {:>8}  {:>6}", "disability", "user", "mean", "sd", "cv").unwrap();
            for r in &rows {
                writeln!(
                    out,
                    "{:<10}  {:<width$}  {:>8.2}  {:>8.2}  {:>6.2}",
                    r.disability.to_string(),
                    r.user_id.as_str(),
                    r.stats.mean,
                    r.stats.sample_sd,
                    r.stats.cv
                )
                .unwrap();
            }
        }
        ReportKind::Timeseries => {
            let curves = group_repetition_means(logs, iteration)?;
            write!(out, "{:<10}", "repetition").unwrap();
            for s in 1..=curves.len() {
                write!(out, "  {:>9}", format!("session {s}")).unwrap();
            }
            out.push('\n');
            for r in 0..REPETITIONS_PER_SESSION as usize {
                write!(out, "{:<10}", r + 1).unwrap();
                for curve in &curves {
                    write!(out, "  {:>9.2}", curve[r]).unwrap();
                }
                out.push('\n');
            }
        }
        ReportKind::Errors => {
            let means = group_error_means(logs, iteration)?;
            writeln!(out, "{:<8}  {:>11}  {:>7}", "session", "mean errors", "rounded").unwrap();
            for (s, m) in means.iter().enumerate() {
                writeln!(out, "{:<8}  {:>11.2}  {:>7}", s + 1, m, round_to(*m, 0)).unwrap();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::Topic;
    use proptest::prelude::*;

    fn log(user: &str, s: u32, durations: &[u64], errors: u32) -> SessionLog {
        SessionLog {
            user_id: ProfileId::new(user),
            disability: Disability::Visual,
            iteration: 1,
            session_index: s,
            activity_kind: ActivityKind::ConceptAssociation(Topic::Animals),
            results: durations
                .iter()
                .enumerate()
                .map(|(i, &d)| RepetitionResult {
                    repetition_index: i as u32 + 1,
                    duration_seconds: d,
                    errors: if i == 0 { errors } else { 0 },
                })
                .collect(),
            incomplete: false,
        }
    }

    #[test]
    fn constant_series() {
        let s = descriptive_stats(&[5.0, 5.0, 5.0]).unwrap();
        assert_eq!((s.mean, s.sample_sd, s.cv), (5.0, 0.0, 0.0));
    }

    #[test]
    fn two_points() {
        let s = descriptive_stats(&[10.0, 14.0]).unwrap();
        assert_eq!(s.mean, 12.0);
        assert!((s.sample_sd - 8f64.sqrt()).abs() < 1e-12);
        assert!((s.cv - 8f64.sqrt() / 12.0).abs() < 1e-12);
    }

    #[test]
    fn single_and_empty() {
        assert_eq!(descriptive_stats(&[]), Err(AnalyticsError::EmptyInput));
        assert_eq!(descriptive_stats(&[3.0]).unwrap().cv, 0.0);
        assert_eq!(descriptive_stats(&[0.0, 0.0]).unwrap().cv, 0.0);
        assert!(matches!(descriptive_stats(&[1.0, -1.0]), Err(AnalyticsError::InvalidValue(_))));
    }

    #[test]
    fn constant_group_curves() {
        let logs: Vec<SessionLog> = ["a", "b"]
            .iter()
            .flat_map(|u| (1..=3).map(move |s| log(u, s, &[7; 10], 0)))
            .collect();
        let curves = group_repetition_means(&logs, 1).unwrap();
        assert!(curves.iter().flatten().all(|&m| m == 7.0));
        assert_eq!(group_error_means(&logs, 1).unwrap(), [0.0; 3]);
    }

    #[test]
    fn missing_data_is_named() {
        let mut logs: Vec<SessionLog> = (1..=3).map(|s| log("a", s, &[7; 10], 0)).collect();
        logs[1].results.truncate(4);
        assert_eq!(
            group_repetition_means(&logs, 1),
            Err(AnalyticsError::MissingData {
                user: "a".into(),
                session: 2,
                repetition: 5
            })
        );
        logs.remove(2);
        assert!(matches!(
            group_error_means(&logs, 1),
            Err(AnalyticsError::MissingData { session: 3, .. })
        ));
    }

    #[test]
    fn error_means_average_session_totals() {
        let logs = vec![
            log("a", 1, &[1; 10], 3),
            log("a", 2, &[1; 10], 0),
            log("a", 3, &[1; 10], 1),
            log("b", 1, &[1; 10], 4),
            log("b", 2, &[1; 10], 1),
            log("b", 3, &[1; 10], 1),
        ];
        assert_eq!(group_error_means(&logs, 1).unwrap(), [3.5, 0.5, 1.0]);
    }

    #[test]
    fn session_log_json_shape() {
        let text = serde_json::to_string(&log("u1", 2, &[4], 1)).unwrap();
        assert_eq!(
            text,
            r#"{"userId":"u1","disability":"Visual","iteration":1,"sessionIndex":2,"activityKind":"concept:animals","results":[{"repetitionIndex":1,"durationSeconds":4,"errors":1}],"incomplete":false}"#
        );
    }

    #[test]
    fn reports_render() {
        let logs: Vec<SessionLog> = (1..=3).map(|s| log("a", s, &[s as u64; 10], s)).collect();
        let text = report_text(ReportKind::Errors, &logs, 1).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("1 "));
        let json = report_json(ReportKind::Timeseries, &logs, 1).unwrap();
        assert_eq!(json["sessions"][2][0], 3.0);
        assert!(report_text(ReportKind::Table4, &logs, 2).is_err());
    }

    proptest! {
        #[test]
        fn scale_equivariance(values in prop::collection::vec(0.5f64..100.0, 2..40), k in 0.1f64..20.0) {
            let a = descriptive_stats(&values).unwrap();
            let scaled: Vec<f64> = values.iter().map(|v| v * k).collect();
            let b = descriptive_stats(&scaled).unwrap();
            prop_assert!((b.mean - a.mean * k).abs() <= 1e-9 * b.mean.max(1.0));
            prop_assert!((b.sample_sd - a.sample_sd * k).abs() <= 1e-9 * b.mean.max(1.0));
            prop_assert!((b.cv - a.cv).abs() <= 1e-9);
        }

        #[test]
        fn group_means_ignore_user_order(
            durations in prop::collection::vec(prop::collection::vec(1u64..90, 30), 1..6),
            seed in any::<u64>(),
        ) {
            let mut logs = Vec::new();
            for (u, d) in durations.iter().enumerate() {
                for s in 0..3 {
                    logs.push(log(&format!("u{u}"), s as u32 + 1, &d[s * 10..s * 10 + 10], (u + s) as u32));
                }
            }
            let a = group_repetition_means(&logs, 1).unwrap();
            let ea = group_error_means(&logs, 1).unwrap();
            let n = logs.len();
            logs.rotate_left((seed as usize) % n);
            logs.reverse();
            let b = group_repetition_means(&logs, 1).unwrap();
            let eb = group_error_means(&logs, 1).unwrap();
            for (x, y) in a.iter().flatten().zip(b.iter().flatten()) {
                prop_assert!((x - y).abs() < 1e-9);
            }
            for (x, y) in ea.iter().zip(&eb) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }
    }
}
