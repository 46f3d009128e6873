//! File-backed data store.
//!
//! ```text
//! <root>/profiles.json   [{"profile": {...}, "device": {...}}, ...]
//! <root>/content.json    content items (built-in content when absent)
//! <root>/traces/         recorded skeleton traces
//! <root>/sessions.jsonl  one session log per line, append-only
//! ```

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::SessionLog;
use crate::content::{Content, ContentError};
use crate::models::{validate_profile, DeviceInteractionModel, ProfileId, UserProfile};

pub const PROFILES_FILE: &str = "profiles.json";
pub const CONTENT_FILE: &str = "content.json";
pub const SESSIONS_FILE: &str = "sessions.jsonl";
pub const TRACES_DIR: &str = "traces";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub profile: UserProfile,
    pub device: DeviceInteractionModel,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("storage failure at {path}: {reason}")]
    StorageFailure { path: PathBuf, reason: String },
    #[error("{path}:{line}: {reason}")]
    Corrupt { path: PathBuf, line: usize, reason: String },
    #[error("unknown user {0:?}")]
    UnknownUser(String),
    #[error("profile {0:?} already exists")]
    DuplicateProfile(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error(transparent)]
    Content(#[from] ContentError),
}

fn failure(path: &Path) -> impl Fn(std::io::Error) -> StoreError + '_ {
    move |e| StoreError::StorageFailure {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

/// One store per root directory. Writes go through a single lock so
/// concurrent sessions append whole records.
#[derive(Debug)]
pub struct DataStore {
    root: PathBuf,
    writer: Mutex<()>,
}

impl DataStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        let traces = root.join(TRACES_DIR);
        fs::create_dir_all(&traces).map_err(failure(&traces))?;
        Ok(DataStore {
            root,
            writer: Mutex::new(()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn traces_dir(&self) -> PathBuf {
        self.root.join(TRACES_DIR)
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, ()> {
        self.writer.lock().unwrap_or_else(|p| p.into_inner())
    }

    fn read_json<T: for<'de> Deserialize<'de>>(&self, name: &str) -> Result<Option<T>, StoreError> {
        let path = self.root.join(name);
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(failure(&path)(e)),
        };
        serde_json::from_str(&text).map(Some).map_err(|e| StoreError::Corrupt {
            path,
            line: e.line(),
            reason: e.to_string(),
        })
    }

    /// Replaces a whole document through a temporary file and a rename.
    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), StoreError> {
        let path = self.root.join(name);
        let tmp = self.root.join(format!(".{name}.tmp"));
        let mut text = serde_json::to_string_pretty(value).expect("store records serialize");
        text.push('\n');
        let mut file = File::create(&tmp).map_err(failure(&tmp))?;
        file.write_all(text.as_bytes()).map_err(failure(&tmp))?;
        file.sync_all().map_err(failure(&tmp))?;
        fs::rename(&tmp, &path).map_err(failure(&path))
    }

    pub fn profiles(&self) -> Result<Vec<ProfileRecord>, StoreError> {
        Ok(self.read_json(PROFILES_FILE)?.unwrap_or_default())
    }

    pub fn profile(&self, id: &ProfileId) -> Result<Option<ProfileRecord>, StoreError> {
        Ok(self.profiles()?.into_iter().find(|r| r.profile.id == *id))
    }

    fn check(record: &ProfileRecord) -> Result<(), StoreError> {
        for result in [validate_profile(&record.profile), record.device.validate()] {
            if !result.is_ok() {
                return Err(StoreError::InvalidProfile(result.to_string()));
            }
        }
        Ok(())
    }

    pub fn add_profile(&self, record: ProfileRecord) -> Result<(), StoreError> {
        Self::check(&record)?;
        let _guard = self.lock();
        let mut all = self.profiles()?;
        if all.iter().any(|r| r.profile.id == record.profile.id) {
            return Err(StoreError::DuplicateProfile(record.profile.id.to_string()));
        }
        all.push(record);
        self.write_json(PROFILES_FILE, &all)
    }

    pub fn update_profile(&self, record: ProfileRecord) -> Result<(), StoreError> {
        Self::check(&record)?;
        let _guard = self.lock();
        let mut all = self.profiles()?;
        let slot = all
            .iter_mut()
            .find(|r| r.profile.id == record.profile.id)
            .ok_or_else(|| StoreError::UnknownUser(record.profile.id.to_string()))?;
        *slot = record;
        self.write_json(PROFILES_FILE, &all)
    }

    pub fn delete_profile(&self, id: &ProfileId) -> Result<(), StoreError> {
        let _guard = self.lock();
        let mut all = self.profiles()?;
        let before = all.len();
        all.retain(|r| r.profile.id != *id);
        if all.len() == before {
            return Err(StoreError::UnknownUser(id.to_string()));
        }
        self.write_json(PROFILES_FILE, &all)
    }

    /// Stored content, or the built-in set when none has been saved.
    pub fn content(&self) -> Result<Content, StoreError> {
        let content = self.read_json::<Content>(CONTENT_FILE)?.unwrap_or_else(Content::builtin);
        content.validate()?;
        Ok(content)
    }

    pub fn set_content(&self, content: &Content) -> Result<(), StoreError> {
        content.validate()?;
        let _guard = self.lock();
        self.write_json(CONTENT_FILE, content)
    }

    /// Appends one record and syncs it to disk before returning.
    pub fn append_session(&self, log: &SessionLog) -> Result<(), StoreError> {
        if self.profile(&log.user_id)?.is_none() {
            return Err(StoreError::UnknownUser(log.user_id.to_string()));
        }
        let mut line = serde_json::to_string(log).expect("session logs serialize");
        line.push('\n');
        let path = self.root.join(SESSIONS_FILE);
        let _guard = self.lock();
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(failure(&path))?;
        file.write_all(line.as_bytes()).map_err(failure(&path))?;
        file.sync_data().map_err(failure(&path))
    }

    pub fn read_sessions(&self) -> Result<Vec<SessionLog>, StoreError> {
        let path = self.root.join(SESSIONS_FILE);
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(failure(&path)(e)),
        };
        let mut out = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(failure(&path))?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
                path: path.clone(),
                line: i + 1,
                reason: e.to_string(),
            })?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activity::{ActivityKind, RepetitionResult};
    use crate::content::Topic;
    use crate::models::{ArmMobility, Disability, LateralityProblem, Posture, Sex, Side};

    pub(crate) fn record(id: &str) -> ProfileRecord {
        ProfileRecord {
            profile: UserProfile {
                id: ProfileId::new(id),
                full_name: "Test User".into(),
                age: 10,
                sex: Sex::F,
                laterality: LateralityProblem::None,
                disability: Disability::Hearing,
            },
            device: DeviceInteractionModel {
                posture: Posture::Standing,
                rgb_camera_active: true,
                depth_distance: 2.5,
                arm_mobility: ArmMobility::BothArms { dominant: Side::Left },
            },
        }
    }

    fn log(user: &str) -> SessionLog {
        SessionLog {
            user_id: ProfileId::new(user),
            disability: Disability::Hearing,
            iteration: 1,
            session_index: 1,
            activity_kind: ActivityKind::ConceptAssociation(Topic::Vehicles),
            results: vec![RepetitionResult {
                repetition_index: 1,
                duration_seconds: 3,
                errors: 0,
            }],
            incomplete: true,
        }
    }

    #[test]
    fn profile_crud() {
        let dir = tempfile::tempdir().unwrap();
        let store = DataStore::open(dir.path()).unwrap();
        assert!(store.profiles().unwrap().is_empty());
        store.add_profile(record("a")).unwrap();
        store.add_profile(record("b")).unwrap();
        assert!(matches!(store.add_profile(record("a")), Err(StoreError::DuplicateProfile(_))));
        let mut changed = record("b");
        changed.profile.age = 11;
        store.update_profile(changed.clone()).unwrap();
        assert_eq!(store.profile(&ProfileId::new("b")).unwrap(), Some(changed));
        store.delete_profile(&ProfileId::new("a")).unwrap();
        assert_eq!(store.profiles().unwrap().len(), 1);
        assert!(matches!(
            store.delete_profile(&ProfileId::new("a")),
            Err(StoreError::UnknownUser(_))
        ));
        let mut bad = record("c");
        bad.profile.age = 0;
        assert!(matches!(store.add_profile(bad), Err(StoreError::InvalidProfile(_))));
    }

    #[test]
    fn sessions_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = DataStore::open(dir.path()).unwrap();
        store.add_profile(record("u1")).unwrap();
        store.append_session(&log("u1")).unwrap();
        store.append_session(&log("u1")).unwrap();
        assert_eq!(store.read_sessions().unwrap(), vec![log("u1"), log("u1")]);
        assert!(matches!(store.append_session(&log("ghost")), Err(StoreError::UnknownUser(_))));
    }

    #[test]
    fn unwritable_log_is_a_storage_failure() {
        let dir = tempfile::tempdir().unwrap();
        let store = DataStore::open(dir.path()).unwrap();
        store.add_profile(record("u1")).unwrap();
        fs::create_dir(dir.path().join(SESSIONS_FILE)).unwrap();
        assert!(matches!(
            store.append_session(&log("u1")),
            Err(StoreError::StorageFailure { .. })
        ));
    }

    #[test]
    fn corrupt_lines_are_located() {
        let dir = tempfile::tempdir().unwrap();
        let store = DataStore::open(dir.path()).unwrap();
        fs::write(dir.path().join(SESSIONS_FILE), "\n{oops}\n").unwrap();
        assert!(matches!(store.read_sessions(), Err(StoreError::Corrupt { line: 2, .. })));
    }

    #[test]
    fn content_defaults_to_builtin() {
        let dir = tempfile::tempdir().unwrap();
        let store = DataStore::open(dir.path()).unwrap();
        assert_eq!(store.content().unwrap(), Content::builtin());
        let mut c = Content::builtin();
        c.items.truncate(4);
        store.set_content(&c).unwrap();
        assert_eq!(store.content().unwrap(), c);
    }
}
