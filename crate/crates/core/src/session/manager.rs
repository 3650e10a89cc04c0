use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use super::{ActResult, PublicTrace, Session, SessionConfig, SessionRequest, SessionState, Summary};
use crate::error::{Error, Result};

/// One line of a session's append-only log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LogEvent {
    Create { id: String, config: SessionConfig },
    Commit { t: u64, agent_action: usize },
    Act { seq: u64, action: usize },
    Close,
}

type Shared = Arc<Mutex<Session>>;

/// All sessions of a server. Each session has its own lock, so submits to
/// different sessions never wait on each other.
#[derive(Debug, Default)]
pub struct SessionManager {
    sessions: RwLock<HashMap<String, Shared>>,
    log_dir: Option<PathBuf>,
}

impl SessionManager {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sessions are logged as `<dir>/<id>.jsonl`.
    pub fn with_log_dir(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self {
            sessions: RwLock::default(),
            log_dir: Some(dir),
        })
    }

    /// Rebuilds every logged session by replaying its log. A replayed agent
    /// commitment that differs from the logged one is an error.
    pub fn restore(dir: impl Into<PathBuf>) -> Result<Self> {
        let manager = Self::with_log_dir(dir)?;
        let dir = manager.log_dir.clone().expect("set above");
        let mut entries: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(|e| Error::io(&dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        entries.sort();
        for path in entries {
            let session = replay(&path)?;
            manager.insert(session);
        }
        Ok(manager)
    }

    fn insert(&self, session: Session) {
        let id = session.id().to_string();
        self.sessions
            .write()
            .expect("session map poisoned")
            .insert(id, Arc::new(Mutex::new(session)));
    }

    fn get(&self, id: &str) -> Result<Shared> {
        self.sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| Error::UnknownSession(id.to_string()))
    }

    fn log(&self, id: &str, event: &LogEvent) -> Result<()> {
        let Some(dir) = &self.log_dir else {
            return Ok(());
        };
        let path = dir.join(format!("{id}.jsonl"));
        let line = serde_json::to_string(event).map_err(|e| Error::json(&path, e))?;
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        writeln!(file, "{line}").map_err(|e| Error::io(&path, e))
    }

    pub fn create(&self, request: &SessionRequest) -> Result<SessionState> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let fallback_seed = uuid::Uuid::new_v4().as_u64_pair().0;
        let config = request.resolve(fallback_seed)?;
        let session = Session::new(id.clone(), config.clone())?;
        let state = session.state();
        self.log(&id, &LogEvent::Create { id: id.clone(), config })?;
        self.insert(session);
        Ok(state)
    }

    pub fn act(&self, id: &str, action: usize, seq: u64) -> Result<ActResult> {
        let shared = self.get(id)?;
        let mut session = shared.lock().expect("session poisoned");
        if session.is_terminal() {
            return Err(Error::BudgetExhausted);
        }
        if seq != session.state().seq {
            return Err(Error::StaleSequence {
                expected: session.state().seq,
                got: seq,
            });
        }
        // The agent's action is drawn and logged before `action` is used.
        let (t, agent_action, fresh) = session.commit()?;
        if fresh {
            self.log(id, &LogEvent::Commit { t, agent_action })?;
        }
        let result = session.submit(action, seq)?;
        self.log(id, &LogEvent::Act { seq, action })?;
        Ok(result)
    }

    pub fn state(&self, id: &str) -> Result<SessionState> {
        Ok(self.get(id)?.lock().expect("session poisoned").state())
    }

    pub fn trace(&self, id: &str) -> Result<PublicTrace> {
        Ok(self.get(id)?.lock().expect("session poisoned").public_trace())
    }

    /// Runs `f` on a session; for in-process analysis.
    pub fn with_session<T>(&self, id: &str, f: impl FnOnce(&Session) -> T) -> Result<T> {
        Ok(f(&self.get(id)?.lock().expect("session poisoned")))
    }

    /// Ends the session. It stays readable until [`Self::evict_closed`].
    pub fn close(&self, id: &str) -> Result<Summary> {
        let shared = self.get(id)?;
        let mut session = shared.lock().expect("session poisoned");
        if !session.is_closed() {
            self.log(id, &LogEvent::Close)?;
        }
        session.close()
    }

    /// Drops closed sessions from memory; returns how many were removed.
    pub fn evict_closed(&self) -> usize {
        let mut map = self.sessions.write().expect("session map poisoned");
        let before = map.len();
        map.retain(|_, s| !s.lock().expect("session poisoned").is_closed());
        before - map.len()
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("session map poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn replay(path: &Path) -> Result<Session> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut session: Option<Session> = None;
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let event: LogEvent = serde_json::from_str(&line).map_err(|e| Error::json(path, e))?;
        match (event, session.as_mut()) {
            (LogEvent::Create { id, config }, None) => session = Some(Session::new(id, config)?),
            (LogEvent::Commit { t, agent_action }, Some(s)) => {
                let (rt, ra, _) = s.commit()?;
                if (rt, ra) != (t, agent_action) {
                    return Err(Error::invalid(format!(
                        "{}: replayed step {rt} commits {ra}, log says step {t} commits {agent_action}",
                        path.display()
                    )));
                }
            }
            (LogEvent::Act { seq, action }, Some(s)) => {
                s.submit(action, seq)?;
            }
            (LogEvent::Close, Some(s)) => {
                s.close()?;
            }
            (_, _) => return Err(Error::invalid(format!("{}: malformed session log", path.display()))),
        }
    }
    session.ok_or_else(|| Error::invalid(format!("{}: empty session log", path.display())))
}
