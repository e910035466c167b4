//! Elections on disk: one directory per election holding the instance, the
//! voter credentials, an append-only vote log, and the result once closed.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use parking_lot::{Mutex, RwLock};
use pb_core::model::{
    check_feasibility, effective_bounds, to_canonical_json, validate_vote, EntryRecord,
    LabelPolicy, VoteFix, VoteRecord,
};
use pb_core::{
    solve, GroupId, Instance, InstanceFile, ModelError, SolveMode, SolverConfig, TallyResult, Vote,
    VoterId,
};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

const INSTANCE: &str = "instance.json";
const VOTERS: &str = "voters.json";
const LOG: &str = "log.jsonl";
const RESULT: &str = "result.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Credential {
    pub voter: VoterId,
    pub token: String,
}

/// One line of the vote log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub seq: u64,
    /// Milliseconds since the Unix epoch.
    pub ts: u64,
    pub vote: VoteRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Accepted {
    pub seq: u64,
    pub vote: VoteRecord,
    pub fixes: Vec<VoteFix>,
    /// The same ballot was already on file; nothing was appended.
    pub unchanged: bool,
}

struct Ledger {
    log: File,
    next_seq: u64,
    effective: BTreeMap<VoterId, (u64, Vote)>,
    result: Option<Arc<String>>,
}

pub struct Election {
    pub id: String,
    pub instance: Instance,
    tokens: HashMap<String, VoterId>,
    dir: PathBuf,
    ledger: Mutex<Ledger>,
}

impl Election {
    pub fn is_closed(&self) -> bool {
        self.ledger.lock().result.is_some()
    }

    pub fn voter_for(&self, token: &str) -> Option<VoterId> {
        self.tokens.get(token).copied()
    }

    /// The last accepted ballot of every voter, in voter order.
    pub fn effective_votes(&self) -> Vec<Vote> {
        self.ledger
            .lock()
            .effective
            .values()
            .map(|(_, v)| v.clone())
            .collect()
    }

    pub fn result_json(&self) -> Option<Arc<String>> {
        self.ledger.lock().result.clone()
    }

    pub fn submit(
        &self,
        voter: VoterId,
        entries: BTreeMap<GroupId, EntryRecord>,
    ) -> Result<Accepted, ServiceError> {
        let record = VoteRecord {
            voter,
            weight: 1,
            entries,
        };
        let (vote, fixes) = validate_vote(&self.instance, &record)?;
        let mut ledger = self.ledger.lock();
        if ledger.result.is_some() {
            return Err(ServiceError::Closed(self.id.clone()));
        }
        if let Some((seq, prev)) = ledger.effective.get(&voter) {
            if *prev == vote {
                return Ok(Accepted {
                    seq: *seq,
                    vote: vote.to_record(),
                    fixes,
                    unchanged: true,
                });
            }
        }
        let entry = LogEntry {
            seq: ledger.next_seq,
            ts: now_ms(),
            vote: vote.to_record(),
        };
        let mut line = serde_json::to_string(&entry).expect("log entries serialize");
        line.push('\n');
        ledger.log.write_all(line.as_bytes())?;
        ledger.log.sync_data()?;
        ledger.next_seq += 1;
        ledger.effective.insert(voter, (entry.seq, vote));
        Ok(Accepted {
            seq: entry.seq,
            vote: entry.vote,
            fixes,
            unchanged: false,
        })
    }

    /// Tallies the effective profile and seals the election. A solver
    /// failure leaves it open.
    pub fn close(
        &self,
        mode: SolveMode,
        config: &SolverConfig,
    ) -> Result<Arc<String>, ServiceError> {
        let mut ledger = self.ledger.lock();
        if ledger.result.is_some() {
            return Err(ServiceError::Closed(self.id.clone()));
        }
        let votes: Vec<Vote> = ledger.effective.values().map(|(_, v)| v.clone()).collect();
        let result = solve(&self.instance, &votes, mode, config).map_err(ServiceError::Tally)?;
        let json = Arc::new(result.to_json());
        write_atomic(&self.dir.join(RESULT), json.as_bytes())?;
        ledger.result = Some(json.clone());
        Ok(json)
    }
}

pub struct Store {
    root: PathBuf,
    elections: RwLock<HashMap<String, Arc<Election>>>,
}

impl Store {
    /// Opens `root`, replaying every election found there.
    pub fn open(root: impl Into<PathBuf>) -> Result<Store, ServiceError> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        let mut elections = HashMap::new();
        let mut dirs: Vec<PathBuf> = fs::read_dir(&root)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join(INSTANCE).is_file())
            .collect();
        dirs.sort();
        for dir in dirs {
            let election = load(&dir)?;
            log::info!(
                "replayed election {} ({} voters on file)",
                election.id,
                election.effective_votes().len()
            );
            elections.insert(election.id.clone(), Arc::new(election));
        }
        Ok(Store {
            root,
            elections: RwLock::new(elections),
        })
    }

    pub fn get(&self, id: &str) -> Result<Arc<Election>, ServiceError> {
        self.elections
            .read()
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::NotFound(id.to_string()))
    }

    /// Validates the instance and provisions one credential per voter id.
    pub fn create(
        &self,
        file: &InstanceFile,
        voters: &[VoterId],
    ) -> Result<(Arc<Election>, Vec<Credential>), ServiceError> {
        let instance = Instance::build(file, LabelPolicy::RequireLaminar)?;
        effective_bounds(&instance)?;
        if !check_feasibility(&instance) {
            return Err(ModelError::Infeasible(instance.root_label().id).into());
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(v) = voters.iter().find(|v| !seen.insert(**v)) {
            return Err(ModelError::DuplicateVoter(*v).into());
        }
        let creds: Vec<Credential> = voters
            .iter()
            .map(|&voter| Credential {
                voter,
                token: hex::encode(rand::random::<[u8; 16]>()),
            })
            .collect();

        let mut map = self.elections.write();
        let (id, dir) = loop {
            let id = hex::encode(rand::random::<[u8; 8]>());
            let dir = self.root.join(&id);
            if !map.contains_key(&id) && !dir.exists() {
                break (id, dir);
            }
        };
        fs::create_dir_all(&dir)?;
        write_atomic(&dir.join(VOTERS), to_canonical_json(&creds).as_bytes())?;
        File::create(dir.join(LOG))?;
        // The instance file goes last: its presence marks a complete election.
        write_atomic(
            &dir.join(INSTANCE),
            to_canonical_json(&instance.to_file()).as_bytes(),
        )?;
        let election = Arc::new(load(&dir)?);
        map.insert(id, election.clone());
        Ok((election, creds))
    }
}

fn load(dir: &Path) -> Result<Election, ServiceError> {
    let corrupt = |path: &Path, detail: String| ServiceError::Corrupt {
        path: path.display().to_string(),
        detail,
    };
    let id = dir
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| corrupt(dir, "directory name is not an id".into()))?
        .to_string();
    let ipath = dir.join(INSTANCE);
    let file: InstanceFile = serde_json::from_str(&fs::read_to_string(&ipath)?)
        .map_err(|e| corrupt(&ipath, e.to_string()))?;
    let instance = Instance::build(&file, LabelPolicy::RequireLaminar)
        .map_err(|e| corrupt(&ipath, e.to_string()))?;
    let vpath = dir.join(VOTERS);
    let creds: Vec<Credential> = serde_json::from_str(&fs::read_to_string(&vpath)?)
        .map_err(|e| corrupt(&vpath, e.to_string()))?;
    let tokens = creds.into_iter().map(|c| (c.token, c.voter)).collect();

    let lpath = dir.join(LOG);
    let (effective, next_seq, good_len) = replay(&instance, &lpath)?;
    let log = OpenOptions::new().append(true).open(&lpath)?;
    if log.metadata()?.len() != good_len {
        // A torn final line from an interrupted append.
        log::warn!("{}: dropping incomplete trailing log line", lpath.display());
        log.set_len(good_len)?;
    }
    let rpath = dir.join(RESULT);
    let result = if rpath.is_file() {
        let text = fs::read_to_string(&rpath)?;
        serde_json::from_str::<serde_json::Value>(&text)
            .map_err(|e| corrupt(&rpath, e.to_string()))?;
        Some(Arc::new(text))
    } else {
        None
    };
    Ok(Election {
        id,
        instance,
        tokens,
        dir: dir.to_path_buf(),
        ledger: Mutex::new(Ledger {
            log,
            next_seq,
            effective,
            result,
        }),
    })
}

type Replayed = (BTreeMap<VoterId, (u64, Vote)>, u64, u64);

/// Rebuilds the effective profile; also returns the next sequence number and
/// the byte length of the well-formed prefix of the log.
pub fn replay(instance: &Instance, path: &Path) -> Result<Replayed, ServiceError> {
    let mut effective = BTreeMap::new();
    let mut next_seq = 1;
    let mut good_len = 0u64;
    let mut reader = BufReader::new(File::open(path)?);
    let mut line = String::new();
    loop {
        line.clear();
        let n = reader.read_line(&mut line)?;
        if n == 0 {
            break;
        }
        if !line.ends_with('\n') {
            break;
        }
        let entry: LogEntry =
            serde_json::from_str(line.trim_end()).map_err(|e| ServiceError::Corrupt {
                path: path.display().to_string(),
                detail: format!("line {next_seq}: {e}"),
            })?;
        let (vote, _) =
            validate_vote(instance, &entry.vote).map_err(|e| ServiceError::Corrupt {
                path: path.display().to_string(),
                detail: format!("seq {}: {e}", entry.seq),
            })?;
        effective.insert(vote.voter, (entry.seq, vote));
        next_seq = entry.seq + 1;
        good_len += n as u64;
    }
    Ok((effective, next_seq, good_len))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Parses a stored result back; used by tests and the CLI.
pub fn parse_result(text: &str) -> Result<TallyResult, serde_json::Error> {
    serde_json::from_str(text)
}
