use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{StoreError, Tables};

/// Where the store's tables live between restarts.
pub trait Backend: Send + Sync {
    fn load(&self) -> Result<Tables, StoreError>;
    fn persist(&self, tables: &Tables) -> Result<(), StoreError>;
}

/// Keeps nothing; every store starts empty.
#[derive(Debug, Default)]
pub struct MemoryBackend;

impl Backend for MemoryBackend {
    fn load(&self) -> Result<Tables, StoreError> {
        Ok(Tables::default())
    }

    fn persist(&self, _tables: &Tables) -> Result<(), StoreError> {
        Ok(())
    }
}

/// A single JSON file, replaced atomically on every mutation. A missing file
/// is an empty store; the file is created by the first mutation.
#[derive(Debug, Clone)]
pub struct FileBackend {
    path: PathBuf,
}

impl FileBackend {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        FileBackend { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl Backend for FileBackend {
    fn load(&self) -> Result<Tables, StoreError> {
        match fs::read(&self.path) {
            Ok(bytes) => serde_json::from_slice(&bytes).map_err(|e| {
                StoreError::Corrupt(format!("{}: {e}", self.path.display()))
            }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Tables::default()),
            Err(e) => Err(StoreError::Io(format!("{}: {e}", self.path.display()))),
        }
    }

    fn persist(&self, tables: &Tables) -> Result<(), StoreError> {
        let io = |e: std::io::Error| StoreError::Io(format!("{}: {e}", self.path.display()));
        let bytes = serde_json::to_vec_pretty(tables)
            .map_err(|e| StoreError::Corrupt(e.to_string()))?;
        let mut tmp_name = self.path.file_name().unwrap_or_default().to_os_string();
        tmp_name.push(".tmp");
        let tmp = self.path.with_file_name(tmp_name);
        let mut file = fs::File::create(&tmp).map_err(io)?;
        file.write_all(&bytes).map_err(io)?;
        file.sync_all().map_err(io)?;
        fs::rename(&tmp, &self.path).map_err(io)
    }
}
