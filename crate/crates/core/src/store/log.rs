use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use super::record::{Record, MAX_ID, RECORD_SIZE};
use crate::error::{Error, Result};
use crate::pareto::SolutionId;

/// Appends are buffered up to this many bytes before hitting the file.
const WRITE_BUFFER: usize = 1 << 20;

enum Backend {
    Memory(Vec<u8>),
    File {
        file: File,
        path: PathBuf,
        pending: Vec<u8>,
        flushed: u64,
    },
}

/// Append-only provenance log; record `k` lives at byte offset `16k`.
pub struct ProvenanceLog {
    backend: Backend,
    len: u64,
}

impl ProvenanceLog {
    pub fn in_memory() -> Self {
        ProvenanceLog {
            backend: Backend::Memory(Vec::new()),
            len: 0,
        }
    }

    /// Create (truncating) a log file.
    pub fn create(path: &Path) -> Result<Self> {
        let file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        Ok(ProvenanceLog {
            backend: Backend::File {
                file,
                path: path.to_path_buf(),
                pending: Vec::new(),
                flushed: 0,
            },
            len: 0,
        })
    }

    /// Open an existing log file.
    pub fn open(path: &Path) -> Result<Self> {
        let file = OpenOptions::new()
            .read(true)
            .write(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        let bytes = file.metadata().map_err(|e| Error::io(path, e))?.len();
        if bytes % RECORD_SIZE as u64 != 0 {
            return Err(Error::Store(format!(
                "{}: size {bytes} is not a multiple of {RECORD_SIZE}",
                path.display()
            )));
        }
        Ok(ProvenanceLog {
            backend: Backend::File {
                file,
                path: path.to_path_buf(),
                pending: Vec::new(),
                flushed: bytes,
            },
            len: bytes / RECORD_SIZE as u64,
        })
    }

    /// Number of records.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn byte_len(&self) -> u64 {
        self.len * RECORD_SIZE as u64
    }

    pub fn append(&mut self, rec: &Record) -> Result<SolutionId> {
        let id = self.len;
        if id > MAX_ID {
            return Err(Error::Store("provenance log id space exhausted".into()));
        }
        debug_assert!(rec.check_refs(id).is_ok(), "{rec:?} at {id}");
        let bytes = rec.encode(false);
        match &mut self.backend {
            Backend::Memory(buf) => buf.extend_from_slice(&bytes),
            Backend::File { pending, .. } => {
                pending.extend_from_slice(&bytes);
                if pending.len() >= WRITE_BUFFER {
                    self.flush()?;
                }
            }
        }
        self.len += 1;
        Ok(id)
    }

    pub fn flush(&mut self) -> Result<()> {
        if let Backend::File {
            file,
            path,
            pending,
            flushed,
        } = &mut self.backend
        {
            if !pending.is_empty() {
                file.seek(SeekFrom::Start(*flushed)).map_err(|e| Error::io(&*path, e))?;
                file.write_all(pending).map_err(|e| Error::io(&*path, e))?;
                *flushed += pending.len() as u64;
                pending.clear();
            }
            file.flush().map_err(|e| Error::io(&*path, e))?;
        }
        Ok(())
    }

    pub fn read_raw(&mut self, id: SolutionId) -> Result<[u8; RECORD_SIZE]> {
        if id >= self.len {
            return Err(Error::DanglingId(id));
        }
        let off = id as usize * RECORD_SIZE;
        let mut out = [0u8; RECORD_SIZE];
        match &mut self.backend {
            Backend::Memory(buf) => out.copy_from_slice(&buf[off..off + RECORD_SIZE]),
            Backend::File {
                file,
                path,
                pending,
                flushed,
            } => {
                if off as u64 >= *flushed {
                    let p = off - *flushed as usize;
                    out.copy_from_slice(&pending[p..p + RECORD_SIZE]);
                } else {
                    file.seek(SeekFrom::Start(off as u64))
                        .map_err(|e| Error::io(&*path, e))?;
                    file.read_exact(&mut out).map_err(|e| Error::io(&*path, e))?;
                }
            }
        }
        Ok(out)
    }

    pub fn read(&mut self, id: SolutionId) -> Result<(Record, bool)> {
        Ok(Record::decode(&self.read_raw(id)?))
    }

    /// Overwrite record `id` in place.
    pub fn write_at(&mut self, id: SolutionId, rec: &Record, mark: bool) -> Result<()> {
        if id >= self.len {
            return Err(Error::DanglingId(id));
        }
        let bytes = rec.encode(mark);
        let off = id as usize * RECORD_SIZE;
        match &mut self.backend {
            Backend::Memory(buf) => buf[off..off + RECORD_SIZE].copy_from_slice(&bytes),
            Backend::File {
                file,
                path,
                pending,
                flushed,
            } => {
                if off as u64 >= *flushed {
                    let p = off - *flushed as usize;
                    pending[p..p + RECORD_SIZE].copy_from_slice(&bytes);
                } else {
                    file.seek(SeekFrom::Start(off as u64))
                        .map_err(|e| Error::io(&*path, e))?;
                    file.write_all(&bytes).map_err(|e| Error::io(&*path, e))?;
                }
            }
        }
        Ok(())
    }

    /// Drop every record from `n` on.
    pub fn truncate(&mut self, n: u64) -> Result<()> {
        self.flush()?;
        match &mut self.backend {
            Backend::Memory(buf) => buf.truncate(n as usize * RECORD_SIZE),
            Backend::File {
                file, path, flushed, ..
            } => {
                let bytes = n * RECORD_SIZE as u64;
                file.set_len(bytes).map_err(|e| Error::io(&*path, e))?;
                *flushed = bytes;
            }
        }
        self.len = self.len.min(n);
        Ok(())
    }

    /// Raw log bytes, for tests and golden comparisons.
    pub fn to_bytes(&mut self) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(self.byte_len() as usize);
        for id in 0..self.len {
            out.extend_from_slice(&self.read_raw(id)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::EMPTY;

    fn exercise(log: &mut ProvenanceLog) {
        assert_eq!(
            log.append(&Record::Introduce {
                base: EMPTY,
                element: 1
            })
            .unwrap(),
            0
        );
        assert_eq!(log.append(&Record::Introduce { base: 0, element: 2 }).unwrap(), 1);
        assert_eq!(log.append(&Record::Join { left: 0, right: 1 }).unwrap(), 2);
        assert_eq!(log.byte_len(), 48);
        assert_eq!(log.read(2).unwrap(), (Record::Join { left: 0, right: 1 }, false));
        log.flush().unwrap();
        log.write_at(1, &Record::Introduce { base: 0, element: 2 }, true)
            .unwrap();
        assert!(log.read(1).unwrap().1);
        assert!(matches!(log.read(3), Err(Error::DanglingId(3))));
        log.truncate(1).unwrap();
        assert_eq!(log.len(), 1);
    }

    #[test]
    fn memory_log() {
        exercise(&mut ProvenanceLog::in_memory());
    }

    #[test]
    fn file_log_matches_memory_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("origin.bin");
        let mut f = ProvenanceLog::create(&path).unwrap();
        exercise(&mut f);
        f.flush().unwrap();
        let mut m = ProvenanceLog::in_memory();
        exercise(&mut m);
        assert_eq!(f.to_bytes().unwrap(), m.to_bytes().unwrap());
        assert_eq!(std::fs::read(&path).unwrap(), m.to_bytes().unwrap());
        let mut reopened = ProvenanceLog::open(&path).unwrap();
        assert_eq!(reopened.len(), 1);
        assert_eq!(
            reopened.read(0).unwrap().0,
            Record::Introduce {
                base: EMPTY,
                element: 1
            }
        );
    }

    #[test]
    fn record_k_at_offset_16k() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("origin.bin");
        let mut f = ProvenanceLog::create(&path).unwrap();
        for k in 0..5 {
            f.append(&Record::Introduce {
                base: EMPTY,
                element: k,
            })
            .unwrap();
        }
        f.flush().unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes.len(), 80);
        assert_eq!(&bytes[3 * 16 + 8..4 * 16], &3u64.to_le_bytes());
    }
}
