//! Artifacts are staged in memory and written together. A failed write
//! removes everything the batch had already put in place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::config::Format;

pub struct Staged {
    dir: PathBuf,
    formats: Vec<Format>,
    files: Vec<(String, Vec<u8>)>,
}

impl Staged {
    pub fn new(dir: &Path, formats: &[Format]) -> Self {
        Self {
            dir: dir.to_path_buf(),
            formats: formats.to_vec(),
            files: Vec::new(),
        }
    }

    fn wanted(&self, name: &str) -> bool {
        match Path::new(name).extension().and_then(|e| e.to_str()) {
            Some(ext) => match Format::ALL.iter().find(|f| f.extension() == ext) {
                Some(f) => self.formats.contains(f),
                None => true,
            },
            None => true,
        }
    }

    /// Queues `name` (relative to the output directory). Files whose format
    /// was not requested are dropped.
    pub fn add(&mut self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        let name = name.into();
        if self.wanted(&name) {
            self.files.push((name, bytes.into()));
        }
    }

    pub fn add_json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.add(name, text);
        Ok(())
    }

    #[cfg(test)]
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn commit(self) -> Result<Vec<PathBuf>> {
        let mut done: Vec<PathBuf> = Vec::new();
        for (name, bytes) in &self.files {
            let target = self.dir.join(name);
            if let Err(e) = write_atomic(&target, bytes) {
                for p in &done {
                    let _ = fs::remove_file(p);
                }
                return Err(e);
            }
            done.push(target);
        }
        Ok(done)
    }
}

fn write_atomic(target: &Path, bytes: &[u8]) -> Result<()> {
    let parent = target.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    let file_name = target.file_name().and_then(|n| n.to_str()).unwrap_or("artifact");
    let tmp = parent.join(format!(".{file_name}.partial"));
    let result = (|| -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, target)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("writing {}", target.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_filter_and_commit() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = Staged::new(dir.path(), &[Format::Csv]);
        s.add("a.csv", "x\n");
        s.add("a.svg", "<svg/>");
        s.add("report.md", "# r\n");
        s.add("models/m.json", "{}");
        assert_eq!(s.names().collect::<Vec<_>>(), ["a.csv", "report.md"]);
        s.commit().unwrap();
        assert_eq!(fs::read_to_string(dir.path().join("a.csv")).unwrap(), "x\n");
        assert!(!dir.path().join("a.svg").exists());
    }

    #[test]
    fn failed_batch_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        // a regular file where a directory is needed makes the second write fail
        fs::write(dir.path().join("blocker"), "").unwrap();
        let mut s = Staged::new(dir.path(), &Format::ALL);
        s.add("first.csv", "1\n");
        s.add("blocker/second.csv", "2\n");
        assert!(s.commit().is_err());
        assert!(!dir.path().join("first.csv").exists());
        let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(leftovers, vec![std::ffi::OsString::from("blocker")]);
    }
}
