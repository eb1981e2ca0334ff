use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use tdd_core::corpus::{read_documents, write_documents, Cleaner, Corpus, IngestFormat};
use tdd_core::generate::ingest_generated;

/// Writes through a temp file in the destination directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn write_corpus(path: &Path, corpus: &Corpus) -> Result<()> {
    let mut buf = Vec::new();
    write_documents(corpus.docs(), &mut buf)?;
    write_atomic(path, &buf)
}

/// `<path>.<suffix>`, e.g. `report.json.config.json`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

/// Document JSONL as written by `ingest`; `.txt` files are treated as raw
/// generated text, one document per line, and cleaned on the way in.
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    if IngestFormat::from_path(path) == IngestFormat::PlainLines {
        Ok(ingest_generated(
            path,
            IngestFormat::PlainLines,
            "text",
            &Cleaner::default(),
        )?)
    } else {
        Ok(read_documents(path)?)
    }
}

/// Overlays the keys of a JSON config object on the parsed flags.
pub fn resolve<T: Serialize + DeserializeOwned>(args: T, config: Option<&Path>) -> Result<T> {
    let Some(path) = config else { return Ok(args) };
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let overlay: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    let serde_json::Value::Object(overlay) = overlay else {
        anyhow::bail!("config {} must be a JSON object", path.display());
    };
    let mut merged = serde_json::to_value(args)?;
    let fields = merged
        .as_object_mut()
        .expect("arguments serialize to an object");
    for (key, value) in overlay {
        if !fields.contains_key(&key) {
            anyhow::bail!("config {}: unknown key `{key}`", path.display());
        }
        fields.insert(key, value);
    }
    serde_json::from_value(merged).with_context(|| format!("applying config {}", path.display()))
}
