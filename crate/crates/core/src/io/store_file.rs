//! Aspect store persistence: one line per domain,
//! `domain-id<TAB>aspect1<US>aspect2…` with `<US>` = 0x1F.

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::lifelong::AspectStore;

pub const UNIT_SEPARATOR: char = '\u{1F}';

fn check(s: &str, what: &str) -> Result<()> {
    if s.is_empty() || s.contains(['\t', '\n', '\r', UNIT_SEPARATOR]) {
        return Err(Error::contract(format!("{what} {s:?} cannot be stored")));
    }
    Ok(())
}

pub fn format_store(store: &AspectStore) -> Result<String> {
    let mut out = String::new();
    for (domain, aspects) in store.entries() {
        check(domain, "domain id")?;
        out.push_str(domain);
        out.push('\t');
        for (i, a) in aspects.iter().enumerate() {
            check(a, "aspect")?;
            if i > 0 {
                out.push(UNIT_SEPARATOR);
            }
            out.push_str(a);
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_store(text: &str) -> Result<AspectStore> {
    let mut store = AspectStore::new();
    for (i, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() {
            continue;
        }
        let (domain, rest) = line
            .split_once('\t')
            .ok_or_else(|| Error::Load(format!("store line {}: missing tab after domain id", i + 1)))?;
        if domain.is_empty() || rest.contains('\t') {
            return Err(Error::Load(format!("store line {}: malformed entry", i + 1)));
        }
        let aspects: BTreeSet<String> = if rest.is_empty() {
            BTreeSet::new()
        } else {
            rest.split(UNIT_SEPARATOR).map(str::to_string).collect()
        };
        if aspects.iter().any(String::is_empty) {
            return Err(Error::Load(format!("store line {}: empty aspect", i + 1)));
        }
        store
            .insert(domain, aspects)
            .map_err(|e| Error::Load(format!("store line {}: {e}", i + 1)))?;
    }
    Ok(store)
}

/// A missing file is an empty store.
pub fn read_store(path: &Path) -> Result<AspectStore> {
    match std::fs::read(path) {
        Ok(bytes) => {
            let text = String::from_utf8(bytes)
                .map_err(|_| Error::Load(format!("{} is not valid UTF-8", path.display())))?;
            parse_store(&text)
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(AspectStore::new()),
        Err(e) => Err(Error::io(path, e)),
    }
}

pub fn write_store(store: &AspectStore, path: &Path) -> Result<()> {
    let text = format_store(store)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
