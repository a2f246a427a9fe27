//! The persistent L-value cache: a sorted CSV with shortest-round-trip float
//! formatting, rewritten atomically so that interrupted and resumed runs
//! converge to byte-identical files.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex64;

use lfam::lvalue::{LValueRecord, Method};
use lfam::ring::Family;

pub const CACHE_HEADER: &str = "family,q,gen_a,gen_b,re_value,im_value,method,trunc_err";

/// Key identifying one cached row: member identity plus method.
pub type CacheKey = (Family, u64, i64, i64, Method);

#[derive(Debug, Default)]
pub struct LValueCache {
    rows: HashMap<CacheKey, LValueRecord>,
}

impl LValueCache {
    /// Load from disk; a missing file is an empty cache, and a torn trailing
    /// line (interrupted writer) is skipped rather than fatal.
    pub fn load(path: &Path) -> Result<LValueCache> {
        let mut cache = LValueCache::default();
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(e).context("reading cache"),
        };
        for line in text.lines().skip(1) {
            if let Some(record) = parse_row(line) {
                cache.insert(record);
            }
        }
        Ok(cache)
    }

    pub fn insert(&mut self, record: LValueRecord) {
        self.rows.insert(
            (record.family, record.conductor, record.gen_a, record.gen_b, record.method),
            record,
        );
    }

    pub fn contains(&self, key: &CacheKey) -> bool {
        self.rows.contains_key(key)
    }

    pub fn get(&self, key: &CacheKey) -> Option<&LValueRecord> {
        self.rows.get(key)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn records(&self, family: Family, method: Method) -> Vec<&LValueRecord> {
        let mut out: Vec<&LValueRecord> = self
            .rows
            .values()
            .filter(|r| r.family == family && r.method == method)
            .collect();
        out.sort_by_key(|r| (r.conductor, r.gen_a, r.gen_b));
        out
    }

    /// Rewrite the whole file in canonical order via tmp-and-rename, so the
    /// bytes are a function of the row set alone.
    pub fn store(&self, path: &Path) -> Result<()> {
        let mut rows: Vec<&LValueRecord> = self.rows.values().collect();
        rows.sort_by_key(|r| {
            (r.family, r.conductor, r.gen_a, r.gen_b, r.method.name())
        });
        let mut buf = String::from(CACHE_HEADER);
        buf.push('\n');
        for r in rows {
            buf.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.family.name(),
                r.conductor,
                r.gen_a,
                r.gen_b,
                r.value.re,
                r.value.im,
                r.method.name(),
                r.truncation_error
            ));
        }
        let tmp = path.with_extension("tmp");
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        let mut f = fs::File::create(&tmp).context("creating cache tmp file")?;
        f.write_all(buf.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path).context("replacing cache file")?;
        Ok(())
    }
}

fn parse_row(line: &str) -> Option<LValueRecord> {
    let mut it = line.split(',');
    let family = Family::parse(it.next()?)?;
    let conductor: u64 = it.next()?.parse().ok()?;
    let gen_a: i64 = it.next()?.parse().ok()?;
    let gen_b: i64 = it.next()?.parse().ok()?;
    let re: f64 = it.next()?.parse().ok()?;
    let im: f64 = it.next()?.parse().ok()?;
    let method = Method::parse(it.next()?)?;
    let truncation_error: f64 = it.next()?.parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some(LValueRecord {
        family,
        conductor,
        gen_a,
        gen_b,
        value: Complex64::new(re, im),
        method,
        truncation_error,
        split_a: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(q: u64, re: f64) -> LValueRecord {
        LValueRecord {
            family: Family::Cubic,
            conductor: q,
            gen_a: 1,
            gen_b: 3,
            value: Complex64::new(re, -0.125),
            method: Method::Afe,
            truncation_error: 1e-10,
            split_a: (q as f64).sqrt(),
        }
    }

    #[test]
    fn roundtrip_preserves_bits() {
        let dir = std::env::temp_dir().join("lfam-cache-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cache.csv");
        let mut cache = LValueCache::default();
        // A value with no short decimal representation.
        cache.insert(record(7, 0.1 + 0.2));
        cache.insert(record(13, 1.0 / 3.0));
        cache.store(&path).unwrap();
        let loaded = LValueCache::load(&path).unwrap();
        assert_eq!(loaded.len(), 2);
        let r = loaded.get(&(Family::Cubic, 7, 1, 3, Method::Afe)).unwrap();
        assert_eq!(r.value.re.to_bits(), (0.1f64 + 0.2).to_bits());
        assert_eq!(r.value.im.to_bits(), (-0.125f64).to_bits());
        // Store again: byte-identical.
        let bytes1 = fs::read(&path).unwrap();
        loaded.store(&path).unwrap();
        let bytes2 = fs::read(&path).unwrap();
        assert_eq!(bytes1, bytes2);
        fs::remove_file(&path).unwrap();
    }

    #[test]
    fn torn_tail_is_skipped() {
        let dir = std::env::temp_dir().join("lfam-cache-test-torn");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cache.csv");
        let mut cache = LValueCache::default();
        cache.insert(record(7, 1.5));
        cache.store(&path).unwrap();
        let mut text = fs::read_to_string(&path).unwrap();
        text.push_str("cubic,13,1,"); // torn row
        fs::write(&path, text).unwrap();
        let loaded = LValueCache::load(&path).unwrap();
        assert_eq!(loaded.len(), 1);
        fs::remove_file(&path).unwrap();
    }

    #[test]
    fn missing_file_is_empty() {
        let cache = LValueCache::load(Path::new("/nonexistent/lfam.csv")).unwrap();
        assert_eq!(cache.len(), 0);
    }
}
