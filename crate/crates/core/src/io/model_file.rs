//! Flat text model format.
//!
//! ```text
//! lcrf-model<TAB>1
//! labels<TAB>O<TAB>B-ASP<TAB>I-ASP
//! templates<TAB>W<TAB>-1W<TAB>+1W<TAB>P<TAB>-1P<TAB>+1P<TAB>G
//! slots<TAB>H
//! config<TAB>l2=1<TAB>tol=0.0001<TAB>max_iters=300<TAB>memory=10
//! ll<TAB>current<TAB>previous<TAB>weight          (|Y|² records)
//! lw<TAB>template<TAB>value<TAB>label<TAB>weight   (one per remaining slot)
//! checksum<TAB>sha256 of every preceding byte
//! ```
//!
//! Records appear in slot order. Weights use 17 significant digits so that
//! loading reproduces them exactly.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::crf::{CrfModel, Feature, FeatureIndex, LabelSet, Template, TrainConfig};
use crate::error::{Error, Result};

const MAGIC: &str = "lcrf-model";
const VERSION: &str = "1";

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn check_field(s: &str) -> Result<()> {
    if s.contains(['\t', '\n', '\r']) {
        return Err(Error::contract(format!("value {s:?} cannot be stored in a model file")));
    }
    Ok(())
}

pub fn format_model(model: &CrfModel) -> Result<String> {
    let labels = model.labels();
    let index = model.index();
    let w = model.weights();
    let cfg = model.config();
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}\t{VERSION}");
    let _ = writeln!(out, "labels\t{}", labels.names().join("\t"));
    let templates: Vec<&str> = Template::ALL.iter().map(|t| t.name()).collect();
    let _ = writeln!(out, "templates\t{}", templates.join("\t"));
    let _ = writeln!(out, "slots\t{}", model.num_slots());
    let _ = writeln!(
        out,
        "config\tl2={}\ttol={}\tmax_iters={}\tmemory={}",
        cfg.l2, cfg.tol, cfg.max_iters, cfg.memory
    );
    let y = labels.len();
    for i in 0..y {
        for j in 0..y {
            let slot = index.transition_slot(i, j);
            let _ = writeln!(out, "ll\t{}\t{}\t{:.16e}", labels.name(i), labels.name(j), w[slot]);
        }
    }
    for (a, feature) in index.attributes().enumerate() {
        check_field(&feature.value)?;
        for l in 0..y {
            let slot = index.attribute_slot(a, l);
            let _ = writeln!(
                out,
                "lw\t{}\t{}\t{}\t{:.16e}",
                feature.template,
                feature.value,
                labels.name(l),
                w[slot]
            );
        }
    }
    let digest = sha256_hex(out.as_bytes());
    let _ = writeln!(out, "checksum\t{digest}");
    Ok(out)
}

pub fn write_model(model: &CrfModel, path: &Path) -> Result<()> {
    let text = format_model(model)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn load_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Load(format!("model line {line}: {msg}"))
}

fn parse_weight(s: &str, line: usize) -> Result<f64> {
    let w: f64 = s.parse().map_err(|_| load_err(line, format!("invalid weight {s:?}")))?;
    if !w.is_finite() {
        return Err(load_err(line, "non-finite weight"));
    }
    Ok(w)
}

fn parse_config(fields: &[&str], line: usize) -> Result<TrainConfig> {
    let mut cfg = TrainConfig::default();
    let mut seen = 0;
    for f in fields {
        let (k, v) = f
            .split_once('=')
            .ok_or_else(|| load_err(line, format!("bad config entry {f:?}")))?;
        let bad = || load_err(line, format!("bad value for {k}"));
        match k {
            "l2" => cfg.l2 = v.parse().map_err(|_| bad())?,
            "tol" => cfg.tol = v.parse().map_err(|_| bad())?,
            "max_iters" => cfg.max_iters = v.parse().map_err(|_| bad())?,
            "memory" => cfg.memory = v.parse().map_err(|_| bad())?,
            _ => return Err(load_err(line, format!("unknown config key {k:?}"))),
        }
        seen += 1;
    }
    if seen != 4 {
        return Err(load_err(line, "config must list l2, tol, max_iters and memory"));
    }
    Ok(cfg)
}

pub fn parse_model(text: &str) -> Result<CrfModel> {
    let body_end = text
        .trim_end_matches('\n')
        .rfind('\n')
        .map(|i| i + 1)
        .ok_or_else(|| Error::Load("model file is truncated".into()))?;
    let (body, trailer) = text.split_at(body_end);
    let expected = trailer
        .trim_end_matches('\n')
        .strip_prefix("checksum\t")
        .ok_or_else(|| Error::Load("model file has no checksum line".into()))?;
    if sha256_hex(body.as_bytes()) != expected {
        return Err(Error::Load("model checksum mismatch".into()));
    }

    let mut lines = body.lines().enumerate().map(|(i, l)| (i + 1, l.split('\t').collect::<Vec<_>>()));
    let mut next = |what: &str| lines.next().ok_or_else(|| Error::Load(format!("model file ends before {what}")));

    let (n, header) = next("header")?;
    if header != [MAGIC, VERSION] {
        return Err(load_err(n, format!("expected header {MAGIC:?} version {VERSION}")));
    }
    let (n, l) = next("labels")?;
    if l.first() != Some(&"labels") {
        return Err(load_err(n, "expected labels"));
    }
    let labels = LabelSet::new(l[1..].iter().copied()).map_err(|e| load_err(n, e))?;
    let (n, t) = next("templates")?;
    let expected_templates: Vec<&str> = std::iter::once("templates")
        .chain(Template::ALL.iter().map(|t| t.name()))
        .collect();
    if t != expected_templates {
        return Err(load_err(n, "template list does not match this version"));
    }
    let (n, s) = next("slots")?;
    let slots: usize = match s.as_slice() {
        ["slots", h] => h.parse().map_err(|_| load_err(n, "bad slot count"))?,
        _ => return Err(load_err(n, "expected slots")),
    };
    let (n, c) = next("config")?;
    if c.first() != Some(&"config") {
        return Err(load_err(n, "expected config"));
    }
    let config = parse_config(&c[1..], n)?;

    let y = labels.len();
    let mut index = FeatureIndex::new(y);
    let mut weights = vec![0.0; slots.max(y * y)];
    for i in 0..y {
        for j in 0..y {
            let (n, r) = next("transition records")?;
            match r.as_slice() {
                ["ll", cur, prev, w] if *cur == labels.name(i) && *prev == labels.name(j) => {
                    weights[index.transition_slot(i, j)] = parse_weight(w, n)?;
                }
                _ => return Err(load_err(n, "malformed or out-of-order transition record")),
            }
        }
    }
    let mut next_slot = y * y;
    for (n, r) in lines {
        let ["lw", template, value, label, w] = r.as_slice() else {
            return Err(load_err(n, "malformed feature record"));
        };
        let template: Template = template.parse().map_err(|e| load_err(n, e))?;
        let label = labels
            .index_of(label)
            .ok_or_else(|| load_err(n, format!("unknown label {label:?}")))?;
        let feature = Feature::new(template, *value);
        let attr = index.intern(&feature).expect("index is not frozen while loading");
        let slot = index.attribute_slot(attr, label);
        if slot != next_slot || slot >= slots {
            return Err(load_err(n, "feature record out of slot order"));
        }
        next_slot += 1;
        weights[slot] = parse_weight(w, n)?;
    }
    if index.num_slots() != slots {
        return Err(Error::Load(format!(
            "header declares {slots} slots, records define {}",
            index.num_slots()
        )));
    }
    weights.truncate(slots);
    CrfModel::from_parts(labels, index, weights, config).map_err(|e| Error::Load(e.to_string()))
}

pub fn read_model(path: &Path) -> Result<CrfModel> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|_| Error::Load(format!("{} is not valid UTF-8", path.display())))?;
    parse_model(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crf::{build_feature_index, FeatureVector, FeaturizedSentence};

    fn small_model() -> CrfModel {
        let labels = LabelSet::bio();
        let fv = FeatureVector::from_features([
            Feature::new(Template::Word, "battery"),
            Feature::new(Template::Dependency, "nmod(*,A/NN)"),
        ])
        .unwrap();
        let s = FeaturizedSentence::unlabeled(vec![fv.clone(), fv]).unwrap();
        let index = build_feature_index(&[s], &labels).unwrap();
        let weights = (0..index.num_slots()).map(|i| (i as f64 * 0.731).sin() / 3.0).collect();
        CrfModel::from_parts(labels, index, weights, TrainConfig::default()).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let m = small_model();
        let text = format_model(&m).unwrap();
        let back = parse_model(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(format_model(&back).unwrap(), text);
    }

    #[test]
    fn any_flipped_byte_is_a_load_error() {
        let text = format_model(&small_model()).unwrap().into_bytes();
        for pos in [0, 3, 12, 20, 40, text.len() / 2, text.len() - 3] {
            let mut corrupted = text.clone();
            corrupted[pos] ^= 0x01;
            let res = String::from_utf8(corrupted).map_err(|_| ()).and_then(|t| parse_model(&t).map_err(|_| ()));
            assert!(res.is_err(), "flip at {pos} was accepted");
        }
    }

    #[test]
    fn truncated_file_is_a_load_error() {
        let text = format_model(&small_model()).unwrap();
        assert!(matches!(parse_model(&text[..text.len() / 2]), Err(Error::Load(_))));
        assert!(matches!(parse_model(""), Err(Error::Load(_))));
    }
}
