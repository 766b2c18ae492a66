//! Dataset persistence: `manifest.json` + `records.jsonl` + `images/*.png`.
//!
//! Image paths in the JSONL are relative to the manifest's directory. PNG is
//! lossless, so a save/load round trip reproduces pixel data byte-exactly.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use image::RgbImage;
use serde::{Deserialize, Serialize};

use super::{DataError, DatasetManifest, GraspObservation, Labels, Sample};

#[derive(Debug, Serialize, Deserialize)]
struct RecordJson {
    id: String,
    touch_image_path: String,
    vision_image_path: String,
    sentence_description: String,
    phrase_descriptions: Vec<String>,
    labels: Labels,
    #[serde(skip_serializing_if = "Option::is_none")]
    grasp_frames: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grasp_success: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    corruption_tag: Option<String>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DataError + '_ {
    move |source| DataError::Io { path: path.display().to_string(), source }
}

fn write_png(path: &Path, img: &RgbImage) -> Result<(), DataError> {
    img.save(path)
        .map_err(|source| DataError::Image { path: path.display().to_string(), source })
}

fn read_png(path: &Path) -> Result<RgbImage, DataError> {
    let img = image::open(path)
        .map_err(|source| DataError::Image { path: path.display().to_string(), source })?;
    Ok(img.to_rgb8())
}

/// Write the dataset under `dir`: manifest, records, and one PNG per image.
pub fn save_dataset(
    dir: &Path,
    manifest: &DatasetManifest,
    samples: &[Sample],
) -> Result<(), DataError> {
    let images = dir.join("images");
    fs::create_dir_all(&images).map_err(io_err(&images))?;

    let records_path = dir.join("records.jsonl");
    let file = File::create(&records_path).map_err(io_err(&records_path))?;
    let mut out = BufWriter::new(file);
    for s in samples {
        let touch_rel = format!("images/{}_touch.png", s.id);
        let vision_rel = format!("images/{}_vision.png", s.id);
        write_png(&dir.join(&touch_rel), &s.touch_image)?;
        write_png(&dir.join(&vision_rel), &s.vision_image)?;
        let (grasp_frames, grasp_success) = match &s.grasp {
            None => (None, None),
            Some(g) => {
                let mut rels = Vec::with_capacity(4);
                for (k, frame) in g.frames.iter().enumerate() {
                    let rel = format!("images/{}_grasp{k}.png", s.id);
                    write_png(&dir.join(&rel), frame)?;
                    rels.push(rel);
                }
                (Some(rels), Some(g.success))
            }
        };
        let record = RecordJson {
            id: s.id.clone(),
            touch_image_path: touch_rel,
            vision_image_path: vision_rel,
            sentence_description: s.sentence_description.clone(),
            phrase_descriptions: s.phrase_descriptions.clone(),
            labels: s.labels,
            grasp_frames,
            grasp_success,
            corruption_tag: s.corruption_tag.clone(),
        };
        let line = serde_json::to_string(&record)
            .map_err(|e| DataError::Validation { id: s.id.clone(), message: e.to_string() })?;
        writeln!(out, "{line}").map_err(io_err(&records_path))?;
    }
    out.flush().map_err(io_err(&records_path))?;

    let manifest_path = dir.join("manifest.json");
    let body = serde_json::to_string_pretty(manifest)
        .map_err(|e| DataError::Manifest(e.to_string()))?;
    fs::write(&manifest_path, body).map_err(io_err(&manifest_path))?;
    Ok(())
}

/// Streaming reader over the records file; malformed records surface as
/// errors naming the offending id rather than being skipped.
pub struct SampleReader {
    base_dir: PathBuf,
    lines: std::io::Lines<BufReader<File>>,
    class_count: usize,
    line_no: usize,
}

impl SampleReader {
    fn decode(&mut self, line: &str) -> Result<Sample, DataError> {
        let value: serde_json::Value = serde_json::from_str(line).map_err(|e| {
            DataError::Validation {
                id: format!("line {}", self.line_no),
                message: format!("invalid JSON: {e}"),
            }
        })?;
        let id = value
            .get("id")
            .and_then(|v| v.as_str())
            .unwrap_or("<missing id>")
            .to_string();
        let record: RecordJson = serde_json::from_value(value)
            .map_err(|e| DataError::Validation { id: id.clone(), message: e.to_string() })?;
        let touch_image = read_png(&self.base_dir.join(&record.touch_image_path))?;
        let vision_image = read_png(&self.base_dir.join(&record.vision_image_path))?;
        let grasp = match (record.grasp_frames, record.grasp_success) {
            (None, None) => None,
            (Some(rels), Some(success)) => {
                let mut frames = Vec::with_capacity(rels.len());
                for rel in &rels {
                    frames.push(read_png(&self.base_dir.join(rel))?);
                }
                Some(GraspObservation { frames, success })
            }
            _ => {
                return Err(DataError::Validation {
                    id,
                    message: "grasp_frames and grasp_success must appear together".into(),
                })
            }
        };
        let sample = Sample {
            id,
            touch_image,
            vision_image,
            sentence_description: record.sentence_description,
            phrase_descriptions: record.phrase_descriptions,
            labels: record.labels,
            grasp,
            corruption_tag: record.corruption_tag,
        };
        sample.validate(self.class_count)?;
        Ok(sample)
    }
}

impl Iterator for SampleReader {
    type Item = Result<Sample, DataError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.line_no += 1;
            match self.lines.next()? {
                Err(e) => {
                    return Some(Err(DataError::Io {
                        path: "records.jsonl".into(),
                        source: e,
                    }))
                }
                Ok(line) if line.trim().is_empty() => continue,
                Ok(line) => return Some(self.decode(&line)),
            }
        }
    }
}

/// Open a dataset directory (or its manifest file directly) and return the
/// manifest plus a streaming record reader in records order.
pub fn load_dataset(path: &Path) -> Result<(DatasetManifest, SampleReader), DataError> {
    let (dir, manifest_path) = if path.is_dir() {
        (path.to_path_buf(), path.join("manifest.json"))
    } else {
        let dir = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        (dir, path.to_path_buf())
    };
    let body = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
    let manifest: DatasetManifest =
        serde_json::from_str(&body).map_err(|e| DataError::Manifest(e.to_string()))?;
    let records_path = dir.join("records.jsonl");
    let file = File::open(&records_path).map_err(io_err(&records_path))?;
    let reader = SampleReader {
        base_dir: dir,
        lines: BufReader::new(file).lines(),
        class_count: manifest.class_count(),
        line_no: 0,
    };
    Ok((manifest, reader))
}

/// Load and validate the whole dataset eagerly.
pub fn load_all(path: &Path) -> Result<(DatasetManifest, Vec<Sample>), DataError> {
    let (manifest, reader) = load_dataset(path)?;
    let samples: Vec<Sample> = reader.collect::<Result<_, _>>()?;
    let ids: Vec<String> = samples.iter().map(|s| s.id.clone()).collect();
    manifest.validate(&ids)?;
    Ok((manifest, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, SyntheticConfig};

    #[test]
    fn round_trip_is_exact() {
        let cfg = SyntheticConfig { samples: 12, corruption_rate: 0.2, ..Default::default() };
        let (manifest, samples) = generate_synthetic(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(dir.path(), &manifest, &samples).unwrap();
        let (manifest2, samples2) = load_all(dir.path()).unwrap();
        assert_eq!(manifest, manifest2);
        assert_eq!(samples.len(), samples2.len());
        for (a, b) in samples.iter().zip(&samples2) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.sentence_description, b.sentence_description);
            assert_eq!(a.phrase_descriptions, b.phrase_descriptions);
            assert_eq!(a.labels, b.labels);
            assert_eq!(a.corruption_tag, b.corruption_tag);
            assert_eq!(a.touch_image.as_raw(), b.touch_image.as_raw());
            assert_eq!(a.vision_image.as_raw(), b.vision_image.as_raw());
        }
    }

    #[test]
    fn loader_counts_match_manifest() {
        let cfg = SyntheticConfig { samples: 3, class_count: 2, ..Default::default() };
        let (manifest, samples) = generate_synthetic(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(dir.path(), &manifest, &samples).unwrap();
        let (m, loaded) = load_all(dir.path()).unwrap();
        assert_eq!(m.size, 3);
        assert_eq!(loaded.len(), 3);
    }

    #[test]
    fn missing_field_names_the_record() {
        let cfg = SyntheticConfig { samples: 4, ..Default::default() };
        let (manifest, samples) = generate_synthetic(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(dir.path(), &manifest, &samples).unwrap();
        // Strip sentence_description from the second record.
        let records = dir.path().join("records.jsonl");
        let body = std::fs::read_to_string(&records).unwrap();
        let mut lines: Vec<String> = body.lines().map(String::from).collect();
        let mut v: serde_json::Value = serde_json::from_str(&lines[1]).unwrap();
        v.as_object_mut().unwrap().remove("sentence_description");
        lines[1] = serde_json::to_string(&v).unwrap();
        std::fs::write(&records, lines.join("\n")).unwrap();

        let err = load_all(dir.path()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("s00001"), "error should cite the id: {msg}");
        assert!(msg.contains("sentence_description"), "error should cite the field: {msg}");
    }

    #[test]
    fn empty_records_file_yields_empty_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = DatasetManifest {
            name: "empty".into(),
            class_names: vec!["a".into(), "b".into()],
            splits: Default::default(),
            seed: 0,
            size: 0,
        };
        std::fs::write(
            dir.path().join("manifest.json"),
            serde_json::to_string(&manifest).unwrap(),
        )
        .unwrap();
        File::create(dir.path().join("records.jsonl")).unwrap();
        let (m, samples) = load_all(dir.path()).unwrap();
        assert_eq!(m.size, 0);
        assert!(samples.is_empty());
    }

    #[test]
    fn missing_manifest_is_a_load_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_dataset(dir.path()), Err(DataError::Io { .. })));
    }
}
