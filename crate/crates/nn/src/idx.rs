//! IDX files: big-endian `u32` magic, big-endian `u32` dimensions, then
//! unsigned bytes.

use std::path::Path;

use crate::{Dataset, NnError, Result};

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;
const CLASSES: usize = 10;

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| NnError::Io { path: path.to_path_buf(), source })
}

/// Magic number and `n_dims` sizes, followed by the payload.
fn parse_header<'a>(path: &Path, bytes: &'a [u8], magic: u32, n_dims: usize) -> Result<(Vec<usize>, &'a [u8])> {
    let header_len = 4 * (1 + n_dims);
    if bytes.len() < 4 {
        return Err(NnError::Truncated { path: path.to_path_buf(), expected: header_len, found: bytes.len() });
    }
    let word = |i: usize| u32::from_be_bytes(bytes[4 * i..4 * i + 4].try_into().unwrap());
    let found = word(0);
    if found != magic {
        return Err(NnError::BadMagic { path: path.to_path_buf(), expected: magic, found });
    }
    if bytes.len() < header_len {
        return Err(NnError::Truncated { path: path.to_path_buf(), expected: header_len, found: bytes.len() });
    }
    let dims: Vec<usize> = (1..=n_dims).map(|i| word(i) as usize).collect();
    let payload_len: usize = dims.iter().product();
    let payload = &bytes[header_len..];
    if payload.len() < payload_len {
        return Err(NnError::Truncated {
            path: path.to_path_buf(),
            expected: header_len + payload_len,
            found: bytes.len(),
        });
    }
    Ok((dims, &payload[..payload_len]))
}

/// Loads an image/label file pair. Pixels are mapped to `[0, 1]` and then
/// normalized with mean 0.5 and standard deviation 0.5.
pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<Dataset> {
    let (images_path, labels_path) = (images_path.as_ref(), labels_path.as_ref());
    let image_bytes = read(images_path)?;
    let label_bytes = read(labels_path)?;
    let (dims, pixels) = parse_header(images_path, &image_bytes, IMAGES_MAGIC, 3)?;
    let (label_dims, labels) = parse_header(labels_path, &label_bytes, LABELS_MAGIC, 1)?;
    if dims[0] != label_dims[0] {
        return Err(NnError::CountMismatch { images: dims[0], labels: label_dims[0] });
    }
    if let Some((index, &value)) = labels.iter().enumerate().find(|(_, &v)| v as usize >= CLASSES) {
        return Err(NnError::InvalidLabel { index, value });
    }
    let inputs = pixels.iter().map(|&b| (b as f64 / 255.0 - 0.5) / 0.5).collect();
    let class_ids = labels.iter().map(|&b| b as usize).collect();
    let name = images_path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Dataset::new(inputs, (dims[1] * dims[2]).max(1), class_ids, CLASSES, name)
}
