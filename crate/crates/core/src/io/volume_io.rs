use std::fs;
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageBuffer, ImageFormat, Luma};

use super::json::{read_json, write_canonical};
use super::manifest::{VolumeStub, FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::volume::{BitDepth, ScanVolume};

pub const VOLUME_STUB: &str = "volume.json";

/// Zero-padded width for slice names: at least four digits.
pub fn slice_name_width(n_slices: usize) -> usize {
    n_slices.to_string().len().max(4)
}

/// File name of the 0-based slice `index`; names start at 1.
pub fn slice_file_name(index: usize, n_slices: usize) -> String {
    format!(
        "{:0width$}.png",
        index + 1,
        width = slice_name_width(n_slices)
    )
}

/// Numbered `*.png` slice files of `dir`, in numeric order.
pub fn list_slices(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut named = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("png") || !path.is_file() {
            continue;
        }
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("")
            .to_string();
        named.push((stem, path));
    }
    if named.is_empty() {
        return Err(Error::EmptyDirectory(dir.to_path_buf()));
    }
    let width = named[0].0.len();
    let mut numbered = Vec::with_capacity(named.len());
    for (stem, path) in named {
        let ok =
            !stem.is_empty() && stem.len() == width && stem.bytes().all(|b| b.is_ascii_digit());
        let number: u64 = match stem.parse() {
            Ok(n) if ok => n,
            _ => {
                return Err(Error::BadSliceName {
                    path: dir.to_path_buf(),
                    name: stem,
                    width,
                })
            }
        };
        numbered.push((number, path));
    }
    numbered.sort();
    Ok(numbered.into_iter().map(|(_, p)| p).collect())
}

/// Reads a directory of numbered grayscale PNG slices.
///
/// Identity comes from `volume.json` when present; otherwise the scan id is
/// the directory name and the source id is 0.
pub fn load_volume(dir: &Path) -> Result<ScanVolume> {
    let files = list_slices(dir)?;
    let mut slices = Vec::with_capacity(files.len());
    let mut geometry: Option<(usize, usize, BitDepth)> = None;
    for path in &files {
        let img = image::open(path).map_err(|source| Error::Image {
            path: path.clone(),
            source,
        })?;
        let (w, h) = (img.width() as usize, img.height() as usize);
        let (depth, pixels) = match img {
            DynamicImage::ImageLuma8(buf) => (
                BitDepth::Eight,
                buf.into_raw()
                    .into_iter()
                    .map(u16::from)
                    .collect::<Vec<u16>>(),
            ),
            DynamicImage::ImageLuma16(buf) => (BitDepth::Sixteen, buf.into_raw()),
            other => {
                return Err(Error::UnsupportedPixelFormat {
                    path: path.clone(),
                    format: format!("{:?}", other.color()),
                })
            }
        };
        match geometry {
            None => geometry = Some((w, h, depth)),
            Some((fw, fh, fd)) => {
                if (fw, fh) != (w, h) {
                    return Err(Error::MixedDimensions {
                        path: path.clone(),
                        first_w: fw,
                        first_h: fh,
                        w,
                        h,
                    });
                }
                if fd != depth {
                    return Err(Error::MixedBitDepth { path: path.clone() });
                }
            }
        }
        slices.push(pixels);
    }
    let (w, h, depth) = geometry.expect("at least one slice");
    let volume = ScanVolume::new(w, h, depth, slices)?;

    let stub_path = dir.join(VOLUME_STUB);
    let (scan_id, source_id) = if stub_path.is_file() {
        let stub: VolumeStub = read_json(&stub_path)?;
        (stub.scan_id, stub.source_id)
    } else {
        let name = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        (name, 0)
    };
    Ok(volume.with_scan_id(scan_id).with_source_id(source_id))
}

/// Writes one lossless PNG per slice plus a `volume.json` stub. Returns the
/// slice file names in order.
pub fn save_volume(volume: &ScanVolume, dir: &Path) -> Result<Vec<String>> {
    save_volume_with_class(volume, dir, None)
}

pub fn save_volume_with_class(
    volume: &ScanVolume,
    dir: &Path,
    class: Option<crate::metrics::Class>,
) -> Result<Vec<String>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let (w, h) = (volume.width() as u32, volume.height() as u32);
    let n = volume.n_slices();
    let mut names = Vec::with_capacity(n);
    for (i, slice) in volume.slices().iter().enumerate() {
        let name = slice_file_name(i, n);
        let path = dir.join(&name);
        let written = match volume.bit_depth() {
            BitDepth::Eight => {
                let data: Vec<u8> = slice.iter().map(|&v| v as u8).collect();
                ImageBuffer::<Luma<u8>, _>::from_raw(w, h, data)
                    .expect("slice length matches geometry")
                    .save_with_format(&path, ImageFormat::Png)
            }
            BitDepth::Sixteen => ImageBuffer::<Luma<u16>, _>::from_raw(w, h, slice.clone())
                .expect("slice length matches geometry")
                .save_with_format(&path, ImageFormat::Png),
        };
        written.map_err(|source| Error::Image {
            path: path.clone(),
            source,
        })?;
        names.push(name);
    }
    let stub = VolumeStub {
        format_version: FORMAT_VERSION,
        scan_id: volume.scan_id().to_string(),
        source_id: volume.source_id(),
        n_slices: n,
        width: volume.width(),
        height: volume.height(),
        bit_depth: volume.bit_depth(),
        class,
    };
    write_canonical(&stub, &dir.join(VOLUME_STUB))?;
    Ok(names)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_padded() {
        assert_eq!(slice_file_name(0, 300), "0001.png");
        assert_eq!(slice_file_name(12344, 12345), "12345.png");
    }

    #[test]
    fn round_trip_16_bit() {
        let dir = tempfile::tempdir().unwrap();
        let data: Vec<u16> = (0..64)
            .map(|i| (i * 1031) as u16)
            .chain([65535])
            .take(64)
            .collect();
        let v = ScanVolume::new(8, 8, BitDepth::Sixteen, vec![data.clone(), data])
            .unwrap()
            .with_scan_id("s1")
            .with_source_id(3);
        save_volume(&v, dir.path()).unwrap();
        assert_eq!(load_volume(dir.path()).unwrap(), v);
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let dir = tempfile::tempdir().unwrap();
        ImageBuffer::<Luma<u8>, _>::from_raw(64, 64, vec![0u8; 4096])
            .unwrap()
            .save(dir.path().join("0001.png"))
            .unwrap();
        ImageBuffer::<Luma<u8>, _>::from_raw(32, 32, vec![0u8; 1024])
            .unwrap()
            .save(dir.path().join("0002.png"))
            .unwrap();
        assert!(matches!(
            load_volume(dir.path()),
            Err(Error::MixedDimensions { .. })
        ));
    }

    #[test]
    fn numeric_order_and_padding() {
        let dir = tempfile::tempdir().unwrap();
        for (name, v) in [("0010", 10u8), ("0002", 2), ("0001", 1)] {
            ImageBuffer::<Luma<u8>, _>::from_raw(2, 2, vec![v; 4])
                .unwrap()
                .save(dir.path().join(format!("{name}.png")))
                .unwrap();
        }
        let v = load_volume(dir.path()).unwrap();
        let firsts: Vec<u16> = v.slices().iter().map(|s| s[0]).collect();
        assert_eq!(firsts, vec![1, 2, 10]);

        ImageBuffer::<Luma<u8>, _>::from_raw(2, 2, vec![0u8; 4])
            .unwrap()
            .save(dir.path().join("11.png"))
            .unwrap();
        assert!(matches!(
            load_volume(dir.path()),
            Err(Error::BadSliceName { .. })
        ));
    }

    #[test]
    fn empty_directory() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_volume(dir.path()),
            Err(Error::EmptyDirectory(_))
        ));
    }
}
