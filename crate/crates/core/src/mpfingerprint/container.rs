//! Binary fingerprint container and CSV export.
//!
//! Layout: `b"MPFP"`, `u16` version (LE), `u32` header length (LE), a JSON
//! header of that many bytes, then the values as row-major `f64` LE.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{ChannelInfo, FingerprintSpec, MpFingerprint2D, MultiModalFingerprint};
use crate::error::{Error, Result};
use crate::filtration::ThresholdSet;
use crate::molgraph::Label;

const MAGIC: &[u8; 4] = b"MPFP";
const VERSION: u16 = 1;

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Header {
    Matrix { compound_id: String, rows: usize, cols: usize, row_thresholds: Vec<f64>, spec: FingerprintSpec },
    Multimodal { compound_id: String, label: Label, rows: usize, cols: usize, channels: Vec<ChannelInfo> },
}

fn encode(header: &Header, data: &[f64]) -> Vec<u8> {
    let json = serde_json::to_vec(header).expect("headers always serialize");
    let mut out = Vec::with_capacity(10 + json.len() + 8 * data.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    for v in data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn decode(bytes: &[u8]) -> Result<(Header, Vec<f64>)> {
    let bad = |m: &str| Error::Container(m.to_string());
    if bytes.len() < 10 || &bytes[..4] != MAGIC {
        return Err(bad("not a fingerprint container"));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(Error::Container(format!("unsupported container version {version}")));
    }
    let header_len = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let body = &bytes[10..];
    if body.len() < header_len {
        return Err(bad("truncated header"));
    }
    let header: Header = serde_json::from_slice(&body[..header_len])?;
    let payload = &body[header_len..];
    if payload.len() % 8 != 0 {
        return Err(bad("payload is not a whole number of f64 values"));
    }
    let data = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok((header, data))
}

pub fn encode_2d(fp: &MpFingerprint2D) -> Vec<u8> {
    let header = Header::Matrix {
        compound_id: fp.compound_id.clone(),
        rows: fp.rows,
        cols: fp.cols,
        row_thresholds: fp.row_thresholds.values().to_vec(),
        spec: fp.spec.clone(),
    };
    encode(&header, &fp.data)
}

pub fn decode_2d(bytes: &[u8]) -> Result<MpFingerprint2D> {
    match decode(bytes)? {
        (Header::Matrix { compound_id, rows, cols, row_thresholds, spec }, data) => {
            if data.len() != rows * cols {
                return Err(Error::Container(format!("{} values for a {rows}x{cols} matrix", data.len())));
            }
            Ok(MpFingerprint2D { compound_id, rows, cols, data, row_thresholds: ThresholdSet::new(row_thresholds)?, spec })
        }
        _ => Err(Error::Container("container holds a multimodal stack, not a matrix".into())),
    }
}

pub fn encode_multimodal(fp: &MultiModalFingerprint) -> Vec<u8> {
    let header = Header::Multimodal {
        compound_id: fp.compound_id.clone(),
        label: fp.label.clone(),
        rows: fp.rows,
        cols: fp.cols,
        channels: fp.channels.clone(),
    };
    encode(&header, &fp.data)
}

pub fn decode_multimodal(bytes: &[u8]) -> Result<MultiModalFingerprint> {
    match decode(bytes)? {
        (Header::Multimodal { compound_id, label, rows, cols, channels }, data) => {
            if data.len() != channels.len() * rows * cols {
                return Err(Error::Container(format!(
                    "{} values for {} channels of {rows}x{cols}",
                    data.len(),
                    channels.len()
                )));
            }
            Ok(MultiModalFingerprint { compound_id, label, rows, cols, channels, data })
        }
        _ => Err(Error::Container("container holds a single matrix, not a multimodal stack".into())),
    }
}

/// One line per row, values comma-separated, with a `threshold` column first.
pub fn to_csv_2d(fp: &MpFingerprint2D) -> String {
    let mut out = String::from("threshold");
    for c in 0..fp.cols {
        write!(out, ",c{c}").unwrap();
    }
    out.push('\n');
    for (i, alpha) in fp.row_thresholds.values().iter().enumerate() {
        write!(out, "{alpha}").unwrap();
        for v in fp.row(i) {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Long format: `compound,channel,dim,row,col,value`.
pub fn multimodal_csv(fps: &[MultiModalFingerprint]) -> String {
    let mut out = String::from("compound,channel,dim,row,col,value\n");
    for fp in fps {
        for (c, info) in fp.channels.iter().enumerate() {
            let values = fp.channel(c);
            for r in 0..fp.rows {
                for col in 0..fp.cols {
                    writeln!(
                        out,
                        "{},{},{},{r},{col},{}",
                        fp.compound_id,
                        info.modality.name(),
                        info.spec.dim,
                        values[r * fp.cols + col]
                    )
                    .unwrap();
                }
            }
        }
    }
    out
}
