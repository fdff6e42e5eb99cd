use std::path::Path;

use anyhow::{bail, Context, Result};
use mpfp::molgraph::{parse_graph_json_library, parse_sdf_records, MolecularGraph};

use crate::InputFormat;

/// One input record, parsed or not.
pub struct Record {
    /// `path#ordinal`, 1-based.
    pub source: String,
    pub graph: mpfp::Result<MolecularGraph>,
}

fn infer_format(path: &Path) -> Result<InputFormat> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or_default().to_ascii_lowercase();
    match ext.as_str() {
        "sdf" | "sd" | "mol" => Ok(InputFormat::Sdf),
        "json" => Ok(InputFormat::Json),
        _ => bail!("cannot infer the format of {}; pass --format", path.display()),
    }
}

/// Reads every record of every file, in order.
pub fn load(paths: &[impl AsRef<Path>], format: Option<InputFormat>) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for path in paths {
        let path = path.as_ref();
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let records = match format.map_or_else(|| infer_format(path), Ok)? {
            InputFormat::Sdf => parse_sdf_records(&bytes),
            InputFormat::Json => {
                parse_graph_json_library(&bytes).with_context(|| format!("parsing {}", path.display()))?
            }
        };
        out.extend(
            records
                .into_iter()
                .enumerate()
                .map(|(i, graph)| Record { source: format!("{}#{}", path.display(), i + 1), graph }),
        );
    }
    Ok(out)
}
