//! Report files, written atomically so a reader never sees a partial report.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use hypmass::engine::MassReport;

use crate::config::Format;

/// Writes `contents` to a temporary sibling of `path`, then renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{}.{}.tmp", name, std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Writes `<stem>.json` and/or `<stem>.txt` under `dir` and returns the paths.
pub fn write_report(report: &MassReport, dir: &Path, stem: &str, format: Format) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if format.json() {
        let p = dir.join(format!("{}.json", stem));
        write_atomic(&p, &report.to_json())?;
        written.push(p);
    }
    if format.table() {
        let p = dir.join(format!("{}.txt", stem));
        write_atomic(&p, &report.render_table())?;
        written.push(p);
    }
    Ok(written)
}
