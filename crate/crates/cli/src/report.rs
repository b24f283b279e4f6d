//! Batch evaluation: every secret embedded into every other cover, one
//! table row per pair.

use std::io::Write;
use std::path::{Path, PathBuf};

use apvd_core::par::{map_collect, Exec};
use apvd_core::{
    embed, extract, format_db, frame_payload, parse_payload, quality_report, read_image,
    resize_nearest, EmbedMode, ImageBuffer, Payload, RangeTable, StegoKey,
};
use serde::Serialize;

use crate::{CliError, OutputFormat};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub cover: String,
    pub secret: String,
    pub psnr: Option<f64>,
    pub ssim: Option<f64>,
    pub uiq: Option<f64>,
    pub recovered: bool,
    pub note: String,
}

impl ReportRow {
    fn failed(cover: &str, secret: &str, note: String) -> Self {
        Self {
            cover: cover.to_string(),
            secret: secret.to_string(),
            psnr: None,
            ssim: None,
            uiq: None,
            recovered: false,
            note,
        }
    }
}

fn image_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries =
        std::fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension().and_then(|e| e.to_str()).is_some_and(|e| {
                    matches!(
                        e.to_ascii_lowercase().as_str(),
                        "pgm" | "ppm" | "pnm" | "png"
                    )
                })
        })
        .collect();
    files.sort();
    Ok(files)
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn load(path: &Path, side: usize) -> Result<ImageBuffer, String> {
    read_image(path)
        .map(|img| resize_nearest(&img, side, side))
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn evaluate(
    cover_name: &str,
    cover: &Result<ImageBuffer, String>,
    secret_name: &str,
    secret: &Result<ImageBuffer, String>,
    key: StegoKey,
    mode: EmbedMode,
    table: &RangeTable,
) -> ReportRow {
    let (cover, secret) = match (cover, secret) {
        (Ok(c), Ok(s)) => (c, s),
        (Err(e), _) | (_, Err(e)) => return ReportRow::failed(cover_name, secret_name, e.clone()),
    };
    let payload = Payload::Image(secret.clone());
    let attempt = || -> Result<ReportRow, apvd_core::StegoError> {
        let framed = frame_payload(&payload)?;
        let stego = embed(cover, &framed, key, mode, table)?;
        let q = quality_report(cover, &stego)?;
        let recovered = extract(&stego, key, mode, table).and_then(|b| parse_payload(&b));
        let (ok, note) = match recovered {
            Ok(p) if p == payload => (true, String::new()),
            Ok(_) => (false, "recovered payload differs".to_string()),
            Err(e) => (false, e.to_string()),
        };
        Ok(ReportRow {
            cover: cover_name.to_string(),
            secret: secret_name.to_string(),
            psnr: Some(q.psnr),
            ssim: Some(q.ssim),
            uiq: Some(q.uiq),
            recovered: ok,
            note,
        })
    };
    attempt().unwrap_or_else(|e| ReportRow::failed(cover_name, secret_name, e.to_string()))
}

/// Resizes covers to `cover_side`² and secrets to `secret_side`²
/// (nearest neighbor), embeds each secret into each cover with a different
/// file stem, and checks bit-exact recovery. Rows are sorted by cover, then
/// secret name.
pub fn run_report(
    covers_dir: &Path,
    secrets_dir: &Path,
    key: StegoKey,
    mode: EmbedMode,
    table: &RangeTable,
    (cover_side, secret_side): (usize, usize),
) -> Result<Vec<ReportRow>, CliError> {
    if cover_side == 0 || secret_side == 0 {
        return Err(CliError::Usage("resize targets must be positive".into()));
    }
    let cover_files = image_files(covers_dir)?;
    let secret_files = image_files(secrets_dir)?;
    let exec = Exec::default();
    let covers: Vec<_> = map_collect(exec, cover_files.len(), |i| {
        (stem(&cover_files[i]), load(&cover_files[i], cover_side))
    });
    let secrets: Vec<_> = map_collect(exec, secret_files.len(), |i| {
        (stem(&secret_files[i]), load(&secret_files[i], secret_side))
    });

    let mut jobs: Vec<(usize, usize)> = Vec::new();
    for (ci, (cname, _)) in covers.iter().enumerate() {
        for (si, (sname, _)) in secrets.iter().enumerate() {
            if cname != sname {
                jobs.push((ci, si));
            }
        }
    }
    jobs.sort_by(|a, b| (&covers[a.0].0, &secrets[a.1].0).cmp(&(&covers[b.0].0, &secrets[b.1].0)));
    Ok(map_collect(exec, jobs.len(), |j| {
        let (ci, si) = jobs[j];
        evaluate(
            &covers[ci].0,
            &covers[ci].1,
            &secrets[si].0,
            &secrets[si].1,
            key,
            mode,
            table,
        )
    }))
}

fn opt(v: Option<f64>, decimals: usize) -> String {
    v.map(|v| format_db(v, decimals)).unwrap_or_default()
}

pub fn write_rows(
    rows: &[ReportRow],
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    match format {
        OutputFormat::Json => {
            let json: Vec<_> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "cover": r.cover,
                        "secret": r.secret,
                        "psnr": r.psnr.map(|v| if v.is_finite() { serde_json::json!(v) } else { serde_json::json!("inf") }),
                        "ssim": r.ssim,
                        "uiq": r.uiq,
                        "recovered": r.recovered,
                        "note": r.note,
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &json)
                .map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "cover",
                "secret",
                "psnr",
                "ssim",
                "uiq",
                "recovered",
                "note",
            ])
            .map_err(|e| CliError::Io(e.to_string()))?;
            for r in rows {
                w.write_record([
                    r.cover.clone(),
                    r.secret.clone(),
                    opt(r.psnr, 4),
                    opt(r.ssim, 6),
                    opt(r.uiq, 6),
                    r.recovered.to_string(),
                    r.note.clone(),
                ])
                .map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.flush()?;
        }
        OutputFormat::Markdown => {
            writeln!(
                out,
                "| Cover Image | Secret Image | PSNR | SSIM | UIQ | Recovered |"
            )?;
            writeln!(out, "|---|---|---|---|---|---|")?;
            let mut last_cover: Option<&str> = None;
            for r in rows {
                let cover = if last_cover == Some(r.cover.as_str()) {
                    ""
                } else {
                    r.cover.as_str()
                };
                last_cover = Some(&r.cover);
                let recovered = if r.recovered {
                    "yes".to_string()
                } else {
                    format!("no ({})", r.note)
                };
                writeln!(
                    out,
                    "| {cover} | {} | {} | {} | {} | {recovered} |",
                    r.secret,
                    opt(r.psnr, 2),
                    opt(r.ssim, 4),
                    opt(r.uiq, 4)
                )?;
            }
        }
    }
    Ok(())
}
