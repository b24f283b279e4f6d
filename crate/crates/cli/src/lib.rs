//! Command-line front end: `embed`, `extract`, `capacity`, `quality` and
//! `report`.
//!
//! Exit codes: 0 success, 1 report rows failed, 2 capacity exceeded,
//! 3 I/O or image format error, 4 no valid payload found (wrong
//! key/mode/table), 64 bad usage.

mod report;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use apvd_core::{
    capacity_summary, embed, estimate_capacity, extract, format_db, frame_payload, lsb_capacity,
    parse_payload, quality_report, read_image, write_image, EmbedMode, ImageBuffer, ImageFormat,
    ImageIoError, Payload, QualityReport, RangeTable, StegoError, StegoKey, HEADER_BITS,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use report::{run_report, ReportRow};

pub const EXIT_REPORT_FAILED: u8 = 1;
pub const EXIT_CAPACITY: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_INVALID_PAYLOAD: u8 = 4;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "apvd",
    version,
    about = "APVD steganography with keyed pseudorandom pixel-pair selection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hide a secret image (--secret) or raw file (--payload) in a cover.
    Embed(EmbedArgs),
    /// Recover the payload from a stego image.
    Extract(ExtractArgs),
    /// Report how many bits a cover can carry.
    Capacity(CapacityArgs),
    /// Compare two images (MSE, PSNR, SSIM, UIQ).
    Quality(QualityArgs),
    /// Embed every secret into every cover and tabulate quality and recovery.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct KeyArgs {
    /// 64-bit seed, decimal or 0x-prefixed hex. Falls back to $APVD_SEED.
    #[arg(long, conflicts_with = "key", value_parser = parse_seed)]
    pub seed: Option<u64>,
    /// Passphrase hashed (FNV-1a) into the seed.
    #[arg(long)]
    pub key: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CodecArgs {
    /// Pixel-pair order (keyed or raster) or plain LSB replacement.
    #[arg(long, value_enum, default_value_t = ModeArg::ApvdPrng)]
    pub mode: ModeArg,
    /// Low bits replaced per sample in lsb mode.
    #[arg(long = "k-lsb", default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub k_lsb: u8,
    /// Built-in table name or path to a table file of `lower upper` rows.
    #[arg(long, default_value = "default")]
    pub table: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    ApvdPrng,
    ApvdSeq,
    Lsb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Markdown,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Cover image (.pgm, .ppm, .pnm or .png).
    #[arg(long)]
    pub cover: PathBuf,
    /// Secret image to hide; its dimensions travel with it.
    #[arg(long, conflicts_with = "payload", required_unless_present = "payload")]
    pub secret: Option<PathBuf>,
    /// Arbitrary file to hide as raw bytes.
    #[arg(long)]
    pub payload: Option<PathBuf>,
    /// Stego output (.pgm, .ppm, .pnm or .png).
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub key: KeyArgs,
    #[command(flatten)]
    pub codec: CodecArgs,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Stego image produced by `embed`.
    #[arg(long)]
    pub stego: PathBuf,
    /// Where to write the recovered payload. Image payloads use the
    /// extension to pick a format (PNM when unrecognized).
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub key: KeyArgs,
    #[command(flatten)]
    pub codec: CodecArgs,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    /// Cover image to analyse.
    #[arg(long)]
    pub cover: PathBuf,
    #[command(flatten)]
    pub codec: CodecArgs,
    /// Output table format.
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct QualityArgs {
    /// Reference image.
    #[arg(long)]
    pub cover: PathBuf,
    /// Image compared against the reference.
    #[arg(long)]
    pub stego: PathBuf,
    /// Output table format.
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory of cover images.
    #[arg(long)]
    pub covers: PathBuf,
    /// Directory of secret images; each is embedded into every cover with a
    /// different file stem.
    #[arg(long)]
    pub secrets: PathBuf,
    #[command(flatten)]
    pub key: KeyArgs,
    #[command(flatten)]
    pub codec: CodecArgs,
    /// Output table format.
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Cover side length after resizing.
    #[arg(long, default_value_t = 512)]
    pub cover_size: usize,
    /// Secret side length after resizing.
    #[arg(long, default_value_t = 128)]
    pub secret_size: usize,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Stego(StegoError),
    ReportFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::ReportFailed(_) => EXIT_REPORT_FAILED,
            CliError::Stego(e) => match e {
                StegoError::CapacityExceeded { .. } => EXIT_CAPACITY,
                StegoError::InvalidHeader(_)
                | StegoError::Truncated { .. }
                | StegoError::MalformedPayload(_) => EXIT_INVALID_PAYLOAD,
                StegoError::InvalidRangeTable(_) | StegoError::InvalidLsbDepth(_) => EXIT_USAGE,
                _ => EXIT_IO,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Stego(e @ StegoError::CapacityExceeded { needed, available }) => {
                write!(
                    f,
                    "{e} (short by {} bits)",
                    needed.saturating_sub(*available)
                )
            }
            CliError::Stego(e @ (StegoError::InvalidHeader(_) | StegoError::Truncated { .. })) => {
                write!(
                    f,
                    "{e}; check that seed/key, --mode and --table match the ones used to embed"
                )
            }
            CliError::Stego(e) => write!(f, "{e}"),
            CliError::ReportFailed(n) => write!(f, "{n} report row(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<StegoError> for CliError {
    fn from(e: StegoError) -> Self {
        CliError::Stego(e)
    }
}

impl From<ImageIoError> for CliError {
    fn from(e: ImageIoError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn io_at(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

fn image_at(path: &Path) -> Result<ImageBuffer, CliError> {
    read_image(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Parses a decimal or `0x`-prefixed hexadecimal 64-bit seed.
pub fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|_| format!("invalid seed {s:?}: expected a decimal or 0x-prefixed hex u64"))
}

impl KeyArgs {
    /// Resolves the effective key: `--seed`, then `--key`, then `$APVD_SEED`.
    pub fn resolve(&self) -> Result<StegoKey, CliError> {
        if let Some(seed) = self.seed {
            return Ok(StegoKey::new(seed));
        }
        if let Some(pass) = &self.key {
            return Ok(StegoKey::from_passphrase(pass.as_bytes()));
        }
        match std::env::var("APVD_SEED") {
            Ok(v) => parse_seed(&v).map(StegoKey::new).map_err(CliError::Usage),
            Err(_) => Err(CliError::Usage(
                "one of --seed, --key or $APVD_SEED is required".into(),
            )),
        }
    }
}

impl CodecArgs {
    pub fn mode(&self) -> EmbedMode {
        match self.mode {
            ModeArg::ApvdPrng => EmbedMode::ApvdPrng,
            ModeArg::ApvdSeq => EmbedMode::ApvdSeq,
            ModeArg::Lsb => EmbedMode::Lsb(self.k_lsb),
        }
    }

    pub fn table(&self) -> Result<RangeTable, CliError> {
        if let Some(t) = RangeTable::named(&self.table) {
            return Ok(t);
        }
        let path = Path::new(&self.table);
        if !path.exists() {
            return Err(CliError::Usage(format!(
                "unknown range table {:?}: not a built-in name or an existing file",
                self.table
            )));
        }
        let text = fs::read_to_string(path).map_err(io_at(path))?;
        Ok(RangeTable::parse(self.table.clone(), &text)?)
    }
}

fn output_format(path: &Path, channels: usize) -> Result<ImageFormat, CliError> {
    ImageFormat::from_path(path, channels).ok_or_else(|| {
        CliError::Usage(format!(
            "cannot tell the output format of {}; use .pgm, .ppm, .pnm or .png",
            path.display()
        ))
    })
}

fn mode_capacity(cover: &ImageBuffer, mode: EmbedMode, table: &RangeTable) -> u64 {
    match mode {
        EmbedMode::Lsb(k) => lsb_capacity(cover, k),
        _ => estimate_capacity(cover, table),
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Embed(a) => cmd_embed(a, out),
        Command::Extract(a) => cmd_extract(a, out),
        Command::Capacity(a) => cmd_capacity(a, out),
        Command::Quality(a) => cmd_quality(a, out),
        Command::Report(a) => cmd_report(a, out),
    }
}

pub fn cmd_embed(a: &EmbedArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let key = a.key.resolve()?;
    let mode = a.codec.mode();
    let table = a.codec.table()?;
    let cover = image_at(&a.cover)?;
    let format = output_format(&a.out, cover.channels())?;
    let payload = match (&a.secret, &a.payload) {
        (Some(p), _) => Payload::Image(image_at(p)?),
        (None, Some(p)) => Payload::Bytes(fs::read(p).map_err(io_at(p))?),
        (None, None) => {
            return Err(CliError::Usage(
                "one of --secret or --payload is required".into(),
            ))
        }
    };
    let framed = frame_payload(&payload)?;
    let stego = embed(&cover, &framed, key, mode, &table)?;
    write_image(&stego, &a.out, format)
        .map_err(|e| CliError::Io(format!("{}: {e}", a.out.display())))?;

    let capacity = mode_capacity(&cover, mode, &table);
    let q = quality_report(&cover, &stego)?;
    writeln!(out, "seed: {:#018x}", key.seed)?;
    writeln!(out, "mode: {mode}  table: {}", table.name())?;
    writeln!(
        out,
        "embedded: {} bits ({} header + {} payload)",
        framed.len(),
        HEADER_BITS,
        framed.len() - HEADER_BITS
    )?;
    writeln!(
        out,
        "capacity: {capacity} bits ({:.2}% used)",
        100.0 * framed.len() as f64 / capacity.max(1) as f64
    )?;
    writeln!(
        out,
        "psnr: {} dB  ssim: {:.4}  uiq: {:.4}",
        format_db(q.psnr, 2),
        q.ssim,
        q.uiq
    )?;
    Ok(())
}

pub fn cmd_extract(a: &ExtractArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let key = a.key.resolve()?;
    let mode = a.codec.mode();
    let table = a.codec.table()?;
    let stego = image_at(&a.stego)?;
    let framed = extract(&stego, key, mode, &table)?;
    match parse_payload(&framed)? {
        Payload::Bytes(bytes) => {
            fs::write(&a.out, &bytes).map_err(io_at(&a.out))?;
            writeln!(
                out,
                "recovered {} bytes -> {}",
                bytes.len(),
                a.out.display()
            )?;
        }
        Payload::Image(img) => {
            let format = ImageFormat::from_path(&a.out, img.channels())
                .unwrap_or(ImageFormat::pnm_for(img.channels()));
            write_image(&img, &a.out, format)
                .map_err(|e| CliError::Io(format!("{}: {e}", a.out.display())))?;
            writeln!(
                out,
                "recovered {}x{} {} image -> {}",
                img.width(),
                img.height(),
                if img.channels() == 1 { "gray" } else { "rgb" },
                a.out.display()
            )?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct CapacityRow {
    lower: u8,
    upper: u8,
    bits: u32,
    pairs: u64,
}

#[derive(Debug, Serialize)]
struct CapacityOutput {
    table: String,
    total_bits: u64,
    usable_pairs: u64,
    skipped_pairs: u64,
    max_payload_bits: u64,
    ranges: Vec<CapacityRow>,
}

pub fn cmd_capacity(a: &CapacityArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let table = a.codec.table()?;
    let cover = image_at(&a.cover)?;
    let summary = capacity_summary(&cover, &table);
    let total_bits = mode_capacity(&cover, a.codec.mode(), &table);
    let report = CapacityOutput {
        table: table.name().to_string(),
        total_bits,
        usable_pairs: summary.usable_pairs,
        skipped_pairs: summary.skipped_pairs,
        max_payload_bits: total_bits.saturating_sub(HEADER_BITS as u64),
        ranges: summary
            .per_range
            .iter()
            .map(|(e, n)| CapacityRow {
                lower: e.lower,
                upper: e.upper,
                bits: e.capacity_bits,
                pairs: *n,
            })
            .collect(),
    };
    match a.format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, &report)
                .map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in &report.ranges {
                w.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.flush()?;
        }
        OutputFormat::Markdown => {
            writeln!(out, "total usable bits: {}", report.total_bits)?;
            writeln!(out, "max payload bits: {}", report.max_payload_bits)?;
            writeln!(out, "usable pairs: {}", report.usable_pairs)?;
            writeln!(out, "skipped pairs: {}", report.skipped_pairs)?;
            writeln!(out)?;
            writeln!(out, "| Range | Bits/pair | Usable pairs |")?;
            writeln!(out, "|---|---|---|")?;
            for r in &report.ranges {
                writeln!(
                    out,
                    "| [{}, {}] | {} | {} |",
                    r.lower, r.upper, r.bits, r.pairs
                )?;
            }
        }
    }
    Ok(())
}

pub fn write_quality(
    q: &QualityReport,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, q).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "mse,psnr,ssim,uiq")?;
            writeln!(
                out,
                "{},{},{},{}",
                q.mse,
                format_db(q.psnr, 6),
                q.ssim,
                q.uiq
            )?;
        }
        OutputFormat::Markdown => {
            writeln!(out, "| MSE | PSNR | SSIM | UIQ |")?;
            writeln!(out, "|---|---|---|---|")?;
            writeln!(
                out,
                "| {:.6} | {} | {:.4} | {:.4} |",
                q.mse,
                format_db(q.psnr, 2),
                q.ssim,
                q.uiq
            )?;
        }
    }
    Ok(())
}

pub fn cmd_quality(a: &QualityArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let x = image_at(&a.cover)?;
    let y = image_at(&a.stego)?;
    let q = quality_report(&x, &y)?;
    write_quality(&q, a.format, out)
}

pub fn cmd_report(a: &ReportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let key = a.key.resolve()?;
    let table = a.codec.table()?;
    let rows = run_report(
        &a.covers,
        &a.secrets,
        key,
        a.codec.mode(),
        &table,
        (a.cover_size, a.secret_size),
    )?;
    let mut buf = Vec::new();
    report::write_rows(&rows, a.format, &mut buf)?;
    match &a.out {
        Some(p) => fs::write(p, &buf).map_err(io_at(p))?,
        None => out.write_all(&buf)?,
    }
    let failed = rows.iter().filter(|r| !r.recovered).count();
    if failed > 0 {
        return Err(CliError::ReportFailed(failed));
    }
    Ok(())
}
