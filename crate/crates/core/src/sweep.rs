//! Capacity versus PSNR sweeps and their CSV report.
//!
//! A sweep embeds a seeded pseudo-random message into every image for every
//! (predictor, capacity) pair, checks that extraction gives back both the
//! message and the cover, and records the distortion.
//!
//! Configs are TOML; relative paths resolve against the config file:
//!
//! ```toml
//! images = ["camera.pgm", "moon.pgm"]
//! capacities = [1000, 5000, 10000]
//! predictors = ["quad", "rhombus"]
//! seed = 7
//! gamma = 0.5
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Deserialize;

use crate::bits::BitStream;
use crate::codec;
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::par::{self, ExecMode};
use crate::pgm::load_pgm;
use crate::predictor::{PredictorKind, PredictorParams};

pub use crate::predictor::rhombus::rhombus_predict;

pub const CSV_HEADER: &str = "image,predictor,capacity_bits,psnr_db,tau1,tau2,tau3,tau4,seconds,ok";

/// Error name recorded when extraction succeeds but disagrees with the input.
pub const ROUND_TRIP_MISMATCH: &str = "RoundTripMismatch";

/// Seeded linear congruential bit source (64-bit state, top bit out).
#[derive(Debug, Clone)]
pub struct LcgBits {
    state: u64,
}

impl LcgBits {
    const MUL: u64 = 6364136223846793005;
    const INC: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        LcgBits { state: seed }
    }
}

impl Iterator for LcgBits {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        self.state = self.state.wrapping_mul(Self::MUL).wrapping_add(Self::INC);
        Some(self.state >> 63 == 1)
    }
}

/// First `n` bits of the generator seeded with `seed`.
pub fn message_bits(seed: u64, n: usize) -> BitStream {
    LcgBits::new(seed).take(n).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub images: Vec<PathBuf>,
    pub capacities: Vec<usize>,
    pub predictors: Vec<PredictorKind>,
    pub seed: u64,
    pub params: PredictorParams,
    pub output: Option<PathBuf>,
    /// Write measured seconds; off by default so the CSV is reproducible.
    pub record_time: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            images: Vec::new(),
            capacities: Vec::new(),
            predictors: vec![PredictorKind::Quad],
            seed: 1,
            params: PredictorParams::default(),
            output: None,
            record_time: false,
        }
    }
}

/// On-disk form of [`SweepConfig`]; solver keys override the defaults.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    images: Vec<PathBuf>,
    #[serde(default)]
    capacities: Vec<usize>,
    predictors: Option<Vec<String>>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    record_time: Option<bool>,
    sigma_l: Option<f64>,
    sigma_x: Option<f64>,
    gamma: Option<f64>,
    rho: Option<f64>,
    step: Option<f64>,
    window: Option<usize>,
    admm_max_iters: Option<usize>,
    pg_max_iters: Option<usize>,
    primal_tol: Option<f64>,
    pg_tol: Option<f64>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl SweepConfig {
    /// Parses TOML config text; relative image and output paths are resolved
    /// against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("sweep config: {}", e.message())))?;
        let mut cfg = SweepConfig {
            images: raw.images.iter().map(|p| base_dir.join(p)).collect(),
            capacities: raw.capacities,
            output: raw.out.map(|p| base_dir.join(p)),
            ..SweepConfig::default()
        };
        if let Some(names) = raw.predictors {
            cfg.predictors = names.iter().map(|s| s.parse()).collect::<Result<_>>()?;
        }
        set(&mut cfg.seed, raw.seed);
        set(&mut cfg.record_time, raw.record_time);
        let p = &mut cfg.params;
        set(&mut p.sigma_l, raw.sigma_l);
        set(&mut p.sigma_x, raw.sigma_x);
        set(&mut p.gamma, raw.gamma);
        set(&mut p.rho, raw.rho);
        set(&mut p.step_t, raw.step);
        set(&mut p.window, raw.window);
        set(&mut p.admm_max_iters, raw.admm_max_iters);
        set(&mut p.pg_max_iters, raw.pg_max_iters);
        set(&mut p.primal_tol, raw.primal_tol);
        set(&mut p.pg_tol, raw.pg_tol);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.predictors.is_empty() {
            return Err(Error::InvalidParameter("sweep needs at least one predictor".into()));
        }
        if self.capacities.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("capacities must be strictly increasing".into()));
        }
        self.params.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub image: String,
    pub predictor: PredictorKind,
    pub capacity_bits: usize,
    /// PSNR in dB on success, otherwise the error name.
    pub outcome: std::result::Result<f64, &'static str>,
    pub taus: [f64; 4],
    pub seconds: f64,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn psnr(&self) -> Option<f64> {
        self.outcome.ok()
    }
}

fn run_one(
    name: &str,
    cover: &GrayImage,
    predictor: PredictorKind,
    capacity: usize,
    cfg: &SweepConfig,
) -> SweepRow {
    let start = Instant::now();
    let message = message_bits(cfg.seed, capacity);
    let mut taus = [0.0; 4];
    let outcome = codec::embed(cover, &message, predictor, &cfg.params).and_then(|(stego, report)| {
        for (t, layer) in taus.iter_mut().zip(&report.layers) {
            *t = layer.tau.tau();
        }
        let (recovered, restored) = codec::extract(&stego, predictor, &cfg.params)?;
        Ok((recovered == message && &restored == cover, report.psnr))
    });
    let outcome = match outcome {
        Ok((true, psnr)) => Ok(psnr),
        Ok((false, _)) => Err(ROUND_TRIP_MISMATCH),
        Err(e) => Err(e.name()),
    };
    SweepRow {
        image: name.to_string(),
        predictor,
        capacity_bits: capacity,
        outcome,
        taus,
        seconds: if cfg.record_time {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        },
    }
}

/// Sweeps already-loaded images. Rows come back in config order: image, then
/// predictor, then capacity.
pub fn run_sweep_images(images: &[(String, GrayImage)], cfg: &SweepConfig, mode: ExecMode) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let jobs: Vec<(usize, PredictorKind, usize)> = images
        .iter()
        .enumerate()
        .flat_map(|(i, _)| {
            cfg.predictors
                .iter()
                .flat_map(move |&p| cfg.capacities.iter().map(move |&c| (i, p, c)))
        })
        .collect();
    Ok(par::map(mode.effective(), &jobs, |&(i, p, c)| {
        run_one(&images[i].0, &images[i].1, p, c, cfg)
    }))
}

fn image_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Loads the configured images, runs the sweep and writes the CSV to
/// `cfg.output` when set.
pub fn run_sweep(cfg: &SweepConfig, mode: ExecMode) -> Result<Vec<SweepRow>> {
    let images = cfg
        .images
        .iter()
        .map(|p| Ok((image_name(p), load_pgm(p)?)))
        .collect::<Result<Vec<_>>>()?;
    let rows = run_sweep_images(&images, cfg, mode)?;
    if let Some(out) = &cfg.output {
        fs::write(out, to_csv(&rows, cfg.seed))?;
    }
    Ok(rows)
}

/// PSNR of quad minus PSNR of rhombus for every (image, capacity) where both
/// rows succeeded, in row order.
pub fn quad_rhombus_gaps(rows: &[SweepRow]) -> Vec<(String, usize, f64)> {
    rows.iter()
        .filter(|r| r.predictor == PredictorKind::Quad)
        .filter_map(|q| {
            let r = rows.iter().find(|r| {
                r.predictor == PredictorKind::Rhombus && r.image == q.image && r.capacity_bits == q.capacity_bits
            })?;
            Some((q.image.clone(), q.capacity_bits, q.psnr()? - r.psnr()?))
        })
        .collect()
}

fn csv_record(r: &SweepRow) -> Vec<String> {
    let psnr = match r.outcome {
        Ok(v) => format!("{v:.4}"),
        Err(name) => name.to_string(),
    };
    let mut rec = vec![r.image.clone(), r.predictor.to_string(), r.capacity_bits.to_string(), psnr];
    rec.extend(r.taus.iter().map(|t| format!("{t:.2}")));
    rec.push(format!("{:.3}", r.seconds));
    rec.push(r.ok().to_string());
    rec
}

/// The CSV report: a `# seed=` line, the header, one row per sweep row, then
/// `# gap` comment lines with quad-minus-rhombus PSNR differences.
pub fn to_csv(rows: &[SweepRow], seed: u64) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = CSV_HEADER.split(',').collect();
    // writing to a Vec cannot fail
    w.write_record(&header).expect("in-memory CSV");
    for r in rows {
        w.write_record(csv_record(r)).expect("in-memory CSV");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV fields are UTF-8");
    let mut out = format!("# seed={seed}\n{body}");
    for (image, capacity, gap) in quad_rhombus_gaps(rows) {
        out.push_str(&format!("# gap quad-rhombus image={image} capacity_bits={capacity} db={gap:+.4}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcg_is_seeded_and_prefix_stable() {
        let a = message_bits(7, 1000);
        assert_eq!(a, message_bits(7, 1000));
        assert_ne!(a, message_bits(8, 1000));
        assert_eq!(message_bits(7, 10).as_slice(), &a.as_slice()[..10]);
        let ones = a.as_slice().iter().filter(|&&b| b).count();
        assert!((400..600).contains(&ones), "{ones}");
    }

    #[test]
    fn parse_config() {
        let text = r#"
            # sweep
            images = ["a.pgm", "sub/b.pgm"]
            capacities = [10, 20]
            predictors = ["quad", "rhombus"]
            seed = 9 # trailing
            gamma = 0.25
            window = 9
            record_time = true
        "#;
        let cfg = SweepConfig::parse(text, Path::new("/data")).unwrap();
        assert_eq!(cfg.images, vec![PathBuf::from("/data/a.pgm"), PathBuf::from("/data/sub/b.pgm")]);
        assert_eq!(cfg.capacities, vec![10, 20]);
        assert_eq!(cfg.predictors, vec![PredictorKind::Quad, PredictorKind::Rhombus]);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.params.gamma, 0.25);
        assert_eq!(cfg.params.window, 9);
        assert!(cfg.record_time);
    }

    #[test]
    fn parse_rejects_bad_configs() {
        let base = Path::new(".");
        assert!(SweepConfig::parse("capacities = [20, 10]", base).is_err());
        assert!(SweepConfig::parse("capacities = [10, 10]", base).is_err());
        assert!(SweepConfig::parse("predictors = []", base).is_err());
        assert!(SweepConfig::parse(r#"predictors = ["pde"]"#, base).is_err());
        assert!(SweepConfig::parse(r#"colour = "red""#, base).is_err());
        assert!(SweepConfig::parse("just words", base).is_err());
        assert!(SweepConfig::parse(r#"seed = "x""#, base).is_err());
        assert!(SweepConfig::parse("window = 1", base).is_err());
        let defaults = SweepConfig::parse("", base).unwrap();
        assert_eq!(defaults, SweepConfig::default());
    }

    #[test]
    fn empty_capacity_list_gives_header_only_csv() {
        let cfg = SweepConfig::default();
        let img = GrayImage::filled(100, 10, 100);
        let rows = run_sweep_images(&[("flat".into(), img)], &cfg, ExecMode::Sequential).unwrap();
        assert!(rows.is_empty());
        assert_eq!(to_csv(&rows, 1), format!("# seed=1\n{CSV_HEADER}\n"));
    }

    #[test]
    fn failed_rows_carry_error_name() {
        let cfg = SweepConfig {
            capacities: vec![10],
            ..SweepConfig::default()
        };
        let tiny = GrayImage::filled(20, 20, 100);
        let rows = run_sweep_images(&[("tiny".into(), tiny)], &cfg, ExecMode::Sequential).unwrap();
        assert_eq!(rows[0].outcome, Err("ImageTooSmall"));
        let csv = to_csv(&rows, 1);
        assert!(csv.ends_with("tiny,quad,10,ImageTooSmall,0.00,0.00,0.00,0.00,0.000,false\n"), "{csv}");
    }

    #[test]
    fn awkward_image_names_are_quoted() {
        let row = SweepRow {
            image: "a,b".into(),
            predictor: PredictorKind::Gtv,
            capacity_bits: 5,
            outcome: Ok(60.0),
            taus: [0.01, 0.02, 0.03, 0.04],
            seconds: 0.0,
        };
        let csv = to_csv(&[row], 0);
        assert_eq!(csv.lines().nth(2), Some("\"a,b\",gtv,5,60.0000,0.01,0.02,0.03,0.04,0.000,true"));
    }

    #[test]
    fn gaps_pair_matching_rows() {
        let row = |p, c, v| SweepRow {
            image: "x".into(),
            predictor: p,
            capacity_bits: c,
            outcome: v,
            taus: [0.0; 4],
            seconds: 0.0,
        };
        let rows = vec![
            row(PredictorKind::Quad, 10, Ok(50.0)),
            row(PredictorKind::Quad, 20, Ok(49.0)),
            row(PredictorKind::Rhombus, 10, Ok(49.5)),
            row(PredictorKind::Rhombus, 20, Err("CapacityUnreachable")),
        ];
        assert_eq!(quad_rhombus_gaps(&rows), vec![("x".to_string(), 10, 0.5)]);
        assert!(to_csv(&rows, 3).ends_with("# gap quad-rhombus image=x capacity_bits=10 db=+0.5000\n"));
    }
}
