//! The `report.json` document and its serializer.

use std::io;

use modesig_core::{BandwidthScan, ModeTestReport, PersistenceDiagram};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub config: RunConfig,
    pub candidates: Vec<CandidateOut>,
    pub portraits: Vec<PortraitOut>,
    pub scan: Option<ScanOut>,
    pub persistence: Option<PersistenceOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateOut {
    pub location: Vec<f64>,
    pub density: f64,
    pub basin_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortraitOut {
    pub location: Vec<f64>,
    pub gamma_hat: Vec<f64>,
    pub gamma_rectangles: Vec<[f64; 2]>,
    pub c_interval: [f64; 2],
    pub significant: bool,
    pub level: f64,
    pub grad_norm: f64,
    pub grad_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOut {
    pub h: Vec<f64>,
    pub k: Vec<usize>,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    pub h_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceOut {
    /// `[death, birth]` per component, longest lifetime first.
    pub pairs: Vec<[f64; 2]>,
    pub band: f64,
    pub birth_points: Vec<Vec<f64>>,
    pub retained: Vec<bool>,
}

impl Report {
    pub fn new(config: RunConfig) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            config,
            candidates: Vec::new(),
            portraits: Vec::new(),
            scan: None,
            persistence: None,
        }
    }

    pub fn with_mode_test(mut self, r: &ModeTestReport) -> Self {
        self.candidates = r
            .candidates
            .iter()
            .map(|c| CandidateOut {
                location: c.location.clone(),
                density: c.density_value,
                basin_size: c.basin_size,
            })
            .collect();
        self.portraits = r
            .portraits
            .iter()
            .zip(&r.stage2_gradient_norms)
            .map(|(p, &g)| PortraitOut {
                location: p.mode.location.clone(),
                gamma_hat: p.gamma_hat.clone(),
                gamma_rectangles: p.gamma_rectangles.iter().map(|i| [i.lo, i.hi]).collect(),
                c_interval: [p.c_interval.lo, p.c_interval.hi],
                significant: p.significant,
                level: p.level,
                grad_norm: g,
                grad_tol: r.grad_tol,
            })
            .collect();
        self
    }

    pub fn with_scan(mut self, s: &BandwidthScan) -> Self {
        self.scan = Some(ScanOut {
            h: s.h.clone(),
            k: s.k.clone(),
            n: s.n_significant.clone(),
            h_hat: s.h_hat,
        });
        self
    }

    pub fn with_persistence(mut self, d: &PersistenceDiagram) -> Self {
        let cut = 2.0 * d.band;
        self.persistence = Some(PersistenceOut {
            pairs: d.pairs.iter().map(|p| [p.death, p.birth]).collect(),
            band: d.band,
            birth_points: d.pairs.iter().map(|p| p.birth_point.clone()).collect(),
            retained: d.pairs.iter().map(|p| p.lifetime() > cut).collect(),
        });
        self
    }

    pub fn significant_count(&self) -> usize {
        self.portraits.iter().filter(|p| p.significant).count()
    }

    pub fn to_json(&self) -> Vec<u8> {
        to_json_bytes(self)
    }
}

/// Pretty printer that writes every float with 17 significant digits.
struct FullPrecision<'a>(PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident),*) => {$(
        fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
            self.0.$name(w)
        }
    )*};
    (first $($name:ident),*) => {$(
        fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
            self.0.$name(w, first)
        }
    )*};
}

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    delegate!(begin_array, end_array, end_array_value, begin_object, end_object, begin_object_value, end_object_value);
    delegate!(first begin_array_value, begin_object_key);
}

/// Serializes `value` as pretty JSON with 17 significant digits per float.
/// Non-finite floats become `null`.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory JSON serialization cannot fail");
    out.push(b'\n');
    out
}
