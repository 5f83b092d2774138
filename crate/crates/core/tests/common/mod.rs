//! Shared workloads and the golden-value fixture used by the acceptance and regression tests.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use focklab::fekete::fekete;
use focklab::frames::localized::build_localized_frame;
use focklab::frames::{
    interpolation_lower_bound, localized_frame_bounds, sharp_experiment, wiener_probe, QNorm, SharpReport,
};
use focklab::random::{seeded_rng, unit_coefficients};
use focklab::{lattice, KernelEvaluator, OrthoBasis, Weight};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

pub const GOLDEN_BAND: f64 = 0.2;
pub const FEKETE_TREND_DEGREES: [usize; 8] = [5, 10, 15, 20, 25, 30, 35, 40];
pub const WIENER_TRIALS: usize = 64;
pub const WIENER_SEED: u64 = 14;
pub const RECONSTRUCTION_SEED: u64 = 12;

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden.json")
}

/// Everything that determines the golden values.
pub fn golden_config() -> serde_json::Value {
    json!({
        "weight": Weight::standard(),
        "fekete_min_separation": { "degrees": FEKETE_TREND_DEGREES, "refine_steps": focklab::fekete::DEFAULT_REFINE_STEPS },
        "fekete_sup_residual": { "N": 20 },
        "riesz_lattice": { "a": 2.0, "R": 10.0 },
        "sharp": { "epsilon": 0.2, "N": 30 },
        "wiener": { "lattice": 0.8, "N": 40, "margin": focklab::frames::SAMPLING_MARGIN, "trials": WIENER_TRIALS, "seed": WIENER_SEED },
        "localized": { "N": 40, "delta": [0.1, 0.05], "functions": 20, "seed": RECONSTRUCTION_SEED },
    })
}

pub fn config_hash(config: &serde_json::Value) -> String {
    hex::encode(Sha256::digest(serde_json::to_vec(config).expect("config serializes")))
}

#[derive(Serialize, Deserialize)]
pub struct Golden {
    pub config_hash: String,
    pub band: f64,
    pub config: serde_json::Value,
    pub values: BTreeMap<String, f64>,
}

impl Golden {
    pub fn load() -> Result<Golden, String> {
        let text = std::fs::read_to_string(fixture_path())
            .map_err(|e| format!("golden fixture missing ({e}); record it with `-- --freeze`"))?;
        let g: Golden = serde_json::from_str(&text).map_err(|e| format!("golden fixture unreadable: {e}"))?;
        let expected = config_hash(&golden_config());
        if g.config_hash != expected {
            return Err(format!(
                "golden fixture was recorded for config {} but the current config hashes to {expected}",
                g.config_hash
            ));
        }
        Ok(g)
    }

    pub fn save(values: BTreeMap<String, f64>) -> std::io::Result<()> {
        let config = golden_config();
        let g = Golden {
            config_hash: config_hash(&config),
            band: GOLDEN_BAND,
            config,
            values,
        };
        let path = fixture_path();
        std::fs::create_dir_all(path.parent().expect("fixture dir"))?;
        std::fs::write(path, serde_json::to_string_pretty(&g).expect("serializes") + "\n")
    }

    /// `Ok` when `value` is within the band around the recorded golden value.
    pub fn check(&self, key: &str, value: f64) -> Result<String, String> {
        let g = *self.values.get(key).ok_or_else(|| format!("no golden value for {key}"))?;
        let rel = (value / g - 1.0).abs();
        let msg = format!("{key} = {value:.6e} (golden {g:.6e}, off {:.1}%)", rel * 100.0);
        if rel <= self.band {
            Ok(msg)
        } else {
            Err(msg)
        }
    }
}

pub struct FeketeTrend {
    pub separations: Vec<(usize, f64)>,
    pub min_separation: f64,
}

pub fn fekete_trend() -> FeketeTrend {
    let rows = focklab::fekete::fekete_separation_trend(&Weight::standard(), &FEKETE_TREND_DEGREES)
        .expect("Fekete trend runs");
    let separations: Vec<(usize, f64)> = rows.iter().map(|r| (r.n, r.separation)).collect();
    let min_separation = separations.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    FeketeTrend {
        separations,
        min_separation,
    }
}

pub fn fekete_sup_residual_n20() -> f64 {
    let f = fekete(OrthoBasis::new(&Weight::standard(), 20).unwrap()).unwrap();
    f.sup_norm_residual().unwrap()
}

pub fn riesz_lattice2() -> f64 {
    let k = KernelEvaluator::closed_form(&Weight::standard()).unwrap();
    interpolation_lower_bound(&k, lattice(2.0, 2.0, 10.0).unwrap().points())
        .unwrap()
        .lower
}

pub fn sharp_n30() -> SharpReport {
    sharp_experiment(&Weight::standard(), 0.2, 30).expect("sharp experiment runs")
}

/// Collocation of `lattice(0.8) ∩ B_{R_40 + margin}` in the degree-40 Gaussian model.
pub fn lattice08_collocation() -> focklab::linalg::CMatrix {
    let b = OrthoBasis::new(&Weight::standard(), 40).unwrap();
    let r = b.bulk_radius() + focklab::frames::SAMPLING_MARGIN;
    let s = lattice(0.8, 0.8, r).unwrap();
    b.weighted_collocation(&s.restricted_to_disk(r))
}

pub fn wiener_lattice08() -> [f64; 3] {
    let a = lattice08_collocation();
    let p = focklab::linalg::CMatrix::identity(40, 40);
    let est = wiener_probe(&a, &p, &[QNorm::One, QNorm::Two, QNorm::Inf], WIENER_TRIALS, WIENER_SEED).unwrap();
    [est[0].estimate, est[1].estimate, est[2].estimate]
}

pub struct LocalizedRun {
    pub frame_lower: f64,
    pub frame_upper: f64,
    pub max_ratio_coarse: f64,
    pub max_ratio_fine: f64,
}

/// Frame bounds at `δ = 0.1` and max reconstruction ratios at `δ = 0.1, 0.05` over 20
/// random unit-norm `f` (`N = 40`).
pub fn localized_run() -> LocalizedRun {
    let b = std::sync::Arc::new(OrthoBasis::new(&Weight::standard(), 40).unwrap());
    let mut rng = seeded_rng(RECONSTRUCTION_SEED);
    let fs: Vec<_> = (0..20).map(|_| unit_coefficients(&mut rng, 40)).collect();
    let coarse = build_localized_frame(b.clone(), 0.1).unwrap();
    let fine = build_localized_frame(b, 0.05).unwrap();
    let bounds = localized_frame_bounds(&coarse);
    let max = |v: Vec<f64>| v.into_iter().fold(0.0, f64::max);
    LocalizedRun {
        frame_lower: bounds.lower,
        frame_upper: bounds.upper,
        max_ratio_coarse: max(coarse.reconstruction_ratios(&fs)),
        max_ratio_fine: max(fine.reconstruction_ratios(&fs)),
    }
}
