//! Serializable result records and their CSV rendering.

use ringconc_core::rdm::TwoSiteRdm;
use serde::{Deserialize, Serialize};

/// One amplitude keyed by the gap signature of its necklace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmplitudeEntry {
    pub gaps: Vec<u32>,
    pub value: f64,
}

/// Output of a single computation subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRecord {
    pub method: String,
    pub n: u32,
    pub p: u32,
    pub q: u32,
    pub c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_opt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub locally_optimal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subring_count: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subring_size: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subring_ups: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<AmplitudeEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub runtime_ms: u64,
    pub tool_version: String,
}

impl ResultRecord {
    pub fn new(method: &str, n: u32, p: u32, q: u32, c: f64) -> Self {
        ResultRecord {
            method: method.to_string(),
            n,
            p,
            q,
            c,
            s_opt: None,
            lambda: None,
            lhs: None,
            rhs: None,
            locally_optimal: None,
            subring_count: None,
            subring_size: None,
            subring_ups: None,
            amplitudes: None,
            seed: None,
            runtime_ms: 0,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn csv_header() -> &'static str {
        "method,n,p,q,c,s_opt,lambda,lhs,rhs,locally_optimal,amplitudes"
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: &Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        let amp = self
            .amplitudes
            .as_ref()
            .map(|entries| {
                entries
                    .iter()
                    .map(|e| {
                        let gaps: Vec<String> = e.gaps.iter().map(|g| g.to_string()).collect();
                        format!("a_{}={:.10}", gaps.join("."), e.value)
                    })
                    .collect::<Vec<_>>()
                    .join(";")
            })
            .unwrap_or_default();
        format!(
            "{},{},{},{},{:.17e},{},{},{},{},{},{}",
            self.method,
            self.n,
            self.p,
            self.q,
            self.c,
            opt(&self.s_opt),
            opt(&self.lambda),
            opt(&self.lhs),
            opt(&self.rhs),
            self.locally_optimal
                .map(|b| b.to_string())
                .unwrap_or_default(),
            amp
        )
    }
}

/// Serialized form of one sweep evaluation point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPointRecord {
    pub s: f64,
    pub ground_energy: f64,
    pub linearized: f64,
    pub v: f64,
    pub w: f64,
    pub y: f64,
    pub z: f64,
    pub concurrence: f64,
}

impl SweepPointRecord {
    pub fn from_parts(
        s: f64,
        ground_energy: f64,
        linearized: f64,
        rdm: &TwoSiteRdm,
        c: f64,
    ) -> Self {
        SweepPointRecord {
            s,
            ground_energy,
            linearized,
            v: rdm.v,
            w: rdm.w,
            y: rdm.y,
            z: rdm.z,
            concurrence: c,
        }
    }
}

/// Full sweep output for one (N, p).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: u32,
    pub p: u32,
    pub s_grid: String,
    pub s_opt: f64,
    pub c_max: f64,
    pub ow_limit: f64,
    pub ow_is_best: bool,
    pub amplitudes: Vec<AmplitudeEntry>,
    pub points: Vec<SweepPointRecord>,
    pub runtime_ms: u64,
    pub tool_version: String,
}

/// One row of the p = 2 concurrence table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableRow {
    pub n: u32,
    pub p: u32,
    pub c_exact: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_closed_form: Option<f64>,
    pub coefficients: Vec<AmplitudeEntry>,
}

/// Basis dump payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisDump {
    pub n: u32,
    pub p: u32,
    pub necklace_count: usize,
    pub dimension: usize,
    pub elements: Vec<BasisElementRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisElementRecord {
    pub representative: String,
    pub orbit_size: u32,
    pub pair_count: u32,
    pub members: Vec<BasisNecklaceRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisNecklaceRecord {
    pub gaps: Vec<u32>,
    pub representative: String,
    pub period: u32,
}

/// Formats a mask as a site string (site 0 rightmost).
pub fn mask_string(mask: u64, n: u32) -> String {
    (0..n)
        .rev()
        .map(|i| if mask >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}
