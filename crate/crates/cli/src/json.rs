//! JSON artifact schemas and the number formatter shared by every verb.
//!
//! All angles in stored artifacts are radians; the `--degrees` flag only
//! changes presentation (bounds tables and log lines).  Readers ignore
//! unknown fields, so a file produced by `construct` (which embeds its
//! verification report and run config) feeds `verify` unchanged.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use sepcap_core::arrangement::{CellMetrics, Tiling};
use sepcap_core::covering::CoveringReport;
use sepcap_core::geom::{GreatCircle, UnitVector};
use sepcap_core::molnar::{DCell, MCell, RefinedCell, RefinedKind, SideFate};
use sepcap_core::optimizer::{RestartSummary, SearchConfig, SearchKind, SearchResult};
use sepcap_core::packing::{CapPacking, PackingReport, SeparationWitness};

use crate::Failure;

/// JSON formatter that prints every float with 17 significant digits, the
/// smallest count that reproduces any f64 exactly on re-parse.
pub struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{:.16e}", value)
    }
}

pub fn to_string<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value
        .serialize(&mut ser)
        .map_err(|e| Failure::Internal(format!("serialization failed: {e}")))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Failure::Internal(format!("non-UTF-8 output: {e}")))
}

/// One float with 17 significant digits for OBJ output and log lines.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn vec3(u: UnitVector) -> [f64; 3] {
    u.as_array()
}

pub fn unit(a: [f64; 3], what: &str) -> Result<UnitVector, Failure> {
    UnitVector::new(a[0], a[1], a[2])
        .map_err(|e| Failure::Usage(format!("{what}: not a unit vector: {e}")))
}

/// Resolved run configuration echoed into every artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigDto {
    pub seed: u64,
    pub tol_angle: f64,
    pub tol_area: f64,
    pub degrees: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessDto {
    pub poles: Vec<[f64; 3]>,
    /// Triples `[i, j, c]`: caps `i < j` are separated by circle `c`.
    pub pairs: Vec<[usize; 3]>,
}

impl WitnessDto {
    pub fn from_witness(w: &SeparationWitness) -> Self {
        WitnessDto {
            poles: w.circles.iter().map(|gc| vec3(gc.pole())).collect(),
            pairs: w
                .pair_assignment
                .iter()
                .map(|(&(i, j), &c)| [i, j, c])
                .collect(),
        }
    }

    pub fn to_witness(&self) -> Result<SeparationWitness, Failure> {
        let circles = self
            .poles
            .iter()
            .map(|&p| Ok(GreatCircle::new(unit(p, "witness pole")?)))
            .collect::<Result<Vec<_>, Failure>>()?;
        let mut pair_assignment = BTreeMap::new();
        for &[i, j, c] in &self.pairs {
            if c >= circles.len() {
                return Err(Failure::Usage(format!(
                    "witness pair [{i}, {j}] names circle {c} of {}",
                    circles.len()
                )));
            }
            pair_assignment.insert((i.min(j), i.max(j)), c);
        }
        Ok(SeparationWitness { circles, pair_assignment })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PackingReportDto {
    pub is_packing: bool,
    pub is_ts: bool,
    pub density: f64,
    pub failures: Vec<[usize; 2]>,
}

impl PackingReportDto {
    pub fn from_report(r: &PackingReport) -> Self {
        PackingReportDto {
            is_packing: r.is_packing,
            is_ts: r.is_ts,
            density: r.density,
            failures: r.failures.iter().map(|&(i, j)| [i, j]).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PackingDto {
    pub radius: f64,
    pub centers: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PackingReportDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigDto>,
}

impl PackingDto {
    pub fn from_packing(p: &CapPacking, w: Option<&SeparationWitness>) -> Self {
        PackingDto {
            radius: p.radius(),
            centers: p.centers().iter().map(|&c| vec3(c)).collect(),
            witness: w.map(WitnessDto::from_witness),
            report: None,
            config: None,
        }
    }

    pub fn to_packing(&self) -> Result<(CapPacking, Option<SeparationWitness>), Failure> {
        let centers = self
            .centers
            .iter()
            .map(|&c| unit(c, "cap center"))
            .collect::<Result<Vec<_>, Failure>>()?;
        let packing = CapPacking::new(centers, self.radius)
            .map_err(|e| Failure::Usage(format!("bad packing: {e}")))?;
        let witness = self.witness.as_ref().map(|w| w.to_witness()).transpose()?;
        Ok((packing, witness))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleDto {
    pub pole: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeDto {
    pub vertices: [usize; 2],
    pub circle: usize,
    pub midpoint: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellDto {
    pub vertex_indices: Vec<usize>,
    /// Circle of the side joining vertex `k` to vertex `k + 1`, cyclically.
    pub circle_indices: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellMetricDto {
    pub inradius: f64,
    pub incenter: [f64; 3],
    pub circumradius: f64,
    pub circumcenter: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsDto {
    pub min_inradius: f64,
    pub max_circumradius: f64,
    pub per_cell: Vec<CellMetricDto>,
}

impl MetricsDto {
    pub fn from_metrics(m: &CellMetrics) -> Self {
        MetricsDto {
            min_inradius: m.min_inradius,
            max_circumradius: m.max_circumradius,
            per_cell: m
                .per_cell
                .iter()
                .map(|c| CellMetricDto {
                    inradius: c.inradius,
                    incenter: vec3(c.incenter),
                    circumradius: c.circumradius,
                    circumcenter: vec3(c.circumcenter),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TilingDto {
    pub circles: Vec<CircleDto>,
    pub vertices: Vec<[f64; 3]>,
    pub edges: Vec<EdgeDto>,
    pub cells: Vec<CellDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigDto>,
}

impl TilingDto {
    pub fn from_tiling(t: &Tiling, m: Option<&CellMetrics>, config: Option<ConfigDto>) -> Self {
        TilingDto {
            circles: t.circles.iter().map(|gc| CircleDto { pole: vec3(gc.pole()) }).collect(),
            vertices: t.vertices.iter().map(|&v| vec3(v)).collect(),
            edges: t
                .edges
                .iter()
                .map(|e| EdgeDto {
                    vertices: [e.vertices.0, e.vertices.1],
                    circle: e.circle,
                    midpoint: vec3(e.midpoint),
                })
                .collect(),
            cells: t
                .cells
                .iter()
                .map(|c| CellDto {
                    vertex_indices: c.vertex_indices.clone(),
                    circle_indices: c.sides.iter().map(|s| t.edges[s.edge].circle).collect(),
                })
                .collect(),
            metrics: m.map(MetricsDto::from_metrics),
            config,
        }
    }

}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TilingRefDto {
    pub circles: Vec<CircleDto>,
}

impl TilingRefDto {
    pub fn to_circles(&self) -> Result<Vec<GreatCircle>, Failure> {
        self.circles
            .iter()
            .map(|c| Ok(GreatCircle::new(unit(c.pole, "circle pole")?)))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoveringReportDto {
    pub is_ts_covering: bool,
    pub density: f64,
    pub uncovered_cells: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<usize>>,
}

impl CoveringReportDto {
    pub fn from_report(r: &CoveringReport) -> Self {
        CoveringReportDto {
            is_ts_covering: r.is_ts_covering,
            density: r.density,
            uncovered_cells: r.uncovered_cells.clone(),
            assignment: r.assignment.clone(),
        }
    }
}

/// Covering artifact: the packing fields plus the tiling whose cells the
/// caps must cover and an optional fixed cell-to-cap assignment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoveringDto {
    pub radius: f64,
    pub centers: Vec<[f64; 3]>,
    pub tiling: TilingRefDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<CoveringReportDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapDto {
    pub center: [f64; 3],
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DelaunayCellDto {
    pub vertices: Vec<usize>,
    pub circumcap: CapDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separating_side: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "fate", rename_all = "snake_case")]
pub enum FateDto {
    Kept,
    BridgedOut,
    Invaded { apex: [f64; 3] },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MolnarCellDto {
    pub base: Vec<usize>,
    pub circumcap: CapDto,
    pub fates: Vec<FateDto>,
    pub boundary: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefinedCellDto {
    pub kind: String,
    pub boundary: Vec<[f64; 3]>,
    pub center_vertex: Vec<bool>,
    /// Sum of interior angles at packing-center vertices.
    pub phi: f64,
    pub area: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionDto {
    pub points: Vec<[f64; 3]>,
    pub delaunay: Vec<DelaunayCellDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub molnar: Option<Vec<MolnarCellDto>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined: Option<Vec<RefinedCellDto>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bridge_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigDto>,
}

pub fn delaunay_cell_dto(c: &DCell) -> DelaunayCellDto {
    DelaunayCellDto {
        vertices: c.vertices.clone(),
        circumcap: CapDto {
            center: vec3(c.circumcap.center()),
            radius: c.circumcap.radius(),
        },
        separating_side: c.separating_side,
    }
}

pub fn molnar_cell_dto(c: &MCell) -> MolnarCellDto {
    MolnarCellDto {
        base: c.base.clone(),
        circumcap: CapDto {
            center: vec3(c.circumcap.center()),
            radius: c.circumcap.radius(),
        },
        fates: c
            .fates
            .iter()
            .map(|f| match f {
                SideFate::Kept => FateDto::Kept,
                SideFate::BridgedOut => FateDto::BridgedOut,
                SideFate::Invaded { apex } => FateDto::Invaded { apex: vec3(*apex) },
            })
            .collect(),
        boundary: c.boundary.iter().map(|&v| vec3(v)).collect(),
    }
}

pub fn refined_cell_dto(c: &RefinedCell) -> RefinedCellDto {
    RefinedCellDto {
        kind: match c.kind {
            RefinedKind::TypeA => String::from("type_a"),
            RefinedKind::TypeB => String::from("type_b"),
        },
        boundary: c.boundary.iter().map(|&v| vec3(v)).collect(),
        center_vertex: c.center_vertex.clone(),
        phi: c.phi,
        area: c.area,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignCellDto {
    pub signs: Vec<i8>,
    pub vertices: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HighdimMetricsDto {
    pub cell_count: usize,
    pub cell_count_bound: u64,
    pub max_circumradius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HighdimDto {
    pub d: usize,
    pub poles: Vec<Vec<f64>>,
    pub cells: Vec<SignCellDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<HighdimMetricsDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchKindDto {
    pub objective: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

impl SearchKindDto {
    pub fn from_kind(kind: &SearchKind) -> Self {
        match *kind {
            SearchKind::MaxMinInradius { n } => SearchKindDto {
                objective: String::from("min-inradius"),
                n: Some(n),
                k: None,
            },
            SearchKind::MinMaxCircumradius { n } => SearchKindDto {
                objective: String::from("max-circumradius"),
                n: Some(n),
                k: None,
            },
            SearchKind::MaxTsRadius { k } => SearchKindDto {
                objective: String::from("ts-radius"),
                n: None,
                k: Some(k),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchEchoDto {
    pub restarts: usize,
    pub max_iters: usize,
    pub initial_step: f64,
    pub shrink_levels: usize,
}

impl SearchEchoDto {
    pub fn from_config(c: &SearchConfig) -> Self {
        SearchEchoDto {
            restarts: c.restarts,
            max_iters: c.max_iters,
            initial_step: c.initial_step,
            shrink_levels: c.shrink_levels,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RestartDto {
    pub restart: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_value: Option<f64>,
    pub best_value: f64,
    pub evaluations: usize,
}

impl RestartDto {
    pub fn from_summary(s: &RestartSummary) -> Self {
        RestartDto {
            restart: s.restart,
            seed: s.seed,
            start_value: s.start_value,
            best_value: s.best_value,
            evaluations: s.evaluations,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizeDto {
    pub kind: SearchKindDto,
    pub objective: f64,
    pub certified: f64,
    /// False when no descent step beat the best starting configuration
    /// (expected whenever a canonical start is already optimal).
    pub improved_over_starts: bool,
    pub poles: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packing: Option<PackingDto>,
    pub history: Vec<RestartDto>,
    pub search: SearchEchoDto,
    pub config: ConfigDto,
}

impl OptimizeDto {
    pub fn from_result(
        r: &SearchResult,
        improved: bool,
        search: &SearchConfig,
        config: ConfigDto,
    ) -> Self {
        OptimizeDto {
            kind: SearchKindDto::from_kind(&r.kind),
            objective: r.objective,
            certified: r.certified,
            improved_over_starts: improved,
            poles: r.poles.iter().map(|&p| vec3(p)).collect(),
            packing: r
                .packing
                .as_ref()
                .map(|p| PackingDto::from_packing(p, r.witness.as_ref())),
            history: r.history.iter().map(RestartDto::from_summary).collect(),
            search: SearchEchoDto::from_config(search),
            config,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeDto {
    pub n: usize,
    pub target: f64,
    pub beaten: bool,
    pub best: OptimizeDto,
}

/// Standalone report document printed by `verify`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyOutDto {
    pub kind: String,
    pub verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packing: Option<PackingReportDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covering: Option<CoveringReportDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDto>,
    pub config: ConfigDto,
}

/// Bounds table: one row per parameter value, columns as named.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsDto {
    pub family: String,
    /// "radians" or "degrees"; applies to the angle-valued columns.
    pub units: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub config: ConfigDto,
}
