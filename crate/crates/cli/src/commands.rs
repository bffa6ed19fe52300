//! Verb implementations: each returns `Ok(())` for exit 0 or a [`Failure`]
//! carrying the exit code.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use sepcap_core::arrangement::{
    build_tiling, cell_metrics, covering_cell_lower_bound, named_arrangement,
    rgc_covering_bounds, rgc_prism_lower_bound, rgc_upper_bound, ArrangementError, Tiling,
};
use sepcap_core::covering::{verify_ts_covering, Delta_bound};
use sepcap_core::geom::{SphericalCap, UnitVector};
use sepcap_core::highdim::{
    cell_circumradius, cell_count_bound, enumerate_cells, jung_radius, rgs_bounds,
    GreatSphereArrangement,
};
use sepcap_core::molnar::{delaunay, molnar, refine, PointSystem, SideFate};
use sepcap_core::optimizer::{
    optimize_arrangement, optimize_ts_packing, probe_conjecture, OptimizerError, SearchConfig,
    SearchKind, SearchProblem, SearchResult,
};
use sepcap_core::packing::{
    delta_bound, lune_grid, named_packing, rstam_upper, verify_ts, PackingError,
};
use sepcap_core::Tolerances;

use crate::json::{
    self, delaunay_cell_dto, fmt_f64, molnar_cell_dto, refined_cell_dto, unit, vec3, BoundsDto,
    CircleDto, ConfigDto, CoveringDto, CoveringReportDto, DecompositionDto, HighdimDto,
    HighdimMetricsDto, MetricsDto, OptimizeDto, PackingDto, PackingReportDto, ProbeDto,
    SignCellDto, TilingDto, TilingRefDto, VerifyOutDto, WitnessDto,
};
use crate::obj;
use crate::{
    ArrangeArgs, BoundsArgs, Common, ConstructArgs, DecomposeArgs, DecomposeMode, ExportArgs,
    Failure, Format, Objective, OptimizeArgs, OptimizeTarget, SearchFlags, VerifyArgs, VerifyKind,
};

fn resolve_tol(common: &Common) -> Result<Tolerances, Failure> {
    let d = Tolerances::default();
    Tolerances::new(
        d.eps_unit,
        common.tol_angle.unwrap_or(d.eps_angle),
        common.tol_area.unwrap_or(d.eps_area),
    )
    .map_err(|e| Failure::Usage(e.to_string()))
}

fn config_dto(common: &Common, tol: &Tolerances) -> ConfigDto {
    ConfigDto {
        seed: common.seed,
        tol_angle: tol.eps_angle,
        tol_area: tol.eps_area,
        degrees: common.degrees,
    }
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    match &common.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: invalid JSON: {e}", path.display())))
}

fn from_value<T: DeserializeOwned>(v: serde_json::Value, what: &str) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| Failure::Usage(format!("{what}: {e}")))
}

fn show_angle(x: f64, degrees: bool) -> String {
    if degrees {
        format!("{:.4} deg", x.to_degrees())
    } else {
        format!("{} rad", fmt_f64(x))
    }
}

fn packing_usage(e: PackingError) -> Failure {
    Failure::Usage(e.to_string())
}

fn arrangement_usage(e: ArrangementError) -> Failure {
    Failure::Usage(e.to_string())
}

// ---------------------------------------------------------------- construct

const PACKING_NAMES: &[&str] = &[
    "octahedral8",
    "cuboctahedral6",
    "kissing8",
    "octa_sub",
    "lune_grid",
];

pub fn construct(args: &ConstructArgs, common: &Common) -> Result<(), Failure> {
    let tol = resolve_tol(common)?;
    let cfg = config_dto(common, &tol);
    let name = args.name.as_str();
    if let Some(base) = name.strip_suffix("_covering") {
        construct_covering(base, args, common, &tol, cfg)
    } else if PACKING_NAMES.contains(&name) {
        construct_packing(name, args, common, &tol, cfg)
    } else {
        construct_arrangement(name, args, common, &tol, cfg)
    }
}

fn construct_packing(
    name: &str,
    args: &ConstructArgs,
    common: &Common,
    tol: &Tolerances,
    cfg: ConfigDto,
) -> Result<(), Failure> {
    let (packing, witness) = match name {
        "lune_grid" => {
            let alpha = args
                .alpha_deg
                .ok_or_else(|| Failure::Usage(String::from("lune_grid requires --alpha-deg")))?
                .to_radians();
            let k = args
                .k
                .ok_or_else(|| Failure::Usage(String::from("lune_grid requires --k")))?;
            lune_grid(alpha, k).map_err(packing_usage)?
        }
        "octa_sub" => {
            let k = args
                .k
                .ok_or_else(|| Failure::Usage(String::from("octa_sub requires --k")))?;
            named_packing("octa_sub", Some(k)).map_err(packing_usage)?
        }
        other => named_packing(other, None).map_err(packing_usage)?,
    };
    let report = verify_ts(&packing, Some(&witness), tol)
        .map_err(|e| Failure::Internal(format!("verification of {name} errored: {e}")))?;
    if !(report.is_packing && report.is_ts) {
        return Err(Failure::Internal(format!(
            "constructed {name} failed its own verification"
        )));
    }
    eprintln!(
        "{name}: {} caps, radius {}, density {}",
        packing.len(),
        show_angle(packing.radius(), common.degrees),
        fmt_f64(report.density)
    );
    let mut dto = PackingDto::from_packing(&packing, Some(&witness));
    dto.report = Some(PackingReportDto::from_report(&report));
    dto.config = Some(cfg);
    match common.format {
        Format::Json => emit(common, &json::to_string(&dto)?),
        Format::Obj => emit(common, &obj::packing_obj(&dto)),
        Format::Csv => Err(Failure::Usage(String::from(
            "csv output is only available for bounds",
        ))),
    }
}

fn build_named_tiling(
    name: &str,
    param: Option<usize>,
    tol: &Tolerances,
) -> Result<(Tiling, MetricsDto), Failure> {
    let circles = named_arrangement(name, param).map_err(arrangement_usage)?;
    let t = build_tiling(&circles, tol)
        .map_err(|e| Failure::Internal(format!("{name} failed to build: {e}")))?;
    let m = cell_metrics(&t, tol)
        .map_err(|e| Failure::Internal(format!("{name} failed to measure: {e}")))?;
    let metrics = MetricsDto::from_metrics(&m);
    Ok((t, metrics))
}

fn construct_arrangement(
    name: &str,
    args: &ConstructArgs,
    common: &Common,
    tol: &Tolerances,
    cfg: ConfigDto,
) -> Result<(), Failure> {
    let (t, metrics) = build_named_tiling(name, args.n, tol)?;
    eprintln!(
        "{name}: {} circles, {} cells, min inradius {}, max circumradius {}",
        t.circles.len(),
        t.cells.len(),
        show_angle(metrics.min_inradius, common.degrees),
        show_angle(metrics.max_circumradius, common.degrees)
    );
    let mut dto = TilingDto::from_tiling(&t, None, Some(cfg));
    dto.metrics = Some(metrics);
    match common.format {
        Format::Json => emit(common, &json::to_string(&dto)?),
        Format::Obj => emit(common, &obj::tiling_obj(&dto)),
        Format::Csv => Err(Failure::Usage(String::from(
            "csv output is only available for bounds",
        ))),
    }
}

/// Circumcap covering of a named arrangement: one cap per cell, centered
/// at the cell circumcenter, all at the largest cell circumradius.
fn construct_covering(
    base: &str,
    args: &ConstructArgs,
    common: &Common,
    tol: &Tolerances,
    cfg: ConfigDto,
) -> Result<(), Failure> {
    let (t, metrics) = build_named_tiling(base, args.n, tol)?;
    let radius = metrics.max_circumradius;
    let caps = metrics
        .per_cell
        .iter()
        .map(|c| {
            SphericalCap::new(unit(c.circumcenter, "circumcenter")?, radius)
                .map_err(|e| Failure::Internal(e.to_string()))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let assignment: Vec<usize> = (0..caps.len()).collect();
    let report = verify_ts_covering(&caps, &t, Some(&assignment), tol)
        .map_err(|e| Failure::Internal(format!("covering verification errored: {e}")))?;
    if !report.is_ts_covering {
        return Err(Failure::Internal(format!(
            "constructed {base} circumcap covering failed its own verification"
        )));
    }
    eprintln!(
        "{base}_covering: {} caps, radius {}, density {}",
        caps.len(),
        show_angle(radius, common.degrees),
        fmt_f64(report.density)
    );
    let dto = CoveringDto {
        radius,
        centers: caps.iter().map(|c| vec3(c.center())).collect(),
        tiling: TilingRefDto {
            circles: t.circles.iter().map(|gc| CircleDto { pole: vec3(gc.pole()) }).collect(),
        },
        assignment: Some(assignment),
        report: Some(CoveringReportDto::from_report(&report)),
        config: Some(cfg),
    };
    match common.format {
        Format::Json => emit(common, &json::to_string(&dto)?),
        Format::Obj => emit(common, &obj::covering_obj(&dto)),
        Format::Csv => Err(Failure::Usage(String::from(
            "csv output is only available for bounds",
        ))),
    }
}

// ------------------------------------------------------------------- verify

fn packing_from_value(v: serde_json::Value) -> Result<PackingDto, Failure> {
    if v.get("centers").is_some() {
        from_value(v, "packing file")
    } else if let Some(nested) = v.get("packing") {
        from_value(nested.clone(), "embedded packing")
    } else {
        Err(Failure::Usage(String::from(
            "no packing found: expected {radius, centers, ...}",
        )))
    }
}

pub fn verify(args: &VerifyArgs, common: &Common) -> Result<(), Failure> {
    let tol = resolve_tol(common)?;
    let cfg = config_dto(common, &tol);
    if common.format != Format::Json {
        return Err(Failure::Usage(String::from("verify reports are JSON only")));
    }
    let value = read_json(&args.input)?;
    let (kind_name, verified, out) = match args.kind {
        VerifyKind::Packing | VerifyKind::Ts => {
            let dto = packing_from_value(value)?;
            let (p, w) = dto.to_packing()?;
            let report = verify_ts(&p, w.as_ref(), &tol)
                .map_err(|e| Failure::Usage(format!("cannot verify: {e}")))?;
            let (kind_name, ok) = match args.kind {
                VerifyKind::Packing => ("packing", report.is_packing),
                _ => ("ts", report.is_packing && report.is_ts),
            };
            let out = VerifyOutDto {
                kind: String::from(kind_name),
                verified: ok,
                packing: Some(PackingReportDto::from_report(&report)),
                covering: None,
                witness: report.witness.as_ref().map(WitnessDto::from_witness),
                config: cfg,
            };
            (kind_name, ok, out)
        }
        VerifyKind::Covering => {
            let dto: CoveringDto = from_value(value, "covering file")?;
            let circles = dto.tiling.to_circles()?;
            let t = build_tiling(&circles, &tol)
                .map_err(|e| Failure::Usage(format!("stored tiling does not build: {e}")))?;
            let caps = dto
                .centers
                .iter()
                .map(|&c| {
                    SphericalCap::new(unit(c, "cap center")?, dto.radius)
                        .map_err(|e| Failure::Usage(e.to_string()))
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let report = verify_ts_covering(&caps, &t, dto.assignment.as_deref(), &tol)
                .map_err(|e| Failure::Usage(format!("cannot verify: {e}")))?;
            let ok = report.is_ts_covering;
            let out = VerifyOutDto {
                kind: String::from("covering"),
                verified: ok,
                packing: None,
                covering: Some(CoveringReportDto::from_report(&report)),
                witness: None,
                config: cfg,
            };
            ("covering", ok, out)
        }
    };
    // The report always goes to standard output; --out saves a copy.
    let text = json::to_string(&out)?;
    print!("{text}");
    if let Some(path) = &common.out {
        fs::write(path, &text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    eprintln!("{kind_name}: {}", if verified { "verified" } else { "refuted" });
    if verified {
        Ok(())
    } else {
        Err(Failure::Refuted)
    }
}

// ------------------------------------------------------------------- bounds

fn int_range(text: &str, what: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Usage(format!("{what}: expected an integer or a..b, got '{text}'"));
    if let Some((a, b)) = text.split_once("..") {
        let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
        if a > b {
            return Err(bad());
        }
        Ok((a..=b).collect())
    } else {
        Ok(vec![text.parse().map_err(|_| bad())?])
    }
}

fn float_range(text: &str, steps: usize, what: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Usage(format!("{what}: expected a number or a..b, got '{text}'"));
    if let Some((a, b)) = text.split_once("..") {
        let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
        if !(a.is_finite() && b.is_finite() && a <= b && steps >= 2) {
            return Err(bad());
        }
        Ok((0..steps)
            .map(|i| a + (b - a) * i as f64 / (steps - 1) as f64)
            .collect())
    } else {
        Ok(vec![text.parse().map_err(|_| bad())?])
    }
}

struct Column {
    name: &'static str,
    angle: bool,
    integer: bool,
}

const fn col(name: &'static str, angle: bool, integer: bool) -> Column {
    Column { name, angle, integer }
}

fn dom<E: core::fmt::Display>(e: E) -> Failure {
    Failure::Usage(format!("domain violation: {e}"))
}

pub fn bounds(args: &BoundsArgs, common: &Common) -> Result<(), Failure> {
    let tol = resolve_tol(common)?;
    let cfg = config_dto(common, &tol);
    let need = |o: &Option<String>, flag: &str| -> Result<String, Failure> {
        o.clone()
            .ok_or_else(|| Failure::Usage(format!("{} requires {flag}", args.family)))
    };
    let (columns, mut rows): (Vec<Column>, Vec<Vec<Option<f64>>>) = match args.family.as_str() {
        "delta" => {
            let rho = float_range(&need(&args.rho, "--rho")?, args.steps, "--rho")?;
            let rows = rho
                .iter()
                .map(|&r| Ok(vec![Some(r), Some(delta_bound(r).map_err(dom)?)]))
                .collect::<Result<Vec<_>, Failure>>()?;
            (vec![col("rho", true, false), col("delta_bound", false, false)], rows)
        }
        "big-delta" => {
            let rho = float_range(&need(&args.rho, "--rho")?, args.steps, "--rho")?;
            let rows = rho
                .iter()
                .map(|&r| Ok(vec![Some(r), Some(Delta_bound(r).map_err(dom)?)]))
                .collect::<Result<Vec<_>, Failure>>()?;
            (vec![col("rho", true, false), col("big_delta_bound", false, false)], rows)
        }
        "rstam-upper" => {
            let ks = int_range(&need(&args.k, "--k")?, "--k")?;
            let rows = ks
                .iter()
                .map(|&k| Ok(vec![Some(k as f64), Some(rstam_upper(k).map_err(dom)?)]))
                .collect::<Result<Vec<_>, Failure>>()?;
            (vec![col("k", false, true), col("rstam_upper", true, false)], rows)
        }
        "rgc-upper" => {
            let ns = int_range(&need(&args.n, "--n")?, "--n")?;
            let rows = ns
                .iter()
                .map(|&n| Ok(vec![Some(n as f64), Some(rgc_upper_bound(n).map_err(dom)?)]))
                .collect::<Result<Vec<_>, Failure>>()?;
            (vec![col("n", false, true), col("rgc_upper", true, false)], rows)
        }
        "rgc-prism-lower" => {
            let ns = int_range(&need(&args.n, "--n")?, "--n")?;
            let rows = ns
                .iter()
                .map(|&n| Ok(vec![Some(n as f64), Some(rgc_prism_lower_bound(n).map_err(dom)?)]))
                .collect::<Result<Vec<_>, Failure>>()?;
            (vec![col("n", false, true), col("prism_min_inradius", true, false)], rows)
        }
        "rgc-covering" => {
            let ns = int_range(&need(&args.n, "--n")?, "--n")?;
            let rows = ns
                .iter()
                .map(|&n| {
                    let b = rgc_covering_bounds(n).map_err(dom)?;
                    Ok(vec![Some(n as f64), Some(b.lower), Some(b.upper)])
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            (
                vec![col("n", false, true), col("lower", true, false), col("upper", true, false)],
                rows,
            )
        }
        "rgs" => {
            let d = args.d.ok_or_else(|| Failure::Usage(String::from("rgs requires --d")))?;
            let ns = int_range(&need(&args.n, "--n")?, "--n")?;
            let rows = ns
                .iter()
                .map(|&n| {
                    let b = rgs_bounds(n, d).map_err(dom)?;
                    Ok(vec![Some(n as f64), b.exact_at_n_eq_d.or(b.lower), b.upper])
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            (
                vec![col("n", false, true), col("lower", true, false), col("upper", true, false)],
                rows,
            )
        }
        "jung" => {
            let d = args.d.ok_or_else(|| Failure::Usage(String::from("jung requires --d")))?;
            let diam = float_range(&need(&args.diameter, "--diameter")?, args.steps, "--diameter")?;
            let rows = diam
                .iter()
                .map(|&x| Ok(vec![Some(x), Some(jung_radius(x, d).map_err(dom)?)]))
                .collect::<Result<Vec<_>, Failure>>()?;
            (vec![col("diameter", true, false), col("jung_radius", true, false)], rows)
        }
        "covering-cell" => {
            let rs = float_range(&need(&args.big_r, "--big-r")?, args.steps, "--big-r")?;
            let rows = rs
                .iter()
                .map(|&r| Ok(vec![Some(r), Some(covering_cell_lower_bound(r).map_err(dom)?)]))
                .collect::<Result<Vec<_>, Failure>>()?;
            (vec![col("big_r", true, false), col("cell_count_lower", false, false)], rows)
        }
        other => {
            return Err(Failure::Usage(format!("unknown bound family '{other}'")));
        }
    };
    if common.degrees {
        for row in &mut rows {
            for (cell, c) in row.iter_mut().zip(&columns) {
                if c.angle {
                    *cell = cell.map(f64::to_degrees);
                }
            }
        }
    }
    let units = if common.degrees { "degrees" } else { "radians" };
    match common.format {
        Format::Json => {
            let dto = BoundsDto {
                family: args.family.clone(),
                units: String::from(units),
                columns: columns.iter().map(|c| String::from(c.name)).collect(),
                rows,
                config: cfg,
            };
            emit(common, &json::to_string(&dto)?)
        }
        Format::Csv => {
            let mut text = String::new();
            let header: Vec<String> = columns
                .iter()
                .map(|c| {
                    if c.angle && common.degrees {
                        format!("{}_deg", c.name)
                    } else {
                        String::from(c.name)
                    }
                })
                .collect();
            text.push_str(&header.join(","));
            text.push('\n');
            for row in &rows {
                let fields: Vec<String> = row
                    .iter()
                    .zip(&columns)
                    .map(|(cell, c)| match cell {
                        None => String::new(),
                        Some(x) if c.integer => format!("{}", *x as i64),
                        Some(x) => fmt_f64(*x),
                    })
                    .collect();
                text.push_str(&fields.join(","));
                text.push('\n');
            }
            emit(common, &text)
        }
        Format::Obj => Err(Failure::Usage(String::from("bounds tables have no OBJ form"))),
    }
}

// ------------------------------------------------------------------ arrange

pub fn arrange(args: &ArrangeArgs, common: &Common) -> Result<(), Failure> {
    let tol = resolve_tol(common)?;
    let cfg = config_dto(common, &tol);
    if let Some(d) = args.d {
        return arrange_highdim(d, args, common, &tol, cfg);
    }
    let (t, metrics) = if let Some(name) = &args.named {
        build_named_tiling(name, args.n, &tol)?
    } else if let Some(path) = &args.input {
        let tr: TilingRefDto = from_value(read_json(path)?, "circle file")?;
        let circles = tr.to_circles()?;
        let t = build_tiling(&circles, &tol)
            .map_err(|e| Failure::Usage(format!("tiling failed to build: {e}")))?;
        let m = cell_metrics(&t, &tol)
            .map_err(|e| Failure::Usage(format!("tiling failed to measure: {e}")))?;
        let metrics = MetricsDto::from_metrics(&m);
        (t, metrics)
    } else {
        return Err(Failure::Usage(String::from(
            "arrange needs --named, --in, or --d",
        )));
    };
    eprintln!(
        "{} circles, {} cells, min inradius {}, max circumradius {}",
        t.circles.len(),
        t.cells.len(),
        show_angle(metrics.min_inradius, common.degrees),
        show_angle(metrics.max_circumradius, common.degrees)
    );
    let mut dto = TilingDto::from_tiling(&t, None, Some(cfg));
    dto.metrics = Some(metrics);
    match common.format {
        Format::Json => emit(common, &json::to_string(&dto)?),
        Format::Obj => emit(common, &obj::tiling_obj(&dto)),
        Format::Csv => Err(Failure::Usage(String::from(
            "csv output is only available for bounds",
        ))),
    }
}

#[derive(Deserialize)]
struct PoleFile {
    d: usize,
    poles: Vec<Vec<f64>>,
}

fn arrange_highdim(
    d: usize,
    args: &ArrangeArgs,
    common: &Common,
    tol: &Tolerances,
    cfg: ConfigDto,
) -> Result<(), Failure> {
    if args.named.is_some() {
        return Err(Failure::Usage(String::from("--named and --d are exclusive")));
    }
    let arrangement = match &args.input {
        None => GreatSphereArrangement::orthogonal(d)
            .map_err(|e| Failure::Usage(e.to_string()))?,
        Some(path) => {
            let pf: PoleFile = from_value(read_json(path)?, "pole file")?;
            if pf.d != d {
                return Err(Failure::Usage(format!(
                    "pole file has d = {}, command asked for d = {d}",
                    pf.d
                )));
            }
            GreatSphereArrangement::new(d, pf.poles, tol)
                .map_err(|e| Failure::Usage(e.to_string()))?
        }
    };
    let cells = enumerate_cells(&arrangement, tol)
        .map_err(|e| Failure::Usage(format!("cell enumeration failed: {e}")))?;
    let mut max_circumradius = 0.0f64;
    for cell in &cells {
        let r = cell_circumradius(cell)
            .map_err(|e| Failure::Internal(format!("circumradius failed: {e}")))?;
        max_circumradius = max_circumradius.max(r);
    }
    eprintln!(
        "d = {d}: {} poles, {} cells, max circumradius {}",
        arrangement.poles().len(),
        cells.len(),
        show_angle(max_circumradius, common.degrees)
    );
    let dto = HighdimDto {
        d,
        poles: arrangement.poles().to_vec(),
        cells: cells
            .iter()
            .map(|c| SignCellDto { signs: c.signs.clone(), vertices: c.vertices.clone() })
            .collect(),
        metrics: Some(HighdimMetricsDto {
            cell_count: cells.len(),
            cell_count_bound: cell_count_bound(arrangement.poles().len(), d),
            max_circumradius,
        }),
        config: Some(cfg),
    };
    match common.format {
        Format::Json => emit(common, &json::to_string(&dto)?),
        _ => Err(Failure::Usage(String::from(
            "great-sphere cell complexes are JSON only",
        ))),
    }
}

// ---------------------------------------------------------------- decompose

#[derive(Deserialize)]
struct PointsFile {
    points: Vec<[f64; 3]>,
}

pub fn decompose(args: &DecomposeArgs, common: &Common) -> Result<(), Failure> {
    let tol = resolve_tol(common)?;
    let cfg = config_dto(common, &tol);
    let v = read_json(&args.points)?;
    let raw: Vec<[f64; 3]> = if v.get("points").is_some() {
        from_value::<PointsFile>(v, "point file")?.points
    } else if v.get("centers").is_some() {
        from_value::<PackingDto>(v, "packing file")?.centers
    } else {
        return Err(Failure::Usage(String::from(
            "expected {points: [[x, y, z], ...]} or a packing JSON",
        )));
    };
    let points = raw
        .iter()
        .map(|&p| unit(p, "point"))
        .collect::<Result<Vec<UnitVector>, Failure>>()?;
    let x = PointSystem::new(points).map_err(|e| Failure::Usage(e.to_string()))?;
    let dcells = delaunay(&x, &tol).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut dto = DecompositionDto {
        points: raw,
        delaunay: dcells.iter().map(delaunay_cell_dto).collect(),
        molnar: None,
        refined: None,
        bridge_count: None,
        config: Some(cfg),
    };
    if args.mode != DecomposeMode::Delaunay {
        let mcells = molnar(&x, &dcells, &tol)
            .map_err(|e| Failure::Usage(format!("bridge decomposition failed: {e}")))?;
        let bridges = mcells
            .iter()
            .flat_map(|c| &c.fates)
            .filter(|f| matches!(f, SideFate::BridgedOut))
            .count();
        dto.bridge_count = Some(bridges);
        dto.molnar = Some(mcells.iter().map(molnar_cell_dto).collect());
        if args.mode == DecomposeMode::Refine {
            let rho = match (args.rho, args.rho_deg) {
                (Some(r), None) => r,
                (None, Some(deg)) => deg.to_radians(),
                _ => {
                    return Err(Failure::Usage(String::from(
                        "refine requires exactly one of --rho / --rho-deg",
                    )))
                }
            };
            let rcells = refine(&x, &mcells, rho, &tol)
                .map_err(|e| Failure::Usage(format!("refinement failed: {e}")))?;
            dto.refined = Some(rcells.iter().map(refined_cell_dto).collect());
        }
    }
    eprintln!(
        "{} points, {} Delaunay cells, {} bridges",
        dto.points.len(),
        dto.delaunay.len(),
        dto.bridge_count.map_or(String::from("-"), |b| b.to_string())
    );
    match common.format {
        Format::Json => emit(common, &json::to_string(&dto)?),
        Format::Obj => emit(common, &obj::decomposition_obj(&dto)),
        Format::Csv => Err(Failure::Usage(String::from(
            "csv output is only available for bounds",
        ))),
    }
}

// ----------------------------------------------------------------- optimize

fn settle(
    r: Result<SearchResult, OptimizerError>,
) -> Result<(SearchResult, bool), Failure> {
    match r {
        Ok(res) => Ok((res, true)),
        Err(OptimizerError::NoImprovement(res)) => Ok((*res, false)),
        Err(OptimizerError::OutOfDomain) => {
            Err(Failure::Usage(String::from("search parameters out of domain")))
        }
        Err(e) => Err(Failure::Internal(format!("search failed: {e}"))),
    }
}

fn search_config(flags: &SearchFlags, seed: u64) -> SearchConfig {
    SearchConfig {
        restarts: flags.restarts,
        max_iters: flags.max_iters,
        initial_step: flags.initial_step,
        shrink_levels: flags.shrink_levels,
        seed,
    }
}

fn progress_lines(result: &SearchResult) {
    for h in &result.history {
        let start = h
            .start_value
            .map_or(String::from("-"), fmt_f64);
        eprintln!(
            "restart {}: seed {} start {} best {} ({} evaluations)",
            h.restart,
            h.seed,
            start,
            fmt_f64(h.best_value),
            h.evaluations
        );
    }
}

fn finish_search(
    result: SearchResult,
    improved: bool,
    search: &SearchConfig,
    common: &Common,
    tol: &Tolerances,
    cfg: ConfigDto,
) -> Result<(), Failure> {
    progress_lines(&result);
    if (result.certified - result.objective).abs() > 1e-9 {
        return Err(Failure::Internal(format!(
            "objective {} disagrees with its re-measurement {}",
            fmt_f64(result.objective),
            fmt_f64(result.certified)
        )));
    }
    if let Some(p) = &result.packing {
        let report = verify_ts(p, result.witness.as_ref(), tol)
            .map_err(|e| Failure::Internal(format!("result packing errored: {e}")))?;
        if !(report.is_packing && report.is_ts) {
            return Err(Failure::Internal(String::from(
                "result packing failed verification",
            )));
        }
    }
    eprintln!(
        "best {} ({})",
        show_angle(result.objective, common.degrees),
        if improved { "improved over starts" } else { "no improvement over best start" }
    );
    let dto = OptimizeDto::from_result(&result, improved, search, cfg);
    match common.format {
        Format::Json => emit(common, &json::to_string(&dto)?),
        _ => Err(Failure::Usage(String::from("search results are JSON only"))),
    }
}

pub fn optimize(args: &OptimizeArgs, common: &Common) -> Result<(), Failure> {
    if common.tol_angle.is_some() || common.tol_area.is_some() {
        return Err(Failure::Usage(String::from(
            "searches always run at the default tolerances",
        )));
    }
    let tol = Tolerances::default();
    let cfg = config_dto(common, &tol);
    match &args.target {
        OptimizeTarget::Arrangement { n, objective, flags } => {
            let kind = match objective {
                Objective::MinInradius => SearchKind::MaxMinInradius { n: *n },
                Objective::MaxCircumradius => SearchKind::MinMaxCircumradius { n: *n },
            };
            let config = search_config(flags, common.seed);
            let problem = SearchProblem { kind, config };
            let (result, improved) = settle(optimize_arrangement(&problem))?;
            finish_search(result, improved, &config, common, &tol, cfg)
        }
        OptimizeTarget::Packing { k, flags } => {
            let config = search_config(flags, common.seed);
            let (result, improved) = settle(optimize_ts_packing(*k, &config))?;
            finish_search(result, improved, &config, common, &tol, cfg)
        }
        OptimizeTarget::Probe { n, flags } => {
            let config = search_config(flags, common.seed);
            let probe = match probe_conjecture(*n, &config) {
                Ok(p) => p,
                Err(OptimizerError::OutOfDomain) => {
                    return Err(Failure::Usage(String::from(
                        "probe targets are n = 6, 9, 15",
                    )))
                }
                Err(e) => return Err(Failure::Internal(format!("probe failed: {e}"))),
            };
            progress_lines(&probe.best);
            eprintln!(
                "n = {n}: target {}, best {}, {}",
                show_angle(probe.target, common.degrees),
                show_angle(probe.best.objective, common.degrees),
                if probe.beaten { "target beaten" } else { "target stands" }
            );
            let dto = ProbeDto {
                n: probe.n,
                target: probe.target,
                beaten: probe.beaten,
                best: OptimizeDto::from_result(&probe.best, probe.improved, &config, cfg),
            };
            match common.format {
                Format::Json => emit(common, &json::to_string(&dto)?),
                _ => Err(Failure::Usage(String::from("search results are JSON only"))),
            }
        }
    }
}

// ------------------------------------------------------------------- export

pub fn export(args: &ExportArgs, common: &Common) -> Result<(), Failure> {
    let v = read_json(&args.input)?;
    let text = if v.get("edges").is_some() && v.get("circles").is_some() {
        obj::tiling_obj(&from_value::<TilingDto>(v, "tiling file")?)
    } else if v.get("tiling").is_some() && v.get("centers").is_some() {
        obj::covering_obj(&from_value::<CoveringDto>(v, "covering file")?)
    } else if v.get("delaunay").is_some() {
        obj::decomposition_obj(&from_value::<DecompositionDto>(v, "decomposition file")?)
    } else if v.get("centers").is_some() && v.get("radius").is_some() {
        obj::packing_obj(&from_value::<PackingDto>(v, "packing file")?)
    } else if let Some(nested) = v.get("packing") {
        obj::packing_obj(&from_value::<PackingDto>(nested.clone(), "embedded packing")?)
    } else {
        return Err(Failure::Usage(String::from(
            "no OBJ rendering for this artifact",
        )));
    };
    emit(common, &text)
}
