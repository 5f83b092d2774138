use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::sync::Arc;

use focklab::fekete::{approx_fekete, fekete, refine, CandidateGrid};
use focklab::fockspace::kernel_table;
use focklab::frames::{
    build_localized_frame, deformation_experiment, gaussian_translation_check, interpolation_lower_bound,
    localized_frame_bounds, sampling_bounds, sharp_experiment, wiener_probe, FrameReport, SAMPLING_MARGIN,
};
use focklab::geometry::{disk_grid, hex_disk_grid, max_norm, square_grid_centered};
use focklab::linalg::CMatrix;
use focklab::random::{complex_gaussian_vector, seeded_rng, unit_coefficients};
use focklab::{Error, KernelEvaluator, OrthoBasis, Point, PointSet, Result, Weight};
use serde::Serialize;
use serde_json::json;

use crate::config::{Command, Config, GridSpec, MassKind, Pairs, SetSpec};
use crate::output::{Cell, Report, Table};

fn point(p: [f64; 2]) -> Point {
    Point::new(p[0], p[1])
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn grid_points(g: &GridSpec) -> Result<Vec<Point>> {
    let pts = match *g {
        GridSpec::Square { n, half, center } => {
            if !(half >= 0.0) {
                return Err(invalid(format!("square grid half-width must be >= 0, got {half}")));
            }
            square_grid_centered(n, half, point(center))
        }
        GridSpec::Disk { n, radius } => {
            if !(radius >= 0.0) {
                return Err(invalid(format!("disk grid radius must be >= 0, got {radius}")));
            }
            disk_grid(n, radius)
        }
        GridSpec::Hex { radius, spacing } => {
            if !(radius >= 0.0 && spacing > 0.0) {
                return Err(invalid(format!("hex grid needs radius >= 0 and spacing > 0, got {radius}, {spacing}")));
            }
            hex_disk_grid(radius, spacing)
        }
        GridSpec::Points { ref points } => points.iter().copied().map(point).collect(),
    };
    if pts.is_empty() {
        return Err(invalid("grid has no points"));
    }
    Ok(pts)
}

/// Fills a missing lattice radius with `radius`.
fn default_lattice(set: &mut SetSpec, radius: Option<f64>) -> Result<()> {
    if let SetSpec::Lattice { a, b, radius: r } = set {
        b.get_or_insert(*a);
        if r.is_none() {
            *r = Some(radius.ok_or_else(|| invalid("lattice `radius` is required for this command"))?);
        }
    }
    Ok(())
}

/// Materializes defaults that depend on other parameters.
pub fn resolve(cfg: &mut Config) -> Result<()> {
    cfg.weight.check_params()?;
    let w = &cfg.weight;
    match &mut cfg.command {
        Command::Density(d) => {
            let reach = d.radii.iter().cloned().fold(0.0, f64::max)
                + d.centers.iter().map(|c| point(*c).norm()).fold(0.0, f64::max);
            default_lattice(&mut d.set, Some(reach))
        }
        Command::FrameBounds(f) => {
            let top = f.degrees.iter().copied().max().unwrap_or(1);
            default_lattice(&mut f.set, Some(w.bulk_radius(top) + SAMPLING_MARGIN))
        }
        Command::InterpBounds(i) => default_lattice(&mut i.set, i.n.map(|n| w.bulk_radius(n))),
        Command::Wiener(c) => default_lattice(&mut c.set, Some(w.bulk_radius(c.n) + SAMPLING_MARGIN)),
        Command::Deform(c) => default_lattice(&mut c.set, Some(w.bulk_radius(c.n) + SAMPLING_MARGIN)),
        _ => Ok(()),
    }
}

fn build_set(spec: &SetSpec, w: &Weight, base: &Path) -> Result<PointSet> {
    match spec {
        SetSpec::Lattice { a, b, radius } => {
            let r = radius.ok_or_else(|| invalid("lattice radius unresolved"))?;
            focklab::lattice(*a, b.unwrap_or(*a), r)
        }
        SetSpec::Csv { path } => {
            let full = base.join(path);
            let file = File::open(&full).map_err(|e| invalid(format!("cannot open {}: {e}", full.display())))?;
            PointSet::read_csv(BufReader::new(file))
        }
        SetSpec::Points { points } => PointSet::from_points(points.iter().copied().map(point).collect()),
        SetSpec::Fekete { degree } => Ok(fekete(OrthoBasis::new(w, *degree)?)?.points().clone()),
    }
}

fn basis(w: &Weight, n: usize) -> Result<OrthoBasis> {
    OrthoBasis::new(w, n)
}

fn kernel_for(w: &Weight, n: Option<usize>) -> Result<KernelEvaluator> {
    match n {
        Some(n) => Ok(KernelEvaluator::truncated(basis(w, n)?)),
        None => KernelEvaluator::closed_form(w),
    }
}

fn frame_row(r: &FrameReport) -> Vec<Cell> {
    vec![
        r.n.map_or(Cell::Int(0), Cell::from),
        r.lower.into(),
        r.upper.into(),
        r.condition().into(),
        r.region_radius.into(),
        r.set_size.into(),
        r.dropped.into(),
    ]
}

const FRAME_COLUMNS: [&str; 7] = ["N", "lower", "upper", "condition", "region_radius", "set_size", "dropped"];

pub fn run(cfg: &Config) -> Result<Report> {
    let w = &cfg.weight;
    match &cfg.command {
        Command::KernelTable(c) => {
            let k = kernel_for(w, c.n)?;
            let pts = grid_points(&c.grid)?;
            let pairs: Vec<(Point, Point)> = match c.pairs {
                Pairs::Diagonal => pts.iter().map(|&z| (z, z)).collect(),
                Pairs::All => pts.iter().flat_map(|&z| pts.iter().map(move |&v| (z, v))).collect(),
            };
            let rows = kernel_table(&k, &pairs);
            let mut t = Table::new(&["re_z", "im_z", "re_w", "im_w", "re_K", "im_K", "weighted_abs_K"]);
            for r in &rows {
                t.push(vec![
                    r.re_z.into(),
                    r.im_z.into(),
                    r.re_w.into(),
                    r.im_w.into(),
                    r.re_k.into(),
                    r.im_k.into(),
                    r.weighted_abs_k.into(),
                ]);
            }
            Ok(Report::new(json!({ "mode": k.mode(), "rows": rows }), t))
        }

        Command::Density(c) => {
            let set = build_set(&c.set, w, &cfg.base_dir)?;
            let centers: Vec<Point> = c.centers.iter().copied().map(point).collect();
            let est = match c.mass {
                MassKind::Kernel => {
                    let k = match c.n {
                        Some(n) => KernelEvaluator::truncated(basis(w, n)?),
                        None if w.gaussian_alpha().is_some() => KernelEvaluator::closed_form(w)?,
                        None => return Err(invalid("`N` is required for kernel mass with a non-Gaussian weight")),
                    };
                    set.beurling_density(&k, &c.radii, &centers)?
                }
                MassKind::Curvature => set.curvature_density(w, &c.radii, &centers)?,
            };
            let mut t = Table::new(&["r", "center_x", "center_y", "count", "mass", "ratio"]);
            for r in &est.records {
                t.push(vec![
                    r.r.into(),
                    r.center.re.into(),
                    r.center.im.into(),
                    r.count.into(),
                    r.mass.into(),
                    r.ratio.into(),
                ]);
            }
            Ok(Report::new(json!({ "set_size": set.len(), "density": est }), t))
        }

        Command::Fekete(c) => {
            let b = Arc::new(basis(w, c.n)?);
            let grid = CandidateGrid::for_basis(&b)?;
            let mut f = approx_fekete(b, &grid)?;
            if c.refine_steps > 0 {
                f = refine(&f, c.refine_steps)?;
            }
            let mut t = Table::new(&["index", "x", "y"]);
            for (i, z) in f.points().points().iter().enumerate() {
                t.push(vec![i.into(), z.re.into(), z.im.into()]);
            }
            Ok(Report::new(f.summary()?, t))
        }

        Command::FrameBounds(c) => {
            if c.degrees.is_empty() {
                return Err(invalid("`degrees` is empty"));
            }
            let set = build_set(&c.set, w, &cfg.base_dir)?;
            let reports = c
                .degrees
                .iter()
                .map(|&n| sampling_bounds(&basis(w, n)?, &set))
                .collect::<Result<Vec<_>>>()?;
            let mut t = Table::new(&FRAME_COLUMNS);
            reports.iter().for_each(|r| t.push(frame_row(r)));
            Ok(Report::new(json!({ "reports": reports }), t))
        }

        Command::InterpBounds(c) => {
            let set = build_set(&c.set, w, &cfg.base_dir)?;
            let k = kernel_for(w, c.n)?;
            let r = interpolation_lower_bound(&k, set.points())?;
            let separation = if set.len() > 1 { Some(set.separation()?) } else { None };
            let mut t = Table::new(&FRAME_COLUMNS);
            t.push(frame_row(&r));
            Ok(Report::new(json!({ "report": r, "separation": separation }), t))
        }

        Command::LocalizedFrame(c) => {
            if c.delta.is_empty() {
                return Err(invalid("`delta` is empty"));
            }
            let b = Arc::new(basis(w, c.n)?);
            let mut rng = seeded_rng(cfg.seed);
            let fs: Vec<_> = (0..c.functions).map(|_| unit_coefficients(&mut rng, c.n)).collect();
            #[derive(Serialize)]
            struct Row {
                delta: f64,
                bounds: FrameReport,
                cell_order: usize,
                nodes: usize,
                max_ratio: Option<f64>,
                mean_ratio: Option<f64>,
            }
            let mut rows = Vec::new();
            let mut t = Table::new(&["delta", "lower", "upper", "cell_order", "nodes", "max_ratio", "mean_ratio"]);
            for &delta in &c.delta {
                let lf = build_localized_frame(b.clone(), delta)?;
                let bounds = localized_frame_bounds(&lf);
                let ratios = lf.reconstruction_ratios(&fs);
                let max_ratio = ratios.iter().cloned().reduce(f64::max);
                let mean_ratio = (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64);
                t.push(vec![
                    delta.into(),
                    bounds.lower.into(),
                    bounds.upper.into(),
                    lf.cell_order.into(),
                    lf.gamma_nodes.len().into(),
                    max_ratio.unwrap_or(f64::NAN).into(),
                    mean_ratio.unwrap_or(f64::NAN).into(),
                ]);
                rows.push(Row {
                    delta,
                    bounds,
                    cell_order: lf.cell_order,
                    nodes: lf.gamma_nodes.len(),
                    max_ratio,
                    mean_ratio,
                });
            }
            Ok(Report::new(json!({ "functions": c.functions, "rows": rows }), t))
        }

        Command::Wiener(c) => {
            let b = basis(w, c.n)?;
            let set = build_set(&c.set, w, &cfg.base_dir)?;
            let region = b.bulk_radius() + SAMPLING_MARGIN;
            let kept = set.restricted_to_disk(region);
            let a = b.weighted_collocation(&kept);
            let p = CMatrix::identity(c.n, c.n);
            let est = wiener_probe(&a, &p, &c.q, c.trials, cfg.seed)?;
            let mut t = Table::new(&["q", "estimate", "certified", "trials"]);
            for e in &est {
                let q = serde_json::to_value(e.q).expect("q serializes");
                t.push(vec![
                    q.as_str().unwrap_or_default().into(),
                    e.estimate.into(),
                    usize::from(e.certified).into(),
                    e.trials.into(),
                ]);
            }
            Ok(Report::new(
                json!({ "rows": kept.len(), "region_radius": region, "estimates": est }),
                t,
            ))
        }

        Command::Deform(c) => {
            let b = basis(w, c.n)?;
            let set = build_set(&c.set, w, &cfg.base_dir)?;
            let k = KernelEvaluator::best_available(w, c.n)?;
            let rows = deformation_experiment(&b, &set, &c.schedule, &k)?;
            let mut t = Table::new(&["a", "lower", "upper", "set_size", "density", "density_radius"]);
            for r in &rows {
                t.push(vec![
                    r.a.into(),
                    r.lower.into(),
                    r.upper.into(),
                    r.set_size.into(),
                    r.density.into(),
                    r.density_radius.into(),
                ]);
            }
            Ok(Report::new(json!({ "rows": rows }), t))
        }

        Command::Sharp(c) => {
            let r = sharp_experiment(w, c.epsilon, c.n)?;
            let mut t = Table::new(&["quantity", "value"]);
            let entries: [(&str, Cell); 10] = [
                ("matched_degree", r.matched_degree.into()),
                ("interp_lower", r.interpolation.lower.into()),
                ("interp_upper", r.interpolation.upper.into()),
                ("sampling_lower", r.sampling.lower.into()),
                ("sampling_upper", r.sampling.upper.into()),
                ("density_upper", r.density.d_plus.into()),
                ("plain_rate", r.plain_decay.rate.into()),
                ("improved_rate", r.improved_decay.rate.into()),
                ("improved_cardinality_error", r.improved_cardinality_error.into()),
                ("separation", r.fekete.separation.into()),
            ];
            for (name, v) in entries {
                t.push(vec![name.into(), v]);
            }
            Ok(Report::new(r, t))
        }

        Command::TranslateCheck(c) => {
            if c.terms == 0 {
                return Err(invalid("`terms` must be positive"));
            }
            let grid = grid_points(&c.grid)?;
            let mut rng = seeded_rng(cfg.seed);
            let mut rows = Vec::new();
            let mut t = Table::new(&["shift_x", "shift_y", "identity_error", "covariance_error"]);
            for &s in &c.shifts {
                let coeffs: Vec<_> = complex_gaussian_vector(&mut rng, c.terms).iter().copied().collect();
                let r = gaussian_translation_check(w, point(s), &coeffs, &grid)?;
                t.push(vec![s[0].into(), s[1].into(), r.identity_error.into(), r.covariance_error.into()]);
                rows.push(json!({ "shift": s, "report": r }));
            }
            Ok(Report::new(json!({ "grid_radius": max_norm(&grid), "rows": rows }), t))
        }
    }
}
