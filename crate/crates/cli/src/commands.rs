use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use serde::Serialize;

use rescycle_core::analysis::{
    self, analyze_cycle, bisect_threshold, link_branches, standard_initial_states, sweep,
    write_bifurcation_csv, BisectionResult, Classification, CycleInfo, FixedPoint, SolowStatics,
};
use rescycle_core::integrator::{self, classify_trajectory, fmt_f64};
use rescycle_core::kaldor::{self, ISPoint, KaldorReport, SplitKind};
use rescycle_core::model::{self, DerivedConstants};
use rescycle_core::{Attractor, Field, FieldKind, Trajectory};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};
use crate::svg::{Dash, HLine, Plot, Series, PALETTE};

/// Destination directory and the formats to write into it.
#[derive(Debug, Clone)]
pub struct Output {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: PathBuf, formats: Vec<Format>) -> Self {
        Output {
            dir,
            formats,
            written: Vec::new(),
        }
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn create(&mut self, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
        fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path.clone());
        Ok((path, BufWriter::new(file)))
    }

    fn write_with(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<()> {
        let (path, mut w) = self.create(name)?;
        body(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| CliError::io(path, e))
    }

    fn csv(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<()> {
        if self.wants(Format::Csv) {
            self.write_with(name, body)?;
        }
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, config: &RunConfig, value: &T) -> Result<()> {
        if self.wants(Format::Json) {
            self.write_report(name, config, value)?;
        }
        Ok(())
    }

    /// Writes `value` together with the config it was produced from,
    /// regardless of the requested formats.
    fn write_report<T: Serialize>(&mut self, name: &str, config: &RunConfig, value: &T) -> Result<()> {
        let report = Report { config, result: value };
        let text = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Config(format!("cannot serialize {name}: {e}")))?;
        self.write_with(name, |w| writeln!(w, "{text}"))
    }

    fn svg(&mut self, name: &str, plot: impl FnOnce() -> Plot) -> Result<()> {
        if self.wants(Format::Svg) {
            let text = plot().render();
            self.write_with(name, |w| w.write_all(text.as_bytes()))?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    result: &'a T,
}

#[derive(Debug, Serialize)]
pub struct AttractorSummary {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diverged_at: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct SimulationSummary {
    pub field: FieldKind,
    pub initial_state: Vec<f64>,
    pub params_digest: String,
    pub samples: usize,
    pub attractor: AttractorSummary,
    pub cycle: Option<CycleInfo>,
    pub baseline_state: Option<Vec<f64>>,
    pub derived: Option<DerivedConstants>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solow: Option<SolowStatics>,
}

fn initial_state(cfg: &RunConfig, field: &Field) -> Result<Vec<f64>> {
    match &cfg.initial_state {
        Some(s) => Ok(s.clone()),
        None => Ok(standard_initial_states(field)?.swap_remove(0)),
    }
}

fn derived(field: &Field) -> Option<DerivedConstants> {
    field
        .model_params()
        .and_then(|p| model::derived_constants(p).ok())
}

fn trajectory_plot(traj: &Trajectory, baseline: Option<&[f64]>, title: &str) -> Plot {
    let mut plot = Plot::new(title, "t", "state");
    for (i, name) in traj.state_names.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        plot.series.push(Series {
            label: name.clone(),
            points: traj
                .times
                .iter()
                .zip(&traj.states)
                .map(|(t, x)| (*t, x[i]))
                .collect(),
            color,
            dash: Dash::Solid,
        });
        if let Some(b) = baseline {
            plot.hlines.push(HLine {
                label: format!("{name}0"),
                y: b[i],
                color,
            });
        }
    }
    plot
}

fn simulate_into(cfg: &RunConfig, out: &mut Output, stem: &str) -> Result<SimulationSummary> {
    let field = cfg.build_field()?;
    let init = initial_state(cfg, &field)?;
    let settings = cfg.integrator;
    let traj = integrator::integrate_marked(&field, &init, &settings, &cfg.fingerprint())?;
    let attractor = classify_trajectory(&traj, &settings);
    let cycle = match &attractor {
        Attractor::CycleHandoff(_) if field.kind().dim() >= 2 => analyze_cycle(&traj),
        _ => None,
    };
    let baseline = field.baseline_state().ok();
    let solow = match &field {
        Field::Solow(p) => Some(analysis::solow_statics(p)?),
        _ => None,
    };
    let summary = SimulationSummary {
        field: field.kind(),
        initial_state: init,
        params_digest: traj.params_digest.clone(),
        samples: traj.len(),
        attractor: match &attractor {
            Attractor::ConvergedPoint(x) => AttractorSummary {
                kind: attractor.label(),
                state: Some(x.clone()),
                diverged_at: None,
            },
            Attractor::CycleHandoff(_) => AttractorSummary {
                kind: attractor.label(),
                state: None,
                diverged_at: None,
            },
            Attractor::Divergent { time } => AttractorSummary {
                kind: attractor.label(),
                state: None,
                diverged_at: Some(*time),
            },
        },
        cycle,
        baseline_state: baseline.clone(),
        derived: derived(&field),
        solow,
    };

    out.csv(&format!("{stem}.csv"), |w| traj.write_csv(w))?;
    out.json(&format!("{stem}.json"), cfg, &summary)?;
    out.svg(&format!("{stem}.svg"), || {
        trajectory_plot(&traj, baseline.as_deref(), &format!("{} trajectory", field.kind()))
    })?;

    if let Attractor::Divergent { time } = attractor {
        return Err(rescycle_core::Error::Diverged { time }.into());
    }
    Ok(summary)
}

pub fn simulate(cfg: &RunConfig, out: &mut Output) -> Result<SimulationSummary> {
    simulate_into(cfg, out, "trajectory")
}

pub fn solow(cfg: &RunConfig, out: &mut Output) -> Result<SimulationSummary> {
    if cfg.field != FieldKind::Solow {
        return Err(CliError::Config(format!(
            "`solow` needs field = \"solow\", got `{}`",
            cfg.field
        )));
    }
    simulate_into(cfg, out, "solow")
}

#[derive(Debug, Serialize)]
pub struct FixedPointReport {
    pub field: FieldKind,
    pub fixed_points: Vec<FixedPoint>,
    pub derived: Option<DerivedConstants>,
    pub baseline_capital: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discriminant: Option<f64>,
}

fn fixed_points_csv<W: Write>(
    names: &[&str],
    points: &[FixedPoint],
    mut w: W,
) -> std::io::Result<()> {
    write!(w, "branch,class")?;
    for n in names {
        write!(w, ",{n}")?;
    }
    for i in 1..=names.len() {
        write!(w, ",re_lambda{i},im_lambda{i}")?;
    }
    writeln!(w)?;
    for fp in points {
        write!(w, "{},{}", fp.branch, fp.classification)?;
        for v in &fp.state {
            write!(w, ",{}", fmt_f64(*v))?;
        }
        for e in &fp.eigenvalues {
            write!(w, ",{},{}", fmt_f64(e.re), fmt_f64(e.im))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn fixed_points(cfg: &RunConfig, out: &mut Output) -> Result<FixedPointReport> {
    let params = cfg.model_params("fixed-points")?;
    let (points, discriminant) = match cfg.field {
        FieldKind::ReducedYKCoupled => (
            analysis::fixed_points_2d(&params)?,
            Some(analysis::deflate_by_baseline(&params).discriminant()),
        ),
        FieldKind::Full3 => (vec![analysis::fixed_point_3d(&params)?], None),
        other => {
            return Err(CliError::Config(format!(
                "`fixed-points` supports full3 and reduced-yk-coupled, not `{other}`"
            )))
        }
    };
    let report = FixedPointReport {
        field: cfg.field,
        fixed_points: points,
        derived: model::derived_constants(&params).ok(),
        baseline_capital: model::baseline_capital(&params),
        discriminant,
    };
    let names = cfg.field.state_names();
    out.csv("fixed_points.csv", |w| fixed_points_csv(names, &report.fixed_points, w))?;
    out.json("fixed_points.json", cfg, &report)?;
    Ok(report)
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub spec: analysis::SweepSpec,
    pub rows: Vec<analysis::BifurcationRow>,
}

fn dash_for(c: Classification) -> Dash {
    if c.is_stable() {
        Dash::Solid
    } else if c == Classification::Saddle {
        Dash::Dotted
    } else {
        Dash::Dashed
    }
}

fn bifurcation_plot(report: &SweepReport) -> Plot {
    let control = report.spec.control.as_str();
    let mut plot = Plot::new(&format!("Y* against {control}"), control, "Y*");
    for (b, line) in link_branches(&report.rows).iter().enumerate() {
        let color = PALETTE[b % PALETTE.len()];
        // Consecutive points with the same class form one styled segment;
        // segments share their boundary point so the branch stays connected.
        let mut start = 0;
        while start < line.points.len() {
            let class = line.points[start].classification;
            let mut end = start;
            while end + 1 < line.points.len() && line.points[end + 1].classification == class {
                end += 1;
            }
            let stop = (end + 1).min(line.points.len() - 1);
            plot.series.push(Series {
                label: String::new(),
                points: (start..=stop)
                    .map(|i| (line.values[i], line.points[i].y()))
                    .collect(),
                color,
                dash: dash_for(class),
            });
            start = end + 1;
        }
    }
    for (label, dash) in [
        ("stable", Dash::Solid),
        ("unstable", Dash::Dashed),
        ("saddle", Dash::Dotted),
    ] {
        plot.series.push(Series {
            label: label.into(),
            points: Vec::new(),
            color: "black",
            dash,
        });
    }
    plot
}

pub fn run_sweep(cfg: &RunConfig, out: &mut Output) -> Result<SweepReport> {
    let params = cfg.model_params("sweep")?;
    let spec = cfg
        .sweep
        .ok_or_else(|| CliError::Config("`sweep` needs a [sweep] section".into()))?;
    let rows = sweep(&params, &spec, &cfg.integrator)?;
    let report = SweepReport { spec, rows };
    out.csv("bifurcation.csv", |w| write_bifurcation_csv(&report.rows, w))?;
    out.json("bifurcation.json", cfg, &report)?;
    out.svg("bifurcation.svg", || bifurcation_plot(&report))?;
    Ok(report)
}

#[derive(Debug, Serialize)]
pub struct KaldorSummary {
    pub y_range: (f64, f64),
    pub k_values: Vec<f64>,
    pub reports: Vec<KaldorReport>,
}

fn is_plot(blocks: &[(SplitKind, Vec<ISPoint>)]) -> Plot {
    let mut plot = Plot::new("Investment (solid) and saving (dashed)", "Y", "I, S");
    for (n, (kind, points)) in blocks.iter().enumerate() {
        let color = PALETTE[n % PALETTE.len()];
        let k = points.first().map(|p| p.k).unwrap_or(f64::NAN);
        plot.series.push(Series {
            label: format!("I {kind}, K={k:.3}"),
            points: points.iter().map(|p| (p.y, p.i)).collect(),
            color,
            dash: Dash::Solid,
        });
        plot.series.push(Series {
            label: String::new(),
            points: points.iter().map(|p| (p.y, p.s)).collect(),
            color,
            dash: Dash::Dashed,
        });
    }
    plot
}

pub fn kaldor(cfg: &RunConfig, out: &mut Output) -> Result<KaldorSummary> {
    let params = cfg.model_params("kaldor")?;
    let kc = cfg.kaldor.clone().unwrap_or_default();
    let y_range = kc.y_range(&params);
    let ks = kc.k_values(&params);
    let ys = kaldor::grid(y_range.0, y_range.1, kc.samples);

    let mut blocks = Vec::new();
    for &kind in &kc.variants {
        for &k in &ks {
            blocks.push((kind, kaldor::curve(kind, &params, &ys, k)));
        }
    }
    let (k_low, k_high) = match (ks.first(), ks.last()) {
        (Some(&lo), Some(&hi)) if lo < hi => (lo, hi),
        (Some(&k), _) => (0.5 * k, 1.5 * k),
        _ => unreachable!("k_values is never empty"),
    };
    let reports = kc
        .variants
        .iter()
        .map(|&kind| {
            kaldor::check_kaldor_requirements(kind, &params, y_range, kc.samples, k_low, k_high)
        })
        .collect::<rescycle_core::Result<Vec<_>>>()?;
    let summary = KaldorSummary {
        y_range,
        k_values: ks,
        reports,
    };
    out.csv("is_curves.csv", |w| kaldor::write_is_csv(&blocks, w))?;
    out.json("kaldor_report.json", cfg, &summary)?;
    out.svg("is_curves.svg", || is_plot(&blocks))?;
    Ok(summary)
}

pub fn bisect(
    cfg: &RunConfig,
    criterion: Option<analysis::Criterion>,
    out: &mut Output,
) -> Result<BisectionResult> {
    let params = cfg.model_params("bisect")?;
    let b = cfg
        .bisect
        .ok_or_else(|| CliError::Config("`bisect` needs a [bisect] section".into()))?;
    let criterion = criterion.or(b.criterion).ok_or_else(|| {
        CliError::Config("no criterion: set bisect.criterion or pass --criterion".into())
    })?;
    let result = bisect_threshold(&params, b.control, (b.lo, b.hi), criterion, &cfg.integrator)?;
    out.write_report("bisect.json", cfg, &result)?;
    Ok(result)
}
