//! Scenario execution, CSV rows and the drift summary.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{RunConfig, Scenario, WrapGuard};
use crate::coupled::{CoupledSystem, InvariantRecord, ParticleState, SystemState};
use crate::grid::{write_fields, Spectral};
use crate::poincare::{transport_residual, DVec, So3Chart};
use crate::rigid_body::{moment_of_inertia, top_rk4_step, BodySpec, Inertia, Quadrature, TopState};
use crate::so3::{so3_exp, Rotation};
use crate::{Error, Result, Vec3};

/// Column names of the invariant CSV.
pub const CSV_HEADER: &str = "t,energy,Px,Py,Pz,Mx,My,Mz,gauss_res,divB_res,ortho_res";

/// Norm below which drifts are reported as absolute rather than relative.
pub const RELATIVE_FLOOR: f64 = 1e-8;
/// Allowed growth of the Gauss and `∇·B` residuals over a run.
pub const CONSTRAINT_GROWTH_TOL: f64 = 1e-8;
/// Allowed orthogonality residual of the rotation.
pub const ORTHO_TOL: f64 = 1e-9;
/// Smallest accepted observed order of the transport-relation differences.
pub const TRANSPORT_MIN_ORDER: f64 = 1.8;

/// One CSV row with 17 significant digits.
pub fn csv_row(r: &InvariantRecord) -> String {
    let vals = [
        r.t, r.energy, r.p.x, r.p.y, r.p.z, r.m.x, r.m.y, r.m.z, r.gauss_res, r.div_b_res, r.ortho_res,
    ];
    let cells: Vec<String> = vals.iter().map(|v| format!("{v:.16e}")).collect();
    cells.join(",")
}

/// `max_t |x(t) − x(0)| / scale`, or absolute when `scale` is below
/// [`RELATIVE_FLOOR`].
pub fn relative_drift(series: impl IntoIterator<Item = f64>, scale: f64) -> f64 {
    let mut it = series.into_iter();
    let Some(x0) = it.next() else { return 0.0 };
    let d = it.fold(0.0f64, |m, x| m.max((x - x0).abs()));
    if scale.abs() >= RELATIVE_FLOOR {
        d / scale.abs()
    } else {
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Below,
    Above,
}

/// A measured quantity and, when an expectation applies, its verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub comparison: Comparison,
    /// Whether the symmetries (or the constraint structure) predict the bound.
    pub expected: bool,
    /// `None` for quantities that are only reported.
    pub pass: Option<bool>,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, limit: f64, comparison: Comparison, expected: bool) -> Self {
        let ok = match comparison {
            Comparison::Below => value < limit,
            Comparison::Above => value > limit,
        };
        Check {
            name: name.into(),
            value,
            limit,
            comparison,
            expected,
            pass: expected.then_some(ok && value.is_finite()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub scenario: Scenario,
    pub steps: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Last time reached by a finite state.
    pub t_reached: f64,
    pub wall_time_s: f64,
    pub checks: Vec<Check>,
    pub all_pass: bool,
    /// Whether the field angular momentum quadrature stayed free of boundary
    /// fields; `None` when no field is evolved.
    pub m_reliable: Option<bool>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

impl RunSummary {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn finish(&mut self) {
        self.all_pass = self.error.is_none() && self.checks.iter().all(|c| c.pass != Some(false));
    }
}

/// Drift checks of the invariant rows: energy, `P_k`, `M_k` and `|M|` when
/// requested, with expectations supplied by the caller's symmetry analysis.
fn drift_checks(
    rows: &[InvariantRecord],
    tol: f64,
    energy: bool,
    p: [bool; 3],
    m: [bool; 3],
    casimir: Option<bool>,
) -> Vec<Check> {
    let first = rows[0];
    let mut out = vec![Check::new(
        "energy",
        relative_drift(rows.iter().map(|r| r.energy), first.energy),
        tol,
        Comparison::Below,
        energy,
    )];
    for k in 0..3 {
        out.push(Check::new(
            format!("P{}", k + 1),
            relative_drift(rows.iter().map(|r| r.p[k]), first.p.norm()),
            tol,
            Comparison::Below,
            p[k],
        ));
    }
    for k in 0..3 {
        out.push(Check::new(
            format!("M{}", k + 1),
            relative_drift(rows.iter().map(|r| r.m[k]), first.m.norm()),
            tol,
            Comparison::Below,
            m[k],
        ));
    }
    if let Some(expected) = casimir {
        out.push(Check::new(
            "|M|",
            relative_drift(rows.iter().map(|r| r.m.norm()), first.m.norm()),
            tol,
            Comparison::Below,
            expected,
        ));
    }
    out.push(Check::new(
        "ortho_max",
        rows.iter().map(|r| r.ortho_res).fold(0.0, f64::max),
        ORTHO_TOL,
        Comparison::Below,
        true,
    ));
    out
}

fn constraint_checks(rows: &[InvariantRecord]) -> Vec<Check> {
    let growth = |f: fn(&InvariantRecord) -> f64| rows.iter().map(|r| f(r) - f(&rows[0])).fold(0.0, f64::max);
    vec![
        Check::new("gauss_growth", growth(|r| r.gauss_res), CONSTRAINT_GROWTH_TOL, Comparison::Below, true),
        Check::new("divB_growth", growth(|r| r.div_b_res), CONSTRAINT_GROWTH_TOL, Comparison::Below, true),
    ]
}

/// Where run artefacts go.
pub struct Sinks<'a> {
    pub csv: &'a mut dyn Write,
    /// Directory for raw field dumps when `dump_every` is set.
    pub dump_dir: Option<&'a Path>,
    /// Secondary table written by `transport_check`.
    pub transport_csv: Option<&'a mut dyn Write>,
}

/// Runs the scenario, streaming CSV rows into `sinks`. A non-finite state
/// ends the run early; the summary then carries the error and the last good
/// time.
pub fn execute(config: &RunConfig, sinks: Sinks<'_>) -> Result<RunSummary> {
    let start = Instant::now();
    let mut summary = RunSummary {
        scenario: config.scenario,
        steps: config.steps(),
        dt: config.step(),
        t_end: config.end_time(),
        t_reached: 0.0,
        wall_time_s: 0.0,
        checks: Vec::new(),
        all_pass: false,
        m_reliable: None,
        warnings: config.warnings.clone(),
        error: None,
    };
    for w in &summary.warnings {
        log::warn!("{w}");
    }
    match config.scenario {
        Scenario::FreeTop | Scenario::EulerTop => run_top(config, sinks.csv, &mut summary)?,
        Scenario::TransportCheck => {
            writeln!(sinks.csv, "{CSV_HEADER}")?;
            run_transport(config, sinks.transport_csv, &mut summary)?
        }
        _ => run_coupled(config, sinks.csv, sinks.dump_dir, &mut summary)?,
    }
    summary.wall_time_s = start.elapsed().as_secs_f64();
    summary.finish();
    Ok(summary)
}

fn top_record(body: &BodySpec, s: &TopState, t: f64) -> InvariantRecord {
    InvariantRecord {
        t,
        energy: body.energy(&s.omega),
        p: Vec3::zeros(),
        m: body.angular_momentum(&s.omega),
        gauss_res: 0.0,
        div_b_res: 0.0,
        ortho_res: s.r.orthogonality_residual(),
        m_reliable: true,
    }
}

fn run_top(c: &RunConfig, csv: &mut dyn Write, summary: &mut RunSummary) -> Result<()> {
    let inertia = match (c.scenario, c.inertia) {
        (Scenario::EulerTop, Some(m)) => Inertia::matrix(m)?,
        _ => Inertia::scalar(moment_of_inertia(&c.profile()?, &Quadrature::default())?)?,
    };
    let body = BodySpec::new(inertia);
    let dt = c.step();
    let mut s = TopState {
        r: Rotation::identity(),
        omega: c.omega0,
    };
    writeln!(csv, "{CSV_HEADER}")?;
    let mut rows = vec![top_record(&body, &s, 0.0)];
    writeln!(csv, "{}", csv_row(&rows[0]))?;
    for step in 1..=summary.steps {
        let next = top_rk4_step(&body, &s, dt)?;
        let t = step as f64 * dt;
        if !next.omega.iter().all(|v| v.is_finite()) {
            summary.error = Some(Error::NonFinite { last_good_t: summary.t_reached }.to_string());
            break;
        }
        s = next;
        summary.t_reached = t;
        if step % c.sample_every == 0 || step == summary.steps {
            let r = top_record(&body, &s, t);
            writeln!(csv, "{}", csv_row(&r))?;
            rows.push(r);
        }
    }
    // Energy and |L̂_ω| are conserved for every inertia; L̂_ω_k when the
    // Lagrangian is invariant under rotations about e_k.
    let sym = inertia.rotational_symmetry();
    summary.checks = drift_checks(&rows, c.drift_tol, true, [false; 3], sym, Some(true));
    summary.checks.retain(|ch| !ch.name.starts_with('P'));
    Ok(())
}

fn run_coupled(c: &RunConfig, csv: &mut dyn Write, dump_dir: Option<&Path>, summary: &mut RunSummary) -> Result<()> {
    let spectral = Spectral::with_execution(c.grid()?, c.execution).with_dealias(c.dealias);
    let sys = CoupledSystem::with_spectral(spectral, c.profile()?, c.external.potential())?;
    let symmetry = sys.symmetry(c.seed);
    let dt = c.step();
    let mut s = sys.coulomb_state(ParticleState::new(c.q0, c.qdot0, c.omega0))?;
    if c.wrap_guard == WrapGuard::Warn && summary.t_end > c.wrap_window() {
        log::warn!("invariants past t = {} are affected by periodic wrap-around", c.wrap_window());
    }

    let dump = |s: &SystemState, step: usize| -> Result<()> {
        if let (Some(every), Some(dir)) = (c.dump_every, dump_dir) {
            if step % every == 0 {
                let f = File::create(dir.join(format!("fields_{step:06}.bin")))?;
                write_fields(BufWriter::new(f), sys.grid(), s.t, &s.fields)?;
            }
        }
        Ok(())
    };

    writeln!(csv, "{CSV_HEADER}")?;
    let first = sys.record(&s)?;
    writeln!(csv, "{}", csv_row(&first))?;
    dump(&s, 0)?;
    let mut rows = vec![first];
    for step in 1..=summary.steps {
        match sys.rk4_step(&s, dt) {
            Ok(next) => s = next,
            Err(e @ Error::NonFinite { .. }) => {
                summary.error = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
        summary.t_reached = s.t;
        dump(&s, step)?;
        if step % c.sample_every == 0 || step == summary.steps {
            let r = sys.record(&s)?;
            writeln!(csv, "{}", csv_row(&r))?;
            rows.push(r);
        }
    }
    let reliable = rows.iter().all(|r| r.m_reliable);
    if !reliable {
        summary
            .warnings
            .push("field angular momentum sees boundary fields; M may be affected by the periodic box".into());
    }
    summary.m_reliable = Some(reliable);
    summary.checks = drift_checks(
        &rows,
        c.drift_tol,
        symmetry.energy_conserved,
        symmetry.conserved_p,
        symmetry.conserved_m,
        None,
    );
    summary.checks.extend(constraint_checks(&rows));
    Ok(())
}

/// `g(s, t) = exp(hat(a + b s + c t + d s² + e st + f t²)) R₀` with random
/// coefficients, sampled at a random `(s, t)`.
pub fn random_family(rng: &mut impl Rng) -> (impl Fn(f64, f64) -> DVec, f64, f64) {
    let mut v = |scale: f64| Vec3::from_fn(|_, _| rng.random_range(-scale..scale));
    let coef = [v(1.0), v(1.0), v(1.0), v(1.0), v(1.0), v(1.0)];
    let r0 = so3_exp(&v(std::f64::consts::PI));
    let (s, t) = (rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
    let family = move |s: f64, t: f64| {
        let [a, b, c, d, e, f] = coef;
        let x = a + b * s + c * t + d * (s * s) + e * (s * t) + f * (t * t);
        So3Chart::to_ambient(&(so3_exp(&x).matrix() * r0.matrix()))
    };
    (family, s, t)
}

fn run_transport(c: &RunConfig, out: Option<&mut dyn Write>, summary: &mut RunSummary) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let h = c.fd_step;
    let coarse = (10.0 * h).min(1e-2);
    let mut rows = Vec::with_capacity(c.families);
    for i in 0..c.families {
        let (family, s, t) = random_family(&mut rng);
        let fine_res = transport_residual(&So3Chart, &family, s, t, h)?;
        let coarse_res = transport_residual(&So3Chart, &family, s, t, coarse)?;
        let order = (coarse_res / fine_res).log10() / (coarse / h).log10();
        rows.push((i, s, t, coarse_res, fine_res, order));
    }
    if let Some(w) = out {
        writeln!(w, "family,s,t,residual_coarse,residual_fine,order")?;
        for (i, s, t, rc, rf, o) in &rows {
            writeln!(w, "{i},{s:.16e},{t:.16e},{rc:.16e},{rf:.16e},{o:.16e}")?;
        }
    }
    let worst = rows.iter().map(|r| r.4).fold(0.0, f64::max);
    let min_order = rows.iter().map(|r| r.5).fold(f64::INFINITY, f64::min);
    summary.steps = c.families;
    summary.checks = vec![
        Check::new("transport_residual", worst, c.drift_tol, Comparison::Below, true),
        Check::new("transport_order", min_order, TRANSPORT_MIN_ORDER, Comparison::Above, true),
    ];
    Ok(())
}

/// Runs `config` writing `invariants.csv`, `summary.json` and optional
/// field dumps or `transport.csv` into `out_dir`.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    fs::create_dir_all(out_dir)?;
    let mut csv = BufWriter::new(File::create(out_dir.join("invariants.csv"))?);
    let mut transport = match config.scenario {
        Scenario::TransportCheck => Some(BufWriter::new(File::create(out_dir.join("transport.csv"))?)),
        _ => None,
    };
    let summary = execute(
        config,
        Sinks {
            csv: &mut csv,
            dump_dir: Some(out_dir),
            transport_csv: transport.as_mut().map(|w| w as &mut dyn Write),
        },
    )?;
    csv.flush()?;
    if let Some(w) = transport.as_mut() {
        w.flush()?;
    }
    fs::write(out_dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(summary)
}
