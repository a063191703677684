//! Dispatch from a validated scenario to the solvers. Everything is computed
//! in memory first so a failing run leaves no files behind.

use crate::scenario::{key_name, Kind, Relaxation, Scenario};
use crate::CliError;
use rayon::prelude::*;
use tomflow::analysis::{corli_consistency, mu_corli, stability_report};
use tomflow::macrosolve::{
    epsilon_sweep, evolve_snapshots, l1_against_riemann, loglog_slope, FvField, Ghost, RelaxationConfig,
    SweepScenario,
};
use tomflow::micro::{
    l1_against_exact, lagrangian_marker, reconstruct_density, riemann_platoons, simulate, Integrator, MicroModel,
    MicroRiemannScenario,
};
use tomflow::output::{fmt_sig, state_csv, Cell, Csv};
use tomflow::riemann::{delta_v, Wave1};
use tomflow::waves::lambda1;
use tomflow::{solve_riemann, ClosureSet, PrimState};

/// Named CSV bodies plus `key = value` metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub kind: Kind,
    pub files: Vec<(String, String)>,
    pub meta: Vec<(String, String)>,
}

impl Artifacts {
    fn new(kind: Kind) -> Self {
        Self {
            kind,
            files: Vec::new(),
            meta: Vec::new(),
        }
    }

    fn file(&mut self, name: String, csv: Csv) {
        self.files.push((name, csv.into_string()));
    }

    fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn closure_meta(art: &mut Artifacts, cs: &ClosureSet) {
    art.meta("q", cs.q.name());
    art.meta("h", cs.h.name());
    for (key, c) in [("h_eq", &cs.h_eq), ("v_eq", &cs.v_eq)] {
        if let Some(c) = c {
            art.meta(key, c.name());
        }
    }
    if let Some(vc) = &cs.vc {
        art.meta("vc", vc.name());
    }
}

fn state_meta(art: &mut Artifacts, key: &str, u: &PrimState) {
    art.meta(key, format!("{} {} {}", fmt_sig(u.rho), fmt_sig(u.v), fmt_sig(u.h)));
}

pub fn run(sc: &Scenario) -> Result<Artifacts, CliError> {
    sc.validate()?;
    let cs = sc.closures()?;
    let mut art = Artifacts::new(sc.kind);
    closure_meta(&mut art, &cs);
    match sc.kind {
        Kind::Riemann => run_riemann(sc, &cs, &mut art)?,
        Kind::Fvm => run_fvm(sc, &cs, &mut art)?,
        Kind::Micro => run_micro(sc, &cs, &mut art)?,
        Kind::Analyze => run_analyze(sc, &cs, &mut art)?,
        Kind::Sweep => run_sweep(sc, &cs, &mut art)?,
    }
    Ok(art)
}

fn run_riemann(sc: &Scenario, cs: &ClosureSet, art: &mut Artifacts) -> Result<(), CliError> {
    let (l, r) = sc.states(cs)?;
    let x0 = sc.initial.as_ref().map_or(0.0, |i| i.x0);
    let sol = solve_riemann(&l, &r, cs)?;
    let n = &sc.numerics;
    let xs = linspace(n.domain[0], n.domain[1], n.points);
    for &t in &n.times {
        let shifted: Vec<f64> = xs.iter().map(|x| x - x0).collect();
        let samples = sol.sample_many(t, &shifted)?;
        let mut csv = Csv::new(&["x", "rho", "v", "h", "lambda1", "region"]);
        for (x, (u, region)) in xs.iter().zip(&samples) {
            csv.row(vec![
                (*x).into(),
                u.rho.into(),
                u.v.into(),
                u.h.into(),
                lambda1(u, cs)?.into(),
                region.label().into(),
            ]);
        }
        art.file(format!("riemann_t{}.csv", fmt_sig(t)), csv);
    }
    let t = *n.times.last().expect("validated");
    match sol.wave1 {
        Wave1::Rarefaction { xi_left, xi_right } => {
            let (a, b) = (t * xi_left, t * xi_right);
            let inside: Vec<f64> = xs.iter().map(|x| x - x0).filter(|x| *x > a && *x < b).collect();
            let dv = delta_v(&sol, t, &inside)?;
            let mut csv = Csv::new(&["x", "v", "v_ar", "delta_v"]);
            for (x, d) in inside.iter().zip(&dv) {
                let v_ar = sol.linear_fan_velocity(t, *x)?;
                csv.row(vec![(x + x0).into(), (v_ar + d).into(), v_ar.into(), (*d).into()]);
            }
            art.file("delta_v.csv".into(), csv);
            art.meta("wave1", "rarefaction");
            art.meta("fan_speeds", format!("{} {}", fmt_sig(xi_left), fmt_sig(xi_right)));
            if let Some(s) = sol.sigma_star {
                art.meta("sigma_star", fmt_sig(s));
            }
        }
        Wave1::Shock { speed, lax, .. } => {
            art.meta("wave1", "shock");
            art.meta("shock_speed", fmt_sig(speed));
            art.meta("lax", lax);
        }
        Wave1::None => art.meta("wave1", "none"),
    }
    state_meta(art, "left", &l);
    state_meta(art, "mid", &sol.mid);
    state_meta(art, "right", &r);
    art.meta("contact_speed", fmt_sig(sol.contact_speed));
    art.meta("x0", fmt_sig(x0));
    art.meta("times", join(&n.times));
    Ok(())
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| fmt_sig(*x)).collect::<Vec<_>>().join(" ")
}

fn blend(x: f64, x0: f64, width: Option<f64>, a: f64, b: f64) -> f64 {
    let s = match width {
        Some(w) => 0.5 * (1.0 + ((x - x0) / w).tanh()),
        None => f64::from(u8::from(x >= x0)),
    };
    a + (b - a) * s
}

fn run_fvm(sc: &Scenario, cs: &ClosureSet, art: &mut Artifacts) -> Result<(), CliError> {
    let (l, r) = sc.states(cs)?;
    let ini = sc.initial.as_ref().expect("validated");
    let n = &sc.numerics;
    let [a, b] = n.domain;
    let f0 = FvField::from_prim_fn(a, b, n.cells, Ghost::Outflow, cs, |x| {
        PrimState::new(
            blend(x, ini.x0, ini.smoothing, l.rho, r.rho),
            blend(x, ini.x0, ini.smoothing, l.v, r.v),
            blend(x, ini.x0, ini.smoothing, l.h, r.h),
        )
    })?;
    let rc = match n.relaxation {
        Relaxation::None => RelaxationConfig::none(),
        other => RelaxationConfig::new(other.variant(), n.eps.expect("validated"), n.source_sign.source())?,
    };
    let snaps = evolve_snapshots(&f0, cs, &rc, n.cfl, &n.times)?;
    let exact = if n.relaxation == Relaxation::None && ini.smoothing.is_none() {
        solve_riemann(&l, &r, cs).ok()
    } else {
        None
    };
    let mut err = Csv::new(&["t", "l1_rho", "l1_v", "l1_h"]);
    for f in &snaps {
        art.file(format!("fvm_t{}.csv", fmt_sig(f.t)), state_csv(&f.centers(), &f.prims(cs)?, cs));
        if let Some(sol) = &exact {
            let e = l1_against_riemann(f, sol, ini.x0, cs)?;
            err.row(vec![f.t.into(), e[0].into(), e[1].into(), e[2].into()]);
        }
    }
    if exact.is_some() {
        art.file("fvm_error.csv".into(), err);
    }
    art.meta("scheme", "rusanov + strang splitting");
    art.meta("cfl", fmt_sig(n.cfl));
    art.meta("cells", n.cells);
    art.meta("dx", fmt_sig((b - a) / n.cells as f64));
    art.meta("variant", key_name(&n.relaxation));
    art.meta("eps", n.eps.map_or("none".into(), fmt_sig));
    art.meta("source_sign", key_name(&n.source_sign));
    art.meta("times", join(&n.times));
    Ok(())
}

struct MicroRun {
    n: usize,
    trajectory: Csv,
    densities: Vec<(f64, Csv)>,
    errors: Vec<[f64; 5]>,
}

fn run_micro(sc: &Scenario, cs: &ClosureSet, art: &mut Artifacts) -> Result<(), CliError> {
    let (l, r) = sc.states(cs)?;
    let n = &sc.numerics;
    let t_final = *n.times.last().expect("validated");
    let mut mr = MicroRiemannScenario::new(l, r, t_final);
    mr.extent_left = n.extent[0];
    mr.extent_right = n.extent[1];
    mr.window = (n.window[0], n.window[1]);
    mr.cells = n.cells;
    mr.sign = n.micro_sign.convention();
    mr.integrator = Integrator::Rk4 { dt: n.dt };
    let exact = solve_riemann(&l, &r, cs)?;
    let model = MicroModel::Tom(cs.clone());
    let edges = mr.edges();
    let one = |&count: &usize| -> Result<MicroRun, CliError> {
        let (dx_car, nl, nr) = mr.discretize(count)?;
        let p = mr.params(dx_car);
        let s0 = riemann_platoons(&l, &r, nl, nr, dx_car)?;
        let w0 = lagrangian_marker(&model, &s0, &p)?;
        let mut drift: f64 = 0.0;
        let mut s = s0;
        let mut out = MicroRun {
            n: count,
            trajectory: Csv::new(&["t", "i", "x", "v", "h"]),
            densities: Vec::new(),
            errors: Vec::new(),
        };
        for &t in &n.times {
            s = simulate(&model, &s, &p, t, |st| {
                for (a, b) in lagrangian_marker(&model, st, &p)?.iter().zip(&w0) {
                    drift = drift.max((a - b).abs());
                }
                Ok(())
            })?;
            for i in 0..s.len() {
                out.trajectory
                    .row(vec![t.into(), i.into(), s.x[i].into(), s.v[i].into(), s.h[i].into()]);
            }
            let rec = reconstruct_density(&s, &p, &edges)?;
            let mut csv = Csv::new(&tomflow::output::STATE_HEADER);
            for (c, x) in rec.centers().iter().enumerate() {
                let (rho, v, h) = (rec.rho[c], rec.v[c], rec.h[c]);
                let (z, w) = match (rho, v, h) {
                    (Some(rho), Some(v), Some(h)) => tomflow::state::prim_to_cons(&PrimState::new(rho, v, h), cs)
                        .map_or((None, None), |c| (Some(c.z), Some(c.w))),
                    _ => (None, None),
                };
                csv.row(vec![(*x).into(), rho.into(), v.into(), h.into(), Cell::Opt(z), Cell::Opt(w)]);
            }
            out.densities.push((t, csv));
            let (er, ev) = l1_against_exact(&rec, &exact, t)?;
            out.errors.push([t, dx_car, er, ev, drift]);
        }
        Ok(out)
    };
    let runs = n.vehicles.par_iter().map(one).collect::<Result<Vec<_>, _>>()?;
    let mut err = Csv::new(&["n", "t", "dx_car", "l1_rho", "l1_v", "omega_drift"]);
    for run in runs {
        for e in &run.errors {
            err.row(vec![run.n.into(), e[0].into(), e[1].into(), e[2].into(), e[3].into(), e[4].into()]);
        }
        art.file(format!("micro_trajectory_n{}.csv", run.n), run.trajectory);
        for (t, csv) in run.densities {
            art.file(format!("micro_state_n{}_t{}.csv", run.n, fmt_sig(t)), csv);
        }
    }
    art.file("micro_error.csv".into(), err);
    art.meta("model", "tom");
    art.meta("sign", key_name(&n.micro_sign));
    art.meta("integrator", n.dt.map_or("rk4 auto".into(), |dt| format!("rk4 dt={}", fmt_sig(dt))));
    art.meta("vehicles", n.vehicles.iter().map(usize::to_string).collect::<Vec<_>>().join(" "));
    art.meta("times", join(&n.times));
    Ok(())
}

fn run_analyze(sc: &Scenario, cs: &ClosureSet, art: &mut Artifacts) -> Result<(), CliError> {
    let n = &sc.numerics;
    let rhos = linspace(n.rho_range[0], n.rho_range[1], n.rho_points);
    let report = stability_report(cs, &rhos, n.velocity)?;
    let mut csv = Csv::new(&[
        "rho",
        "mu_tom",
        "mu_arz",
        "gamma_hc",
        "lam1_frozen",
        "lam1_arz",
        "lam_v",
        "feq_prime",
        "sc_tom",
        "sc_arz",
    ]);
    for r in &report.records {
        csv.row(vec![
            r.rho.into(),
            r.mu_tom.into(),
            r.mu_arz.into(),
            r.gamma_hc.into(),
            r.lam1_frozen.into(),
            r.lam1_arz.into(),
            r.lam_v.into(),
            r.feq_prime.into(),
            r.sc_tom.into(),
            r.sc_arz.into(),
        ]);
    }
    art.file("stability.csv".into(), csv);
    if cs.vc.is_some() {
        let mut c = Csv::new(&["rho", "h", "lam1_c", "r", "r_alt", "mu_c_11", "mu_c_12", "mu_c_21", "mu_c_22"]);
        for &rho in &rhos {
            let h = match n.hesitation {
                Some(h) => h,
                None => cs.h_eq()?.eval(rho)?,
            };
            let k = corli_consistency(rho, h, cs)?;
            let m = mu_corli(rho, h, cs)?;
            c.row(vec![
                rho.into(),
                h.into(),
                k.lam1_c.into(),
                k.r.into(),
                k.r_alt.into(),
                m[0][0].into(),
                m[0][1].into(),
                m[1][0].into(),
                m[1][1].into(),
            ]);
        }
        art.file("corli.csv".into(), c);
    }
    art.meta("rho_range", join(&n.rho_range));
    art.meta("rho_points", n.rho_points);
    art.meta("all_stable", report.all_stable());
    Ok(())
}

fn run_sweep(sc: &Scenario, cs: &ClosureSet, art: &mut Artifacts) -> Result<(), CliError> {
    let ini = sc.initial.as_ref().expect("validated");
    let n = &sc.numerics;
    let sweep = SweepScenario {
        left: (ini.left.rho, ini.left.v),
        right: (ini.right.rho, ini.right.v),
        h_left: ini.left.h,
        h_right: ini.right.h,
        x0: ini.x0,
        smoothing: ini.smoothing,
        domain: (n.domain[0], n.domain[1]),
        cells: n.cells,
        cfl: n.cfl,
        t_final: *n.times.last().expect("validated"),
        source_sign: n.source_sign.source(),
    };
    let eps = n.eps_list.as_ref().expect("validated");
    let entries = epsilon_sweep(&sweep, n.relaxation.variant(), eps, cs)?;
    let mut csv = Csv::new(&["eps", "distance", "diverged"]);
    for e in &entries {
        csv.row(vec![e.eps.into(), e.distance.into(), Some(e.diverged).into()]);
    }
    art.file("sweep.csv".into(), csv);
    for e in entries.iter().filter(|e| e.diverged) {
        art.meta(&format!("diverged_eps_{}", fmt_sig(e.eps)), e.note.clone().unwrap_or_default());
    }
    art.meta("variant", key_name(&n.relaxation));
    art.meta("source_sign", key_name(&n.source_sign));
    art.meta("cells", n.cells);
    art.meta("cfl", fmt_sig(n.cfl));
    art.meta("t_final", fmt_sig(sweep.t_final));
    art.meta("loglog_slope", loglog_slope(&entries).map_or("nan".into(), fmt_sig));
    Ok(())
}
