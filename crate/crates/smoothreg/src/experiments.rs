//! One function per subcommand. Each returns the tables and findings it
//! produced; writing them out is left to the caller.

use std::f64::consts::{FRAC_PI_2, PI};

use anyhow::Context;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use smoothreg_core::apsidal::{
    apsidal_angle, apsidal_angle_with, bound_audit, case_ball, pi_identity, standard_paths, sweep_cell, PathReport,
    SweepPath, SweepReport,
};
use smoothreg_core::flow::{
    assemble_continuity, continuity_cell, continuity_reference, diagonal_schedule, section_samples, section_sample,
    section_setup, transmission_extend, CellOutcome, ContinuityCell, TransmissionPath,
};
use smoothreg_core::potentials::{
    check_class_v, check_class_vstar, weak_type_check, weak_type_grid, ClassCheckConfig, VstarConfig,
};
use smoothreg_core::radial::{time_of_flight, RadialProblem};
use smoothreg_core::simulator::{collision_datum, integrate, EventKind, PhaseState};
use smoothreg_core::variational::delta_action;
use smoothreg_core::{PotentialSpec, SmoothedPotential, Verdict};

use crate::config::{ExperimentConfig, SweepScheme};
use crate::output::{fmt_f64 as f, num, nums, Outcome, Status, Table};

fn nan_row(n: usize) -> Vec<String> {
    vec![f(f64::NAN); n]
}

pub fn check_potential(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let p = cfg.spec();
    let class_cfg = ClassCheckConfig::default();
    let v = check_class_v(&p, &class_cfg)?;
    let vstar = if v.in_v {
        Some(check_class_vstar(&p, &VstarConfig::default(), &class_cfg)?)
    } else {
        None
    };
    let weak = weak_type_check(&p, &weak_type_grid(), 1e-6);
    let mut out = Outcome::default();
    if let Some(r) = &vstar {
        let mut t = Table::new("vstar.csv", &["k", "lambda", "sup_deviation"]);
        for pt in &r.table.points {
            t.push(vec![pt.k.to_string(), f(pt.scale), f(pt.value)]);
        }
        out.tables.push(t);
    }
    let tri = |v: Verdict| match v {
        Verdict::Holds => json!(true),
        Verdict::Fails => json!(false),
        Verdict::Inconclusive => Value::Null,
    };
    let in_vstar = vstar.as_ref().map(|r| r.verdict);
    let conclusive = in_vstar != Some(Verdict::Inconclusive) && weak != Verdict::Inconclusive;
    out.finding(
        format!("class membership of the {} potential", p.name()),
        conclusive,
        json!({
            "potential": p.name(),
            "in_v": v.in_v,
            "in_vstar": in_vstar.map_or(Value::Null, tri),
            "r_bar": num(v.r_bar),
            "s_est": num(v.s_est),
            "t_est": num(v.t_est),
            "slope_limit": num(v.slope_limit),
            "slope_error": num(v.slope_error),
            "properties": {
                "divergence": v.divergence.as_str(),
                "convexity": v.convexity.as_str(),
                "ratio_decreasing": v.ratio_decreasing.as_str(),
                "slope": v.slope.as_str(),
            },
            "witness": v.witness.map_or(Value::Null, |(prop, x)| json!({"property": prop.label(), "x": num(x)})),
            "vstar_limit": vstar.as_ref().map_or(Value::Null, |r| num(r.limit)),
            "weak_type": tri(weak),
            "regularizable_by_smoothing": v.in_v && in_vstar == Some(Verdict::Holds),
        }),
    );
    Ok(out)
}

/// Sweep paths and the schedule exponent of each cell.
fn sweep_paths(cfg: &ExperimentConfig) -> (Vec<SweepPath>, Vec<i32>) {
    let ks = cfg.sweep.ks.clone().expect("resolved ks");
    let paths = match cfg.sweep.scheme.expect("resolved scheme") {
        SweepScheme::Decades => standard_paths(&ks),
        SweepScheme::BinaryL => vec![SweepPath {
            id: "l".into(),
            points: ks.iter().map(|&k| (0.0, 2f64.powi(-k))).collect(),
        }],
    };
    (paths, ks)
}

pub fn apsidal_sweep(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let (base, case, quad) = (cfg.spec(), cfg.case(), cfg.quad());
    let abscissa = cfg.sweep.abscissa.expect("resolved abscissa").into();
    let target = cfg.sweep.target.expect("resolved target");
    case_ball(&base, &case)?;
    let (paths, ks) = sweep_paths(cfg);
    let jobs: Vec<(usize, usize, f64, f64)> = paths
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.points.iter().enumerate().map(move |(k, &(e, l))| (i, k, e, l)))
        .collect();
    let mut cells: Vec<_> = jobs
        .par_iter()
        .map(|&(i, k, e, l)| sweep_cell(&base, &case, &paths[i].id, k, e, l, &quad))
        .collect();

    let mut table = Table::new(
        "apsidal.csv",
        &["path_id", "k", "epsilon", "l", "R_minus", "beta", "delta_theta", "quad_err", "I1", "I2"],
    );
    let mut out = Outcome::default();
    for c in &cells {
        let mut row = vec![c.path_id.clone(), ks[c.k].to_string(), f(c.epsilon), f(c.l)];
        match &c.outcome {
            Ok(r) => row.extend([r.r_minus, r.beta, r.delta_theta, r.quad_err, r.i1, r.i2].map(f)),
            Err(e) => {
                row.extend(nan_row(6));
                out.failures.push(format!("apsidal-sweep path {} k {}: {e}", c.path_id, ks[c.k]));
            }
        }
        table.push(row);
    }
    out.tables.push(table);

    let mut reports = Vec::new();
    for p in &paths {
        let n = p.points.len();
        let rest = cells.split_off(n);
        reports.push(PathReport::from_cells(&p.id, std::mem::replace(&mut cells, rest), abscissa, target));
    }
    let report = SweepReport::from_paths(reports, target);
    let strong = report
        .paths
        .iter()
        .fold(Verdict::Holds, |acc, p| acc.and(p.table.verdict_against(FRAC_PI_2)));
    let path_evidence: Vec<Value> = report
        .paths
        .iter()
        .map(|p| {
            let v = p.table.values();
            let (first, last) = (v.first().map(|x| (x - target).abs()), v.last().map(|x| (x - target).abs()));
            json!({
                "path_id": p.id,
                "limit": p.limit().map_or(Value::Null, num),
                "exponent": p.extrapolant.map_or(Value::Null, |e| num(e.exponent)),
                "first_error": first.map_or(Value::Null, num),
                "last_error": last.map_or(Value::Null, num),
                "error_ratio": first.zip(last).map_or(Value::Null, |(a, b)| num(a / b)),
                "verdict": Status::from(p.verdict),
            })
        })
        .collect();
    out.finding(
        format!("apsidal angle of {} tends to {} along every schedule", base.name(), target),
        report.verdict(),
        json!({
            "target": num(target),
            "uniformity": Status::from(report.uniformity),
            "strong_regularizability": Status::from(strong),
            "paths": path_evidence,
        }),
    );
    Ok(out)
}

pub fn pi_identity_run(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let xis = &cfg.pi_identity.xis;
    let quad = cfg.quad();
    let tol = cfg.pi_identity.tol;
    let mut table = Table::new("pi_identity.csv", &["xi", "value", "quad_err", "deviation"]);
    let mut worst = 0.0f64;
    let mut out = Outcome::default();
    for &xi in xis {
        match pi_identity(xi, &quad) {
            Ok(q) => {
                let d = (q.value - PI).abs();
                worst = worst.max(d);
                table.push(vec![f(xi), f(q.value), f(q.error), f(d)]);
            }
            Err(e) => {
                table.push(vec![f(xi), f(f64::NAN), f(f64::NAN), f(f64::NAN)]);
                out.failures.push(format!("pi-identity xi {xi}: {e}"));
            }
        }
    }
    out.tables.push(table);
    out.finding(
        "the singular quadrature identity equals pi for every xi > 1",
        worst <= tol,
        json!({"xis": nums(xis), "max_deviation": num(worst), "tol": num(tol)}),
    );
    Ok(out)
}

pub fn bounds_audit(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let a = &cfg.audit;
    let base = cfg.spec();
    let energy = cfg.case().energy();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut table = Table::new(
        "bounds_audit.csv",
        &["epsilon", "samples", "f_violations", "k_violations", "f_margin", "k_margin", "skipped"],
    );
    let mut ok = true;
    let mut rows = Vec::new();
    for &eps in &a.epsilons {
        let r = bound_audit(&base, eps, energy, a.r_max, (a.l_min, a.l_max), a.samples, a.tol, &mut rng)?;
        ok &= r.f_violations == 0 && r.k_violations == 0;
        table.push(vec![
            f(eps),
            r.samples.to_string(),
            r.f_violations.to_string(),
            r.k_violations.to_string(),
            f(r.f_margin),
            f(r.k_margin),
            r.skipped.to_string(),
        ]);
        rows.push(json!({
            "epsilon": num(eps),
            "f_violations": r.f_violations,
            "k_violations": r.k_violations,
            "f_margin": num(r.f_margin),
            "k_margin": num(r.k_margin),
            "skipped": r.skipped,
        }));
    }
    let mut out = Outcome::default();
    out.tables.push(table);
    out.finding(
        "F stays above r_bar and K below beta on seeded samples",
        ok,
        json!({"seed": cfg.seed, "tol": num(a.tol), "samples": a.samples, "audits": rows}),
    );
    Ok(out)
}

pub fn poincare_continuity(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let (base, case) = (cfg.spec(), cfg.case());
    let c = &cfg.continuity;
    let ccfg = cfg.continuity_config();
    let (t, t0, reference, theta) = continuity_reference(&case, &base, c.t_factor, &ccfg)?;
    let schedule = diagonal_schedule(&c.ks, c.dq_angle);
    let cells: Vec<ContinuityCell> = schedule
        .par_iter()
        .map(|cell| ContinuityCell {
            cell: *cell,
            outcome: continuity_cell(&case, &base, t, cell, &reference, &ccfg),
        })
        .collect();
    let report = assemble_continuity(t, t0, reference, theta, cells);

    let mut out = Outcome::default();
    let mut table = Table::new(
        "continuity.csv",
        &["k", "epsilon", "l", "dq", "dv1", "dist_total", "dist_pos", "dist_vel", "theta_increment"],
    );
    let mut exited = Vec::new();
    for cell in &report.cells {
        let s = &cell.cell;
        let dq = s.perturbation.dq[0].hypot(s.perturbation.dq[1]);
        let mut row = vec![s.k.to_string(), f(s.epsilon), f(s.perturbation.l), f(dq), f(s.perturbation.dv1)];
        match &cell.outcome {
            CellOutcome::Measured(d) => row.extend([d.total, d.position, d.velocity, d.theta_increment].map(f)),
            CellOutcome::ExitedBall(te) => {
                row.extend(nan_row(4));
                exited.push(json!({"k": s.k, "exit_time": num(*te)}));
            }
            CellOutcome::Failed(e) => {
                row.extend(nan_row(4));
                out.failures.push(format!("poincare-continuity k {}: {e}", s.k));
            }
        }
        table.push(row);
    }
    out.tables.push(table);
    let d = report.distance.values();
    out.finding(
        "the extended flow at time T is continuous in (epsilon, initial data)",
        report.distance_verdict(),
        json!({
            "t": num(t),
            "t0": num(t0),
            "reference": {"q": nums(&reference.q), "p": nums(&reference.p), "speed": num(reference.speed())},
            "distances": nums(&d),
            "first_over_last": if d.len() >= 2 { num(d[0] / d[d.len() - 1]) } else { Value::Null },
            "exited_cells": exited,
            "d_over_s": report.differentiability_probe().iter().map(|&(s, r)| json!([num(s), num(r)])).collect::<Vec<_>>(),
        }),
    );
    let ext = report.angle_extrapolant();
    out.finding(
        "the angular increment converges to the transmission angle",
        report.angle_verdict(c.angle_tol),
        json!({
            "reference_theta": num(theta),
            "increments": nums(&report.angle.values()),
            "extrapolated": ext.map_or(Value::Null, |e| num(e.limit)),
            "tol": num(c.angle_tol),
        }),
    );
    Ok(out)
}

pub fn poincare_section(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let (base, case) = (cfg.spec(), cfg.case());
    let s = &cfg.section;
    let ccfg = cfg.continuity_config();
    let (t, y_bar, section) = section_setup(&case, &base, s.t_factor, &ccfg)?;
    let mut out = Outcome::default();
    let mut spreads = Vec::new();
    let mut all_crossed = true;
    for (i, &delta) in s.deltas.iter().enumerate() {
        // same normalized offsets at every radius
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let draws = section_samples(&y_bar, delta, s.samples, &mut rng);
        let crossings: Vec<_> = draws
            .par_iter()
            .map(|&(y, eps, _)| section_sample(&base, y, eps, &section, t, case.r_bar(), &ccfg.sim, &ccfg.quad))
            .collect();
        let mut table = Table::new(
            format!("poincare_section_{i}.csv"),
            &["sample_id", "y_qx", "y_qy", "y_px", "y_py", "tau", "s_qx", "s_qy", "s_px", "s_py", "bracket_xi"],
        );
        let (mut dt, mut dy) = (0.0f64, 0.0f64);
        for (id, ((y, _, _), c)) in draws.iter().zip(&crossings).enumerate() {
            let mut row = vec![id.to_string()];
            row.extend(y.to_array().map(f));
            match c {
                Ok(c) => {
                    row.push(f(c.tau));
                    row.extend(c.trace.to_array().map(f));
                    row.push(f(c.bracket_xi));
                    dt = dt.max((c.tau - t).abs());
                    dy = dy.max(c.trace.distance(&section.anchor));
                }
                Err(e) => {
                    row.extend(nan_row(6));
                    all_crossed = false;
                    out.failures.push(format!("poincare-section delta {delta} sample {id}: {e}"));
                }
            }
            table.push(row);
        }
        out.tables.push(table);
        spreads.push((delta, dt, dy));
    }
    let shrinking = spreads.windows(2).all(|w| w[1].1 < w[0].1 && w[1].2 < w[0].2);
    out.finding(
        "nearby orbits cross the section with hitting time and trace converging to the reference",
        all_crossed && shrinking,
        json!({
            "t": num(t),
            "seed": cfg.seed,
            "samples": s.samples,
            "anchor": nums(&section.anchor.to_array()),
            "transversality": num(section.transversality(&SmoothedPotential::singular(base.clone()))),
            "all_crossed": all_crossed,
            "spreads": spreads.iter().map(|&(d, a, b)| json!({"delta": num(d), "max_tau_dev": num(a), "max_trace_dev": num(b)})).collect::<Vec<_>>(),
        }),
    );
    Ok(out)
}

fn transmission_path(cfg: &ExperimentConfig) -> anyhow::Result<(PhaseState, TransmissionPath)> {
    let (base, case) = (cfg.spec(), cfg.case());
    let (y_bar, _) = collision_datum(&case, &base)?;
    let v0 = SmoothedPotential::singular(base);
    let traj = integrate(y_bar, &v0, 1e6, case.r_bar(), &cfg.sim())?;
    Ok((y_bar, transmission_extend(traj, &cfg.quad())?))
}

pub fn transmission_demo(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let (y_bar, path) = transmission_path(cfg)?;
    let v0 = SmoothedPotential::singular(cfg.spec());
    let n = cfg.transmission.samples;
    let t_end = path.t_end();
    let e0 = y_bar.energy(&v0);
    let mut table = Table::new("trajectory.csv", &["t", "x", "y", "vx", "vy", "r", "theta", "E", "l"]);
    let mut drift = 0.0f64;
    for i in 0..n {
        let t = t_end * i as f64 / (n - 1) as f64;
        let Ok(s) = path.state_at(t) else { continue };
        let e = s.energy(&v0);
        drift = drift.max((e - e0).abs());
        table.push([t, s.q[0], s.q[1], s.p[0], s.p[1], s.r(), s.theta(), e, s.angular_momentum()].map(f).to_vec());
    }
    let mut events = Table::new("events.csv", &["t", "kind"]);
    let mut evs: Vec<(f64, &'static str)> = path
        .pre
        .events
        .iter()
        .chain(&path.post.events)
        .filter(|e| e.kind != EventKind::Collision)
        .map(|e| (e.t, e.kind.as_str()))
        .collect();
    evs.push((path.t0, EventKind::Collision.as_str()));
    evs.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (t, k) in evs {
        events.push(vec![f(t), k.into()]);
    }

    let end = path.state_at(t_end)?;
    let mirror = PhaseState::new([-y_bar.q[0], -y_bar.q[1]], y_bar.p);
    let angle = path.angle_increment(t_end)?;
    let budget = cfg.tolerances.drift;
    let mut out = Outcome::default();
    out.tables.extend([table, events]);
    out.finding(
        "the transmission extension ends at the point reflection of the collision datum",
        end.distance(&mirror) <= budget,
        json!({"t0": num(path.t0), "t_end": num(t_end), "end": nums(&end.to_array()), "distance": num(end.distance(&mirror))}),
    );
    out.finding(
        "energy is conserved across the transmission",
        drift <= budget,
        json!({"energy": num(e0), "max_drift": num(drift), "budget": num(budget)}),
    );
    out.finding(
        "the transmission sweeps an angle of pi",
        (angle - PI).abs() <= 1e-12,
        json!({"theta_increment": num(angle)}),
    );
    Ok(out)
}

pub fn variational_probe(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let (_, path) = transmission_path(cfg)?;
    let v = &cfg.variational;
    let (t, cells) = (path.t0, 1usize << v.cells_log2);
    let t1 = v.t1_factor * t;
    let results: Vec<_> = v
        .deltas
        .par_iter()
        .map(|&delta| delta_action(&path, t, cells, delta, t1))
        .collect();
    let mut table = Table::new(
        "variational.csv",
        &["delta", "T1", "dK_closed", "dK_discrete", "dV", "dA", "collision_cell_depth"],
    );
    let mut rows = Vec::new();
    for (r, &delta) in results.into_iter().zip(&v.deltas) {
        let r = r.with_context(|| format!("variational-probe delta {delta}"))?;
        table.push(vec![
            f(r.delta),
            f(r.t1),
            f(r.dk_closed),
            f(r.dk_discrete),
            f(r.dv),
            f(r.da),
            r.collision_cell_depth.to_string(),
        ]);
        rows.push(r);
    }
    let positive = rows.iter().all(|r| r.da > 0.0);
    let dk_err = rows.iter().map(|r| (r.dk_discrete - r.dk_closed).abs()).fold(0.0, f64::max);
    let ratios: Vec<f64> = rows.iter().map(|r| r.dv / (r.delta * r.delta)).collect();
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let mut out = Outcome::default();
    out.tables.push(table);
    out.finding(
        "the transmission path is not a local minimizer of the action",
        positive,
        json!({"t": num(t), "t1": num(t1), "cells": cells, "da": rows.iter().map(|r| num(r.da)).collect::<Vec<_>>()}),
    );
    out.finding(
        "the discrete kinetic difference matches -delta^2/(T - T1)",
        dk_err <= v.dk_tol,
        json!({"max_error": num(dk_err), "tol": num(v.dk_tol)}),
    );
    out.finding(
        "dV/delta^2 increases strictly as delta decreases",
        increasing,
        json!({"ratios": nums(&ratios), "lower_bounds": rows.iter().map(|r| num(r.dv_lower_bound)).collect::<Vec<_>>()}),
    );
    Ok(out)
}

/// Random bounded logarithmic orbit started at its apocentre, smoothed with
/// probability one half.
pub fn random_bounded_orbit<R: Rng>(rng: &mut R) -> (SmoothedPotential, RadialProblem, PhaseState) {
    let log = PotentialSpec::Logarithmic;
    loop {
        let eps = if rng.gen_bool(0.5) { 0.0 } else { 0.1 * rng.gen::<f64>() };
        let e = -1.0 + 1.5 * rng.gen::<f64>();
        let Ok(probe) = RadialProblem::new(log.clone(), eps, e, 0.0) else { continue };
        let Ok(a) = probe.apsides(f64::INFINITY) else { continue };
        let l = (0.2 + 0.7 * rng.gen::<f64>()) * a.f_max.sqrt();
        let Ok(rp) = RadialProblem::new(log.clone(), eps, e, l) else { continue };
        let Ok(aps) = rp.apsides(f64::INFINITY) else { continue };
        if aps.circular || !aps.r_plus.is_finite() {
            continue;
        }
        let nu = PhaseState::new([aps.r_plus, 0.0], [0.0, l / aps.r_plus]);
        let v = SmoothedPotential::new(log.clone(), eps).expect("valid smoothing");
        return (v, rp, nu);
    }
}

pub fn oracle_crosscheck(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let x = &cfg.crosscheck;
    let (quad, sim) = (cfg.quad(), cfg.sim());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Outcome::default();

    let kepler = PotentialSpec::Homogeneous { alpha: 1.0 };
    let mut ktable = Table::new("kepler.csv", &["case", "E", "l", "delta_theta", "deviation"]);
    let mut kworst = 0.0f64;
    for i in 0..x.kepler_cases {
        let e = -0.9 + 0.85 * rng.gen::<f64>();
        let l = (0.05 + 0.9 * rng.gen::<f64>()) * (-0.5 / e).sqrt();
        let rp = RadialProblem::new(kepler.clone(), 0.0, e, l)?;
        let r = apsidal_angle(&rp, f64::INFINITY, &quad).with_context(|| format!("kepler case {i}"))?;
        let d = (r.delta_theta - PI).abs();
        kworst = kworst.max(d);
        ktable.push(vec![i.to_string(), f(e), f(l), f(r.delta_theta), f(d)]);
    }
    out.tables.push(ktable);
    out.finding(
        "Kepler apsidal angles equal pi",
        kworst <= x.kepler_tol,
        json!({"cases": x.kepler_cases, "max_deviation": num(kworst), "tol": num(x.kepler_tol)}),
    );

    let orbits: Vec<_> = (0..x.orbits).map(|_| random_bounded_orbit(&mut rng)).collect();
    let results: Vec<anyhow::Result<[f64; 9]>> = orbits
        .par_iter()
        .map(|(v, rp, nu)| {
            let aps = rp.apsides(f64::INFINITY)?;
            let half = time_of_flight(rp, aps.r_minus, aps.r_plus, &quad)?.value;
            let traj = integrate(*nu, v, x.horizon.max(5.0 * half), f64::INFINITY, &sim)?;
            let (de, dl) = traj.conserved_drift();
            let peri: Vec<f64> = traj.events_of(EventKind::Pericentre).map(|e| e.t).collect();
            if peri.len() < 2 {
                anyhow::bail!("fewer than two pericentres within the horizon");
            }
            let period_dev = peri.windows(2).map(|w| (w[1] - w[0] - 2.0 * half).abs()).fold(0.0, f64::max);
            let dtheta = apsidal_angle_with(rp, &aps, &quad)?.delta_theta;
            let angle_dev = (traj.angle_increment(peri[0])? - dtheta).abs();
            Ok([rp.potential.epsilon, rp.energy, rp.l, de, dl, 2.0 * half, period_dev, dtheta, angle_dev])
        })
        .collect();
    let mut otable = Table::new(
        "orbits.csv",
        &["orbit", "epsilon", "E", "l", "energy_drift", "l_drift", "period", "period_dev", "delta_theta", "angle_dev"],
    );
    let (mut drift, mut pdev, mut adev) = (0.0f64, 0.0f64, 0.0f64);
    for (i, r) in results.into_iter().enumerate() {
        let r = r.with_context(|| format!("oracle-crosscheck orbit {i}"))?;
        drift = drift.max(r[3]).max(r[4]);
        pdev = pdev.max(r[6]);
        adev = adev.max(r[8]);
        let mut row = vec![i.to_string()];
        row.extend(r.map(f));
        otable.push(row);
    }
    out.tables.push(otable);
    out.finding(
        "energy and angular momentum are conserved by the integrator",
        drift < cfg.tolerances.drift,
        json!({"orbits": x.orbits, "horizon": num(x.horizon), "max_drift": num(drift), "budget": num(cfg.tolerances.drift), "ode_tol": num(cfg.tolerances.ode)}),
    );
    out.finding(
        "pericentre periods and swept angles match the radial quadratures",
        pdev <= x.period_tol && adev <= x.period_tol,
        json!({"max_period_dev": num(pdev), "max_angle_dev": num(adev), "tol": num(x.period_tol)}),
    );
    Ok(out)
}
