//! Subcommand bodies. Each returns a report and, where the command has a
//! natural table, its CSV rendering.

use heiscr_core::ode::OdeOptions;
use heiscr_core::quotients::{homology, invariance_residual, projected_lattice, relation_matrix, LatticeSpec};
use heiscr_core::sampling::ball_points;
use heiscr_core::sasaki_cone::{
    calibrate_constants, engine_scalar, moment_map, positivity, reduce, reeb_flow_closed,
    reeb_flow_numeric, reeb_pairing, scalar_closed_form, ConeElement,
};
use heiscr_core::subriemannian::{
    bracket_rank, convergence_table, dist_graph, homogeneity_check, DistanceMode, ShootingOptions,
};
use heiscr_core::{Error, Result as CoreResult};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::report::{Provenance::*, Record, Report};
use crate::suites::{guard, run_all, SUITES};
use crate::CliError;

pub struct Outcome {
    pub report: Report,
    pub csv: String,
}

fn records_csv(r: &Report) -> String {
    let mut s = String::from("id,residual,tolerance,pass\n");
    for rec in &r.records {
        s.push_str(&format!("{},{:e},{:e},{}\n", rec.id, rec.residual, rec.tolerance, rec.pass));
    }
    s
}

fn with_records_csv(report: Report) -> Outcome {
    let csv = records_csv(&report);
    Outcome { report, csv }
}

/// Validation failures from the core become usage errors (exit 2).
fn validated<T>(r: CoreResult<T>) -> Result<T, CliError> {
    r.map_err(|e| match e {
        Error::InvalidParameter(m) | Error::OutOfDomain(m) => CliError::Usage(m),
        Error::DimensionMismatch { .. } => CliError::Usage(e.to_string()),
        e => CliError::Core(e),
    })
}

pub fn verify(cfg: &RunConfig) -> Outcome {
    let records = run_all(cfg);
    let suites: Vec<Value> = SUITES
        .iter()
        .map(|(name, _)| {
            let prefix = format!("{}.", name);
            let mine: Vec<&Record> = records.iter().filter(|r| r.id.starts_with(&prefix)).collect();
            json!({ "name": name, "total": mine.len() })
        })
        .collect();
    with_records_csv(Report::new("verify", cfg, records, json!({ "suites": suites })))
}

fn coord_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = (1..=n).map(|i| format!("x{}", i)).collect();
    h.extend((1..=n).map(|i| format!("y{}", i)));
    h.push("z".into());
    h
}

pub fn curvature(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.n;
    let nf = n as f64;
    let a = cfg.cone();
    let pts = ball_points(n, cfg.samples, 2.0, cfg.seed);
    let fit = ball_points(n, cfg.samples.max(2 * n + 4), 2.0, cfg.seed.wrapping_add(1000));
    let cal = validated(calibrate_constants(&a, n, &fit))?;

    let rows: Vec<(Vec<f64>, f64, f64, Vec<f64>)> = pts
        .par_iter()
        .map(|p| {
            Ok((
                p.clone(),
                engine_scalar(&a, p)?,
                scalar_closed_form(&cal, p)?,
                moment_map(&a, p)?.h,
            ))
        })
        .collect::<CoreResult<_>>()
        .map_err(CliError::Core)?;

    let prov = if a.is_zero() { Literature } else { Computed };
    let mut records: Vec<Record> = rows
        .iter()
        .enumerate()
        .map(|(i, (p, s, c, _))| {
            let inp = json!({ "point": p, "a": a.a() });
            if a.is_zero() {
                Record::close(&format!("row{}.scalar", i), inp, -2.0 * nf, *s, 1e-8, prov)
            } else {
                Record::close(&format!("row{}.closed_form", i), inp, *s, *c, 1e-6, prov)
            }
        })
        .collect();
    let inp = json!({ "n": n, "a": a.a(), "fit_samples": fit.len() });
    records.push(Record::small("affine_residual", inp.clone(), cal.residual, 1e-8, Computed));

    let reference_c0 = 2.0 * nf * (4.0 * a.norm1() - 1.0);
    let reference_c: Vec<f64> = a.a().iter().map(|ai| -nf * (2.0 * nf + 7.0) * ai * ai).collect();
    let mut calibrated = vec![cal.c0];
    calibrated.extend(&cal.c);
    let mut reference = vec![reference_c0];
    reference.extend(&reference_c);
    let deviation = calibrated.iter().zip(&reference).any(|(x, y)| (x - y).abs() > 1e-6);

    if n == 1 && a.a() == [1.0] {
        let expected = [2.0, -4.0];
        let res = calibrated.iter().zip(&expected).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        let mut rec = Record::small("affine_coefficients", inp.clone(), res, 1e-6, Computed);
        rec.expected = json!(expected);
        rec.observed = json!(calibrated);
        records.push(rec);
    }

    let table: Vec<Value> = rows
        .iter()
        .map(|(p, s, c, h)| json!({ "point": p, "s_engine": s, "s_closed_form": c, "h": h, "residual": (s - c).abs() }))
        .collect();
    let data = json!({
        "rows": table,
        "calibrated": { "c0": cal.c0, "c": cal.c, "fit_residual": cal.residual },
        "reference": { "c0": reference_c0, "c": reference_c },
        "deviation_from_reference": deviation,
    });

    let mut header = coord_header(n);
    header.push("s_engine".into());
    header.push("s_closed_form".into());
    header.extend((1..=n).map(|i| format!("h{}", i)));
    header.push("residual".into());
    let mut csv = header.join(",");
    csv.push('\n');
    for (p, s, c, h) in &rows {
        let mut cells: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        cells.push(s.to_string());
        cells.push(c.to_string());
        cells.extend(h.iter().map(|v| v.to_string()));
        cells.push((s - c).abs().to_string());
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    Ok(Outcome {
        report: Report::new("curvature", cfg, records, data),
        csv,
    })
}

pub fn ccdist(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.n;
    let d = 2 * n + 1;
    let dom = cfg.domain();
    validated(dom.check(&cfg.p))?;
    validated(dom.check(&cfg.q))?;
    let (p, q) = (&cfg.p, &cfg.q);
    if p == q {
        return Err(CliError::Usage("p and q coincide".into()));
    }
    let opts = ShootingOptions { seed: cfg.seed, ..Default::default() };
    let table = validated(convergence_table(p, q, &cfg.l_schedule, &opts, 1e-6))?;
    let inp = json!({ "p": p, "q": q, "schedule": cfg.l_schedule });
    let mut records = vec![
        Record::exact("monotone_in_L", inp.clone(), true, table.monotone, Literature),
        Record::exact("below_cc", inp.clone(), true, table.bounded, Literature),
    ];
    let last = table.rows.last().expect("non-empty schedule");
    records.push(Record::small("final_gap", inp.clone(), last.gap / table.d_cc, 0.05, Computed));

    let res = if n == 1 { cfg.resolution } else { 8 };
    let graph = dist_graph(p, q, res, DistanceMode::Cc, &dom);
    let graph_json = match &graph {
        Ok(g) => {
            let inp = json!({ "p": p, "q": q, "resolution": res });
            if n == 1 {
                records.push(Record::relative("graph_vs_shooting", inp, table.d_cc, g.value, 0.05, Computed));
            }
            json!(g)
        }
        Err(e) => {
            records.push(Record::error("graph", json!({ "resolution": res }), e.to_string(), Computed));
            Value::Null
        }
    };

    let mut homog = vec![];
    for lambda in [2.0, 3.0] {
        let id = format!("homogeneity.lambda={}", lambda);
        let inp = json!({ "p": p, "q": q, "lambda": lambda });
        records.push(guard(&id, inp.clone(), || {
            let h = homogeneity_check(lambda, p, q, &opts)?;
            homog.push(json!(h));
            Ok(Record::relative(&id, inp.clone(), lambda, h.ratio, 0.05, Literature))
        }));
    }
    let ranks = [bracket_rank(n, p), bracket_rank(n, q)]
        .into_iter()
        .collect::<CoreResult<Vec<_>>>()
        .map_err(CliError::Core)?;
    records.push(Record::exact("bracket_rank", json!({ "points": [p, q] }), d, *ranks.iter().min().unwrap(), Literature));

    let data = json!({
        "d_cc": table.d_cc,
        "rows": table.rows,
        "graph": graph_json,
        "homogeneity": homog,
        "bracket_rank": ranks,
    });
    Ok(Outcome {
        csv: table.to_csv(),
        report: Report::new("ccdist", cfg, records, data),
    })
}

pub fn quotient(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.n;
    let spec: &LatticeSpec = &cfg.lattice;
    let a = cfg.cone();
    let pts = ball_points(n, cfg.samples, 1.5, cfg.seed);
    let inp = json!({ "lattice": spec.to_string(), "a": a.a(), "samples": pts.len() });
    let residual = validated(invariance_residual(&a, spec, &pts))?;
    let descends = residual <= 1e-10;
    let mut records = vec![if a.is_zero() {
        Record::small("descends", inp.clone(), residual, 1e-10, Literature)
    } else {
        Record::at_least("does_not_descend", inp.clone(), 1e-3, residual, Literature)
    }];
    let h = validated(homology(spec))?;
    let t = spec.expected_torsion();
    let want = if t > 1 { vec![t] } else { vec![] };
    let prov = if matches!(spec, LatticeSpec::Uniform { .. }) { Literature } else { Computed };
    records.push(Record::exact("homology", json!({ "lattice": spec.to_string() }), (2 * n, want), (h.free_rank, h.torsion.clone()), prov));
    let proj = validated(projected_lattice(spec))?;
    let rel = validated(relation_matrix(spec))?;
    let data = json!({
        "invariance_residual": residual,
        "descends": descends,
        "homology": h.to_string(),
        "free_rank": h.free_rank,
        "torsion": h.torsion,
        "relation_matrix": rel,
        "lambda_basis": proj.basis,
        "covolume": proj.covolume,
    });
    Ok(with_records_csv(Report::new("quotient", cfg, records, data)))
}

pub fn flow(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.n;
    let a = cfg.cone();
    let starts = ball_points(n, cfg.samples, 1.5, cfg.seed);
    let steps = (cfg.t_max * 4.0).ceil() as usize;
    let ts: Vec<f64> = (1..=steps).map(|k| (k as f64 * 0.25).min(cfg.t_max)).collect();
    let per_start: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|p| {
            let num = reeb_flow_numeric(&a, p, &ts, OdeOptions::default())?;
            ts.iter()
                .zip(&num)
                .map(|(t, q)| {
                    let c = reeb_flow_closed(&a, p, *t)?;
                    Ok(q.iter().zip(&c).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())))
                })
                .collect()
        })
        .collect::<CoreResult<_>>()
        .map_err(CliError::Core)?;
    let curve: Vec<f64> = (0..ts.len())
        .map(|k| per_start.iter().fold(0.0f64, |m, e| m.max(e[k])))
        .collect();
    let worst = curve.iter().cloned().fold(0.0, f64::max);
    let inp = json!({ "a": a.a(), "t_max": cfg.t_max, "starts": starts.len() });
    let mut records = vec![Record::small("max_deviation", inp.clone(), worst, 1e-6, Computed)];

    let drift = starts
        .iter()
        .map(|p| {
            let h0 = moment_map(&a, p)?.h;
            let q = reeb_flow_closed(&a, p, cfg.t_max)?;
            let h1 = moment_map(&a, &q)?.h;
            Ok(h0.iter().zip(&h1).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())))
        })
        .collect::<CoreResult<Vec<f64>>>()
        .map_err(CliError::Core)?
        .into_iter()
        .fold(0.0, f64::max);
    records.push(Record::small("moment_map_conserved", inp, drift, 1e-10, Identity));

    let mut csv = String::from("t,error\n");
    for (t, e) in ts.iter().zip(&curve) {
        csv.push_str(&format!("{},{:e}\n", t, e));
    }
    let data = json!({ "t": ts, "error": curve });
    Ok(Outcome {
        report: Report::new("flow", cfg, records, data),
        csv,
    })
}

pub fn cone(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.n;
    let d = 2 * n + 1;
    if !cfg.a0.is_finite() {
        return Err(CliError::Usage("a0 must be finite".into()));
    }
    let e = ConeElement { a0: cfg.a0, b: cfg.b.clone() };
    let v = validated(positivity(&e, n))?;
    let inp = json!({ "a0": e.a0, "b": e.b });
    let mut records = vec![];
    let mut reduced = Value::Null;
    if v.positive {
        let pts = ball_points(n, cfg.samples, 10.0, cfg.seed);
        let min_pair = pts.iter().map(|p| reeb_pairing(&e, p)).fold(f64::INFINITY, f64::min);
        records.push(Record::at_least("pairing_positive", inp.clone(), f64::MIN_POSITIVE, min_pair, Identity));
        let r = validated(reduce(&e))?;
        let again = validated(reduce(&ConeElement { a0: 1.0, b: r.a().to_vec() }))?;
        records.push(Record::exact("reduction_idempotent", inp.clone(), r.a().to_vec(), again.a().to_vec(), Identity));
        reduced = json!(r.a());
    } else {
        let mut q = vec![0.0; d];
        if let (Some(r), Some(i)) = (v.witness_radius, v.witness_block) {
            q[i] = r;
        }
        let pair = reeb_pairing(&e, &q);
        let mut rec = Record::small("witness_pairing", inp.clone(), pair.max(0.0), 1e-12, Identity);
        rec.observed = json!({ "pairing": pair, "point": q });
        records.push(rec);
    }
    let data = json!({
        "verdict": if v.positive { "positive" } else { "not positive" },
        "positive": v.positive,
        "witness_radius": v.witness_radius,
        "witness_block": v.witness_block,
        "reduced": reduced,
    });
    Ok(with_records_csv(Report::new("cone", cfg, records, data)))
}
