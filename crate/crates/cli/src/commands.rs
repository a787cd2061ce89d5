use std::path::Path;

use kakeya_core::curves::{
    family_from_json, hairbrush_claim_check, locus_dichotomy_test, locus_point, sample_claim_reports,
    tubes_from_json, ClaimReport, CurveFamily, TripleConfig,
};
use kakeya_core::numeric::{format_rational, matrix_from_json, matrix_to_json, vector_from_json};
use kakeya_core::raster::{
    box_dimension, build_worstcase_kakeya, hairbrush_decompose, nilpotent_blocks_matrix, rasterize,
    surface_residual, DimensionFit, TubeFamilySpec,
};
use kakeya_core::slices::{
    companion_blocks, dimension_lower_bound, epsilon_fixed_point, genfail_exponents, iterate_epsilon,
    no_solution_json, solve_kakeya_four_slice, solve_nikodym_three_slice, w_matrix, SolutionKind,
};
use kakeya_core::sumset::{
    check_ratio, count_trapezia, difference_set, gen_line_counterexample, gen_secular_counterexample,
    instance_from_json, instance_to_json, random_instance, x_sumset, Instance,
};
use kakeya_core::{parse_rational, rat, Error, Matrix, PolyMatrix, Rational, Scalar};
use serde_json::{json, Value};

use crate::output::{emit_csv, emit_json, fmt_f64, Csv};
use crate::{CliError, Command};

type CliResult = Result<(), CliError>;

/// Reads JSON from an inline literal (starting with `{` or `[`) or a file.
fn load_json(arg: &str) -> Result<Value, CliError> {
    let t = arg.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Core(Error::Parse(format!("{arg}: {e}"))))
}

/// Accepts a matrix JSON, a family JSON with "C", or a bare array of rows.
fn load_matrix(arg: &str) -> Result<Matrix<Rational>, CliError> {
    let v = load_json(arg)?;
    let m = if v.get("C").is_some() {
        family_from_json(&v)?.c
    } else if let Value::Array(rows) = &v {
        Matrix::from_rows(rows.iter().map(vector_from_json).collect::<kakeya_core::Result<_>>()?)?
    } else {
        matrix_from_json(&v)?
    };
    Ok(m)
}

fn parse_rationals(v: &[String]) -> Result<Vec<Rational>, CliError> {
    Ok(v.iter().map(|s| parse_rational(s)).collect::<kakeya_core::Result<_>>()?)
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn fit_csv(fit: &DimensionFit) -> Csv {
    let mut csv = Csv::new(&["k", "delta", "cells", "volume"]);
    for &(k, cells, vol) in &fit.rows {
        csv.push(vec![k.to_string(), fmt_f64(2f64.powi(-(k as i32))), cells.to_string(), fmt_f64(vol)]);
    }
    csv
}

pub fn dispatch(cmd: Command, args: &[String]) -> CliResult {
    let config = json!({ "args": args });
    match cmd {
        Command::Dimension { matrix, tubes, ks, common } => {
            let c = load_matrix(&matrix)?;
            let fit = match tubes {
                Some(t) => {
                    let tubes = tubes_from_json(&load_json(&t)?)?;
                    let spec = TubeFamilySpec::from_tubes(CurveFamily::new(c).to_f64(), &tubes, (-1.0, 1.0))?;
                    box_dimension(|k| rasterize(&spec, k), &ks)?
                }
                None => box_dimension(|k| rasterize(&build_worstcase_kakeya(&c, k)?, k), &ks)?,
            };
            let summary = json!({ "slope": fit.slope, "fit_residual": fit.fit_residual });
            emit_csv(common.out.as_deref(), "dimension", &config, &fit_csv(&fit), &summary)?;
            Ok(())
        }
        Command::Worstcase { n, blocks, matrix, ks, common } => {
            if n < 2 {
                return Err(usage("--n must be at least 2"));
            }
            let c = match matrix {
                Some(m) => load_matrix(&m)?,
                None if n == 3 => Matrix::from_rows(vec![vec![rat(0, 1), rat(0, 1)], vec![rat(1, 1), rat(0, 1)]])?,
                None => nilpotent_blocks_matrix(n - 1, blocks)?,
            };
            if c.dim() + 1 != n {
                return Err(usage(format!("matrix of dim {} does not match --n {n}", c.dim())));
            }
            let fit = box_dimension(|k| rasterize(&build_worstcase_kakeya(&c, k)?, k), &ks)?;
            let coarse = build_worstcase_kakeya(&c, ks[0])?;
            let surface = if n == 3 { Some(surface_residual(&coarse.sample_points(17))?) } else { None };
            let summary = json!({
                "slope": fit.slope,
                "fit_residual": fit.fit_residual,
                "permutation": coarse.permutation,
                "t_range": [coarse.t_range.0, coarse.t_range.1],
                "surface_residual": surface,
                "matrix": matrix_to_json(&c),
            });
            emit_csv(common.out.as_deref(), "worstcase", &config, &fit_csv(&fit), &summary)?;
            Ok(())
        }
        Command::Sumset { instance, random, matrix, eps, mode, dim, size, side, rho, common } => {
            let instances: Vec<Instance> = match (instance, random) {
                (Some(p), None) => vec![instance_from_json(&load_json(&p)?)?],
                (None, Some(count)) => {
                    (0..count as u64).map(|i| random_instance(dim, size, size, side, rho, common.seed.wrapping_add(i))).collect()
                }
                _ => return Err(usage("give exactly one of --instance or --random")),
            };
            let d = instances[0].dim();
            let mut xs: Vec<Matrix<Rational>> = matrix.iter().map(|m| load_matrix(m)).collect::<Result<_, _>>()?;
            if xs.is_empty() {
                xs.push(Matrix::identity(d));
            }
            match mode.as_str() {
                "ratio" => sumset_ratio(&instances, &xs, &parse_rational(&eps)?, &common.out, &config),
                "trapezia" => {
                    let x = xs[0].clone();
                    let y = match xs.get(1) {
                        Some(y) => y.clone(),
                        None => x.try_add(&Matrix::identity(x.dim()))?,
                    };
                    sumset_trapezia(&instances, &x, &y, &common.out, &config)
                }
                other => Err(usage(format!("unknown --mode {other} (ratio | trapezia)"))),
            }
        }
        Command::Counterexample { mode, matrix, count, v, w, fracs, common } => match mode.as_str() {
            "line" => {
                let x = match matrix {
                    Some(m) => load_matrix(&m)?,
                    None => Matrix::from_rows(vec![vec![rat(0, 1), rat(1, 1)], vec![rat(0, 1), rat(0, 1)]])?,
                };
                let mut csv = Csv::new(&["M", "difference_size", "expected_difference", "sumset_size", "expected_sumset"]);
                let mut all = true;
                for m in 2..=count.max(2) {
                    let inst = gen_line_counterexample(&x, m)?;
                    let dsz = difference_set(&inst)?.len();
                    let ssz = x_sumset(&inst, &x)?.set.len();
                    all &= dsz == m * m && ssz == 2 * m - 1;
                    csv.push(vec![m.to_string(), dsz.to_string(), (m * m).to_string(), ssz.to_string(), (2 * m - 1).to_string()]);
                }
                emit_csv(common.out.as_deref(), "counterexample", &config, &csv, &json!({ "all_match": all }))?;
                if all { Ok(()) } else { Err(CliError::Negative("cardinalities differ from the prediction".into())) }
            }
            "secular" => {
                let fr = fracs
                    .iter()
                    .map(|s| {
                        let bad = || usage(format!("--fracs entry {s:?} is not p/q"));
                        let (p, q) = s.split_once('/').unwrap_or((s, "1"));
                        Ok((p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                let sec = gen_secular_counterexample(&v, &w, &fr, count)?;
                let mut csv = Csv::new(&["j", "fraction", "sumset_size", "predicted"]);
                let mut all = true;
                for (j, (x, pred)) in sec.xs.iter().zip(&sec.predicted).enumerate() {
                    let s = x_sumset(&sec.instance, x)?.set.len() as u64;
                    all &= s == *pred;
                    csv.push(vec![j.to_string(), format!("{}/{}", fr[j].0, fr[j].1), s.to_string(), pred.to_string()]);
                }
                let dsz = difference_set(&sec.instance)?.len();
                let summary = json!({ "all_match": all, "difference_size": dsz, "instance": instance_to_json(&sec.instance) });
                emit_csv(common.out.as_deref(), "counterexample", &config, &csv, &summary)?;
                if all { Ok(()) } else { Err(CliError::Negative("cardinalities differ from the prediction".into())) }
            }
            other => Err(usage(format!("unknown --mode {other} (line | secular)"))),
        },
        Command::SolveHeights { matrix, mode, common } => {
            let c = load_matrix(&matrix)?;
            let (kind, res) = match mode.as_str() {
                "nikodym3" => (SolutionKind::Nikodym3, solve_nikodym_three_slice(&c)),
                "kakeya4" => (SolutionKind::Kakeya4, solve_kakeya_four_slice(&c)),
                other => return Err(usage(format!("unknown --mode {other} (nikodym3 | kakeya4)"))),
            };
            match res {
                Ok(sol) => Ok(emit_json(common.out.as_deref(), &sol.to_json())?),
                Err(Error::NoSolution(reason)) => {
                    emit_json(common.out.as_deref(), &no_solution_json(kind, &reason))?;
                    Err(CliError::Core(Error::NoSolution(reason)))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Exponents { n, k, tr_adj_zero, det_zero, matrix, common } => {
            let g = genfail_exponents(n, k, tr_adj_zero, det_zero)?;
            let mut out = json!({
                "n": n,
                "k": k,
                "p_max": format_rational(&g.p_max),
                "p_max_f64": g.p_max_f64(),
                "s_max": format_rational(&g.s_max),
                "s_max_f64": g.s_max.as_f64(),
                "m": g.m,
                "p_is_n": g.p_is_n(n),
            });
            if let Some(m) = matrix {
                let c = load_matrix(&m)?;
                let blocks = companion_blocks(&c)?;
                let w = w_matrix(&c)?;
                let det = PolyMatrix::w_pencil(&w, &c)?.det();
                out["blocks"] = json!(blocks.len());
                out["W"] = matrix_to_json(&w);
                out["det_coefficients"] = json!(det.coeffs().iter().map(format_rational).collect::<Vec<_>>());
                out["vanishing_order"] = json!(det.vanishing_order());
            }
            Ok(emit_json(common.out.as_deref(), &out)?)
        }
        Command::Hairbrush { matrix, tubes, threshold, candidates, common } => {
            let c = load_matrix(&matrix)?;
            let tubes = tubes_from_json(&load_json(&tubes)?)?;
            let cands = candidates.map(|p| load_json(&p).and_then(|v| Ok(tubes_from_json(&v)?))).transpose()?;
            let spec = TubeFamilySpec::from_tubes(CurveFamily::new(c).to_f64(), &tubes, (-1.0, 1.0))?;
            let dec = hairbrush_decompose(&spec, threshold, cands.as_deref());
            let out = json!({
                "brushes": dec.brushes,
                "centrals": dec.centrals,
                "bad": dec.bad,
                "brush_count": dec.brushes.len(),
            });
            Ok(emit_json(common.out.as_deref(), &out)?)
        }
        Command::ClaimCheck { matrix, tubes, random, delta_k, k, l, m, k_const, common } => {
            let f = CurveFamily::new(load_matrix(&matrix)?).to_f64();
            match (tubes, random) {
                (Some(t), None) => {
                    let ts = tubes_from_json(&load_json(&t)?)?;
                    if ts.len() != 3 {
                        return Err(usage("--tubes must list exactly [central, T_j, T_i]"));
                    }
                    let r = hairbrush_claim_check(&f, &ts[0], &ts[1], &ts[2], k, l, m, k_const)?;
                    emit_json(common.out.as_deref(), &claim_json(&r))?;
                    if r.pass { Ok(()) } else { Err(CliError::Negative("claim fails for this triple".into())) }
                }
                (None, Some(count)) => {
                    let cfg = TripleConfig { delta: 2f64.powi(-delta_k), k, l, m };
                    let reports = sample_claim_reports(&f, cfg, k_const, count, common.seed)?;
                    let mut csv = Csv::new(&["i", "t_j", "t_i", "s", "dist_centres", "dist_to_line", "fitted_k", "pass"]);
                    for (i, r) in reports.iter().enumerate() {
                        csv.push(vec![
                            i.to_string(),
                            fmt_f64(r.t_j),
                            fmt_f64(r.t_i),
                            fmt_f64(r.s),
                            fmt_f64(r.dist_centres),
                            fmt_f64(r.dist_to_line),
                            fmt_f64(r.fitted_k),
                            r.pass.to_string(),
                        ]);
                    }
                    let passed = reports.iter().filter(|r| r.pass).count();
                    let max_k = reports.iter().map(|r| r.fitted_k).fold(0.0, f64::max);
                    let summary = json!({ "count": count, "passed": passed, "max_fitted_k": max_k, "K": k_const });
                    emit_csv(common.out.as_deref(), "claim-check", &config, &csv, &summary)?;
                    if passed == count { Ok(()) } else { Err(CliError::Negative(format!("{} of {count} triples fail", count - passed))) }
                }
                _ => Err(usage("give exactly one of --tubes or --random")),
            }
        }
        Command::Locus { matrix, y0, t0, trials, point, common } => {
            let fam = CurveFamily::new(load_matrix(&matrix)?);
            let y0 = parse_rationals(&y0)?;
            let t0 = parse_rational(&t0)?;
            let y0f: Vec<f64> = y0.iter().map(Scalar::as_f64).collect();
            let rep = locus_dichotomy_test(&fam.to_f64(), &y0f, t0.as_f64(), trials, common.seed)?;
            let mut out = json!({
                "omega_one_param": rep.omega_one_param,
                "y_one_param": rep.y_one_param,
                "max_line_residual": rep.max_line_residual,
                "max_y_residual": rep.max_y_residual,
                "witness": rep.witness.map(|(i, j, r)| json!({ "i": i, "j": j, "relative_distance": r })),
                "samples": rep.samples,
            });
            if !point.is_empty() {
                let p = parse_rationals(&point)?;
                if p.len() != 3 {
                    return Err(usage("--point takes u,s,t"));
                }
                let x = locus_point(&fam, &y0, &t0, &p[0], &p[1], &p[2])?;
                out["point"] = json!(x.iter().map(format_rational).collect::<Vec<_>>());
            }
            Ok(emit_json(common.out.as_deref(), &out)?)
        }
        Command::IterateEps { start, steps, n, common } => {
            let mut eps = parse_rational(&start)?.as_f64();
            let mut csv = Csv::new(&["step", "eps", "lower_bound"]);
            csv.push(vec!["0".into(), fmt_f64(eps), fmt_f64(dimension_lower_bound(n, &eps, true))]);
            for i in 1..=steps {
                eps = iterate_epsilon(&eps);
                csv.push(vec![i.to_string(), fmt_f64(eps), fmt_f64(dimension_lower_bound(n, &eps, true))]);
            }
            let fp = epsilon_fixed_point();
            let summary = json!({
                "final": eps,
                "fixed_point": fp,
                "distance_to_fixed_point": (eps - fp).abs(),
                "lower_bound_at_fixed_point": dimension_lower_bound(n, &fp, true),
            });
            emit_csv(common.out.as_deref(), "iterate-eps", &config, &csv, &summary)?;
            Ok(())
        }
    }
}

fn claim_json(r: &ClaimReport) -> Value {
    json!({
        "dist_centres": r.dist_centres,
        "dist_to_line": r.dist_to_line,
        "fitted_k": r.fitted_k,
        "pass": r.pass,
        "t_j": r.t_j,
        "t_i": r.t_i,
        "s": r.s,
    })
}

fn sumset_ratio(
    instances: &[Instance],
    xs: &[Matrix<Rational>],
    eps: &Rational,
    out: &Option<std::path::PathBuf>,
    config: &Value,
) -> CliResult {
    let mut csv = Csv::new(&["i", "size_a", "size_b", "size_g", "difference_size", "max_side", "sumset_sizes", "achieved_exponent", "holds"]);
    let mut violations = 0usize;
    let mut degenerate = 0usize;
    for (i, inst) in instances.iter().enumerate() {
        let r = match check_ratio(inst, xs, eps) {
            Ok(r) => r,
            Err(Error::DegenerateInstance(_)) if instances.len() > 1 => {
                degenerate += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        violations += usize::from(!r.holds);
        csv.push(vec![
            i.to_string(),
            inst.a.len().to_string(),
            inst.b.len().to_string(),
            inst.g.len().to_string(),
            r.difference_size.to_string(),
            r.max_side.to_string(),
            r.sumset_sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(";"),
            r.achieved_exponent.map_or_else(|| "".into(), fmt_f64),
            r.holds.to_string(),
        ]);
    }
    let summary = json!({
        "instances": instances.len(),
        "degenerate_skipped": degenerate,
        "violations": violations,
        "eps": format_rational(eps),
    });
    emit_csv(out.as_deref().map(Path::new), "sumset", config, &csv, &summary)?;
    if violations == 0 { Ok(()) } else { Err(CliError::Negative(format!("{violations} violations"))) }
}

fn sumset_trapezia(
    instances: &[Instance],
    x: &Matrix<Rational>,
    y: &Matrix<Rational>,
    out: &Option<std::path::PathBuf>,
    config: &Value,
) -> CliResult {
    let mut csv = Csv::new(&["i", "size_g", "reduced_size", "m", "count", "lower_bound", "upper_bound", "identity_verified"]);
    let mut outside = 0usize;
    for (i, inst) in instances.iter().enumerate() {
        let r = count_trapezia(inst, x, y)?;
        let inside = r.identity_verified && r.lower_bound <= r.count as f64 && r.count as f64 <= r.upper_bound;
        outside += usize::from(!inside);
        csv.push(vec![
            i.to_string(),
            inst.g.len().to_string(),
            r.reduced_size.to_string(),
            r.m.to_string(),
            r.count.to_string(),
            fmt_f64(r.lower_bound),
            fmt_f64(r.upper_bound),
            r.identity_verified.to_string(),
        ]);
    }
    let summary = json!({ "instances": instances.len(), "outside_bracket": outside });
    emit_csv(out.as_deref().map(Path::new), "sumset", config, &csv, &summary)?;
    if outside == 0 { Ok(()) } else { Err(CliError::Negative(format!("{outside} instances outside the bracket"))) }
}
