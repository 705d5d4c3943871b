use hdcoding::boole::{apply_b, b_word_entries, decode_b, h_b, h_b_float, measure_preservation_check, Bound};
use hdcoding::coding::{h_i_assemble, h_j_assemble, i_word, j_word, words_at, CoordinateWord, ExactHenon, FloatHenon};
use hdcoding::curves::{branches, sample_branch, CurvesConfig, Family, SamplingConfig};
use hdcoding::decode::{
    curve_point_from_finite_iword, cylinder_locate, periodic_search, CylinderQuery, PeriodicOptions, SearchBox,
};
use hdcoding::map::{orbit, orbit_float, HomPoint, MapConfig, OrbitRecord, Point};
use hdcoding::scalar::{format_rational, parse_rational, rational_to_f64, Rational, Scalar};
use hdcoding::suite::{run_suite, Suite, SuiteConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{BooleOp, Cli, Command, FamilyArg, Format, Mode, RunArgs, VerifyArgs};
use crate::exit::{self, Failure};
use crate::output::{csv_out, envelope, print_json, sequence_json, word_json};

pub fn run(cli: &Cli) -> Result<i32, Failure> {
    let r = &cli.run;
    match &cli.command {
        Command::Orbit { point, fwd, bwd } => cmd_orbit(r, point, *fwd, *bwd),
        Command::Code { point, depth, window, mirror } => cmd_code(r, point, *depth, *window, *mirror),
        Command::Curves { family, level, samples, adaptive, max_level } => {
            cmd_curves(r, *family, *level, *samples, *adaptive, *max_level)
        }
        Command::Verify(v) => cmd_verify(r, v),
        Command::Decode { iword, jword, search_box, tolerance, finite } => {
            cmd_decode(r, iword, jword, search_box, *tolerance, *finite)
        }
        Command::Periodic { icycle, jcycle, search_box } => cmd_periodic(r, icycle, jcycle.as_deref(), search_box),
        Command::Boole { op } => cmd_boole(r, op),
    }
}

// ---------- parsing ----------

fn map_config(r: &RunArgs) -> MapConfig {
    let d = MapConfig::default();
    MapConfig { epsilon: r.epsilon, max_bits: r.max_bits.unwrap_or(d.max_bits), ..d }
}

fn rational(s: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(Failure::parse)
}

fn float(s: &str) -> Result<f64, Failure> {
    let q = rational(s)?;
    Ok(rational_to_f64(&q))
}

fn pair(s: &str) -> Result<(&str, &str), Failure> {
    s.split_once(',').ok_or_else(|| Failure::parse(format!("expected \"x,y\", got {s:?}")))
}

fn exact_point(s: &str) -> Result<Point<Rational>, Failure> {
    let (x, y) = pair(s)?;
    Ok(Point::new(rational(x)?, rational(y)?))
}

fn float_point(s: &str) -> Result<Point<f64>, Failure> {
    let (x, y) = pair(s)?;
    Ok(Point::new(float(x)?, float(y)?))
}

fn int_list(s: &str) -> Result<Vec<i64>, Failure> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .replace('\u{2212}', "-")
                .parse::<i64>()
                .map_err(|_| Failure::parse(format!("bad integer {t:?} in {s:?}")))
        })
        .collect()
}

fn search_box(s: &str) -> Result<SearchBox, Failure> {
    let v: Vec<&str> = s.split(',').collect();
    if v.len() != 4 {
        return Err(Failure::parse(format!("expected \"x_min,x_max,y_min,y_max\", got {s:?}")));
    }
    Ok(SearchBox::new(rational(v[0])?, rational(v[1])?, rational(v[2])?, rational(v[3])?))
}

fn point_json<S: Scalar>(p: &Point<S>) -> Value {
    json!({ "x": p.x.to_json(), "y": p.y.to_json() })
}

// ---------- orbit ----------

fn cmd_orbit(r: &RunArgs, point: &str, fwd: usize, bwd: usize) -> Result<i32, Failure> {
    let cfg = map_config(r);
    match r.mode {
        Mode::Exact => emit_orbit(r, &exact_point(point)?, &orbit(&exact_point(point)?, fwd, bwd, &cfg)?, "exact"),
        Mode::Float => {
            emit_orbit(r, &float_point(point)?, &orbit_float(&float_point(point)?, fwd, bwd, &cfg)?, "float")
        }
    }
}

fn emit_orbit<S: Scalar>(r: &RunArgs, p: &Point<S>, o: &OrbitRecord<S>, mode: &str) -> Result<i32, Failure> {
    match r.format {
        Format::Json => {
            let mut body = serde_json::to_value(o).expect("serializable");
            body["mode"] = json!(mode);
            body["point"] = point_json(p);
            print_json(&envelope("orbit", body));
        }
        Format::Csv => {
            let rows = o.timeline().into_iter().map(|(t, q)| vec![t.to_string(), q.x.render(), q.y.render()]);
            csv_out(&["t", "x", "y"], rows)?;
        }
    }
    Ok(exit::OK)
}

// ---------- code ----------

fn cmd_code(r: &RunArgs, point: &str, depth: usize, window: Option<usize>, mirror: bool) -> Result<i32, Failure> {
    if depth < 1 {
        return Err(Failure::parse("depth must be at least 1"));
    }
    let window = window.unwrap_or(depth.saturating_sub(2).max(1));
    let cfg = map_config(r);
    let (p_json, (mut wi, mut wj)) = match r.mode {
        Mode::Exact => {
            let p = exact_point(point)?;
            (point_json(&p), words_at(&ExactHenon { cfg: cfg.clone() }, &HomPoint::from_point(&p), depth)?)
        }
        Mode::Float => {
            let p = float_point(point)?;
            (point_json(&p), words_at(&FloatHenon { cfg: cfg.clone() }, &p, depth)?)
        }
    };
    if mirror {
        wi = wi.negate();
        wj = wj.negate();
    }
    let hi = h_i_assemble(&wi, &wj, window)?;
    let hj = h_j_assemble(&wi, &wj, window)?;
    match r.format {
        Format::Json => {
            let body = json!({
                "mode": mode_name(r.mode),
                "point": p_json,
                "mirror": mirror,
                "depth": depth,
                "window": window,
                "i_word": word_json(&wi),
                "j_word": word_json(&wj),
                "h_i": sequence_json(&hi),
                "h_j": sequence_json(&hj),
            });
            print_json(&envelope("code", body));
        }
        Format::Csv => {
            let (si, oi) = hi.time_ordered();
            let (sj, oj) = hj.time_ordered();
            let lo = -(oi.max(oj) as i64);
            let hi_t = (si.len() - oi).max(sj.len() - oj) as i64;
            let at = |s: &[hdcoding::coding::Symbol], o: usize, t: i64| {
                let k = t + o as i64;
                if k >= 0 && (k as usize) < s.len() {
                    s[k as usize].to_string()
                } else {
                    String::new()
                }
            };
            let rows = (lo..hi_t).map(|t| vec![t.to_string(), at(&si, oi, t), at(&sj, oj, t)]);
            csv_out(&["t", "s_i", "s_j"], rows)?;
        }
    }
    Ok(exit::OK)
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Exact => "exact",
        Mode::Float => "float",
    }
}

// ---------- curves ----------

fn cmd_curves(
    r: &RunArgs,
    family: FamilyArg,
    level: usize,
    samples: usize,
    adaptive: bool,
    max_level: usize,
) -> Result<i32, Failure> {
    if level == 0 {
        return Err(Failure::parse("level must be at least 1"));
    }
    if level > max_level {
        return Err(Failure::new(exit::RESOURCE, anyhow::anyhow!("level {level} exceeds --max-level {max_level}")));
    }
    let fam = match family {
        FamilyArg::R => Family::PreimageOfYZero,
        FamilyArg::L => Family::ImageOfAntiDiagonal,
    };
    let cfg = CurvesConfig { map: map_config(r), ..CurvesConfig::default() };
    let bs = branches(fam, level, &cfg)?;
    let sc = SamplingConfig {
        samples,
        threshold: if adaptive { SamplingConfig::default().threshold } else { f64::INFINITY },
        ..SamplingConfig::default()
    };
    let sampled: Vec<Vec<(f64, f64, f64)>> = bs.iter().map(|b| sample_branch(b, &sc, &cfg.map)).collect();
    let fam_name = match family {
        FamilyArg::R => "R",
        FamilyArg::L => "L",
    };
    let side = |b: &hdcoding::curves::CurveBranch| match b.side {
        hdcoding::curves::MirrorSide::Positive => "positive",
        hdcoding::curves::MirrorSide::Negative => "negative",
    };
    let end = |e: &Option<hdcoding::curves::RootBracket>| e.as_ref().map(|b| b.mid_f64());
    match r.format {
        Format::Json => {
            let list: Vec<Value> = bs
                .iter()
                .zip(&sampled)
                .enumerate()
                .map(|(k, (b, pts))| {
                    json!({
                        "index": k,
                        "level": b.level,
                        "side": side(b),
                        "lower": b.lower.as_ref().map(|x| json!([format_rational(&x.lo), format_rational(&x.hi)])),
                        "upper": b.upper.as_ref().map(|x| json!([format_rational(&x.lo), format_rational(&x.hi)])),
                        "points": pts.iter().map(|(t, x, y)| json!([t, x, y])).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let body = json!({ "family": fam_name, "level": level, "samples": samples, "adaptive": adaptive, "branches": list });
            print_json(&envelope("curves", body));
        }
        Format::Csv => {
            let mut rows = Vec::new();
            for (k, (b, pts)) in bs.iter().zip(&sampled).enumerate() {
                let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                for (t, x, y) in pts {
                    rows.push(vec![
                        k.to_string(),
                        fam_name.to_string(),
                        level.to_string(),
                        side(b).to_string(),
                        f(end(&b.lower)),
                        f(end(&b.upper)),
                        t.to_string(),
                        x.to_string(),
                        y.to_string(),
                    ]);
                }
            }
            csv_out(&["branch", "family", "level", "side", "t_lower", "t_upper", "t", "x", "y"], rows)?;
        }
    }
    Ok(exit::OK)
}

// ---------- verify ----------

fn cmd_verify(r: &RunArgs, v: &VerifyArgs) -> Result<i32, Failure> {
    let suite: Suite = v.suite.parse().map_err(Failure::parse)?;
    let d = SuiteConfig::default();
    let map = MapConfig { epsilon: r.epsilon, max_bits: r.max_bits.unwrap_or(d.map.max_bits), ..d.map.clone() };
    let cfg = SuiteConfig {
        seed: r.seed,
        points: v.points.unwrap_or(d.points),
        depth: v.depth.unwrap_or(d.depth),
        samples_per_branch: v.samples.unwrap_or(d.samples_per_branch),
        max_level: v.max_level.unwrap_or(d.max_level),
        boole_points: v.boole_points.unwrap_or(d.boole_points),
        boole_depth: v.boole_depth.unwrap_or(d.boole_depth),
        decode_queries: v.queries.unwrap_or(d.decode_queries),
        map,
        ..d
    };
    if cfg.depth < 3 {
        return Err(Failure::parse("depth must be at least 3"));
    }
    let report = run_suite(suite, &cfg);
    if v.timings {
        for c in &report.checks {
            eprintln!("timing {} {:.6}", c.name, c.elapsed.as_secs_f64());
        }
    }
    match r.format {
        Format::Json => {
            let body = serde_json::to_value(&report).expect("serializable");
            print_json(&envelope("verify", body));
        }
        Format::Csv => {
            let rows = report.checks.iter().map(|c| {
                vec![
                    c.name.clone(),
                    c.pass.to_string(),
                    c.tested.to_string(),
                    c.failed.to_string(),
                    c.skipped.to_string(),
                ]
            });
            csv_out(&["check", "pass", "tested", "failed", "skipped"], rows)?;
        }
    }
    Ok(if report.pass {
        exit::OK
    } else if report.resource_limited() {
        exit::RESOURCE
    } else {
        exit::VERIFY_FAILED
    })
}

// ---------- decode ----------

fn prefix_depth(w: &[i64]) -> usize {
    w.iter().map(|e| e.unsigned_abs() as usize).sum::<usize>() + 1
}

fn not_found_body(command: &str, e: &hdcoding::decode::DecodeError) -> Option<Value> {
    match e {
        hdcoding::decode::DecodeError::NotFound(d) | hdcoding::decode::DecodeError::NewtonDiverged(d) => {
            Some(envelope(command, json!({ "status": "not_found", "diagnostics": d })))
        }
        _ => None,
    }
}

fn cmd_decode(r: &RunArgs, iword: &str, jword: &str, b: &str, tolerance: f64, finite: bool) -> Result<i32, Failure> {
    let cfg = map_config(r);
    let i = int_list(iword)?;
    if finite {
        let wi = CoordinateWord::finite(i.clone()).map_err(Failure::parse)?;
        let ccfg = CurvesConfig { map: cfg.clone(), ..CurvesConfig::default() };
        let p = curve_point_from_finite_iword(&wi, &ccfg)?;
        let back = i_word(&p, wi.total_len() + 5, &cfg)?;
        let verified = back == wi;
        let body = json!({
            "status": "found",
            "kind": "curve_point",
            "point": point_json(&p),
            "approx": point_json(&p.to_f64()),
            "i_word": word_json(&back),
            "recode_verified": verified,
        });
        print_json(&envelope("decode", body));
        return Ok(if verified { exit::OK } else { exit::VERIFY_FAILED });
    }
    let j = int_list(jword)?;
    let mut q = CylinderQuery::new(i.clone(), j.clone(), search_box(b)?);
    q.tolerance = tolerance;
    q.max_refinements = r.max_refinements;
    let l = cylinder_locate(&q, &cfg).map_err(|e| {
        let body = not_found_body("decode", &e);
        let f = Failure::from(e);
        match body {
            Some(v) => f.with_body(v),
            None => f,
        }
    })?;
    let wi = i_word(&l.point, prefix_depth(&i), &cfg)?;
    let wj = j_word(&l.point, prefix_depth(&j), &cfg)?;
    let verified = wi.matches_prefix(&i) && wj.matches_prefix(&j);
    let body = json!({
        "status": "found",
        "kind": "cylinder_point",
        "query": q,
        "point": point_json(&l.point),
        "approx": point_json(&l.point.to_f64()),
        "cell_diameter": l.cell_diameter,
        "refinements": l.refinements,
        "probes": l.probes,
        "i_word": word_json(&wi),
        "j_word": word_json(&wj),
        "recode_verified": verified,
    });
    print_json(&envelope("decode", body));
    Ok(if verified { exit::OK } else { exit::VERIFY_FAILED })
}

fn cmd_periodic(r: &RunArgs, icycle: &str, jcycle: Option<&str>, b: &str) -> Result<i32, Failure> {
    let cfg = map_config(r);
    let i = int_list(icycle)?;
    let j = match jcycle {
        Some(s) => int_list(s)?,
        None => i.iter().rev().copied().collect(),
    };
    let pc = periodic_search(&i, &j, &search_box(b)?, &PeriodicOptions::default(), &cfg).map_err(|e| {
        let body = not_found_body("periodic", &e);
        let f = Failure::from(e);
        match body {
            Some(v) => f.with_body(v),
            None => f,
        }
    })?;
    let mut body = serde_json::to_value(&pc).expect("serializable");
    body["status"] = json!("found");
    body["i_cycle"] = json!(i);
    body["j_cycle"] = json!(j);
    print_json(&envelope("periodic", body));
    Ok(exit::OK)
}

// ---------- boole ----------

fn bound_json(b: &Bound) -> Value {
    match b {
        Bound::NegInfinity => json!("-inf"),
        Bound::PosInfinity => json!("+inf"),
        Bound::Finite(r) => {
            json!({ "lo": format_rational(&r.lo), "hi": format_rational(&r.hi), "approx": r.mid_f64() })
        }
    }
}

fn cmd_boole(r: &RunArgs, op: &BooleOp) -> Result<i32, Failure> {
    let cfg = map_config(r);
    match op {
        BooleOp::Apply { x, steps } => {
            let mut vals: Vec<Value> = Vec::new();
            let mut stopped = Value::Null;
            match r.mode {
                Mode::Exact => {
                    let mut v = rational(x)?;
                    vals.push(v.to_json());
                    for k in 0..*steps {
                        match apply_b(&v, &cfg) {
                            Ok(n) => v = n,
                            Err(hdcoding::MapError::DiscontinuityHit { .. }) => {
                                stopped = json!(k);
                                break;
                            }
                            Err(e) => return Err(e.into()),
                        }
                        vals.push(v.to_json());
                    }
                }
                Mode::Float => {
                    let mut v = float(x)?;
                    vals.push(v.to_json());
                    for k in 0..*steps {
                        match apply_b(&v, &cfg) {
                            Ok(n) => v = n,
                            Err(hdcoding::MapError::DiscontinuityHit { .. }) => {
                                stopped = json!(k);
                                break;
                            }
                            Err(e) => return Err(e.into()),
                        }
                        vals.push(v.to_json());
                    }
                }
            }
            match r.format {
                Format::Json => {
                    let body = json!({ "mode": mode_name(r.mode), "values": vals, "hit_origin_at": stopped });
                    print_json(&envelope("boole apply", body));
                }
                Format::Csv => {
                    let rows = vals.iter().enumerate().map(|(k, v)| {
                        vec![k.to_string(), v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string())]
                    });
                    csv_out(&["k", "x"], rows)?;
                }
            }
            Ok(exit::OK)
        }
        BooleOp::Code { x, depth } => {
            let (word, seq) = match r.mode {
                Mode::Exact => {
                    let q = rational(x)?;
                    let w = b_word_entries(&q, *depth, 100_000, &cfg)?;
                    let n = w.total_len().max(1);
                    (w, h_b(&q, n, &cfg)?)
                }
                Mode::Float => {
                    let v = float(x)?;
                    let m = hdcoding::boole::FloatBoole { cfg: cfg.clone() };
                    let w = hdcoding::coding::forward_word(&m, &v, 64)?;
                    let w = CoordinateWord::new(w.entries().iter().take(*depth).copied().collect(), w.status())
                        .map_err(Failure::parse)?;
                    let n = w.total_len().max(1);
                    (w, h_b_float(v, n, &cfg)?)
                }
            };
            let body = json!({ "mode": mode_name(r.mode), "x": x, "entries": depth, "word": word_json(&word), "h_b": sequence_json(&seq) });
            print_json(&envelope("boole code", body));
            Ok(exit::OK)
        }
        BooleOp::Decode { word, finite, tol } => {
            let e = int_list(word)?;
            let w = if *finite { CoordinateWord::finite(e) } else { CoordinateWord::truncated(e) }
                .map_err(Failure::parse)?;
            let tol = rational(tol)?;
            let c = decode_b(&w, &tol)?;
            let (a, b) = c.approx();
            let body = json!({
                "word": word_json(&w),
                "lo": bound_json(&c.lo),
                "hi": bound_json(&c.hi),
                "approx": [a.to_json(), b.to_json()],
                "width": c.width_f64().to_json(),
                "signs": c.depth,
            });
            print_json(&envelope("boole decode", body));
            Ok(exit::OK)
        }
        BooleOp::CheckMeasure { samples, tol } => {
            let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
            let mut rows = Vec::new();
            let mut all = true;
            let mut worst = 0f64;
            for _ in 0..*samples {
                let y: f64 = rng.gen_range(-100.0..100.0);
                let rep = measure_preservation_check(y, *tol);
                all &= rep.pass;
                worst = worst.max((rep.sum - 1.0).abs());
                rows.push(rep);
            }
            let body =
                json!({ "samples": samples, "tolerance": tol, "max_deviation": worst, "pass": all, "reports": rows });
            print_json(&envelope("boole check-measure", body));
            Ok(if all { exit::OK } else { exit::VERIFY_FAILED })
        }
    }
}
