use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::sync::Mutex;

use num_bigint::BigUint;
use serde::Serialize;
use serde_json::json;

use hullpeel::bounds::{
    chain_item, coef_bound_report, coef_lemma_check, divide_lemma_random, entropy_grid_check, floor_ceil_check,
    lower_bound, proof_constants_check, thm2_bound, thm2_floor, UpperBound, COEF_LEMMA_MIN,
};
use hullpeel::constructions::{
    build_simplex_with, build_ternary_with, build_threeblock, build_threeblock_with, corollary_subset,
    verify_invariant, BlockTree, BuildOptions, Construction, Mode, EXHAUSTIVE_MAX, MAX_POINTS,
};
use hullpeel::geometry::{pts, require_general_position, PointSet};
use hullpeel::peeling::{count_with_threads, PeelCount, BRUTEFORCE_MAX};
use hullpeel::report::{ReportItem, Verdict, VerificationReport};
use hullpeel::search::{embedded_small_configs, ingest_configs, perturb_search_with_progress, SearchConfig, SMALL_MINIMA};
use hullpeel::Error;

use crate::{ConstructArgs, CountArgs, CurveArgs, KindArg, LemmaSuite, SearchArgs, Target, VerifyArgs};

/// Why a command did not succeed; each maps to one exit code.
pub enum Failure {
    Refuted(String),
    Usage(String),
    Input(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Refuted(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Refuted(m) | Failure::Usage(m) | Failure::Input(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

/// Library errors raised while validating parameters.
fn param(e: Error) -> Failure {
    match e {
        Error::Precondition(_) | Error::Capacity { .. } | Error::NonPositiveEpsilon(_) => Failure::Usage(e.to_string()),
        Error::Construction(_) => Failure::Refuted(e.to_string()),
        _ => Failure::Input(e.to_string()),
    }
}

/// Library errors raised while processing user-supplied data.
fn input(e: Error) -> Failure {
    Failure::Input(e.to_string())
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write_text(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn read_set(path: &Path) -> Result<PointSet, Failure> {
    let s = pts::parse(&read_text(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    require_general_position(&s).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(s)
}

fn need_seed(seed: Option<u64>, why: &str) -> Result<u64, Failure> {
    seed.ok_or_else(|| Failure::Usage(format!("{why} is randomized; pass --seed")))
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

/// Prints a report and turns any refuted item into exit code 1.
fn finish_report(r: &VerificationReport, json: bool) -> Outcome {
    if json {
        print_json(r);
    } else {
        print!("{}", r.render_table());
    }
    verdict_of(r)
}

fn verdict_of(r: &VerificationReport) -> Outcome {
    let bad = r.refuted().count();
    if bad == 0 {
        Ok(())
    } else {
        Err(Failure::Refuted(format!("{}: {bad} refuted item(s)", r.title)))
    }
}

pub fn count(a: CountArgs) -> Outcome {
    let s = read_set(&a.file)?;
    let c = count_with_threads(&s, a.threads).map_err(input)?;
    let oracle = if a.oracle {
        if s.len() > BRUTEFORCE_MAX {
            return Err(Failure::Usage(format!(
                "--oracle supports at most {BRUTEFORCE_MAX} points, got {}",
                s.len()
            )));
        }
        Some(hullpeel::peeling::count_bruteforce(&s).map_err(input)?)
    } else {
        None
    };
    let agrees = oracle.as_ref().is_none_or(|o| o == &c);
    if a.json {
        print_json(&json!({
            "n": s.len(),
            "d": s.dim(),
            "count": c,
            "oracle": oracle,
            "agrees": agrees,
        }));
    } else {
        println!("{c}");
        if let Some(o) = &oracle {
            eprintln!("oracle: {o}");
        }
    }
    if agrees {
        Ok(())
    } else {
        Err(Failure::Refuted(format!(
            "engine count {c} differs from brute force {}",
            oracle.unwrap()
        )))
    }
}

fn planned_size(a: &ConstructArgs) -> Result<u128, Failure> {
    let missing = |f: &str| Failure::Usage(format!("this construction needs --{f}"));
    Ok(match a.kind {
        KindArg::Ternary => 3u128.saturating_pow(a.k.ok_or_else(|| missing("k"))?),
        KindArg::Threeblock => a.n.ok_or_else(|| missing("n"))? as u128,
        KindArg::Simplex => {
            let d = a.d.ok_or_else(|| missing("d"))?;
            (d as u128 + 1).saturating_pow(a.k.ok_or_else(|| missing("k"))?)
        }
    })
}

pub fn construct(a: ConstructArgs) -> Outcome {
    let n = planned_size(&a)?;
    if n > MAX_POINTS as u128 {
        return Err(Failure::Usage(format!("constructions support at most {MAX_POINTS} points, got {n}")));
    }
    let seed = if n > EXHAUSTIVE_MAX as u128 {
        need_seed(a.seed, "certification above 12 points")?
    } else {
        a.seed.unwrap_or(0)
    };
    let opts = BuildOptions {
        samples: a.samples,
        seed,
    };
    let c = match a.kind {
        KindArg::Ternary => build_ternary_with(a.k.unwrap(), &opts),
        KindArg::Threeblock => build_threeblock_with(a.n.unwrap(), &opts),
        KindArg::Simplex => build_simplex_with(a.d.unwrap(), a.k.unwrap(), &opts),
    }
    .map_err(param)?;

    let blocks_path = a.out.with_extension("blocks");
    let report_path = a.out.with_extension("report.json");
    write_text(&a.out, &pts::write(&c.points))?;
    write_text(&blocks_path, &c.blocks.to_text())?;
    let summary = construction_json(&c);
    let report_text = serde_json::to_string_pretty(&summary).expect("serializable");
    write_text(&report_path, &(report_text + "\n"))?;

    if a.json {
        print_json(&summary);
    } else {
        let spec = &c.spec;
        println!("{} construction: n = {}, d = {}", spec.kind, spec.n, spec.d);
        let sched: Vec<String> = spec.eps_schedule.iter().map(|e| e.to_string()).collect();
        println!("eps schedule: [{}], output eps {}", sched.join(", "), spec.output_eps);
        println!("wrote {}, {}, {}", a.out.display(), blocks_path.display(), report_path.display());
        print!("{}", c.certification.render_table());
    }
    verdict_of(&c.certification)
}

fn construction_json(c: &Construction) -> serde_json::Value {
    let spec = &c.spec;
    json!({
        "kind": spec.kind.to_string(),
        "k": spec.k,
        "n": spec.n,
        "d": spec.d,
        "eps_schedule": spec.eps_schedule.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "output_eps": spec.output_eps.to_string(),
        "certified": c.certified(),
        "certification": c.certification,
    })
}

pub fn verify(a: VerifyArgs) -> Outcome {
    match a.target {
        Target::Constants => finish_report(&proof_constants_check(), a.json),
        Target::Lemmas => verify_lemmas(&a),
        Target::SmallValues => verify_small_values(&a),
        Target::Invariant => verify_invariant_cmd(&a),
        Target::BoundsChain => verify_bounds_chain(&a),
    }
}

const ENTROPY_ALPHAS: [(u64, u64); 4] = [(1, 4), (1, 3), (2, 5), (1, 2)];
const DIVIDE_N_MAX: usize = 9;

fn verify_lemmas(a: &VerifyArgs) -> Outcome {
    let wants = |s: LemmaSuite| a.only.is_empty() || a.only.contains(&s);
    let mut r = VerificationReport::new("lemmas");
    if wants(LemmaSuite::Entropy) {
        r.extend(entropy_grid_check(a.entropy_max, &ENTROPY_ALPHAS).map_err(param)?);
    }
    if wants(LemmaSuite::FloorCeil) {
        r.extend(floor_ceil_check(a.floor_ceil_max).map_err(param)?);
    }
    if wants(LemmaSuite::Coef) {
        if a.coef_lo > a.coef_hi {
            return Err(Failure::Usage(format!("empty coefficient range {}..={}", a.coef_lo, a.coef_hi)));
        }
        let rep = if a.coef_lo < COEF_LEMMA_MIN {
            coef_bound_report(a.coef_lo, a.coef_hi)
        } else {
            coef_lemma_check(a.coef_lo, a.coef_hi)
        };
        r.extend(rep.map_err(param)?);
    }
    if wants(LemmaSuite::Divide) && a.divide > 0 {
        let seed = need_seed(a.seed, "the subadditivity suite (use --only to skip it)")?;
        r.extend(divide_lemma_random(a.divide, DIVIDE_N_MAX, seed).map_err(param)?);
    }
    finish_report(&r, a.json)
}

fn verify_small_values(a: &VerifyArgs) -> Outcome {
    let mut r = VerificationReport::new("small values");
    for (n, expected) in SMALL_MINIMA {
        let sets = embedded_small_configs(n).map_err(param)?;
        let mut counts = Vec::new();
        for s in &sets {
            counts.push(count_with_threads(s, a.threads).map_err(input)?);
        }
        let min = counts.iter().min().expect("at least one configuration").clone();
        let lower = lower_bound(n as u64, 2).map_err(param)?;
        r.push(ReportItem {
            id: format!("g{n}"),
            statement: format!("g({n}) = {expected}"),
            verdict: Verdict::from_bool(min == PeelCount::from(expected) && lower == min),
            comparison: None,
            note: format!("embedded witness counts {min}, lower bound {lower}"),
        });
    }
    finish_report(&r, a.json)
}

fn verify_invariant_cmd(a: &VerifyArgs) -> Outcome {
    let (Some(file), Some(blocks)) = (&a.file, &a.blocks) else {
        return Err(Failure::Usage("verify invariant needs --file and --blocks".into()));
    };
    let s = read_set(file)?;
    let tree = BlockTree::parse(&read_text(blocks)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", blocks.display())))?;
    let mode = if a.exhaustive {
        Mode::Exhaustive
    } else {
        Mode::Sampled {
            samples: a.samples,
            seed: need_seed(a.seed, "sampled verification (or pass --exhaustive)")?,
        }
    };
    finish_report(&verify_invariant(&s, &tree, mode), a.json)
}

fn chain_count(
    r: &mut VerificationReport,
    id: &str,
    s: &PointSet,
    upper: Option<UpperBound>,
    threads: usize,
) -> Outcome {
    let c = count_with_threads(s, threads).map_err(input)?;
    r.push(chain_item(id, &c, s.len() as u64, s.dim() as u64, upper).map_err(param)?);
    Ok(())
}

/// Built-in sets, each checked against the lower bound and the strongest
/// upper bound that applies to it.
fn verify_bounds_chain(a: &VerifyArgs) -> Outcome {
    let mut r = VerificationReport::new("bounds chain");
    let t = a.threads;
    let dflt = BuildOptions::default();
    for (n, _) in SMALL_MINIMA {
        for (i, s) in embedded_small_configs(n).map_err(param)?.iter().enumerate() {
            chain_count(&mut r, &format!("embedded.n{n}.{i}"), s, Some(UpperBound::Thm2), t)?;
        }
    }
    for k in 1..=2 {
        let c = build_ternary_with(k, &dflt).map_err(param)?;
        chain_count(&mut r, &format!("ternary.k{k}"), &c.points, Some(UpperBound::Thm1), t)?;
        chain_count(&mut r, &format!("ternary.k{k}.thm2"), &c.points, Some(UpperBound::Thm2), t)?;
    }
    let t9 = build_ternary_with(2, &dflt).map_err(param)?;
    for m in 4..=8 {
        let s = corollary_subset(&t9, m).map_err(param)?;
        chain_count(&mut r, &format!("ternary.k2.sub{m}"), &s, Some(UpperBound::Cor1), t)?;
    }
    for n in 3..=12 {
        let c = build_threeblock(n).map_err(param)?;
        chain_count(&mut r, &format!("threeblock.n{n}"), &c.points, Some(UpperBound::Thm2), t)?;
    }
    for d in 3..=4 {
        let c = build_simplex_with(d, 1, &dflt).map_err(param)?;
        chain_count(&mut r, &format!("simplex.d{d}.k1"), &c.points, Some(UpperBound::Thm3), t)?;
        for m in 1..d + 1 {
            let s = corollary_subset(&c, m).map_err(param)?;
            chain_count(&mut r, &format!("simplex.d{d}.k1.sub{m}"), &s, Some(UpperBound::Cor2), t)?;
        }
    }
    if let Some(file) = &a.file {
        let ing = ingest_configs(file, a.lenient).map_err(|e| Failure::Input(format!("{}: {e}", file.display())))?;
        for sk in &ing.skipped {
            eprintln!("skipped record at line {}: {}", sk.first_line, sk.error);
        }
        for (i, s) in ing.sets.iter().enumerate() {
            chain_count(&mut r, &format!("file.{i}"), s, None, t)?;
        }
    }
    finish_report(&r, a.json)
}

pub fn curve(a: CurveArgs) -> Outcome {
    if a.n_max == 0 || a.n_max > MAX_POINTS as u64 {
        return Err(Failure::Usage(format!("--n-max must lie in 1..={MAX_POINTS}, got {}", a.n_max)));
    }
    if a.exact_cap > MAX_POINTS as u64 {
        return Err(Failure::Usage(format!("--exact-cap must be at most {MAX_POINTS}")));
    }
    let cap = a.exact_cap.min(a.n_max);
    let opts = BuildOptions {
        samples: hullpeel::constructions::DEFAULT_SAMPLES,
        seed: if cap > EXHAUSTIVE_MAX as u64 {
            need_seed(a.seed, "certifying three-block sets above 12 points")?
        } else {
            0
        },
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = ["n", "lower_bound", "exact", "thm2_floor", "layer", "log2_thm2"];
    w.write_record(header).map_err(|e| Failure::Input(e.to_string()))?;
    for n in 1..=a.n_max {
        let lower = lower_bound(n, 2).map_err(param)?.to_string();
        let exact = if n <= cap {
            let c = build_threeblock_with(n as usize, &opts).map_err(param)?;
            count_with_threads(&c.points, a.threads).map_err(param)?.to_string()
        } else {
            String::new()
        };
        let (floor, log2) = if n >= 3 {
            (thm2_floor(n).to_string(), format!("{:.6}", thm2_bound(n).log2_approx()))
        } else {
            (String::new(), String::new())
        };
        let layer = if n % 3 == 0 {
            BigUint::from(6u32).pow((n / 3) as u32).to_string()
        } else {
            String::new()
        };
        w.write_record([n.to_string(), lower, exact, floor, layer, log2])
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Input(e.to_string()))?;
    match &a.out {
        Some(path) => fs::write(path, bytes).map_err(|e| io_err(path, e)),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| Failure::Input(e.to_string())),
    }
}

pub fn search(a: SearchArgs) -> Outcome {
    let cfg = SearchConfig {
        n: a.n,
        seed: a.seed,
        iterations: a.iterations,
        coordinate_resolution: a.resolution,
        threads: a.threads,
        restarts: a.restarts,
    };
    // progress is reported per restart; only global improvements are logged
    let best: Mutex<Option<PeelCount>> = Mutex::new(None);
    let log = |_restart: usize, iter: usize, c: &PeelCount| {
        let mut b = best.lock().unwrap();
        if b.as_ref().is_none_or(|old| c < old) {
            eprintln!("{iter} {c}");
            *b = Some(c.clone());
        }
    };
    let out = perturb_search_with_progress(&cfg, Some(&log)).map_err(param)?;
    if a.json {
        print_json(&json!({
            "n": a.n,
            "seed": a.seed,
            "count": out.count,
            "restart": out.restart,
            "witness": pts::write(&out.set),
        }));
    } else {
        print!("# count {}\n{}", out.count, pts::write(&out.set));
    }
    Ok(())
}
