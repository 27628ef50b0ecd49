//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use lienard_cli::report::{classify, At, ClassifyOptions, VerifyMode};
use lienard_cli::spec::SystemSpecFile;
use lienard_core::blowup::{local_portrait_oracle, PlanarField};
use lienard_core::global::{index_balance, index_check, origin_unique};
use lienard_core::infinity::{classify_infinity, infinity_oracle, monodromy_infinity, InfinityPortrait};
use lienard_core::numeric::{
    from_plane, geometric_amplitudes, integrate_field, period_profile, probe_sample, return_map_field, to_plane, Chart,
    FloatField, IntegrationOptions, Stability,
};
use lienard_core::origin::{center_test, cherkas_residual, classify_origin, focus_family, monodromy_origin, Verdict};
use lienard_core::poly::{rat, ratio, Rational};
use lienard_core::sampling::{infinity_row, origin_row, random_system, stratified, Target};
use lienard_core::system::{build_system, GeneralizedLienardSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs")
}

fn label<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_value(v).unwrap().as_str().unwrap_or_default().to_string()
}

fn system(phi: &[(u32, Rational)], f: &[(u32, Rational)], g: &[(u32, Rational)]) -> GeneralizedLienardSystem {
    build_system(phi, f, g).unwrap()
}

fn table_one_sample() -> Vec<GeneralizedLienardSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let target = Target::Origin { max_low: 6 };
    stratified(&mut rng, 20, 40_000, |r| random_system(r, &target), origin_row).into_values().flatten().collect()
}

fn table_two_sample() -> Vec<GeneralizedLienardSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let target = Target::Infinity { ells: vec![3, 5, 7], max_high: 12 };
    stratified(&mut rng, 12, 40_000, |r| random_system(r, &target), infinity_row).into_values().flatten().collect()
}

fn golden_corpus() -> Result<String, String> {
    let start = Instant::now();
    let mut out = Vec::new();
    for (k, want) in ["a", "b", "c", "d", "e"].iter().zip(["fig12-a", "fig12-b", "fig12-c", "fig12-d", "fig12-e"]) {
        let spec = SystemSpecFile::load(&specs().join(format!("system_{k}.json"))).unwrap();
        let r = classify(&spec, ClassifyOptions { at: At::All, verify: VerifyMode::None }).unwrap();
        let g = r.global.as_ref().unwrap();
        let got = g.portrait.map(|p| p.label().to_string()).unwrap_or_default();
        if got != want || g.global_center != (*k == "d" || *k == "e") {
            return Err(format!("({k}) gave {got}, global_center {}", g.global_center));
        }
        out.push(got);
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} in {elapsed:.2?}", out.join(" ")))
}

fn monodromy_agreement() -> Result<String, String> {
    let ones = table_one_sample();
    // fig1-h and fig1-i share a label, so eight labels cover all nine portraits
    let portraits: BTreeSet<String> = ones.iter().map(|s| label(&classify_origin(s).unwrap().portrait)).collect();
    let (mut decided, mut bad) = (0, Vec::new());
    for s in &ones {
        let Ok(oracle) = local_portrait_oracle(&PlanarField::from_system(s), 6) else { continue };
        decided += 1;
        if monodromy_origin(s).is_some() != oracle.monodromic {
            bad.push(s.to_string());
        }
    }
    if ones.len() < 500 || portraits.len() < 8 {
        return Err(format!("origin sample too thin: {} tuples, {} portraits", ones.len(), portraits.len()));
    }
    if !bad.is_empty() {
        return Err(format!("origin disagreements: {:?}", &bad[..bad.len().min(5)]));
    }
    let twos = table_two_sample();
    let (mut decided_inf, mut bad) = (0, Vec::new());
    for s in &twos {
        let (Ok(m), Ok(oracle)) = (monodromy_infinity(s), infinity_oracle(s)) else { continue };
        decided_inf += 1;
        if m.is_some() != oracle.is_monodromic() {
            bad.push(s.to_string());
        }
    }
    if twos.len() < 300 {
        return Err(format!("infinity sample too thin: {} tuples", twos.len()));
    }
    if !bad.is_empty() {
        return Err(format!("infinity disagreements: {:?}", &bad[..bad.len().min(5)]));
    }
    Ok(format!(
        "origin {decided}/{} decided over {} portraits, infinity {decided_inf}/{} decided",
        ones.len(),
        portraits.len(),
        twos.len()
    ))
}

fn threshold_exactness() -> Result<String, String> {
    let eps = ratio(1, 1_000_000_000);
    let mut checked = 0;
    // (phi, F exponent and b, g exponent, boundary c, rows for c - eps, c, c + eps)
    let origin: [(u32, u32, i64, u32, i64, [&str; 3]); 6] = [
        (1, 1, 2, 1, -1, ["fig1-h/i", "fig1-g", "fig1-g"]),
        (1, 2, 2, 3, -2, ["fig1-h/i", "fig1-b", "fig1-b"]),
        (2, 2, -3, 2, 2, ["fig1-c", "fig1-c", "fig1-d"]),
        (2, 2, -3, 2, -2, ["fig1-d", "fig1-c", "fig1-c"]),
        (2, 4, -3, 5, 4, ["fig1-e", "fig1-e", "fig1-d"]),
        (2, 4, -3, 5, -4, ["fig1-d", "fig1-e", "fig1-e"]),
    ];
    for (p, q, b, r, c, rows) in origin {
        for (dc, want) in [-eps.clone(), rat(0), eps.clone()].iter().zip(rows) {
            let s = system(&[(p, rat(-1))], &[(q, rat(b))], &[(r, rat(c) + dc)]);
            let got = label(&classify_origin(&s).map_err(|e| e.to_string())?.portrait);
            if got != want {
                return Err(format!("{s}: {got}, expected {want}"));
            }
            checked += 1;
        }
    }
    let infinity: [(u32, u32, i64, u32, i64, [&str; 3]); 6] = [
        (3, 3, 4, 3, -3, ["fig8-x", "fig8-c", "fig8-b"]),
        (2, 2, -3, 2, 2, ["fig8-f", "fig8-e", "fig8-d"]),
        (2, 4, -3, 5, 4, ["fig8-v", "fig8-v", "fig8-o"]),
        (3, 6, 4, 7, -6, ["fig8-w", "fig8-u", "fig8-u"]),
        (3, 9, 4, 11, -9, ["fig8-w", "fig8-c", "fig8-c"]),
        (3, 12, 4, 15, -12, ["fig8-w", "fig8-u", "fig8-u"]),
    ];
    for (l, m, b, n, c, rows) in infinity {
        for (dc, want) in [-eps.clone(), rat(0), eps.clone()].iter().zip(rows) {
            let s = system(&[(l, rat(-1))], &[(m, rat(b))], &[(n, rat(c) + dc)]);
            let got = label(&classify_infinity(&s).map_err(|e| e.to_string())?.portrait);
            if got != want {
                return Err(format!("{s}: {got}, expected {want}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} boundary and perturbed inputs on their rows"))
}

fn random_even_system<R: Rng>(rng: &mut R) -> GeneralizedLienardSystem {
    let nonzero = |rng: &mut R| {
        let v = rng.gen_range(1..=3);
        if rng.gen_bool(0.5) {
            v
        } else {
            -v
        }
    };
    let p = [1, 3][rng.gen_range(0..2)];
    let r = [1, 3, 5][rng.gen_range(0..3)];
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let mut phi = vec![(p, rat(sign * rng.gen_range(1..=3)))];
    if rng.gen_bool(0.5) {
        phi.push((p + rng.gen_range(1..=3), rat(nonzero(rng))));
    }
    // the smallest even q with p(r+1) < q(p+1)
    let mut q = p * (r + 1) / (p + 1) + 1;
    q += q % 2;
    let mut f = vec![(q, rat(nonzero(rng)))];
    if rng.gen_bool(0.6) {
        f.push((q + 2 * rng.gen_range(1..=2), rat(nonzero(rng))));
    }
    let mut g = vec![(r, rat(sign * rng.gen_range(1..=3)))];
    if rng.gen_bool(0.6) {
        g.push((r + 2 * rng.gen_range(1..=2), rat(nonzero(rng))));
    }
    system(&phi, &f, &g)
}

fn cherkas_test() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut evens = 0;
    while evens < 100 {
        let s = random_even_system(&mut rng);
        if monodromy_origin(&s).is_none() {
            return Err(format!("{s} is not monodromic"));
        }
        let v = center_test(&s, None, false).map_err(|e| e.to_string())?;
        if v.verdict != Verdict::Center || !cherkas_residual(&s, 30).map_err(|e| e.to_string())?.is_zero() {
            return Err(format!("{s}: {:?}", v.verdict));
        }
        evens += 1;
    }
    let mut foci = Vec::new();
    for k in [1, 2] {
        for eps in [rat(1), ratio(1, 10)] {
            let s = focus_family(k, eps);
            let v = center_test(&s, None, false).map_err(|e| e.to_string())?;
            let Verdict::Focus { stability: Some(stability) } = v.verdict else {
                return Err(format!("{s}: {:?}", v.verdict));
            };
            let sample = probe_sample(&FloatField::from_system(&s), 1e-2, 1e-12).map_err(|e| e.to_string())?;
            let numeric = if sample.displacement < 0.0 { Stability::Stable } else { Stability::Unstable };
            if numeric != stability || sample.displacement.abs() <= 10.0 * sample.noise {
                return Err(format!("{s}: series {stability:?}, displacement {:e}, noise {:e}", sample.displacement, sample.noise));
            }
            foci.push(format!("{:.1e}", (sample.displacement / sample.noise).abs()));
        }
    }
    Ok(format!("{evens} even centers, 4 foci with signal/noise {}", foci.join(" ")))
}

fn index_gate() -> Result<String, String> {
    let mut balanced = 0;
    let mut unique = 0;
    for s in table_one_sample().iter().chain(table_two_sample().iter()) {
        let (Ok(o), Ok(i)) = (classify_origin(s), classify_infinity(s)) else { continue };
        let b = index_balance(s, &o, &i);
        if !b.holds() {
            return Err(format!("{s}: {b:?}"));
        }
        balanced += 1;
        if origin_unique(s) {
            if !index_check(&o, &i) {
                return Err(format!("{s}: unique origin fails the gate"));
            }
            unique += 1;
        }
    }
    let spec = SystemSpecFile::load(&specs().join("system_d.json")).unwrap();
    let center = classify_origin(&spec.system().unwrap()).unwrap();
    for p in [InfinityPortrait::J, InfinityPortrait::M, InfinityPortrait::T, InfinityPortrait::V] {
        let s = p.figure().example.system();
        let i = classify_infinity(&s).unwrap();
        let sum = 2 * center.portrait.index() + i.portrait.equator_index();
        if i.portrait != p || index_check(&center, &i) || sum != 4 {
            return Err(format!("{p}: gate sum {sum}"));
        }
    }
    Ok(format!("{balanced} balanced ({unique} with unique origin), fig8-j/m/t/v excluded with sum 4"))
}

fn period_profiles() -> Result<String, String> {
    let mut out = Vec::new();
    for k in ["d", "e"] {
        let start = Instant::now();
        let s = SystemSpecFile::load(&specs().join(format!("system_{k}.json"))).unwrap().system().unwrap();
        let p = period_profile(&s, &geometric_amplitudes(1.0, 50.0, 12), 1e-10).map_err(|e| format!("({k}) {e}"))?;
        let elapsed = start.elapsed();
        if !p.eventually_decreasing || p.max_min_ratio <= 10.0 || elapsed > Duration::from_secs(120) {
            return Err(format!("({k}) {p:?} in {elapsed:?}"));
        }
        out.push(format!("({k}) decreasing from point {}, ratio {:.2e}, {elapsed:.1?}", p.decreasing_from, p.max_min_ratio));
    }
    Ok(out.join("; "))
}

fn integrator_health() -> Result<String, String> {
    let f = FloatField::new(vec![(0, 3, -1.0)], vec![(3, 0, 1.0)]);
    let opts = IntegrationOptions { tol: 1e-10, ..Default::default() };
    let r = return_map_field(&f, 1.0, &opts).map_err(|e| e.to_string())?;
    let traj = integrate_field(&f, (1.0, 0.0), 10.0 * r.period, &opts).map_err(|e| e.to_string())?;
    let drift = traj.plane_points().map(|(x, y)| (x.powi(4) + y.powi(4) - 1.0).abs()).fold(0.0, f64::max);
    if drift >= 1e-8 {
        return Err(format!("energy drift {drift:e}"));
    }
    let mut worst: f64 = 0.0;
    for &(x, y) in &[(12.0, 3.0), (-15.0, 40.0), (30.0, -31.0), (-9.5, -0.25), (1e4, -2e3), (-7.0, 1e5)] {
        for chart in [Chart::U, Chart::V] {
            let (u, v) = from_plane(chart, x, y);
            let (a, b) = to_plane(chart, u, v);
            worst = worst.max((a - x).abs() / x.abs().max(1.0)).max((b - y).abs() / y.abs().max(1.0));
        }
    }
    if worst >= 1e-9 {
        return Err(format!("chart round trip {worst:e}"));
    }
    Ok(format!("drift {drift:.1e} over 10 turns, chart round trip {worst:.1e}"))
}

fn sweep_determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().unwrap();
    let grid = specs().join("grid_100.json");
    let run = |jobs: &str| {
        let out = dir.path().join(format!("jobs{jobs}"));
        let o = Command::new(env!("CARGO_BIN_EXE_lienard"))
            .args(["sweep", grid.to_str().unwrap(), "--jobs", jobs, "--out", out.to_str().unwrap()])
            .output()
            .unwrap();
        let mut files = vec![std::fs::read(out.join("summary.json")).unwrap()];
        let mut cells: Vec<_> = std::fs::read_dir(out.join("cells")).unwrap().map(|e| e.unwrap().path()).collect();
        cells.sort();
        files.extend(cells.iter().map(|p| std::fs::read(p).unwrap()));
        (o.stdout, files)
    };
    let (a, fa) = run("1");
    let (b, fb) = run("8");
    let summary: serde_json::Value = serde_json::from_slice(&a).map_err(|e| e.to_string())?;
    if summary["cells"] != 100 {
        return Err(format!("{} cells", summary["cells"]));
    }
    if a != b || fa != fb {
        return Err("outputs differ".into());
    }
    Ok(format!("100 cells, {} files identical", fa.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Result<String, String>); 8] = [
        ("golden corpus", golden_corpus),
        ("monodromy agreement", monodromy_agreement),
        ("threshold boundary exactness", threshold_exactness),
        ("Cherkas center test", cherkas_test),
        ("index gate", index_gate),
        ("non-isochronicity", period_profiles),
        ("integrator health", integrator_health),
        ("sweep determinism", sweep_determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {} {:<30} PASS  {:>7.2}s  {}", k + 1, name, secs, detail),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {:<30} FAIL  {:>7.2}s  {}", k + 1, name, secs, detail);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
