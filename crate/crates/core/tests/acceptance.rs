//! Exit-gate checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qclone::cloner::{self, CloneParams};
use qclone::ensemble::{self, Corruption, EnsembleSpec, Observable, PureState};
use qclone::numerics::{Backend, ExactScalar, LogScalar, Weight};
use qclone::oracle;
use qclone::sweep;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const KAPPAS: [u64; 4] = [2, 3, 4, 8];

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fig3_table() -> Result<(sweep::SweepTable, Duration), String> {
    let start = Instant::now();
    let table = sweep::sweep_fig3(1000, &KAPPAS, 1..=10, Backend::Log).map_err(|e| e.to_string())?;
    Ok((table, start.elapsed()))
}

fn per_kappa(table: &sweep::SweepTable) -> Vec<(u64, Vec<f64>)> {
    let ks = table.column("kappa").unwrap();
    let fs = table.column("infoF").unwrap();
    KAPPAS
        .iter()
        .map(|&k| {
            let vals = ks.iter().zip(&fs).filter(|(kk, _)| **kk == k as f64).map(|(_, f)| *f).collect();
            (k, vals)
        })
        .collect()
}

/// Information fidelity beats 0.98 once more than five errors are tolerated.
fn c1_threshold() -> Outcome {
    let (table, took) = fig3_table()?;
    let mut worst: f64 = 1.0;
    for (k, vals) in per_kappa(&table) {
        for (i, f) in vals.iter().enumerate().skip(5) {
            let err = i + 1;
            ensure(*f > 0.98, || format!("kappa={k} Err={err}: {f} <= 0.98"))?;
            worst = worst.min(*f);
        }
    }
    ensure(took < Duration::from_secs(60), || format!("sweep took {took:?}"))?;
    Ok(format!("min over Err=6..10 = {worst:.6}, sweep {took:?}"))
}

/// Nondecreasing in Err and the miss probability falls tenfold from Err=1 to Err=10.
fn c2_fig3_shape() -> Outcome {
    let (table, _) = fig3_table()?;
    let mut ratios = Vec::new();
    for (k, vals) in per_kappa(&table) {
        ensure(vals.len() == 10, || format!("kappa={k}: {} rows", vals.len()))?;
        for w in vals.windows(2) {
            ensure(w[1] >= w[0], || format!("kappa={k}: not nondecreasing {w:?}"))?;
        }
        let (miss1, miss10) = (1.0 - vals[0], 1.0 - vals[9]);
        ensure(miss1 >= 10.0 * miss10, || format!("kappa={k}: 1-F(1)={miss1}, 1-F(10)={miss10}"))?;
        ratios.push(miss1 / miss10);
    }
    Ok(format!("miss-probability ratios {ratios:.0?}"))
}

/// F(N, kappa N) strictly decreasing in N and ordered across kappa.
fn c3_fig2_shape() -> Outcome {
    let table = sweep::sweep_fig2(&KAPPAS, 1..=100, Backend::Auto).map_err(|e| e.to_string())?;
    let f = table.column("F").unwrap();
    // rows are (N, kappa) lexicographic: index = (N-1)*4 + kappa slot
    let at = |n: usize, slot: usize| f[(n - 1) * KAPPAS.len() + slot];
    for (slot, k) in KAPPAS.iter().enumerate() {
        for n in 1..100 {
            ensure(at(n + 1, slot) < at(n, slot), || format!("kappa={k}: F({})={} !< F({n})={}", n + 1, at(n + 1, slot), at(n, slot)))?;
        }
    }
    for n in 1..=100 {
        for slot in 0..3 {
            ensure(at(n, slot) > at(n, slot + 1), || format!("N={n}: ordering broken at kappa={}", KAPPAS[slot]))?;
        }
    }
    Ok("400 points, strictly decreasing in N, F(2)>F(3)>F(4)>F(8) at every N".into())
}

/// Brute-force partial traces reproduce the closed-form block diagonal.
fn c4_oracle() -> Outcome {
    let mut cases = Vec::new();
    for n in 1..=3u64 {
        for kappa in [2u64, 3] {
            for block in 1..=n {
                cases.push((CloneParams::with_kappa(n, kappa).unwrap(), block));
            }
        }
    }
    let reports: Vec<oracle::CertifyReport> = cases
        .par_iter()
        .map(|&(p, b)| oracle::certify(p, b).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let mut worst: f64 = 0.0;
    for r in &reports {
        ensure(r.passed, || format!("N={} M={} n={}: deviation {}", r.n, r.m, r.block, r.max_deviation()))?;
        worst = worst.max(r.max_deviation());
    }
    let q = |a: i64, b: i64| ExactScalar::new(a, b);
    let pinned = [
        (CloneParams::new(1, 2).unwrap(), 1u64, vec![q(5, 6), q(1, 6)]),
        (CloneParams::new(2, 4).unwrap(), 2, vec![q(23, 30), q(13, 60), q(1, 60)]),
    ];
    for (p, block, want) in pinned {
        let closed = cloner::reduced_diagonal::<ExactScalar>(p, block).map_err(|e| e.to_string())?;
        ensure(closed.coeffs == want, || format!("closed form {:?} != {want:?}", closed.coeffs))?;
        let brute = oracle::certify(p, block).map_err(|e| e.to_string())?;
        for (o, w) in brute.observed.iter().zip(&want) {
            ensure((o - w.to_f64()).abs() <= 1e-10, || format!("brute force {o} vs {w}"))?;
        }
    }
    Ok(format!("{} cases, max deviation {worst:.2e}", reports.len()))
}

/// Exact normalization and trace identities.
fn c5_exact_identities() -> Outcome {
    let one = ExactScalar::one();
    let grid: Vec<CloneParams> = (1..=40u64)
        .flat_map(|n| KAPPAS.iter().map(move |&k| CloneParams::with_kappa(n, k).unwrap()))
        .collect();
    grid.par_iter().try_for_each(|&p| -> Result<(), String> {
        ensure(cloner::spectrum::<ExactScalar>(p).total() == one, || format!("{p:?}: sum alpha^2 != 1"))?;
        let dist = cloner::error_distribution::<ExactScalar>(p);
        ensure(dist.trace() == one, || format!("{p:?}: trace of N-block != 1"))?;
        let f0 = cloner::info_fidelity::<ExactScalar>(p, 0).unwrap();
        ensure(f0 == cloner::fidelity::<ExactScalar>(p), || format!("{p:?}: infoF(0) != F"))?;
        let fall = cloner::info_fidelity::<ExactScalar>(p, p.n()).unwrap();
        ensure(fall == one, || format!("{p:?}: infoF(N) = {fall} != 1"))
    })?;
    let small: Vec<(u64, u64)> = (1..=24u64).flat_map(|m| (1..=m).map(move |n| (n, m))).collect();
    small.par_iter().try_for_each(|&(n, m)| -> Result<(), String> {
        let p = CloneParams::new(n, m).unwrap();
        for block in 1..=m {
            let d = cloner::reduced_diagonal::<ExactScalar>(p, block).unwrap();
            ensure(d.trace() == one, || format!("N={n} M={m} n={block}: trace != 1"))?;
        }
        Ok(())
    })?;
    Ok(format!("{} (N, kappa) pairs with N<=40 and every block of {} pairs with M<=24", grid.len(), small.len()))
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Log backend within 1e-10 relative of exact for every M <= 200.
fn c6_backend_agreement() -> Outcome {
    let pairs: Vec<(u64, u64)> = (1..=200u64).flat_map(|m| (1..=m).map(move |n| (n, m))).collect();
    let worst_f = pairs
        .par_iter()
        .map(|&(n, m)| {
            let p = CloneParams::new(n, m).unwrap();
            rel(cloner::fidelity::<ExactScalar>(p).to_f64(), cloner::fidelity::<LogScalar>(p).to_f64())
        })
        .reduce(|| 0.0, f64::max);
    ensure(worst_f <= 1e-10, || format!("fidelity relative gap {worst_f:e}"))?;

    // every Err for integral kappa, plus every 3rd remaining pair
    let info_pairs: Vec<(u64, u64)> = pairs
        .iter()
        .enumerate()
        .filter(|(i, &(n, m))| m % n == 0 || i % 3 == 0)
        .map(|(_, &p)| p)
        .collect();
    let worst_i = info_pairs
        .par_iter()
        .map(|&(n, m)| {
            let p = CloneParams::new(n, m).unwrap();
            let e = cloner::info_fidelity_profile::<ExactScalar>(p, n).unwrap();
            let l = cloner::info_fidelity_profile::<LogScalar>(p, n).unwrap();
            e.iter().zip(&l).map(|(a, b)| rel(a.to_f64(), b.to_f64())).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    ensure(worst_i <= 1e-10, || format!("info fidelity relative gap {worst_i:e}"))?;
    Ok(format!(
        "fidelity on {} pairs (max rel {worst_f:.1e}), info fidelity on {} pairs x all Err (max rel {worst_i:.1e})",
        pairs.len(),
        info_pairs.len()
    ))
}

fn random_state(rng: &mut ChaCha8Rng, d: usize) -> PureState {
    let amps = (0..d)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    PureState::normalized(amps).unwrap()
}

fn random_perp(rng: &mut ChaCha8Rng, psi: &PureState) -> PureState {
    let v = random_state(rng, psi.dim());
    let overlap = psi.inner(&v);
    let w: DVector<Complex64> = v.amplitudes() - psi.amplitudes() * overlap;
    PureState::normalized(w.iter().copied().collect()).unwrap()
}

fn random_observable(rng: &mut ChaCha8Rng, d: usize) -> Observable {
    let a = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>() * 4.0 - 2.0));
    let h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    Observable::new(h).unwrap()
}

/// The dephased expectation shift never exceeds (2 eps / N) ||Omega||.
fn c7_ensemble_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    for _ in 0..1000 {
        let d = rng.random_range(2..=4usize);
        let n = rng.random_range(1..=64usize);
        let members: Vec<PureState> = (0..n).map(|_| random_state(&mut rng, d)).collect();
        let mut corruptions = Vec::new();
        for i in 0..n {
            if rng.random_bool(0.25) {
                let beta = Complex64::from_polar(rng.random::<f64>().sqrt(), rng.random::<f64>() * std::f64::consts::TAU);
                corruptions.push(if d == 2 {
                    Corruption::new(i, beta)
                } else {
                    Corruption::with_perp(i, beta, random_perp(&mut rng, &members[i]))
                });
            }
        }
        let spec = EnsembleSpec::new(members, corruptions).map_err(|e| e.to_string())?;
        let omega = random_observable(&mut rng, d);
        let s = ensemble::expectation_shift(&spec, &omega).map_err(|e| e.to_string())?;
        // rounding allowance only; the bound itself is untouched
        if s.delta > s.bound + 1e-12 {
            violations += 1;
        }
        if s.bound > 0.0 {
            max_ratio = max_ratio.max(s.delta / s.bound);
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;

    let z = Observable::pauli_z();
    for (n, eps) in [(4usize, 1usize), (10, 3), (64, 5), (7, 7)] {
        let members = vec![PureState::basis(2, 0); n];
        let corr = (0..eps).map(|i| Corruption::new(i, Complex64::new(1.0, 0.0))).collect();
        let s = ensemble::expectation_shift(&EnsembleSpec::new(members, corr).unwrap(), &z).unwrap();
        let want = 2.0 * eps as f64 / n as f64;
        ensure((s.delta - want).abs() <= 1e-15 && (s.bound - want).abs() <= 1e-15, || {
            format!("N={n} eps={eps}: delta={} bound={} want {want}", s.delta, s.bound)
        })?;
    }
    let members = vec![PureState::basis(2, 0); 4];
    let s = ensemble::expectation_shift(
        &EnsembleSpec::new(members, vec![Corruption::new(0, Complex64::new(1.0, 0.0))]).unwrap(),
        &z,
    )
    .unwrap();
    ensure(s.delta == 0.5 && s.bound == 0.5, || format!("sigma_z flip: {s:?}"))?;
    Ok(format!("0 violations in 1000 specs (max delta/bound {max_ratio:.3}); full flips saturate"))
}

/// Independent large-N value. As N grows with M = kappa N, alpha_j^2 tends to
/// the geometric weights (1/kappa) r^j and C(M-N, j)/C(M, j) to r^j, with
/// r = 1 - 1/kappa; sum the resulting series term by term.
fn geometric_mixture_limit(kappa: u64) -> f64 {
    let r = 1.0 - 1.0 / kappa as f64;
    let mut sum = 0.0;
    let mut weight = 1.0 / kappa as f64;
    let mut overlap = 1.0;
    while weight * overlap > 1e-300 {
        sum += weight * overlap;
        weight *= r;
        overlap *= r;
    }
    sum
}

/// Richardson extrapolation over N = 1e3..1e5 reaches the geometric-mixture limit.
fn c8_limit() -> Outcome {
    let grid = sweep::geometric_grid(1_000, 100_000, 4);
    let mut notes = Vec::new();
    for kappa in [2u64, 8] {
        let table = sweep::limit_study(kappa, &grid, Backend::Log).map_err(|e| e.to_string())?;
        let ns = table.column("N").unwrap();
        let fs = table.column("F").unwrap();
        let lim = *table.column("extrapolated_limit").unwrap().last().unwrap();
        let oracle = geometric_mixture_limit(kappa);
        ensure((lim - oracle).abs() <= 1e-3, || format!("kappa={kappa}: extrapolated {lim} vs {oracle}"))?;
        let f4 = fs[ns.iter().position(|&n| n == 10_000.0).unwrap()];
        let f5 = *fs.last().unwrap();
        ensure(f4 > f5 && f5 > lim, || format!("kappa={kappa}: F(1e4)={f4}, F(1e5)={f5}, limit {lim}"))?;
        notes.push(format!("kappa={kappa}: {lim:.9} vs {oracle:.9}"));
    }
    Ok(notes.join("; "))
}

/// Identical `sweep` invocations write identical bytes.
fn c9_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_qclone");
    let runs: [&[&str]; 3] = [
        &["sweep", "fig2", "--n-max", "60"],
        &["sweep", "fig3", "--n", "1000"],
        &["sweep", "limit", "--kappa", "8", "--n-max", "20000"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let path = dir.path().join(format!("run{i}_{rep}.csv"));
            let status = Command::new(bin)
                .args(*args)
                .arg("--out")
                .arg(&path)
                .status()
                .map_err(|e| e.to_string())?;
            ensure(status.success(), || format!("{args:?} exited with {status}"))?;
            outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        ensure(!outputs[0].is_empty() && outputs[0] == outputs[1], || format!("{args:?}: outputs differ"))?;
    }
    Ok("fig2, fig3 and limit CSVs byte-identical across repeated runs".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("C1 info fidelity > 0.98 for Err >= 6 at N=1000", c1_threshold),
        ("C2 info fidelity nondecreasing, rapidly approaching 1", c2_fig3_shape),
        ("C3 fidelity decreasing in N, ordered in kappa", c3_fig2_shape),
        ("C4 brute-force oracle equivalence", c4_oracle),
        ("C5 exact identities", c5_exact_identities),
        ("C6 log vs exact backend agreement", c6_backend_agreement),
        ("C7 ensemble expectation-shift bound", c7_ensemble_bound),
        ("C8 large-N limit kappa/(2 kappa - 1)", c8_limit),
        ("C9 deterministic sweep output", c9_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("[PASS] {name} ({took:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name} ({took:.2?}): {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
