//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vilenkin::frame::*;
use vilenkin::grid::Window;
use vilenkin::group::{character, pairing, DigitSequence, Side};
use vilenkin::mask::CascadeOptions;
use vilenkin::mra::{blocked_set, default_zero_tol, is_blocked, mra_verdict, CosetSet};
use vilenkin::walsh::{chrestenson, walsh_eval, Algorithm, Direction};
use vilenkin::{io, Complex64};

const HAAR2_MASK: &str = include_str!("../../cli/tests/fixtures/haar2.mask");
const HAAR3_MASK: &str = include_str!("../../cli/tests/fixtures/haar3.mask");
const BLOCKED_MASK: &str = include_str!("../../cli/tests/fixtures/blocked.mask");
const HAAR2_FILTER: &str = include_str!("../../cli/tests/fixtures/haar2.filter");
const HAAR3_FILTER: &str = include_str!("../../cli/tests/fixtures/haar3.filter");

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    check(
        elapsed <= Duration::from_secs(limit_secs),
        format!("took {:.2?}, limit {limit_secs} s", elapsed),
    )
}

fn random_sequence(p: u8, side: Side, rng: &mut ChaCha8Rng) -> DigitSequence {
    let lo = rng.gen_range(-10..=2);
    let len = rng.gen_range(0..12);
    let digits = (0..len).map(|_| rng.gen_range(0..p)).collect();
    DigitSequence::new(p, side, lo, digits).unwrap()
}

fn group_laws() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for t in 0..10_000 {
        let p = [2u8, 3, 5, 7][t % 4];
        let side = if t % 2 == 0 { Side::Primal } else { Side::Dual };
        let x = random_sequence(p, side, &mut rng);
        let y = random_sequence(p, side, &mut rng);
        let z = random_sequence(p, side, &mut rng);
        let sum = |a: &DigitSequence, b: &DigitSequence| a.add(b).unwrap();
        check(sum(&sum(&x, &y), &z) == sum(&x, &sum(&y, &z)), "associativity")?;
        check(sum(&x, &y) == sum(&y, &x), "commutativity")?;
        let px = (1..p).fold(x.clone(), |acc, _| sum(&acc, &x));
        check(px.is_zero(), "torsion")?;
        check(sum(&x, &x.negate()).is_zero() && x.sub(&y).unwrap() == sum(&x, &y.negate()), "inverse")?;

        let xp = random_sequence(p, Side::Primal, &mut rng);
        let yp = random_sequence(p, Side::Primal, &mut rng);
        let w = random_sequence(p, Side::Dual, &mut rng);
        let v = random_sequence(p, Side::Dual, &mut rng);
        let pu = p as u32;
        let exact = (pairing(&xp, &w).unwrap() + pairing(&yp, &w).unwrap()) % pu;
        check(pairing(&sum(&xp, &yp), &w).unwrap() == exact, "pairing additivity in x")?;
        let exact = (pairing(&xp, &w).unwrap() + pairing(&xp, &v).unwrap()) % pu;
        check(pairing(&xp, &sum(&w, &v)).unwrap() == exact, "pairing additivity in ω")?;
        let lhs = character(&sum(&xp, &yp), &w).unwrap();
        let rhs = character(&xp, &w).unwrap() * character(&yp, &w).unwrap();
        worst = worst.max((lhs - rhs).norm());
        let lhs = character(&xp, &sum(&w, &v)).unwrap();
        let rhs = character(&xp, &w).unwrap() * character(&xp, &v).unwrap();
        worst = worst.max((lhs - rhs).norm());
    }
    check(worst <= 1e-12, format!("character bilinearity residual {worst:e}"))?;
    for p in [2u8, 3, 5, 7] {
        for alpha in 0..1_000_000u64 {
            let h = DigitSequence::from_integer(p, alpha, Side::Primal).unwrap();
            if h.lambda_value().to_u64() != Some(alpha) {
                return Err(format!("lambda round trip failed for p={p}, alpha={alpha}"));
            }
        }
    }
    within(start.elapsed(), 5)?;
    Ok(format!("10000 law checks, bilinearity {worst:e}, {:.2?}", start.elapsed()))
}

fn walsh_orthogonality() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (p, n) in [(2u8, 6u32), (3, 4), (5, 3)] {
        let cells = Window::new(p, 1, n as i64).unwrap();
        let len = cells.len() as u64;
        let table: Vec<Vec<Complex64>> = (0..len)
            .map(|a| {
                (0..cells.len())
                    .map(|s| walsh_eval(a, &cells.representative(s, Side::Dual)).unwrap())
                    .collect()
            })
            .collect();
        for a in 0..len as usize {
            for b in 0..len as usize {
                let g: Complex64 =
                    table[a].iter().zip(&table[b]).map(|(x, y)| x * y.conj()).sum::<Complex64>() / len as f64;
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
    }
    check(worst <= 1e-12, format!("Gram residual {worst:e}"))?;
    within(start.elapsed(), 10)?;
    Ok(format!("Gram residual {worst:e}, {:.2?}", start.elapsed()))
}

fn fast_transform() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let cases: Vec<(u8, u32)> = [(2u8, 12u32), (3, 8), (5, 5), (7, 4)]
        .iter()
        .flat_map(|&(p, top)| (1..=top).map(move |n| (p, n)))
        .collect();
    let mut naive_time = Duration::ZERO;
    let mut fast_time = Duration::ZERO;
    for (p, n) in cases {
        let len = (p as usize).pow(n);
        for trial in 0..100 {
            let v: Vec<Complex64> =
                (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let directions: &[Direction] =
                if trial < 5 { &[Direction::Forward, Direction::Inverse] } else { &[Direction::Forward] };
            for &dir in directions {
                let t0 = Instant::now();
                let slow = chrestenson(p, &v, dir, Algorithm::Naive).unwrap();
                let t1 = Instant::now();
                let fast = chrestenson(p, &v, dir, Algorithm::Fast).unwrap();
                let t2 = Instant::now();
                if (p, n) == (3, 8) {
                    naive_time += t1 - t0;
                    fast_time += t2 - t1;
                }
                let err = slow.iter().zip(&fast).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                worst = worst.max(err);
            }
        }
    }
    let speedup = naive_time.as_secs_f64() / fast_time.as_secs_f64();
    check(worst <= 1e-10, format!("fast/naive mismatch {worst:e}"))?;
    check(speedup >= 5.0, format!("speedup at 3^8 is only {speedup:.1}x"))?;
    Ok(format!("max mismatch {worst:e}, speedup at 3^8 {speedup:.0}x"))
}

fn haar_fixtures() -> Outcome {
    let mut notes = Vec::new();
    for (text, k) in [(HAAR2_MASK, 6u32), (HAAR3_MASK, 4)] {
        let m = io::parse_mask(text).map_err(|e| e.to_string())?;
        let d = m.diagnostics();
        let diag = d.qmf_residual.max((d.coeff_sum - 1.0).norm()).max((d.theta_value - 1.0).norm());
        check(diag <= 1e-12, format!("p={} diagnostics residual {diag:e}", m.p()))?;
        let s = m.scaling_checks(k).map_err(|e| e.to_string())?;
        let worst = s
            .strang_fix_residual
            .max(s.partition_residual)
            .max(s.two_scale_residual)
            .max(s.ortho_residual);
        check(worst <= 1e-10 && s.lowpass_limit_ok, format!("p={} scaling residual {worst:e}", m.p()))?;
        let v = mra_verdict(&m, k, 1e-10).map_err(|e| e.to_string())?;
        check(v.is_mra && v.blocked.is_none() && !v.inconsistent, format!("p={} verdict {}", m.p(), v.verdict_str()))?;
        let c = m.cascade(8, CascadeOptions::default()).map_err(|e| e.to_string())?;
        check(c.converged && c.iterations <= 2, format!("p={} cascade took {} iterations", m.p(), c.iterations))?;
        check(c.phi.values().iter().all(|z| *z == Complex64::new(1.0, 0.0)), "cascade is not 1_U")?;
        notes.push(format!("p={} residual {worst:e}", m.p()));
    }
    Ok(notes.join(", "))
}

fn blocked_mask() -> Outcome {
    let m = io::parse_mask(BLOCKED_MASK).map_err(|e| e.to_string())?;
    let tol = default_zero_tol(&m);
    let set = blocked_set(&m, tol).ok_or("no blocked set found")?;
    check(set == CosetSet::from_indices(2, 1, [1]), format!("blocked set {set}"))?;
    check(is_blocked(&m, &set, tol), "returned set fails the blocked clauses")?;
    let ortho = m.scaling_checks(4).map_err(|e| e.to_string())?.ortho_residual;
    check(ortho > 0.4, format!("ortho residual {ortho}"))?;
    let v = mra_verdict(&m, 4, 1e-10).map_err(|e| e.to_string())?;
    check(!v.is_mra && !v.inconsistent, format!("verdict {} inconsistent={}", v.verdict_str(), v.inconsistent))?;
    Ok(format!("blocked={set}, ortho residual {ortho:.3}"))
}

/// (p, K) for the random-filter runs, with R = 3.
const RANDOM_CASES: [(u8, u32); 3] = [(2, 4), (3, 2), (5, 1)];

fn random_system(p: u8, k: u32, seed: u64) -> (GeneralizedFilter, PseudoScaling, MultiwaveletSpectrum) {
    let f = random_filter(p, 3, seed).unwrap();
    let phi = build_pseudo_scaling(&f, k).unwrap();
    let psi = pfmw_build(&f, &phi, 0, &Modulators::identity(p), HighPassForm::Filter).unwrap();
    (f, phi, psi)
}

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let (mut c1, mut c2) = (0.0f64, 0.0f64);
    for (p, k) in RANDOM_CASES {
        for seed in 0..50 {
            let (f, _, psi) = random_system(p, k, seed);
            let v = validate_filter(&f, FilterMode::Classical, 1e-12);
            check(v.passed(), format!("p={p} seed={seed} filter invalid"))?;
            let r = parseval_check(&psi, 32, 8, 1e-8).map_err(|e| e.to_string())?;
            check(r.passed(), format!("p={p} seed={seed}: {r}"))?;
            c1 = c1.max(r.cond1_residual);
            c2 = c2.max(r.cond2_residual);
        }
    }
    within(start.elapsed(), 60)?;
    Ok(format!("150 filters, cond1 {c1:e}, cond2 {c2:e}, {:.2?}", start.elapsed()))
}

fn implication() -> Outcome {
    let mut filters: Vec<(GeneralizedFilter, u32)> = Vec::new();
    for (p, k) in RANDOM_CASES {
        filters.extend((0..50).map(|seed| (random_filter(p, 3, seed).unwrap(), k)));
    }
    filters.push((io::parse_filter(HAAR2_FILTER).unwrap(), 4));
    filters.push((io::parse_filter(HAAR3_FILTER).unwrap(), 3));
    // m_0 vanishes at the origin: a valid filter that is not low-pass
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    filters.push((GeneralizedFilter::new(2, 1, vec![vec![zero, one], vec![one, zero]]).unwrap(), 4));

    let (mut passing, mut counterexamples) = (0, 0);
    for (f, k) in &filters {
        let low_pass = low_pass_check(f, *k, 1e-9).map_err(|e| e.to_string())?.passed();
        for form in [HighPassForm::Filter, HighPassForm::ConjugateFilter] {
            let frame = build_pseudo_scaling(f, *k)
                .and_then(|phi| pfmw_build(f, &phi, 0, &Modulators::identity(f.p()), form))
                .and_then(|psi| parseval_check(&psi, 32, 8, 1e-8))
                .map(|r| r.passed())
                .unwrap_or(false);
            if frame {
                passing += 1;
                if !low_pass {
                    counterexamples += 1;
                }
            }
        }
    }
    check(counterexamples == 0, format!("{counterexamples} counterexamples"))?;
    check(passing > 0, "no case passed the frame check")?;
    Ok(format!("{} cases, {passing} frames, 0 counterexamples", 2 * filters.len()))
}

fn telescoping() -> Outcome {
    let mut worst = 0.0f64;
    let fixtures = [(io::parse_filter(HAAR2_FILTER).unwrap(), 4u32), (io::parse_filter(HAAR3_FILTER).unwrap(), 3)];
    for (f, k) in &fixtures {
        let phi = build_pseudo_scaling(f, *k).map_err(|e| e.to_string())?;
        worst = worst.max(telescoping_check(f, &phi, 8));
    }
    for (p, k) in RANDOM_CASES {
        for seed in 0..10 {
            let (f, phi, _) = random_system(p, k, seed);
            worst = worst.max(telescoping_check(&f, &phi, 8));
        }
    }
    check(worst <= 1e-10, format!("telescoping residual {worst:e}"))?;
    Ok(format!("residual {worst:e}"))
}

fn frame_oracle_check() -> Outcome {
    let mut notes = Vec::new();
    for text in [HAAR2_FILTER, HAAR3_FILTER] {
        let f = io::parse_filter(text).unwrap();
        let phi = build_pseudo_scaling(&f, 3).map_err(|e| e.to_string())?;
        let psi = pfmw_build(&f, &phi, 0, &Modulators::identity(f.p()), HighPassForm::Filter)
            .map_err(|e| e.to_string())?;
        let full = frame_oracle(&psi, 8, 3, 100, 7).map_err(|e| e.to_string())?;
        check(!full.degenerate && full.statistic <= 1e-6, format!("p={} deviation {:e}", f.p(), full.statistic))?;
        let half = frame_oracle(&psi.scaled(Complex64::new(0.5, 0.0)), 8, 3, 100, 7).map_err(|e| e.to_string())?;
        check(
            (half.statistic - 0.75).abs() <= 1e-6,
            format!("p={} scaled deviation {}", f.p(), half.statistic),
        )?;
        notes.push(format!("p={} {:e} / {:.9}", f.p(), full.statistic, half.statistic));
    }
    Ok(notes.join(", "))
}

fn cocycles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for t in 0..100 {
        let p = [2u8, 3, 5][t % 3];
        let r = 1 + (t / 3 % 3) as u32;
        let mut mu: Vec<Complex64> = (0..(p as usize).pow(r))
            .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        mu[0] = Complex64::new(1.0, 0.0);
        let sol = solve_v(p, r, &mu, 4).map_err(|e| e.to_string())?;
        worst = worst.max(sol.residual);
    }
    check(worst <= 1e-10, format!("cocycle residual {worst:e}"))?;
    Ok(format!("residual {worst:e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("group and character laws", group_laws),
        ("Walsh orthogonality", walsh_orthogonality),
        ("fast transform", fast_transform),
        ("Haar fixtures", haar_fixtures),
        ("blocked mask", blocked_mask),
        ("random filters give Parseval frames", end_to_end),
        ("Parseval frames are low-pass", implication),
        ("telescoping identity", telescoping),
        ("frame oracle", frame_oracle_check),
        ("cocycle solutions", cocycles),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        match outcome {
            Ok(note) => println!("PASS {:>2} {name}: {note} [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
