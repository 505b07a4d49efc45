//! Acceptance gate: one test per criterion, each printing a single
//! PASS line with the measured margin. Every numeric tolerance is stated
//! inline next to the assertion it guards.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trigsample::bounds::{
    self, MomentProfile, NonIidProfile, Part,
};
use trigsample::fourier::{FourierError, FourierSystem, SampleSet};
use trigsample::montecarlo::{
    run_eigen_sandwich, run_frobenius_moment, run_tail_experiment, RowFamily, Verdict,
};
use trigsample::spectrum::{cube_spectrum, Spectrum};
use trigsample::stirling::{assoc_stirling2, g_eval, g_tail_bound};
use trigsample::voronoi::{voronoi_weights_1d, voronoi_weights_mc, weighted_gram};

/// One-dimensional spectrum {0, 1, …, d−1}.
fn spectrum_1d(d: usize) -> Spectrum {
    Spectrum::new(1, (0..d).map(|k| vec![k as i64]).collect()).unwrap()
}

/// Counts partitions of {0,…,m−1} into exactly k blocks, each of size ≥ 2,
/// by direct enumeration: each element joins an existing block or opens a
/// new one (canonical order counts every partition once). Independent of
/// the library's recurrence.
fn brute_force_blocks(m: usize, k: usize) -> u64 {
    fn recurse(sizes: &mut Vec<usize>, remaining: usize, k: usize, count: &mut u64) {
        if remaining == 0 {
            if sizes.len() == k && sizes.iter().all(|&s| s >= 2) {
                *count += 1;
            }
            return;
        }
        for b in 0..sizes.len() {
            sizes[b] += 1;
            recurse(sizes, remaining - 1, k, count);
            sizes[b] -= 1;
        }
        if sizes.len() < k {
            sizes.push(1);
            recurse(sizes, remaining - 1, k, count);
            sizes.pop();
        }
    }
    let mut count = 0;
    recurse(&mut Vec::new(), m, k, &mut count);
    count
}

#[test]
fn criterion_01_stirling_matches_brute_force() {
    for m in 2..=10usize {
        for k in 1..=5usize {
            let expected = brute_force_blocks(m, k);
            let got = assoc_stirling2(m, k).to_u64().unwrap();
            assert_eq!(got, expected, "associated Stirling number mismatch at ({m}, {k})");
        }
    }
    println!("acceptance criterion 1: PASS — exact match with brute-force enumeration for 2 ≤ m ≤ 10, 1 ≤ k ≤ 5");
}

#[test]
fn criterion_02_generating_function_identity() {
    const M: usize = 12;
    const REL_TOL: f64 = 1e-9;
    let mut worst: f64 = 0.0;
    for z in [1.0f64, 2.0, 5.0] {
        // Taylor coefficients b_n of exp(g(x)) with g(x) = z(e^x − x − 1),
        // via b_n = (1/n)·Σ_{i≥1} i·g_i·b_{n−i} with g_i = z/i! for i ≥ 2.
        let mut factorial = vec![1.0f64; M + 1];
        for i in 1..=M {
            factorial[i] = factorial[i - 1] * i as f64;
        }
        let mut g = vec![0.0f64; M + 1];
        for (i, gi) in g.iter_mut().enumerate().take(M + 1).skip(2) {
            *gi = z / factorial[i];
        }
        let mut b = vec![0.0f64; M + 1];
        b[0] = 1.0;
        for n in 1..=M {
            let mut acc = 0.0;
            for i in 1..=n {
                acc += i as f64 * g[i] * b[n - i];
            }
            b[n] = acc / n as f64;
        }
        for m in 0..=M {
            // F_m(z) = Σ_k S₂(m, k)·z^k from the library's table.
            let mut f_m = 0.0;
            for k in 0..=m {
                f_m += assoc_stirling2(m, k).to_f64().unwrap() * z.powi(k as i32);
            }
            let series = factorial[m] * b[m];
            let scale = f_m.abs().max(1.0);
            let rel = (f_m - series).abs() / scale;
            worst = worst.max(rel);
            assert!(rel <= REL_TOL, "EGF mismatch at m = {m}, z = {z}: {f_m} vs {series}");
        }
    }
    println!("acceptance criterion 2: PASS — exponential generating function matches through m = 12 at z ∈ {{1, 2, 5}} (worst relative error {worst:.2e} ≤ 1e-9)");
}

#[test]
fn criterion_03_tail_bound_dominates() {
    const REL_TOL: f64 = 1e-12;
    let mut worst: f64 = 0.0;
    for m in 1..=30usize {
        for theta in [7.0 * m as f64, 10.0 * m as f64, 50.0 * m as f64] {
            let exact = g_eval(2 * m, theta);
            let tail = g_tail_bound(m, theta).unwrap();
            let slack = tail * REL_TOL;
            assert!(
                exact <= tail + slack,
                "tail bound violated at m = {m}, theta = {theta}: exact {exact} > bound {tail}"
            );
            if tail > 0.0 {
                worst = worst.max((exact - tail) / tail);
            }
        }
    }
    println!("acceptance criterion 3: PASS — geometric tail bound at m dominates G_2m for m ≤ 30, θ ∈ {{7m, 10m, 50m}} (worst signed excess {worst:.2e} ≤ 1e-12)");
}

#[test]
fn criterion_04_sample_size_thresholds() {
    // Each sample-size formula's n satisfies its defining inequality and
    // n − 1 does not.
    let grid_d = [5usize, 10, 40];
    let grid_eps = [0.3f64, 0.8];
    let grid_delta = [0.05f64, 0.01];

    for &d in &grid_d {
        for &eps in &grid_eps {
            for &delta in &grid_delta {
                // Fourier-family threshold.
                let n = bounds::fourier_min_n(d, eps, delta).unwrap();
                assert!(bounds::fourier_failure_bound(n, d, eps).unwrap() <= delta);
                assert!(bounds::fourier_failure_bound(n - 1, d, eps).unwrap() > delta);

                // Simple uniform sufficient size: the ceiling of a closed form.
                let n = bounds::uniform_simple_min_n(d, eps, delta).unwrap();
                let value = 3.0 * d as f64 * std::f64::consts::E / (eps * eps)
                    * ((d as f64 / delta).ln() + 2.0 - (std::f64::consts::E - 1.0).ln());
                assert!(n as f64 >= value && ((n - 1) as f64) < value);

                // Tuned uniform threshold at α = ε²/2.
                let alpha = eps * eps / 2.0;
                let n = bounds::uniform_min_n(d, eps, alpha, delta).unwrap();
                let rhs = (d as f64 / (delta * (1.0 - alpha))).ln() / (eps * eps / alpha).ln();
                let req = rhs.ceil().max(0.0) as u64;
                let m_of = |n: u64| (alpha * n as f64 / (3.0 * d as f64)).floor() as u64;
                assert!(m_of(n) >= req && m_of(n - 1) < req);

                // Closed-form sufficient size with the unspecified constant c = 1.
                let n = bounds::better_bound_min_n(d, eps, delta, 1.0).unwrap();
                let t = (2.0 / delta).ln() / eps;
                let ln_d = (d as f64).ln();
                let root = (d as f64).sqrt() + (d as f64 * ln_d).sqrt();
                let needed = (d as f64).max(t * d as f64 * ln_d).max(t * t * root * root);
                assert!(n as f64 >= needed && ((n - 1) as f64) < needed);
            }
        }
    }

    // Determinant/condition threshold n ≥ K·ln(K/δ).
    for (m, dim, gamma, delta) in
        [(1u32, 1usize, 0.3f64, 0.05f64), (1, 2, 0.7, 0.01), (3, 1, 0.7, 0.05), (5, 1, 0.5, 0.05)]
    {
        let n = bounds::detprob_min_n(m, dim, gamma, delta).unwrap();
        let k = (2.0 * std::f64::consts::PI * dim as f64 * m as f64
            / (gamma * std::f64::consts::LN_2))
            .powi(dim as i32);
        let threshold = k * (k / delta).ln();
        assert!(n as f64 >= threshold && ((n - 1) as f64) < threshold);
    }

    // The generic solver agrees with the closed-form Fourier threshold on a
    // 12-point grid.
    for &d in &[3usize, 6, 12] {
        for &eps in &[0.4f64, 0.7] {
            for &delta in &[0.1f64, 0.02] {
                let closed = bounds::fourier_min_n(d, eps, delta).unwrap();
                let solved = bounds::solve_min_n(
                    |n| bounds::fourier_failure_bound(n, d, eps).unwrap(),
                    delta,
                )
                .unwrap();
                assert_eq!(closed, solved, "solver disagrees at D = {d}, eps = {eps}, delta = {delta}");
            }
        }
    }

    println!("acceptance criterion 4: PASS — every sample-size formula sits exactly at its defining threshold; generic solver matches the closed form on a 12-point grid");
}

#[test]
fn criterion_05_bound_family_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut improved_checked = 0usize;
    for _ in 0..20 {
        let n = rng.gen_range(1u64..1_000_000);
        let d = rng.gen_range(1usize..50);
        let eps = rng.gen_range(0.01f64..2.0);
        let c = rng.gen_range(0.0f64..3.0);
        let b = rng.gen_range(0.0f64..2.0);

        // Plain bounded form is bit-identical to the generic i.i.d. bound
        // with (v, M) = (b, C/3).
        let plain = bounds::bounded_failure_bound(n, d, eps, c, b, false).unwrap();
        let main = bounds::main_failure_bound(
            n,
            d,
            eps,
            &MomentProfile::iid(b, c / 3.0).unwrap(),
            false,
        )
        .unwrap();
        assert_eq!(plain.to_bits(), main.to_bits());

        // A uniform per-entry table reproduces the i.i.d. bound exactly.
        let v = rng.gen_range(0.0f64..2.0);
        let m = rng.gen_range(0.0f64..2.0);
        let table = MomentProfile::NonIid(NonIidProfile::uniform(d, v, m).unwrap());
        let psi = bounds::noniid_psi(n, d, eps, &table, false).unwrap();
        let iid = bounds::main_failure_bound(
            n,
            d,
            eps,
            &MomentProfile::iid(v, m).unwrap(),
            false,
        )
        .unwrap();
        assert_eq!(psi.to_bits(), iid.to_bits());

        // The improved bounded form never exceeds the plain one.
        if c > 0.0 && b > 0.0 {
            let improved = bounds::bounded_failure_bound(n, d, eps, c, b, true).unwrap();
            assert!(improved <= plain, "improved {improved} > plain {plain}");
            improved_checked += 1;
        }
    }
    assert!(improved_checked >= 15);
    println!("acceptance criterion 5: PASS — bounded ≡ generic and uniform-table ≡ i.i.d. bit-for-bit on 20 random parameter sets; improved ≤ plain on all {improved_checked} defined cases");
}

#[test]
fn criterion_06_fourier_tail_grid() {
    const TRIALS: usize = 2000;
    const DELTA: f64 = 0.1;
    let mut max_rate: f64 = 0.0;
    for (cell, &d) in [2usize, 4, 8].iter().enumerate() {
        for (sub, &eps) in [0.3f64, 0.5].iter().enumerate() {
            let n = bounds::fourier_min_n(d, eps, DELTA).unwrap() as usize;
            let family = RowFamily::FourierUniform { spectrum: spectrum_1d(d) };
            let seed = 600 + (cell * 2 + sub) as u64;
            let report = run_tail_experiment(&family, n, eps, TRIALS, seed).unwrap();
            let fourier = report
                .bounds
                .iter()
                .find(|b| b.name == "fourier")
                .expect("fourier bound attached");
            assert!(fourier.value <= DELTA, "min_n did not push the bound below delta");
            assert!(
                report.cp99_lower <= fourier.value,
                "99% lower confidence limit {} exceeds the bound {} at D = {d}, eps = {eps}",
                report.cp99_lower,
                fourier.value
            );
            assert!(!report.any_certifiable_violation(), "violation at D = {d}, eps = {eps}");
            max_rate = max_rate.max(report.empirical_rate);
        }
    }
    println!("acceptance criterion 6: PASS — empirical tail rates consistent with the Fourier bound in all 6 cells (largest rate {max_rate:.4} over 2000 trials each)");
}

#[test]
fn criterion_07_eigenvalue_sandwich() {
    const TRIALS: usize = 1000;
    const EPS: f64 = 0.5;
    const DELTA: f64 = 0.05;
    let mut min_held: f64 = 1.0;
    for &d in &[8usize, 16] {
        let n = bounds::uniform_simple_min_n(d, EPS, DELTA).unwrap() as usize;
        let family = RowFamily::FourierUniform { spectrum: spectrum_1d(d) };
        let report = run_eigen_sandwich(&family, n, EPS, TRIALS, 700 + d as u64).unwrap();
        // Failure rate significantly above δ would contradict the guarantee:
        // require the 99% lower confidence limit to stay at or below δ.
        assert!(
            report.cp99_lower <= DELTA,
            "sandwich failure rate too high at D = {d}: {}",
            report.empirical_rate
        );
        min_held = min_held.min(report.held_fraction());
    }
    println!("acceptance criterion 7: PASS — eigenvalue sandwich held in at least {:.1}% of 1000 trials for D ∈ {{8, 16}} (allowed minimum 95% less binomial allowance)", 100.0 * min_held);
}

#[test]
fn criterion_08_frobenius_moments() {
    const TRIALS: usize = 5000;
    let mut worst_ratio: f64 = 0.0;
    for &m in &[1usize, 2] {
        for &d in &[4usize, 8] {
            for &n in &[32usize, 128] {
                let family = RowFamily::FourierUniform { spectrum: spectrum_1d(d) };
                let seed = 800 + (m * 10 + d) as u64 + n as u64;
                let report = run_frobenius_moment(&family, n, m, TRIALS, seed).unwrap();
                assert_eq!(
                    report.verdict,
                    Verdict::Consistent,
                    "empirical moment {} exceeds bound {} + 3·SE at m = {m}, D = {d}, n = {n}",
                    report.empirical_mean,
                    report.theoretical
                );
                worst_ratio = worst_ratio.max(report.empirical_mean / report.theoretical);
            }
        }
    }
    println!("acceptance criterion 8: PASS — mean ‖(n⁻¹U*U − I)^m‖_F² within the moment bound in all 8 cells (largest empirical/theoretical ratio {worst_ratio:.3})");
}

#[test]
fn criterion_09_scaled_sign_psi() {
    const TRIALS: usize = 2000;
    const EPS: f64 = 1.25;
    const DELTA: f64 = 0.1;
    for &d in &[2usize, 4] {
        // Alternating scales 1, 2 give mean σ⁴ = 8.5 and max σ²/3 = 4/3 at
        // even n; solve for the smallest n with Ψ ≤ 0.1 and round up to even
        // so the alternating pattern stays balanced.
        let even_profile = MomentProfile::NonIid(
            NonIidProfile::from_fn(d, |part, k, j| {
                if k == j || part == Part::Im {
                    (0.0, 0.0)
                } else {
                    (8.5, 4.0 / 3.0)
                }
            })
            .unwrap(),
        );
        let solved = bounds::solve_min_n(
            |n| bounds::noniid_psi(n, d, EPS, &even_profile, false).unwrap(),
            DELTA,
        )
        .unwrap();
        let n = (solved + solved % 2) as usize;
        let sigmas: Vec<f64> =
            (0..n).map(|t| if t % 2 == 0 { 1.0 } else { 2.0 }).collect();
        let family = RowFamily::ScaledSign { sigmas, d };
        let psi = bounds::noniid_psi(
            n as u64,
            d,
            EPS,
            &family.moment_profile(n).unwrap(),
            false,
        )
        .unwrap();
        assert!(psi <= DELTA, "solved n = {n} does not push Ψ to {DELTA}");
        let report = run_tail_experiment(&family, n, EPS, TRIALS, 900 + d as u64).unwrap();
        assert!(!report.any_certifiable_violation(), "Ψ violated at D = {d}");
        let psi_cmp = report.bounds.iter().find(|b| b.name == "psi").unwrap();
        assert_eq!(psi_cmp.verdict, Verdict::Consistent);
    }
    println!("acceptance criterion 9: PASS — scaled-sign rows (σ alternating 1, 2) stay consistent with Ψ ≤ 0.1 for D ∈ {{2, 4}} over 2000 trials");
}

#[test]
fn criterion_10_reconstruction() {
    const TRIALS: usize = 100;
    const REL_TOL: f64 = 1e-8;
    let spectrum = cube_spectrum(2, 2).unwrap(); // D = 25
    let d = spectrum.len();
    let n = 2 * d;
    let mut successes = 0usize;
    let mut worst: f64 = 0.0;
    for trial in 0..TRIALS as u64 {
        let samples = SampleSet::uniform_with_stream(2, n, 1000, trial).unwrap();
        let fs = FourierSystem::build(spectrum.clone(), samples).unwrap();
        let mut coeff_rng = trigsample::rng::stream(1001, trial);
        let coeffs: Vec<Complex64> = (0..d)
            .map(|_| {
                Complex64::new(
                    coeff_rng.gen::<f64>() * 2.0 - 1.0,
                    coeff_rng.gen::<f64>() * 2.0 - 1.0,
                )
            })
            .collect();
        let truth = trigsample::fourier::Coefficients::new(coeffs.clone());
        let y = fs.apply(&truth).unwrap();
        let recovered = fs.reconstruct(&y).unwrap();
        let num: f64 = recovered
            .values()
            .iter()
            .zip(&coeffs)
            .map(|(a, b)| (*a - *b).norm_sqr())
            .sum();
        let den: f64 = coeffs.iter().map(|a| a.norm_sqr()).sum();
        let rel = (num / den).sqrt();
        worst = worst.max(rel);
        if rel <= REL_TOL {
            successes += 1;
        }
    }
    assert_eq!(successes, TRIALS, "worst relative error {worst}");

    // n = D − 1 must always be refused.
    for seed in 0..5u64 {
        let samples = SampleSet::uniform(2, d - 1, seed).unwrap();
        let fs = FourierSystem::build(spectrum.clone(), samples).unwrap();
        let y = vec![Complex64::new(0.0, 0.0); d - 1];
        assert!(matches!(fs.reconstruct(&y), Err(FourierError::Underdetermined { .. })));
    }
    println!("acceptance criterion 10: PASS — 100/100 reconstructions at n = 2D accurate to {worst:.2e} ≤ 1e-8; n = D − 1 refused in all attempts");
}

#[test]
fn criterion_11_voronoi_weights_and_conditioning() {
    // (a) Exact one-dimensional weights: exact unit sum, and agreement with
    // the Monte Carlo estimator within three standard errors.
    let mut rng = ChaCha8Rng::seed_from_u64(1100);
    for set in 0..20 {
        let n = rng.gen_range(2usize..=40);
        let flat: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let exact = voronoi_weights_1d(&flat).unwrap();
        let total: f64 = exact.weights().iter().sum();
        assert_eq!(total.to_bits(), 1.0f64.to_bits(), "weights must sum to exactly 1");

        let points: Vec<Vec<f64>> = flat.iter().map(|&x| vec![x]).collect();
        let samples = SampleSet::from_points(
            1,
            points,
            0,
            trigsample::fourier::DistributionTag::Custom("acceptance".into()),
        )
        .unwrap();
        let mc = voronoi_weights_mc(&samples, 32_000, 1200 + set).unwrap();
        let se = mc.mc_std_error().unwrap();
        for (k, (we, wm)) in exact.weights().iter().zip(mc.weights()).enumerate() {
            assert!(
                (we - wm).abs() <= 3.0 * se + 1e-12,
                "set {set}, weight {k}: exact {we} vs MC {wm} (3·SE = {})",
                3.0 * se
            );
        }
    }

    // (b) Conditioning of the weighted Gram matrix at the guaranteed sample
    // size: d = 1, degree m = 5 (D = 11), γ = 0.5, δ = 0.05.
    const TRIALS: usize = 500;
    let spectrum = cube_spectrum(5, 1).unwrap();
    let n = bounds::detprob_min_n(5, 1, 0.5, 0.05).unwrap() as usize;
    let cond_limit = bounds::detprob_cond_bound(0.5).unwrap();
    let mut violations = 0usize;
    for trial in 0..TRIALS as u64 {
        let samples = SampleSet::uniform_with_stream(1, n, 1300, trial).unwrap();
        let flat: Vec<f64> = samples.points().iter().map(|p| p[0]).collect();
        let w = voronoi_weights_1d(&flat).unwrap();
        let fs = FourierSystem::build(spectrum.clone(), samples).unwrap();
        let tw = weighted_gram(&fs, &w).unwrap();
        let cond = tw.condition_number().unwrap();
        if !(cond <= cond_limit) {
            violations += 1;
        }
    }
    let (cp_lower, _) = trigsample::montecarlo::clopper_pearson_99(violations, TRIALS);
    assert!(
        cp_lower <= 0.05,
        "condition-number guarantee violated in {violations}/{TRIALS} trials"
    );
    println!("acceptance criterion 11: PASS — exact 1d weights sum to 1 bit-exactly and match Monte Carlo within 3·SE on 20 sets; cond(T^w) ≤ {cond_limit:.3} in {}/{TRIALS} trials at n = {n}", TRIALS - violations);
}

#[test]
fn criterion_12_growth_rates() {
    const EPS: f64 = 0.5;
    const DELTA: f64 = 0.01;
    const LIMIT: f64 = 0.15;
    let ds = [50usize, 100, 200, 400];

    let simple: Vec<f64> = ds
        .iter()
        .map(|&d| {
            bounds::uniform_simple_min_n(d, EPS, DELTA).unwrap() as f64
                / (d as f64 * (d as f64).ln())
        })
        .collect();
    let fourier: Vec<f64> = ds
        .iter()
        .map(|&d| {
            bounds::fourier_min_n(d, EPS, DELTA).unwrap() as f64
                / (d as f64 * d as f64 * (d as f64).ln())
        })
        .collect();

    let mut worst: f64 = 0.0;
    for pair in simple.windows(2) {
        let rel = (pair[1] - pair[0]).abs() / pair[0];
        assert!(rel < LIMIT, "simple-form ratio varies by {rel:.3} across a doubling");
        worst = worst.max(rel);
    }
    for pair in fourier.windows(2) {
        let rel = (pair[1] - pair[0]).abs() / pair[0];
        assert!(rel < LIMIT, "Fourier-form ratio varies by {rel:.3} across a doubling");
        worst = worst.max(rel);
    }
    println!("acceptance criterion 12: PASS — n/(D·lnD) and n/(D²·lnD) vary by at most {:.1}% across consecutive doublings of D ∈ {{50, 100, 200, 400}} (limit 15%)", 100.0 * worst);
}
