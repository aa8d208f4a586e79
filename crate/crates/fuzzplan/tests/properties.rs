//! Property suite: structural invariants, reduction identities, and the
//! independent oracles for the tail sums, the band extremizer and the
//! integer search.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fuzzplan::design::{design_gmds, OCRequirement, SearchLimits};
use fuzzplan::fuzzy::{FuzzyNumber, PentagonalFuzzy, TriangularFuzzy};
use fuzzplan::fuzzyprob::pa_band;
use fuzzplan::interval::Interval;
use fuzzplan::kernels::{pa_gmds, pa_ssp, tail_cdf, DistModel, PlanParams, SspParams};

// ---------------------------------------------------------------------------
// Exact-rational enumeration oracle for the binomial tail.
//
// Every f64 fraction is a dyadic rational, so the entire tail sum is exact
// rational arithmetic; only the final conversion rounds.

fn big_rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let negative = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().abs();
    // Scale the quotient into an ~80-bit integer so the division keeps far
    // more precision than f64 needs, then undo the scaling.
    let shift = 80i64 - (num.bits() as i64 - den.bits() as i64);
    let scaled = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        (num >> (-shift) as u64) / den
    };
    let (_, digits) = scaled.to_u64_digits();
    let mut mantissa = 0.0f64;
    for (i, d) in digits.iter().enumerate() {
        mantissa += (*d as f64) * 2f64.powi(64 * i as i32);
    }
    let value = mantissa * 2f64.powi(-shift as i32);
    if negative {
        -value
    } else {
        value
    }
}

fn exact_binomial_tail(c: u32, n: u32, p: f64) -> f64 {
    if p == 0.0 {
        return 1.0;
    }
    if p == 1.0 {
        return if c >= n { 1.0 } else { 0.0 };
    }
    // p is dyadic: p = a / 2^s exactly, so the whole sum is the integer
    // sum(C(n,d) a^d (2^s - a)^(n-d)) over the denominator 2^(sn). Staying
    // in integers avoids any rounding until the final conversion.
    let dyadic = BigRational::from_float(p).expect("finite fraction");
    let a = dyadic.numer().clone();
    let two_s = dyadic.denom().clone();
    let b = &two_s - &a;

    let mut a_pow = BigInt::one();
    let mut b_pow = b.pow(n);
    let mut coeff = BigInt::one();
    let mut sum = BigInt::zero();
    for d in 0..=c.min(n) {
        if d > 0 {
            coeff = coeff * BigInt::from(n - d + 1) / BigInt::from(d);
            a_pow *= &a;
            b_pow /= &b;
        }
        sum += &coeff * &a_pow * &b_pow;
    }
    big_rational_to_f64(&BigRational::new(sum, two_s.pow(n)))
}

#[test]
fn a7_tail_cdf_exact_rational_oracle() {
    for n in (1..=200u32).step_by(9) {
        for &p in &[0.0013, 0.02, 0.1, 0.37, 0.5, 0.77, 0.995] {
            for &c in &[0, 1, n / 3, n / 2, n.saturating_sub(1), n] {
                let got = tail_cdf(c, n, p, DistModel::Binomial).unwrap();
                let want = exact_binomial_tail(c, n, p);
                assert!(
                    (got - want).abs() <= 1e-12,
                    "tail(c={c}, n={n}, p={p}): {got} vs exact {want}"
                );
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.random_range(1..=200u32);
        let c = rng.random_range(0..=n);
        let p = rng.random::<f64>();
        let got = tail_cdf(c, n, p, DistModel::Binomial).unwrap();
        let want = exact_binomial_tail(c, n, p);
        assert!(
            (got - want).abs() <= 1e-12,
            "tail(c={c}, n={n}, p={p}): {got} vs exact {want}"
        );
    }
    eprintln!("tail sums vs exact rational enumeration (n <= 200): PASS");
}

#[test]
fn big_rational_conversion_sanity() {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    assert_eq!(big_rational_to_f64(&half), 0.5);
    let tiny = BigRational::new(BigInt::from(1), BigInt::from(10).pow(40));
    assert!((big_rational_to_f64(&tiny) - 1e-40).abs() < 1e-53);
    let neg = BigRational::new(BigInt::from_slice(Sign::Minus, &[3]), BigInt::from(4));
    assert_eq!(big_rational_to_f64(&neg), -0.75);
}

// ---------------------------------------------------------------------------
// Cut nestedness on random fuzzy numbers.

#[test]
fn a7_cut_nestedness_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let levels: Vec<f64> = (0..=10).map(|i| f64::from(i) / 10.0).collect();
    for i in 0..1000 {
        let cuts: Vec<Interval> = if i % 2 == 0 {
            let mut xs = [rng.random::<f64>(), rng.random(), rng.random()];
            xs.sort_by(f64::total_cmp);
            let t = TriangularFuzzy::new(xs[0], xs[1], xs[2]).unwrap();
            levels.iter().map(|&nu| t.alpha_cut(nu).unwrap()).collect()
        } else {
            let mut xs: Vec<f64> = (0..5).map(|_| rng.random()).collect();
            xs.sort_by(f64::total_cmp);
            let p = PentagonalFuzzy::new(xs[0], xs[1], xs[2], xs[3], xs[4]).unwrap();
            levels.iter().map(|&nu| p.alpha_cut(nu).unwrap()).collect()
        };
        for w in cuts.windows(2) {
            assert!(
                w[1].is_within(&w[0], 0.0),
                "case {i}: {:?} escapes {:?}",
                w[1],
                w[0]
            );
        }
        assert_eq!(cuts[10].width(), 0.0, "case {i}: level-1 cut not a point");
    }
    eprintln!("cut nestedness on 1000 random fuzzy numbers x 11 levels: PASS");
}

// ---------------------------------------------------------------------------
// Reduction identities on random configurations.

fn random_plan(rng: &mut ChaCha8Rng) -> PlanParams {
    let n = rng.random_range(5..=150);
    let m = rng.random_range(1..=8);
    let k = rng.random_range(1..=m);
    let c2 = rng.random_range(1..=5.min(n));
    let c1 = rng.random_range(0..c2);
    PlanParams::new(n, m, k, c1, c2).unwrap()
}

#[test]
fn a7_remark_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..200 {
        let plan = random_plan(&mut rng);
        let p = rng.random::<f64>() * 0.4;
        let model = if i % 2 == 0 {
            DistModel::Binomial
        } else {
            DistModel::Poisson
        };

        // With k = m the deferred mixture is the m-th power of the
        // first-stage acceptance probability.
        let all_lots = PlanParams::new(plan.n(), plan.m(), plan.m(), plan.c1(), plan.c2()).unwrap();
        let a = tail_cdf(plan.c1(), plan.n(), p, model).unwrap();
        let b = tail_cdf(plan.c2(), plan.n(), p, model).unwrap();
        let expect = a + (b - a) * a.powi(plan.m() as i32);
        let got = pa_gmds(p, &all_lots, model).unwrap();
        assert!(
            (got - expect).abs() <= 1e-12,
            "k = m identity, case {i}: {got} vs {expect}"
        );

        // With c1 = c2 the conditional stage vanishes and the plan is
        // single sampling, exactly, for every (m, k).
        let degenerate =
            PlanParams::new(plan.n(), plan.m(), plan.k(), plan.c2(), plan.c2()).unwrap();
        let ssp = SspParams::new(plan.n(), plan.c2()).unwrap();
        let got = pa_gmds(p, &degenerate, model).unwrap();
        let expect = pa_ssp(p, &ssp, model).unwrap();
        assert!(
            (got - expect).abs() <= 1e-12,
            "c1 = c2 identity, case {i}: {got} vs {expect}"
        );
    }
    eprintln!("reduction identities on 200 random configurations: PASS");
}

// ---------------------------------------------------------------------------
// Band extremizer vs dense grid.

#[test]
fn a7_band_grid_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..50 {
        let mut xs = [
            rng.random::<f64>() * 0.3,
            rng.random::<f64>() * 0.3,
            rng.random::<f64>() * 0.3,
        ];
        xs.sort_by(f64::total_cmp);
        let fuzzy = TriangularFuzzy::new(xs[0], xs[1], xs[2]).unwrap();
        let plan = random_plan(&mut rng);
        let model = if i % 2 == 0 {
            DistModel::Binomial
        } else {
            DistModel::Poisson
        };
        let nu = f64::from(i % 10) / 10.0;

        let band = pa_band(&fuzzy, nu, &plan, model).unwrap();
        let cut = fuzzy.alpha_cut(nu).unwrap();
        let mut grid_min = f64::INFINITY;
        let mut grid_max = f64::NEG_INFINITY;
        for j in 0..=10_000u32 {
            let x = cut.lo() + cut.width() * f64::from(j) / 10_000.0;
            let v = pa_gmds(x, &plan, model).unwrap();
            grid_min = grid_min.min(v);
            grid_max = grid_max.max(v);
        }
        assert!(
            grid_min >= band.lo() - 1e-6 && grid_max <= band.hi() + 1e-6,
            "case {i}: dense grid [{grid_min}, {grid_max}] improves band {band:?}"
        );
    }
    eprintln!("band extremizer vs 10,001-point dense grid on 50 cases: PASS");
}

// ---------------------------------------------------------------------------
// Integer search vs exhaustive enumeration.

#[test]
fn a7_design_matches_exhaustive_search() {
    let limits = SearchLimits {
        n_max: 300,
        m_max: 3,
        c2_max: 3,
        k_max: 3,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..20 {
        let aql = 0.002 + rng.random::<f64>() * 0.02;
        let lql = aql * (3.0 + rng.random::<f64>() * 5.0);
        let model = if case % 2 == 0 {
            DistModel::Binomial
        } else {
            DistModel::Poisson
        };
        let req = OCRequirement::crisp(aql, lql, 0.05, 0.10).unwrap();
        let res = design_gmds(&req, model, &limits).unwrap();

        // Exhaustive scan in the tie-break order: n, then m, k, c2, c1.
        let mut brute: Option<(u32, u32, u32, u32, u32)> = None;
        'outer: for n in 1..=limits.n_max {
            for m in 1..=limits.m_max {
                for k in 1..=m.min(limits.k_max) {
                    for c2 in 1..=limits.c2_max.min(n) {
                        for c1 in 0..c2 {
                            let plan = PlanParams::new(n, m, k, c1, c2).unwrap();
                            let at_aql = pa_gmds(aql, &plan, model).unwrap();
                            let at_lql = pa_gmds(lql, &plan, model).unwrap();
                            if at_aql >= 0.95 && at_lql <= 0.10 {
                                brute = Some((n, m, k, c2, c1));
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }

        match brute {
            Some((n, m, k, c2, c1)) => {
                assert!(res.feasible, "case {case}: search missed a feasible plan");
                let plan = res.designed.unwrap().gmds().copied().unwrap();
                assert_eq!(
                    (plan.n(), plan.m(), plan.k(), plan.c2(), plan.c1()),
                    (n, m, k, c2, c1),
                    "case {case} ({aql:.4}, {lql:.4}, {model:?})"
                );
            }
            None => assert!(!res.feasible, "case {case}: search invented a plan"),
        }
    }
    eprintln!("design search vs exhaustive enumeration on 20 requirements: PASS");
}

// ---------------------------------------------------------------------------
// Randomized invariants.

proptest! {
    #[test]
    fn triangular_cuts_nest_and_translate(
        a in 0.0..1.0f64,
        b in 0.0..1.0f64,
        c in 0.0..1.0f64,
        nu1 in 0.0..=1.0f64,
        nu2 in 0.0..=1.0f64,
        theta_frac in 0.0..=1.0f64,
    ) {
        let mut xs = [a, b, c];
        xs.sort_by(f64::total_cmp);
        let t = TriangularFuzzy::new(xs[0], xs[1], xs[2]).unwrap();

        let (lo_level, hi_level) = if nu1 <= nu2 { (nu1, nu2) } else { (nu2, nu1) };
        let outer = t.alpha_cut(lo_level).unwrap();
        let inner = t.alpha_cut(hi_level).unwrap();
        prop_assert!(inner.is_within(&outer, 0.0));

        // Shifting the number translates its cuts.
        let theta = theta_frac * t.theta_max();
        let shifted = t.theta_shift(theta).unwrap();
        let base = t.theta_shift(0.0).unwrap();
        let got = shifted.alpha_cut(nu1).unwrap();
        let want = base.alpha_cut(nu1).unwrap().map_affine(theta, 1.0);
        prop_assert!((got.lo() - want.lo()).abs() <= 1e-12);
        prop_assert!((got.hi() - want.hi()).abs() <= 1e-12);
        prop_assert!((got.width() - base.alpha_cut(nu1).unwrap().width()).abs() <= 1e-12);
    }

    #[test]
    fn acceptance_probability_stays_in_unit_range(
        p in 0.0..=1.0f64,
        n in 1u32..400,
        m in 1u32..10,
        k_seed in 0u32..10,
        c2_seed in 0u32..8,
        c1_seed in 0u32..8,
        binomial in proptest::bool::ANY,
    ) {
        let k = 1 + k_seed % m;
        let c2 = 1 + c2_seed % n.min(8);
        let c1 = c1_seed % (c2 + 1);
        let plan = PlanParams::new(n, m, k, c1, c2).unwrap();
        let model = if binomial { DistModel::Binomial } else { DistModel::Poisson };
        let pa = pa_gmds(p, &plan, model).unwrap();
        prop_assert!((0.0..=1.0).contains(&pa));
        // Boundary values are exact whenever rejection is possible.
        prop_assert!(pa_gmds(0.0, &plan, model).unwrap() == 1.0);
        if c2 < n {
            prop_assert!(pa_gmds(1.0, &plan, DistModel::Binomial).unwrap() == 0.0);
        }
    }

    #[test]
    fn poisson_tail_monotonicity(
        p in 0.001..0.3f64,
        n in 10u32..500,
        c in 0u32..12,
    ) {
        // Decreasing in the rate, increasing in the allowance.
        let base = tail_cdf(c, n, p, DistModel::Poisson).unwrap();
        let higher_rate = tail_cdf(c, n, (p * 1.5).min(1.0), DistModel::Poisson).unwrap();
        prop_assert!(higher_rate <= base + 1e-15);
        let looser = tail_cdf(c + 1, n, p, DistModel::Poisson).unwrap();
        prop_assert!(looser >= base - 1e-15);
    }
}
