//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion, with
//! the failing sub-checks appended, and exits non-zero if any failed.

use std::process::Command;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use weaver::hem::{density_diagnostic, hem_cdf, hem_cdf_at, interval_mass, DyadicRational};
use weaver::oracle::{
    mixture_point_variance_oracle, moment_oracle, square_split, variance_oracle,
};
use weaver::process::{
    simulate, theoretical_variance_mixture, theoretical_variance_pathmean, ProcessKind,
    SimulationConfig, SimulationReport,
};
use weaver::weaver_core::{
    cdf_eval, jump_histogram, mean, mean_decomposition, mixing_sum, pmf_vector, reflect,
    sample_size, variance, variance_ratio, weaving_sum, Construction,
};
use weaver::{ProbValue, Rational};

/// Master seed shared by every Monte Carlo criterion.
const SEED: u64 = 20_240_601;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn exact(n: i64, d: i64) -> ProbValue<Rational> {
    ProbValue::ratio(n, d).unwrap()
}

fn float(p: f64) -> ProbValue<f64> {
    ProbValue::float(p).unwrap()
}

fn pow(x: &Rational, e: u32) -> Rational {
    num_traits::pow(x.clone(), e as usize)
}

fn binomial(n: u32, k: u32) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * u64::from(n - i) / u64::from(i + 1))
}

/// Collects sub-check outcomes and reports them on one line.
struct Criterion {
    id: u32,
    title: &'static str,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Criterion {
            id,
            title,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, text: String) {
        self.notes.push(text);
    }

    fn finish(self) -> bool {
        let status = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        let mut line = format!("criterion {:02} {status} {}", self.id, self.title);
        if !self.notes.is_empty() {
            line += &format!(" [{}]", self.notes.join("; "));
        }
        if !self.failures.is_empty() {
            line += &format!(": {}", self.failures.join("; "));
        }
        println!("{line}");
        self.failures.is_empty()
    }
}

fn exact_grid() -> Vec<ProbValue<Rational>> {
    vec![exact(0, 1), exact(1, 3), exact(2, 5), exact(1, 2), exact(9, 10), exact(1, 1)]
}

fn within_3se(value: f64, target: f64, se: f64) -> bool {
    (value - target).abs() <= 3.0 * se
}

fn z(value: f64, target: f64, se: f64) -> f64 {
    (value - target) / se
}

fn criterion_01_exactness() -> bool {
    let mut c = Criterion::new(1, "exact mass, mean and variance for n in 1..=14");
    for p in exact_grid() {
        for n in 1..=14 {
            let dist = pmf_vector(n, &p, Construction::Direct).unwrap();
            let closed = q(weaving_sum(n) as i64, 1)
                / pow(&q(sample_size(n) as i64, 1), 2)
                * p.value()
                * p.complement().value();
            c.check(dist.total_mass().is_one(), || format!("mass n={n} p={}", p.value()));
            c.check(dist.mean() == *p.value(), || format!("mean n={n} p={}", p.value()));
            c.check(mean(n, &p).unwrap() == *p.value(), || format!("mean() n={n}"));
            c.check(dist.variance() == closed, || format!("variance n={n} p={}", p.value()));
            c.check(variance(n, &p).unwrap() == closed, || format!("variance() n={n}"));
        }
    }
    c.finish()
}

fn criterion_02_construction_equivalence() -> bool {
    let mut c = Criterion::new(2, "direct, weave and cascade agree");
    let bound = 2f64.powi(-40);
    for p in exact_grid() {
        for n in 1..=14 {
            let direct = pmf_vector(n, &p, Construction::Direct).unwrap();
            for method in [Construction::Weave, Construction::Cascade] {
                let other = pmf_vector(n, &p, method).unwrap();
                c.check(direct.probs() == other.probs(), || {
                    format!("exact {} n={n} p={}", method.as_str(), p.value())
                });
            }
        }
    }
    let mut worst = 0f64;
    for p in [0.0, 0.1, 0.3, 1.0 / 3.0, 0.5, 0.9, 1.0] {
        for n in 1..=20 {
            let direct = pmf_vector(n, &float(p), Construction::Direct).unwrap();
            for method in [Construction::Weave, Construction::Cascade] {
                let other = pmf_vector(n, &float(p), method).unwrap();
                for (a, b) in direct.probs().iter().zip(other.probs()) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    c.note(format!("max float gap {worst:.3e}"));
    c.check(worst <= bound, || format!("float gap {worst:e} > 2^-40"));
    c.finish()
}

fn criterion_03_table_rows() -> bool {
    let mut c = Criterion::new(3, "squared size, weaving and mixing sums per row");
    let rows: [(u32, u128, u128, u128); 6] = [
        (1, 1, 1, 0),
        (2, 9, 5, 4),
        (3, 49, 21, 28),
        (4, 225, 85, 140),
        (5, 961, 341, 620),
        (6, 3969, 1365, 2604),
    ];
    for (n, squared, weaving, mixing) in rows {
        let size = u128::from(sample_size(n));
        let got = (size * size, weaving_sum(n), mixing_sum(n));
        c.check(got == (squared, weaving, mixing), || format!("n={n}: {got:?}"));
        let oracle = square_split(n).unwrap();
        c.check(
            oracle.squared_size == BigUint::from(squared)
                && oracle.weaving_sum == BigUint::from(weaving)
                && oracle.mixing_sum == BigUint::from(mixing),
            || format!("oracle disagrees at n={n}"),
        );
    }
    c.note("n=2 gives (9, 5, 4); n=5 gives 961".into());
    c.finish()
}

fn criterion_04_square_identity_and_ratio() -> bool {
    let mut c = Criterion::new(4, "square identity for n <= 30 and the variance ratio");
    for n in 1..=30 {
        let split = square_split(n).unwrap();
        c.check(split.holds, || format!("identity fails at n={n}"));
        c.check(
            split.weaving_sum.clone() + &split.mixing_sum == split.squared_size,
            || format!("sums at n={n}"),
        );
        let size = u128::from(sample_size(n));
        c.check(weaving_sum(n) + mixing_sum(n) == size * size, || format!("u128 n={n}"));
    }
    let mut previous: Option<Rational> = None;
    for n in 1..=30 {
        let ratio = variance_ratio(n).unwrap();
        let four = q(4, 1);
        let size = q(sample_size(n) as i64, 1);
        let closed = (pow(&four, n) - q(1, 1)) / (q(3, 1) * size.clone() * size);
        c.check(ratio == closed, || format!("closed form at n={n}"));
        if let Some(prev) = &previous {
            c.check(ratio < *prev, || format!("ratio not decreasing at n={n}"));
        }
        previous = Some(ratio);
    }
    let gap = variance_ratio(20).unwrap() - q(1, 3);
    c.check(!gap.is_zero() && gap < q(1, 1_000_000) && gap > q(0, 1), || {
        format!("gap at n=20 is {gap}")
    });
    c.note(format!("ratio(20) - 1/3 = {gap}"));
    c.finish()
}

fn criterion_05_mean_decomposition() -> bool {
    let mut c = Criterion::new(5, "mean split by zero count");
    for p in exact_grid() {
        let (hi, lo) = (p.value().clone(), p.complement().into_inner());
        for n in 1..=12 {
            let terms = mean_decomposition(n, &p).unwrap();
            c.check(terms.len() == n as usize, || format!("length at n={n}"));
            let mut total = Rational::zero();
            for (j, term) in terms.iter().enumerate() {
                let j = j as u32;
                let expected = q(binomial(n - 1, j) as i64, 1) * pow(&hi, n - j) * pow(&lo, j);
                c.check(*term == expected, || format!("t_{j} at n={n} p={hi}"));
                total += term;
            }
            c.check(total == hi, || format!("sum at n={n} p={hi}"));
            c.check(moment_oracle(n, &p, 1).unwrap() == total, || {
                format!("oracle at n={n} p={hi}")
            });
        }
    }
    c.finish()
}

fn criterion_06_cdf_values() -> bool {
    let mut c = Criterion::new(6, "distribution function at level-3 dyadics");
    for p in [exact(1, 3), exact(2, 5), exact(9, 10)] {
        let hi = p.value().clone();
        let lo = p.complement().into_inner();
        let one = Rational::one();
        let cases = [
            (q(1, 2), 1, lo.clone()),
            (q(1, 4), 2, pow(&lo, 2)),
            (q(3, 4), 2, one.clone() - pow(&hi, 2)),
            (q(3, 8), 3, pow(&lo, 2) + hi.clone() * pow(&lo, 2)),
            (q(5, 8), 3, lo.clone() + hi.clone() * pow(&lo, 2)),
            (q(7, 8), 3, one - pow(&hi, 3)),
        ];
        for (x, m, expected) in cases {
            for n in m..=m + 6 {
                let got = cdf_eval(n, &p, &x).unwrap();
                c.check(got == expected, || format!("F_{n}({x}) at p={hi}"));
            }
            let limit: Rational = hem_cdf_at(&p, &x).unwrap();
            c.check(limit == expected, || format!("hem F({x}) at p={hi}"));
        }
    }
    c.finish()
}

fn criterion_07_jump_histogram() -> bool {
    let mut c = Criterion::new(7, "jump sizes and multiplicities");
    for p in [exact(1, 3), exact(2, 5), exact(9, 10)] {
        let (hi, lo) = (p.value().clone(), p.complement().into_inner());
        for n in 1..=12 {
            let classes = jump_histogram(n, &p).unwrap();
            c.check(classes.len() == n as usize + 1, || format!("classes at n={n}"));
            for (j, class) in classes.iter().enumerate() {
                let j = j as u32;
                let size = pow(&hi, j) * pow(&lo, n - j);
                c.check(class.size == size && class.count == binomial(n, j), || {
                    format!("class {j} at n={n} p={hi}")
                });
            }
            let dist = pmf_vector(n, &p, Construction::Direct).unwrap();
            for class in &classes {
                let seen = dist.probs().iter().filter(|x| **x == class.size).count() as u64;
                c.check(seen == class.count, || format!("pmf count at n={n}"));
            }
        }
    }
    for p in exact_grid() {
        for n in 1..=12 {
            let total = jump_histogram(n, &p)
                .unwrap()
                .into_iter()
                .fold(Rational::zero(), |acc, cl| acc + cl.size * q(cl.count as i64, 1));
            c.check(total.is_one(), || format!("weighted sum at n={n} p={}", p.value()));
        }
    }
    c.finish()
}

fn criterion_08_symmetry() -> bool {
    let mut c = Criterion::new(8, "reflection");
    for p in exact_grid() {
        for n in 1..=12 {
            let dist = pmf_vector(n, &p, Construction::Direct).unwrap();
            let mirrored = pmf_vector(n, &p.complement(), Construction::Direct).unwrap();
            c.check(reflect(&reflect(&dist)) == dist, || format!("involution n={n}"));
            c.check(reflect(&dist) == mirrored, || format!("reflect vs W(n,1-p) n={n}"));
            let last = sample_size(n) as usize;
            let ok = (0..=last).all(|k| dist.probs()[k] == mirrored.probs()[last - k]);
            c.check(ok, || format!("P(Y=y_k) vs P(Y'=y_(N-k)) n={n} p={}", p.value()));
        }
    }
    // complements of these are exact in binary floating point
    for p in [0.0, 0.25, 0.5, 0.625, 1.0] {
        for n in 1..=12 {
            let dist = pmf_vector(n, &float(p), Construction::Direct).unwrap();
            let mirrored = pmf_vector(n, &float(1.0 - p), Construction::Direct).unwrap();
            let reflected = reflect(&dist);
            c.check(reflect(&reflected) == dist, || format!("float involution n={n}"));
            let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            c.check(bits(reflected.probs()) == bits(mirrored.probs()), || {
                format!("float mirror n={n} p={p}")
            });
        }
    }
    c.finish()
}

fn criterion_09_conditional_mean_monte_carlo() -> bool {
    let mut c = Criterion::new(9, "conditional-mean process, n=10, p=0.3, R=1e5");
    let start = Instant::now();
    let config = SimulationConfig::new(ProcessKind::ConditionalMean, 10, 0.3, 100_000, SEED);
    let report = simulate(&config).unwrap();
    let elapsed = start.elapsed();
    let target = variance(10, &exact(3, 10)).unwrap();
    let target = weaver::Scalar::to_f64(&target);
    let closed = 0.21 * (4f64.powi(10) - 1.0) / (3.0 * 1023.0 * 1023.0);
    c.check((target - closed).abs() < 1e-15, || "closed form".into());
    c.check(within_3se(report.mean, 0.3, report.se_mean), || {
        format!("mean {} vs 0.3, z={:.2}", report.mean, z(report.mean, 0.3, report.se_mean))
    });
    c.check(within_3se(report.variance, target, report.se_variance), || {
        format!("variance z={:.2}", z(report.variance, target, report.se_variance))
    });
    c.check(elapsed.as_secs() < 60, || format!("took {elapsed:?}"));
    c.note(format!(
        "mean z={:.2}, variance z={:.2}, {:.2?}",
        z(report.mean, 0.3, report.se_mean),
        z(report.variance, target, report.se_variance),
        elapsed
    ));
    c.finish()
}

struct GridPoint {
    n: u32,
    p: f64,
    h0: &'static str,
    h1: &'static str,
    s0: f64,
    s1: f64,
}

const GRID: [GridPoint; 3] = [
    GridPoint { n: 4, p: 1.0 / 3.0, h0: "twopoint:-1,1,1/2", h1: "twopoint:0,2,1/2", s0: 1.0, s1: 1.0 },
    GridPoint { n: 8, p: 0.3, h0: "twopoint:-1,1,1/2", h1: "twopoint:0,3,1/3", s0: 1.0, s1: 2.0 },
    GridPoint { n: 10, p: 0.5, h0: "point:0", h1: "point:1", s0: 0.0, s1: 0.0 },
];

fn run_grid(kind: ProcessKind, point: &GridPoint) -> SimulationReport {
    let config = SimulationConfig::new(kind, point.n, point.p, 200_000, SEED)
        .with_components(point.h0.parse().unwrap(), point.h1.parse().unwrap());
    simulate(&config).unwrap()
}

fn criterion_10_mixture_and_path_mean_variances() -> bool {
    let mut c = Criterion::new(10, "mixture-draw and path-mean variances, R=2e5");
    for point in &GRID {
        let p = float(point.p);
        let mixture = run_grid(ProcessKind::MixtureDraw, point);
        let target = theoretical_variance_mixture(point.n, &p, &point.s0, &point.s1).unwrap();
        let zm = z(mixture.variance, target, mixture.se_variance);
        c.note(format!("mixture n={} z={zm:.2}", point.n));
        c.check(within_3se(mixture.variance, target, mixture.se_variance), || {
            format!(
                "mixture n={} p={:.4}: variance {:.6} vs {:.6} (z={zm:.2})",
                point.n, point.p, mixture.variance, target
            )
        });
        c.check(within_3se(mixture.mean, point.p, mixture.se_mean), || {
            format!("mixture mean n={}", point.n)
        });

        let path = run_grid(ProcessKind::PathMean, point);
        let target = theoretical_variance_pathmean(point.n, &p, &point.s0, &point.s1).unwrap();
        let zp = z(path.variance, target, path.se_variance);
        c.note(format!("path n={} z={zp:.2}", point.n));
        c.check(within_3se(path.variance, target, path.se_variance), || {
            format!("path mean n={}: z={zp:.2}", point.n)
        });
        c.check(within_3se(path.mean, point.p, path.se_mean), || {
            format!("path mean mean n={}", point.n)
        });
    }
    let half = exact(1, 2);
    c.check(variance_oracle(2, &half).unwrap() == q(5, 36), || "5/36".into());
    c.check(mixture_point_variance_oracle(2, &half).unwrap() == q(1, 4), || "1/4".into());
    c.finish()
}

fn criterion_11_endpoint_fractions() -> bool {
    let mut c = Criterion::new(11, "mixture-draw endpoint fractions");
    let reps = 100_000u64;
    let config = SimulationConfig::new(ProcessKind::MixtureDraw, 12, 0.3, reps, SEED);
    let report = simulate(&config).unwrap();
    for (frac, target, label) in [
        (report.frac_near_one, 0.3, "near 1"),
        (report.frac_near_zero, 0.7, "near 0"),
    ] {
        let se = (frac * (1.0 - frac) / reps as f64).sqrt();
        c.note(format!("{label} {frac} z={:.2}", z(frac, target, se)));
        c.check(within_3se(frac, target, se), || format!("{label}: {frac} vs {target}"));
    }
    c.check(report.frac_near_one + report.frac_near_zero == 1.0, || {
        "point components must land on {0, 1}".into()
    });

    let config = SimulationConfig::new(ProcessKind::MixtureDraw, 14, 0.3, 10_000, SEED)
        .with_components(
            "twopoint:-1,1,1/2".parse().unwrap(),
            "twopoint:0,2,1/2".parse().unwrap(),
        );
    let report = simulate(&config).unwrap();
    let total = report.frac_near_zero + report.frac_near_one;
    c.note(format!("twopoint n=14 total {total:.4}"));
    c.check(total >= 0.95, || format!("twopoint fractions sum to {total}"));
    c.finish()
}

fn criterion_12_limit_measure() -> bool {
    let mut c = Criterion::new(12, "limit measure suite");
    for p in [exact(1, 3), exact(2, 5)] {
        for level in 0..12 {
            for k in 0..1u64 << level {
                let parent: Rational = interval_mass(&p, level, k).unwrap();
                let left: Rational = interval_mass(&p, level + 1, 2 * k).unwrap();
                let right: Rational = interval_mass(&p, level + 1, 2 * k + 1).unwrap();
                c.check(left + right == parent, || format!("refinement m={level} k={k}"));
            }
        }
    }
    let half = exact(1, 2);
    for level in 0..=12 {
        for j in 0..=1u64 << level {
            let v = DyadicRational::new(j, level).unwrap();
            let f: Rational = hem_cdf(&half, &v);
            c.check(f == v.value(), || format!("identity at {j}/2^{level}"));
        }
    }

    let series = |j_of: &dyn Fn(u32) -> u32| -> Vec<f64> {
        (1..=40).map(|n| density_diagnostic(n, 0.3, j_of(n)).unwrap()).collect()
    };
    let all_zeros = series(&|_| 0);
    let all_ones = series(&|n| n);
    c.check(all_zeros.windows(2).all(|w| w[1] > w[0]), || "no divergence".into());
    c.check(all_ones.windows(2).all(|w| w[1] < w[0]), || "no decay".into());
    c.check(all_zeros[39] > 10.0 && all_ones[39] < -15.0, || {
        format!("endpoints {} {}", all_zeros[39], all_ones[39])
    });
    for n in 1..=40u32 {
        let direct = (2f64.powi(n as i32) - 1.0).ln() + f64::from(n) * 0.7f64.ln();
        c.check((all_zeros[n as usize - 1] - direct).abs() < 1e-12, || {
            format!("log value at n={n}")
        });
    }

    let p = exact(3, 10);
    let limit = q(21, 300);
    let gaps: Vec<Rational> = (1..=20)
        .map(|n| {
            let d = variance(n, &p).unwrap() - &limit;
            if d < Rational::zero() { -d } else { d }
        })
        .collect();
    c.check(gaps.windows(2).all(|w| w[1] < w[0]), || "variance gap not decreasing".into());
    c.check(gaps[19] < q(21, 100) * q(1, 1_000_000), || "gap at n=20".into());
    c.finish()
}

fn simulate_cli(threads: &str) -> Vec<u8> {
    let output = Command::new(env!("CARGO_BIN_EXE_weaver"))
        .args([
            "simulate", "--process", "mixdraw", "--n", "8", "--p", "0.3", "--h0",
            "uniform:-1,1", "--h1", "twopoint:0,3,1/3", "--reps", "20000", "--seed", "99",
            "--threads", threads,
        ])
        .env_remove("WEAVER_SEED")
        .env_remove("WEAVER_FORMAT")
        .output()
        .expect("binary runs");
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    output.stdout
}

fn criterion_13_reproducibility() -> bool {
    let mut c = Criterion::new(13, "byte-identical simulate output");
    let first = simulate_cli("1");
    c.check(first == simulate_cli("1"), || "two 1-thread runs differ".into());
    c.check(first == simulate_cli("4"), || "1 vs 4 threads differ".into());
    c.check(first == simulate_cli("0"), || "1 thread vs default pool differ".into());
    c.check(first.ends_with(b"}\n") && first.starts_with(b"{\"process\""), || {
        String::from_utf8_lossy(&first).into_owned()
    });
    c.finish()
}

fn main() {
    let criteria: [fn() -> bool; 13] = [
        criterion_01_exactness,
        criterion_02_construction_equivalence,
        criterion_03_table_rows,
        criterion_04_square_identity_and_ratio,
        criterion_05_mean_decomposition,
        criterion_06_cdf_values,
        criterion_07_jump_histogram,
        criterion_08_symmetry,
        criterion_09_conditional_mean_monte_carlo,
        criterion_10_mixture_and_path_mean_variances,
        criterion_11_endpoint_fractions,
        criterion_12_limit_measure,
        criterion_13_reproducibility,
    ];
    let failed = criteria.iter().filter(|run| !run()).count();
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
