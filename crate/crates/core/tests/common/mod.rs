#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stairfloer::filtcx::FilteredComplex;
use stairfloer::laurent::LaurentPoly;
use stairfloer::staircase::Staircase;

pub const SUITE_SEED: u64 = 0x57a1_2c0f;
pub const SUITE_SIZE: usize = 120;
pub const SUITE_MAX_GENERATORS: usize = 200;

/// A random tensor of staircases and their duals, with the signed genera
/// of the factors.
#[derive(Debug)]
pub struct Sample {
    pub factors: Vec<(Staircase, bool)>,
    pub complex: FilteredComplex,
    /// Complexes after every tensor or dual, in build order.
    pub intermediates: Vec<FilteredComplex>,
}

impl Sample {
    /// τ by additivity: a staircase has τ equal to its genus.
    pub fn expected_tau(&self) -> i64 {
        self.factors
            .iter()
            .map(|(s, dual)| if *dual { -genus(s) } else { genus(s) })
            .sum()
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(s, d)| format!("{}{}", s, if *d { "*" } else { "" }))
            .collect();
        parts.join(" ⊗ ")
    }
}

/// Genus from the Alexander polynomial's breadth.
pub fn genus(s: &Staircase) -> i64 {
    s.to_alexander().degree_span() / 2
}

pub fn random_staircase(rng: &mut ChaCha8Rng) -> Staircase {
    let len = rng.gen_range(1..=3);
    Staircase::new((0..len).map(|_| rng.gen_range(1..=3)).collect()).unwrap()
}

pub fn random_sample(rng: &mut ChaCha8Rng, max_generators: usize) -> Sample {
    loop {
        let count = rng.gen_range(1..=3);
        let factors: Vec<(Staircase, bool)> = (0..count).map(|_| (random_staircase(rng), rng.gen_bool(0.5))).collect();
        let size: usize = factors.iter().map(|(s, _)| s.num_generators()).product();
        if size > max_generators {
            continue;
        }
        let mut intermediates = Vec::new();
        let mut complex = FilteredComplex::unknot();
        for (s, dual) in &factors {
            let mut c = s.to_complex();
            if *dual {
                c = c.dual();
                intermediates.push(c.clone());
            }
            complex = complex.tensor(&c);
            intermediates.push(complex.clone());
        }
        return Sample {
            factors,
            complex,
            intermediates,
        };
    }
}

pub fn suite() -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    (0..SUITE_SIZE)
        .map(|_| random_sample(&mut rng, SUITE_MAX_GENERATORS))
        .collect()
}

/// Δ of `T(p, q)` from the semigroup generated by `p` and `q`:
/// `(1 - t) Σ_{s ∈ S, s < 2g} t^s + t^{2g}`.
pub fn semigroup_alexander(p: i64, q: i64) -> LaurentPoly {
    let conductor = (p - 1) * (q - 1);
    let in_semigroup = |s: i64| (0..=s / p).any(|a| (s - a * p) % q == 0);
    let mut terms = vec![(conductor, 1i64)];
    for s in (0..conductor).filter(|&s| in_semigroup(s)) {
        terms.push((s, 1));
        terms.push((s + 1, -1));
    }
    LaurentPoly::from_terms(terms)
}

pub fn print_line(criterion: u32, pass: bool, detail: &str) {
    println!(
        "criterion {criterion:>2}: {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}
