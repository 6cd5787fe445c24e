//! Deterministic random inputs for the verification suites.
//!
//! Every random check draws from a ChaCha stream addressed by
//! `(seed, case index)`, so a suite makes the same draws no matter how its
//! cases are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::l2::L2Vector;
use crate::qdisc::DiscElement;
use crate::C64;

/// Stream for one case of a seeded suite.
pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

/// Complex scalar with components uniform in [−1, 1].
pub fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// A finitely supported element: shift degrees in `−max_degree..=max_degree`,
/// coefficient tables nonzero only at grid indices below `max_index`.
pub fn random_f0_element(
    rng: &mut ChaCha8Rng,
    q: f64,
    kdim: usize,
    max_degree: i64,
    max_index: usize,
) -> DiscElement {
    let max_index = max_index.min(kdim);
    let mut el = DiscElement::zero(q, kdim).expect("valid parameters");
    for degree in -max_degree..=max_degree {
        if rng.random_range(0.0..1.0) < 0.4 {
            continue;
        }
        let mut values = vec![C64::new(0.0, 0.0); kdim];
        let entries = rng.random_range(1..=3usize);
        for _ in 0..entries {
            let i = rng.random_range(0..max_index);
            values[i] = random_complex(rng);
        }
        let term = DiscElement::from_table(q, kdim, degree, values).expect("valid table");
        el = el.try_add(&term).expect("same truncation");
    }
    el
}

/// A vector supported on the interior block `j, k < K − margin`.
pub fn random_interior_vector(
    rng: &mut ChaCha8Rng,
    q: f64,
    kdim: usize,
    alpha: f64,
    margin: usize,
) -> L2Vector {
    let mut v = L2Vector::zero(q, kdim, alpha).expect("valid parameters");
    let limit = kdim.saturating_sub(margin).max(1);
    for j in 0..limit {
        for k in 0..limit {
            v.coeffs_mut()[(j, k)] = random_complex(rng);
        }
    }
    v
}
