#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unipred::{Alphabet, LossMatrix, ModelClass, ModelFamily};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random distribution over `n` symbols; with `sparse`, some entries may
/// be exactly zero.
pub fn distribution<R: Rng>(rng: &mut R, n: usize, sparse: bool) -> Vec<f64> {
    let keep = rng.random_range(0..n);
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            if sparse && i != keep && rng.random_bool(0.25) {
                0.0
            } else {
                -(1.0 - rng.random::<f64>()).ln()
            }
        })
        .collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

pub fn random_model<R: Rng>(rng: &mut R, alphabet: usize) -> ModelFamily {
    match rng.random_range(0..4) {
        0 => ModelFamily::iid(distribution(rng, alphabet, false)).unwrap(),
        1 => ModelFamily::iid(distribution(rng, alphabet, true)).unwrap(),
        2 => {
            let order = rng.random_range(1..=2);
            let rows = (0..alphabet.pow(order as u32))
                .map(|_| distribution(rng, alphabet, true))
                .collect();
            let initial = distribution(rng, alphabet, false);
            ModelFamily::markov(order, rows, initial).unwrap()
        }
        _ => {
            let len = rng.random_range(1..=4);
            let pattern = (0..len).map(|_| rng.random_range(0..alphabet)).collect();
            ModelFamily::periodic(Alphabet::new(alphabet).unwrap(), pattern).unwrap()
        }
    }
}

/// Weights drawn uniformly, from a random positive vector, or by description
/// length.
pub fn random_class<R: Rng>(rng: &mut R, alphabet: usize, size: usize) -> ModelClass {
    let models: Vec<ModelFamily> = (0..size).map(|_| random_model(rng, alphabet)).collect();
    match rng.random_range(0..3) {
        0 => ModelClass::uniform(models).unwrap(),
        1 => ModelClass::by_description_length(models).unwrap(),
        _ => {
            let w = distribution(rng, size, false);
            ModelClass::new(models, w).unwrap()
        }
    }
}

/// A loss table with `alphabet` outcomes, 2 to 4 actions, and a random
/// offset and scale.
pub fn random_loss<R: Rng>(rng: &mut R, alphabet: usize) -> LossMatrix {
    let actions = rng.random_range(2..=4);
    let offset = rng.random_range(-1.0..1.0);
    let scale = rng.random_range(0.5..3.0);
    let rows = (0..alphabet)
        .map(|_| {
            (0..actions)
                .map(|_| offset + scale * rng.random::<f64>())
                .collect()
        })
        .collect();
    LossMatrix::from_rows(rows).unwrap()
}

/// One entry of the exhaustive grid: a class, its truth index and seed.
pub struct GridPoint {
    pub alphabet: usize,
    pub seed: u64,
    pub class: ModelClass,
    pub truth: usize,
}

pub const GRID_HORIZON: usize = 8;
pub const GRID_SEEDS: u64 = 5;

/// Alphabets 2 and 3, classes of 1 to 4 models, five seeded classes per
/// shape, every truth index.
pub fn grid() -> Vec<GridPoint> {
    let mut points = Vec::new();
    for alphabet in 2..=3 {
        for size in 1..=4 {
            for s in 0..GRID_SEEDS {
                let seed = 1000 * alphabet as u64 + 100 * size as u64 + s;
                let class = random_class(&mut rng(seed), alphabet, size);
                for truth in 0..size {
                    points.push(GridPoint {
                        alphabet,
                        seed,
                        class: class.clone(),
                        truth,
                    });
                }
            }
        }
    }
    points
}
