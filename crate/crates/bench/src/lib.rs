//! Fixed workloads shared by the benchmarks.

use unipred::{Alphabet, ModelClass, ModelFamily};

/// Ternary class of an i.i.d. model, an order-1 Markov chain, an order-2
/// Markov chain and a period-3 pattern, uniformly weighted.
pub fn ternary_class() -> ModelClass {
    let alphabet = Alphabet::new(3).unwrap();
    let order2 = (0..9)
        .map(|i| match i % 3 {
            0 => vec![0.6, 0.3, 0.1],
            1 => vec![0.2, 0.5, 0.3],
            _ => vec![0.1, 0.1, 0.8],
        })
        .collect();
    ModelClass::uniform(vec![
        ModelFamily::iid(vec![0.2, 0.3, 0.5]).unwrap(),
        ModelFamily::markov(
            1,
            vec![
                vec![0.7, 0.2, 0.1],
                vec![0.1, 0.8, 0.1],
                vec![0.3, 0.3, 0.4],
            ],
            vec![1.0 / 3.0; 3],
        )
        .unwrap(),
        ModelFamily::markov(2, order2, vec![1.0 / 3.0; 3]).unwrap(),
        ModelFamily::periodic(alphabet, vec![0, 1, 2]).unwrap(),
    ])
    .unwrap()
}

/// A class of `size` binary periodic models with distinct patterns; model 0
/// emits `1` forever.
pub fn periodic_class(size: usize) -> ModelClass {
    let alphabet = Alphabet::new(2).unwrap();
    let models = (0..size)
        .map(|i| {
            let pattern = if i == 0 {
                vec![1]
            } else {
                (0..=i).map(|j| usize::from(j != i)).collect()
            };
            ModelFamily::periodic(alphabet, pattern).unwrap()
        })
        .collect();
    ModelClass::uniform(models).unwrap()
}
