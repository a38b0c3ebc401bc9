//! Group-communication sentiment step: neutral transitions keep the
//! bullishness fixed, majority-style transitions polarize it, and returns
//! reshape the transition probabilities.
//!
//! cargo run --example opinion_dynamics

use sentiment_market::model::{binomial_coefficient, sentiment_step, transition_update, uniform_weights, TransitionState};

fn majority(max_group: usize) -> TransitionState {
    let rows: Vec<Vec<f64>> = (1..=max_group)
        .map(|k| {
            (0..=k)
                .map(|j| match (2 * j).cmp(&k) {
                    std::cmp::Ordering::Greater => 1.0,
                    std::cmp::Ordering::Equal => 0.5,
                    std::cmp::Ordering::Less => 0.0,
                })
                .collect()
        })
        .collect();
    TransitionState::from_probabilities(&rows).unwrap()
}

fn main() {
    let l = 5;
    let weights = uniform_weights(l);
    println!("C(5, j) = {:?}", (0..=5).map(|j| binomial_coefficient(5, j).unwrap()).collect::<Vec<_>>());

    let neutral = TransitionState::neutral(l).unwrap();
    let polar = majority(l);
    println!("{:>6} {:>10} {:>10}", "B", "neutral", "majority");
    for b in [0.1, 0.3, 0.5, 0.6, 0.75, 0.9] {
        println!("{b:>6.2} {:>10.6} {:>10.6}", sentiment_step(b, &neutral, &weights), sentiment_step(b, &polar, &weights));
    }

    // repeated majority talk drives a slight bullish lean to consensus
    let mut b = 0.55;
    for t in 1..=8 {
        b = sentiment_step(b, &polar, &weights);
        println!("t = {t}: B = {b:.6}");
    }

    // a negative return lowers every transition probability; a positive one
    // raises them up to the cap at 1
    let down = transition_update(&neutral, -0.02, 0.05);
    let up = transition_update(&neutral, 0.02, 0.05);
    println!("m(5,3): neutral {:.4}, after -2% {:.4}, after +2% {:.4}", neutral.probability(5, 3), down.probability(5, 3), up.probability(5, 3));
    println!("B after -2%: {:.6}", sentiment_step(0.5, &down, &weights));
}
