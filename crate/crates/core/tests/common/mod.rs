#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rrsynth_core::arena::Vertex;
use rrsynth_core::meanpayoff::MeanPayoffGame;
use rrsynth_core::{Arena, Player, RrCondition, RrGame};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random dead-end-free arena with `n` vertices and out-degree at most
/// `max_out`.
pub fn random_arena(rng: &mut impl Rng, n: usize, max_out: usize) -> Arena {
    let vertices = (0..n)
        .map(|i| Vertex {
            name: format!("v{i}"),
            owner: if rng.gen_bool(0.5) {
                Player::Zero
            } else {
                Player::One
            },
        })
        .collect();
    let mut edges = Vec::new();
    let all: Vec<usize> = (0..n).collect();
    for u in 0..n {
        let d = rng.gen_range(1..=max_out.min(n));
        for &v in all.choose_multiple(rng, d) {
            edges.push((u, v));
        }
    }
    Arena::from_parts(vertices, edges).unwrap()
}

pub fn random_mpg(rng: &mut impl Rng, n: usize, w: i64) -> MeanPayoffGame {
    let arena = random_arena(rng, n, 3);
    let weights = (0..n)
        .map(|u| {
            arena
                .successors(u)
                .iter()
                .map(|_| rng.gen_range(-w..=w))
                .collect()
        })
        .collect();
    MeanPayoffGame::new(arena, weights).unwrap()
}

pub fn random_rr(rng: &mut impl Rng, n: usize, k: usize) -> RrGame {
    let arena = random_arena(rng, n, 2);
    let conditions = (0..k)
        .map(|_| {
            let req: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
            let resp: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
            RrCondition::new(n, &req, &resp)
        })
        .collect();
    RrGame::with_identity(arena, conditions).unwrap()
}
