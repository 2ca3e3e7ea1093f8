//! Random test networks shared by the integration tests.
#![allow(dead_code)]

use gridopt::dcopf::solve_dcopf_angle;
use gridopt::netmodel::{Bus, Generator, Line, Load};
use gridopt::{BusId, Network};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> String {
    let p = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

/// Costs drawn from a grid with no repeats, so merit order is strict.
pub fn distinct_costs(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut pool: Vec<u32> = (10..=90).collect();
    pool.shuffle(rng);
    pool[..n].iter().map(|&c| c as f64 + rng.gen_range(0.0..0.9)).collect()
}

/// Connected network in MW with 3–8 buses, random reactances in [0.05, 1],
/// 2–4 generators with distinct costs and demand well inside capacity.
/// No line ratings.
pub fn random_network(rng: &mut impl Rng) -> Network {
    let n = rng.gen_range(3..=8);
    let buses = (1..=n)
        .map(|id| Bus {
            id: BusId(id as u32),
            is_slack: id == 1,
        })
        .collect();
    let line = |a: usize, b: usize, rng: &mut dyn rand::RngCore| Line {
        from: BusId(a as u32 + 1),
        to: BusId(b as u32 + 1),
        r: 0.0,
        x: rng.gen_range(0.05..=1.0),
        b_sh: 0.0,
        rating: None,
    };
    let mut lines = Vec::new();
    for k in 1..n {
        let parent = rng.gen_range(0..k);
        lines.push(line(parent, k, rng));
    }
    for _ in 0..rng.gen_range(0..=n) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            lines.push(line(a, b, rng));
        }
    }
    let ng = rng.gen_range(2..=4);
    let costs = distinct_costs(rng, ng);
    let generators: Vec<Generator> = costs
        .into_iter()
        .map(|cost| Generator {
            bus: BusId(rng.gen_range(1..=n) as u32),
            cost,
            p_min: 0.0,
            p_max: rng.gen_range(50.0..200.0),
        })
        .collect();
    let capacity: f64 = generators.iter().map(|g| g.p_max).sum();
    let demand = capacity * rng.gen_range(0.3..0.7);
    let nl = rng.gen_range(1..=n.min(3));
    let mut load_buses: Vec<usize> = (1..=n).collect();
    load_buses.shuffle(rng);
    let shares: Vec<f64> = (0..nl).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = shares.iter().sum();
    let loads = load_buses[..nl]
        .iter()
        .zip(&shares)
        .map(|(&b, s)| Load {
            bus: BusId(b as u32),
            p: demand * s / total,
            q: 0.0,
        })
        .collect();
    Network::new(100.0, buses, lines, generators, loads)
}

/// Random network where, when `congest` is set, one or two lines are rated
/// below their unconstrained flow. Other lines stay unrated.
pub fn random_case(rng: &mut impl Rng, congest: bool) -> Network {
    let mut net = random_network(rng);
    if !congest {
        return net;
    }
    let free = solve_dcopf_angle(&net).expect("unconstrained solve");
    let mut by_flow: Vec<(usize, f64)> = free.flows.iter().map(|f| (f.line, f.p_mw.abs())).collect();
    by_flow.sort_by(|a, b| b.1.total_cmp(&a.1));
    let k = rng.gen_range(1..=2.min(by_flow.len()));
    let mut rated = 0;
    // A limit on a bridge line that carries a fixed flow makes the case
    // infeasible; such lines are skipped.
    for &(line, flow) in &by_flow {
        if rated == k || flow <= 1.0 {
            break;
        }
        net.lines[line].rating = Some(flow * rng.gen_range(0.5..0.95));
        if solve_dcopf_angle(&net).expect("solve").is_optimal() {
            rated += 1;
        } else {
            net.lines[line].rating = None;
        }
    }
    net
}

/// The criterion-2 suite: `count` networks, alternating congested and free.
pub fn suite(seed: u64, count: usize) -> Vec<Network> {
    let mut r = rng(seed);
    (0..count).map(|k| random_case(&mut r, k % 2 == 1)).collect()
}
