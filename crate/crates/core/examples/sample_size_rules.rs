//! The sizing rules side by side on one normal stream with σ = 2.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use seqwidth::quantile::{StudentTQuantiles, TQuantile};
use seqwidth::rules::{
    chow_robbins_scan, final_sample_size, first_stage_gamma, first_stage_three_obs, mukhopadhyay_scan, n_opt_star,
    stein_rule, ScanParams,
};
use seqwidth::simulate::model::{sample_model, Model};
use seqwidth::summarize;

pub fn run_example() {
    let (alpha, d, n0_min) = (0.05, 0.25, 15);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let stream = sample_model(Model::Normal, 0.0, 2.0, 20_000, &mut rng);

    let oracle = n_opt_star(4.0, alpha, d).unwrap();
    println!("oracle N* (σ² known)          {oracle:.2}");

    let pilot_sd = summarize(&stream[..3]).unwrap().sd().unwrap();
    let n0 = first_stage_three_obs(pilot_sd, alpha, d, n0_min).unwrap();
    let s2 = summarize(&stream[3..3 + n0 as usize]).unwrap().s2_unbiased.unwrap();
    let n_final = final_sample_size(s2, n0, alpha, d).unwrap();
    println!("three-observation rule        N0 = {n0}, N = {n_final} (+3 pilot)");

    for gamma in [0.5, 1.0] {
        let n0 = first_stage_gamma(1.0, gamma, alpha, d, n0_min).unwrap();
        let s2 = summarize(&stream[..n0 as usize]).unwrap().s2_unbiased.unwrap();
        let n = final_sample_size(s2, n0, alpha, d).unwrap();
        println!("gamma rule, gamma = {gamma:<4}      N0 = {n0}, N = {n}");
    }

    let q = StudentTQuantiles::default();
    let t = q.t_quantile(n0_min - 1, 1.0 - alpha / 2.0).unwrap();
    let s2_pilot = summarize(&stream[..n0_min as usize]).unwrap().s2_unbiased.unwrap();
    println!(
        "Stein                         N = {}",
        stein_rule(s2_pilot, n0_min, d, t).unwrap()
    );

    let params = ScanParams::new(n0_min, alpha, d);
    let cr = chow_robbins_scan(stream.iter().copied(), &params, &q).unwrap();
    let mk = mukhopadhyay_scan(stream.iter().copied(), &params, &q).unwrap();
    println!("Chow-Robbins scan             N = {cr}");
    println!("Mukhopadhyay scan             N = {mk}");
    assert!(mk >= cr);
}

#[allow(dead_code)]
fn main() {
    run_example();
}
