#![allow(dead_code)]

use gst_core::points::cross_term;
use gst_core::quadform::psi;
use gst_core::rng::SplitMix64;
use gst_core::{Rational, Scalar};

pub fn q(num: i64, den: i64) -> Rational {
    Rational::ratio(num, den)
}

pub fn qs(v: &[(i64, i64)]) -> Vec<Rational> {
    v.iter().map(|&(a, b)| q(a, b)).collect()
}

pub fn below(rng: &mut SplitMix64, m: u64) -> u64 {
    rng.next() % m
}

/// Uniform-ish rational in `[0, 1]` with denominator at most 64.
pub fn rand_unit(rng: &mut SplitMix64) -> Rational {
    let den = 1 + below(rng, 64) as i64;
    let num = below(rng, den as u64 + 1) as i64;
    q(num, den)
}

pub fn rand_vec(rng: &mut SplitMix64, n: usize) -> Vec<Rational> {
    (0..n).map(|_| rand_unit(rng)).collect()
}

/// Random rational in `[-1, 1]`.
fn rand_signed(rng: &mut SplitMix64) -> Rational {
    rand_unit(rng) * q(2, 1) - q(1, 1)
}

/// Known nonconstant rational points of `Ind_n`, where there are any.
pub fn ind_seed(n: usize) -> Option<Vec<Rational>> {
    match n {
        3 => Some(qs(&[(1, 1), (1, 2), (1, 3)])),
        6 => Some(qs(&[(0, 1), (0, 1), (1, 2), (1, 1), (1, 1), (0, 1)])),
        8 => Some(qs(&[(0, 1), (0, 1), (1, 1), (1, 2), (0, 1), (1, 2), (1, 1), (0, 1)])),
        n if n % 2 == 1 => Some((0..n).map(|i| q((i % 2) as i64, 1)).collect()),
        _ => None,
    }
}

/// Rescales `p` into a random sub-interval of `[0, 1]` by `x ↦ a x + b`.
fn into_box(rng: &mut SplitMix64, p: &[Rational]) -> Vec<Rational> {
    let lo = p.iter().min().unwrap().clone();
    let hi = p.iter().max().unwrap().clone();
    if lo == hi {
        return vec![rand_unit(rng); p.len()];
    }
    let width = q(1 + below(rng, 16) as i64, 16);
    let off = rand_unit(rng) * (q(1, 1) - width.clone());
    let scale = width / (hi - lo.clone());
    p.iter().map(|v| (v.clone() - lo.clone()) * scale.clone() + off.clone()).collect()
}

/// A random rational point of `Ind_n`: move from a seed along a random
/// line to the second intersection with the quadric, then map back into
/// the box. Falls back to a constant vector when no seed is known.
pub fn rand_ind(rng: &mut SplitMix64, n: usize) -> Vec<Rational> {
    // n = 3: the quadric is two planes and lines from the seed only reach
    // the palindromic one, so mostly sample the other plane directly
    if n == 3 && below(rng, 4) != 0 {
        let (a, c) = (rand_unit(rng), rand_unit(rng));
        let b = (a.clone() + q(3, 1) * c.clone()) / q(4, 1);
        return vec![a, b, c];
    }
    let Some(s) = ind_seed(n) else {
        return vec![rand_unit(rng); n];
    };
    for _ in 0..100 {
        let d: Vec<Rational> = (0..n).map(|_| rand_signed(rng)).collect();
        let pd = psi(&d);
        let ct = cross_term(&s, &d).unwrap();
        if pd == q(0, 1) || ct == q(0, 1) {
            continue;
        }
        let t = -ct / pd;
        let p: Vec<Rational> = s.iter().zip(&d).map(|(a, b)| a.clone() + t.clone() * b.clone()).collect();
        return into_box(rng, &p);
    }
    into_box(rng, &s)
}

pub fn to_f64(p: &[Rational]) -> Vec<f64> {
    p.iter().map(Scalar::to_f64).collect()
}
