//! Reference implementations used as oracles. Nothing here calls into the
//! library's metric code.

#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

/// Free reduction of a word over `a..z` with uppercase inverses.
pub fn free_reduce(w: &str) -> String {
    let mut out: Vec<char> = Vec::new();
    for c in w.chars() {
        match out.last() {
            Some(&p) if p != c && p.eq_ignore_ascii_case(&c) => {
                out.pop();
            }
            _ => out.push(c),
        }
    }
    out.into_iter().collect()
}

/// `|u| + |v| - 2·|common prefix|` on reduced words.
pub fn free_dist(u: &str, v: &str) -> i64 {
    let (u, v) = (free_reduce(u), free_reduce(v));
    let common = u.chars().zip(v.chars()).take_while(|(x, y)| x == y).count();
    (u.len() + v.len() - 2 * common) as i64
}

pub fn free_norm(u: &str) -> i64 {
    free_reduce(u).len() as i64
}

/// Every reduced word of length at most `r` over the first `k` letters.
pub fn free_ball(k: usize, r: usize) -> Vec<String> {
    let letters: Vec<char> = "abcd"
        .chars()
        .take(k)
        .flat_map(|c| [c, c.to_ascii_uppercase()])
        .collect();
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..r {
        let mut next = Vec::new();
        for w in &layer {
            for &c in &letters {
                let cand = format!("{w}{c}");
                if free_reduce(&cand).len() == cand.len() {
                    next.push(cand);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn l1(p: (i64, i64), q: (i64, i64)) -> i64 {
    (p.0 - q.0).abs() + (p.1 - q.1).abs()
}

pub fn z2_ball(r: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            if x.abs() + y.abs() <= r {
                out.push((x, y));
            }
        }
    }
    out
}

/// Plain BFS norms in `Z^2` for a symmetric generating set.
pub fn lattice_bfs(gens: &[(i64, i64)], radius: i64) -> HashMap<(i64, i64), i64> {
    let mut all: Vec<(i64, i64)> = gens.to_vec();
    all.extend(gens.iter().map(|&(a, b)| (-a, -b)));
    let mut seen = HashMap::from([((0, 0), 0)]);
    let mut queue = VecDeque::from([(0i64, 0i64)]);
    while let Some(p) = queue.pop_front() {
        let d = seen[&p];
        if d == radius {
            continue;
        }
        for g in &all {
            let q = (p.0 + g.0, p.1 + g.1);
            seen.entry(q).or_insert_with(|| {
                queue.push_back(q);
                d + 1
            });
        }
    }
    seen
}

/// Doubled `min((x·z),(y·z)) - (x·y)`, maximized over all triples, from a
/// distance matrix with the base at index `base`.
pub fn brute_delta_doubled(d: &[Vec<i64>], base: usize) -> i64 {
    let n = d.len();
    let p = |x: usize, y: usize| d[x][base] + d[y][base] - d[x][y];
    let mut best = 0;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                best = best.max(p(x, z).min(p(y, z)) - p(x, y));
            }
        }
    }
    best
}

/// `x^n` as a string.
pub fn pow(x: &str, n: usize) -> String {
    x.repeat(n)
}
