//! Naive reference implementation of the metric, written without the
//! library's alignment or factor code.

use cushlepor::HLeporParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Naive {
    pub lp: f64,
    pub npd: f64,
    pub npos_penal: f64,
    pub precision: f64,
    pub recall: f64,
    pub hpr: f64,
    pub score: f64,
}

fn agreeing_neighbours(hyp: &[&str], reference: &[&str], i: usize, j: usize, n: usize) -> usize {
    let mut count = 0;
    for k in 1..=n as isize {
        for offset in [-k, k] {
            let hi = i as isize + offset;
            let rj = j as isize + offset;
            if hi < 0 || rj < 0 || hi >= hyp.len() as isize || rj >= reference.len() as isize {
                continue;
            }
            if hyp[hi as usize] == reference[rj as usize] {
                count += 1;
            }
        }
    }
    count
}

/// 1-based (hyp, ref) pairs.
pub fn naive_align(hyp: &[&str], reference: &[&str], n: usize) -> Vec<(usize, usize)> {
    let mut used = vec![false; reference.len()];
    let mut pairs = Vec::new();
    for i in 0..hyp.len() {
        let pick = (0..reference.len())
            .filter(|&j| !used[j] && reference[j] == hyp[i])
            .min_by_key(|&j| {
                let distance = if i > j { i - j } else { j - i };
                (std::cmp::Reverse(agreeing_neighbours(hyp, reference, i, j, n)), distance, j)
            });
        if let Some(j) = pick {
            used[j] = true;
            pairs.push((i + 1, j + 1));
        }
    }
    pairs
}

pub fn naive_hlepor(hyp: &[&str], reference: &[&str], p: &HLeporParams) -> Naive {
    let c = hyp.len() as f64;
    let r = reference.len() as f64;
    let lp = if c == r {
        1.0
    } else if c < r {
        (1.0 - r / c).exp()
    } else {
        (1.0 - c / r).exp()
    };
    let pairs = naive_align(hyp, reference, p.n as usize);
    let mut diff = 0usize;
    for &(h, rf) in &pairs {
        diff += if h > rf { h - rf } else { rf - h };
    }
    let npd = diff as f64 / c;
    let npos_penal = (-npd).exp();
    let matched = pairs.len() as f64;
    let precision = matched / c;
    let recall = matched / r;
    let hpr = if matched == 0.0 {
        0.0
    } else {
        (p.alpha + p.beta) * precision * recall / (p.alpha * precision + p.beta * recall)
    };
    let score = if hpr == 0.0 {
        0.0
    } else {
        (p.weight_elp + p.weight_pos + p.weight_pr)
            / (p.weight_elp / lp + p.weight_pos / npos_penal + p.weight_pr / hpr)
    };
    Naive {
        lp,
        npd,
        npos_penal,
        precision,
        recall,
        hpr,
        score,
    }
}

/// Every sequence of length 1..=max_len over `vocab`.
pub fn all_sequences<'a>(vocab: &[&'a str], max_len: usize) -> Vec<Vec<&'a str>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<&str>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|prefix| {
                vocab.iter().map(move |t| {
                    let mut next = prefix.clone();
                    next.push(*t);
                    next
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}
