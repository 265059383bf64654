//! Orbits of `F_2` tensors of shape `[a, b, c]` under `GL_a x GL_b x GL_c`.
//!
//! A tensor is a linear map `F_2^a -> M_{b x c}`. Maps with the same image
//! form one `GL_a` orbit, so tensor orbits are the orbits of subspaces of
//! dimension `<= a` under `M -> P M Q^T`. Matrices are bitmasks with bit
//! `j * c + l` holding entry `(j, l)`; a subspace is its reduced echelon basis.

use std::collections::VecDeque;

pub struct Orbit {
    /// Reduced echelon basis of one subspace in the orbit.
    pub rep: Vec<u32>,
    /// Number of tensors in the orbit.
    pub tensors: u128,
}

/// Fully reduced echelon basis, sorted by descending pivot.
pub fn reduce(vs: &[u32]) -> Vec<u32> {
    let mut basis: Vec<u32> = vec![];
    for &v in vs {
        let v = basis.iter().fold(v, |v, &b| v.min(v ^ b));
        if v != 0 {
            for b in &mut basis {
                *b = (*b).min(*b ^ v);
            }
            basis.push(v);
        }
    }
    basis.sort_unstable_by(|x, y| y.cmp(x));
    basis
}

fn pack(basis: &[u32], n: usize) -> usize {
    basis.iter().fold(0usize, |k, &v| (k << n) | v as usize)
}

/// Surjective linear maps `F_2^a -> F_2^d`.
fn surjections(a: usize, d: usize) -> u128 {
    (0..d).map(|k| (1u128 << a) - (1u128 << k)).product()
}

/// Pivot sets `[2^p1, .., 2^pd]` with `n > p1 > .. > pd`.
fn pivot_sets(d: usize, below: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() == d {
        out.push(prefix.clone());
        return;
    }
    for p in (0..below).rev() {
        prefix.push(1 << p);
        pivot_sets(d, p, prefix, out);
        prefix.pop();
    }
}

/// Every reduced echelon basis with the given pivots.
fn fill_free_bits(pivots: &[u32], out: &mut Vec<Vec<u32>>) {
    let pivot_mask: u32 = pivots.iter().sum();
    let free: Vec<u32> = pivots.iter().map(|&p| (p - 1) & !pivot_mask).collect();
    let mut current: Vec<u32> = pivots.to_vec();
    fn go(i: usize, free: &[u32], current: &mut Vec<u32>, pivots: &[u32], out: &mut Vec<Vec<u32>>) {
        if i == free.len() {
            out.push(current.clone());
            return;
        }
        let mut sub = free[i];
        loop {
            current[i] = pivots[i] | sub;
            go(i + 1, free, current, pivots, out);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free[i];
        }
    }
    go(0, &free, &mut current, pivots, out);
}

/// Every subspace of `F_2^n` of dimension `d`.
pub fn subspaces(n: usize, d: usize) -> Vec<Vec<u32>> {
    let mut sets = vec![];
    pivot_sets(d, n, &mut vec![], &mut sets);
    let mut out = vec![];
    for pivots in sets {
        fill_free_bits(&pivots, &mut out);
    }
    out
}

/// Transvections generating `GL_b x GL_c` acting on `b x c` matrices.
fn generators(b: usize, c: usize) -> Vec<Box<dyn Fn(u32) -> u32>> {
    let row_mask = (1u32 << c) - 1;
    let col_mask: u32 = (0..b).map(|r| 1u32 << (r * c)).sum();
    let mut gens: Vec<Box<dyn Fn(u32) -> u32>> = vec![];
    for i in 0..b {
        for j in 0..b {
            if i != j {
                gens.push(Box::new(move |m| m ^ (((m >> (j * c)) & row_mask) << (i * c))));
            }
        }
    }
    for i in 0..c {
        for j in 0..c {
            if i != j {
                gens.push(Box::new(move |m| m ^ (((m >> j) & col_mask) << i)));
            }
        }
    }
    gens
}

pub fn orbits(dims: [usize; 3]) -> Vec<Orbit> {
    let [a, b, c] = dims;
    let n = b * c;
    let gens = generators(b, c);
    let top = a.min(n);
    let mut seen = vec![false; 1usize << (top * n)];
    let mut out = vec![];
    for d in 0..=top {
        for start in subspaces(n, d) {
            if seen[pack(&start, n)] {
                continue;
            }
            seen[pack(&start, n)] = true;
            let mut members = 0u128;
            let mut queue = VecDeque::from([start.clone()]);
            while let Some(s) = queue.pop_front() {
                members += 1;
                for g in &gens {
                    let image: Vec<u32> = s.iter().map(|&v| g(v)).collect();
                    let image = reduce(&image);
                    let key = pack(&image, n);
                    if !seen[key] {
                        seen[key] = true;
                        queue.push_back(image);
                    }
                }
            }
            out.push(Orbit {
                rep: start,
                tensors: members * surjections(a, d),
            });
        }
    }
    out
}
