//! Integer lattices on the standard simplex and their Kuhn triangulation.
//!
//! A lattice point of resolution `N` in dimension `m` is a composition
//! `j = (j_0, ..., j_m)` of `N` into `m + 1` nonnegative parts; it represents
//! the barycentric point `j / N`.

use std::collections::HashMap;

/// All compositions of `total` into `parts` nonnegative integers, in
/// lexicographically decreasing order (largest `j_0` first).
pub fn compositions(parts: usize, total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; parts];
    fill(&mut current, 0, total, &mut out);
    out
}

fn fill(current: &mut Vec<u32>, slot: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
    if slot + 1 == current.len() {
        current[slot] = remaining;
        out.push(current.clone());
        return;
    }
    for v in (0..=remaining).rev() {
        current[slot] = v;
        fill(current, slot + 1, remaining - v, out);
    }
}

/// Number of lattice points, `C(N + m, m)`.
pub fn lattice_size(m: usize, resolution: u32) -> usize {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 1..=m as u128 {
        num *= resolution as u128 + i;
        den *= i;
    }
    (num / den) as usize
}

/// Lookup from composition to its position in a lattice listing.
#[derive(Debug, Clone)]
pub struct LatticeIndex {
    map: HashMap<Vec<u32>, usize>,
}

impl LatticeIndex {
    pub fn new(points: &[Vec<u32>]) -> Self {
        let map = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        LatticeIndex { map }
    }

    pub fn get(&self, j: &[u32]) -> Option<usize> {
        self.map.get(j).copied()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out.sort();
    out
}

/// Kuhn triangulation of the resolution-`N` simplex lattice.
///
/// Works in suffix-sum coordinates `c_k = j_k + ... + j_m` (k = 1..m), where
/// the simplex becomes the ordered region `N >= c_1 >= ... >= c_m >= 0`. That
/// region is a union of Kuhn simplices, so each simplex is kept iff all of its
/// vertices lie in it. Returns `N^m` simplices, each as `m + 1` compositions.
pub fn kuhn_simplices(m: usize, resolution: u32) -> Vec<Vec<Vec<u32>>> {
    let n = resolution as i64;
    let perms = permutations(m);
    let mut out = Vec::new();
    let mut base = vec![0i64; m];
    loop {
        for perm in &perms {
            let mut vertices = Vec::with_capacity(m + 1);
            let mut c = base.clone();
            let mut ok = ordered(&c, n);
            if ok {
                vertices.push(c.clone());
            }
            for &axis in perm {
                if !ok {
                    break;
                }
                c[axis] += 1;
                ok = ordered(&c, n);
                vertices.push(c.clone());
            }
            if ok {
                out.push(vertices.iter().map(|c| from_suffix(c, resolution)).collect());
            }
        }
        // odometer over base in [0, N-1]^m
        let mut k = 0;
        loop {
            if k == m {
                return out;
            }
            base[k] += 1;
            if base[k] < n {
                break;
            }
            base[k] = 0;
            k += 1;
        }
    }
}

fn ordered(c: &[i64], n: i64) -> bool {
    if c.is_empty() {
        return true;
    }
    if c[0] > n || c[c.len() - 1] < 0 {
        return false;
    }
    c.windows(2).all(|w| w[0] >= w[1])
}

fn from_suffix(c: &[i64], resolution: u32) -> Vec<u32> {
    let m = c.len();
    let mut j = vec![0u32; m + 1];
    for k in 0..m {
        let next = if k + 1 < m { c[k + 1] } else { 0 };
        j[k + 1] = (c[k] - next) as u32;
    }
    j[0] = resolution - c.first().copied().unwrap_or(0) as u32;
    j
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_order_and_count() {
        assert_eq!(compositions(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(compositions(3, 10).len(), 66);
        assert_eq!(lattice_size(2, 10), 66);
        assert_eq!(lattice_size(3, 4), compositions(4, 4).len());
    }

    #[test]
    fn kuhn_counts() {
        for m in 1..=3 {
            for n in 1..=5u32 {
                let s = kuhn_simplices(m, n);
                assert_eq!(s.len(), (n as usize).pow(m as u32), "m={m} n={n}");
                for simplex in &s {
                    assert_eq!(simplex.len(), m + 1);
                    for v in simplex {
                        assert_eq!(v.iter().sum::<u32>(), n);
                    }
                }
            }
        }
    }

    #[test]
    fn kuhn_one_dimensional_segments() {
        let s = kuhn_simplices(1, 3);
        assert_eq!(
            s,
            vec![
                vec![vec![3, 0], vec![2, 1]],
                vec![vec![2, 1], vec![1, 2]],
                vec![vec![1, 2], vec![0, 3]],
            ]
        );
    }

    #[test]
    fn kuhn_edges_are_unit_lattice_steps() {
        // every edge of every simplex moves one unit between two coordinates
        for simplex in kuhn_simplices(2, 4) {
            for a in 0..simplex.len() {
                for b in a + 1..simplex.len() {
                    let diff: i64 = simplex[a]
                        .iter()
                        .zip(&simplex[b])
                        .map(|(x, y)| (*x as i64 - *y as i64).abs())
                        .sum();
                    assert_eq!(diff, 2);
                }
            }
        }
    }
}
