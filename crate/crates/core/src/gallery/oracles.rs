//! Brute-force references for the suites. Deliberately naive: plain tables, plain integer
//! arithmetic, no calls into the solvers they check.

use std::collections::{BTreeSet, HashMap};

use crate::prosys::PosetIndex;

/// Every function `{0..n} → {0..m}` as a table.
pub fn all_maps(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|t| (0..m).map(move |v| [t.clone(), vec![v]].concat())).collect();
    }
    out
}

fn after(g: &[usize], f: &[usize]) -> Vec<usize> {
    f.iter().map(|&i| g[i]).collect()
}

/// Whether equal keys always come with equal values; the same as checking every pair.
fn constant_on_fibres(pairs: impl Iterator<Item = (Vec<usize>, Vec<usize>)>) -> bool {
    let mut seen: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (k, v) in pairs {
        if *seen.entry(k).or_insert_with(|| v.clone()) != v {
            return false;
        }
    }
    true
}

/// `f∘u = f∘v ⟹ p∘u = p∘v` for all `u, v: P → X` with `|P| <= max_p`; `f, p` out of a set
/// of size `x`.
pub fn left_cancels(x: usize, f: &[usize], p: &[usize], max_p: usize) -> bool {
    (0..=max_p).all(|size| constant_on_fibres(all_maps(size, x).iter().map(|u| (after(f, u), after(p, u)))))
}

/// `u∘f = v∘f ⟹ u∘p = v∘p` for all `u, v: Y → T` with `|T| <= max_t`; `f, p` into a set of
/// size `y`.
pub fn right_cancels(y: usize, f: &[usize], p: &[usize], max_t: usize) -> bool {
    (0..=max_t).all(|size| constant_on_fibres(all_maps(y, size).iter().map(|u| (after(u, f), after(u, p)))))
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i128>> = m[1..].iter().map(|r| [&r[..j], &r[j + 1..]].concat()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * determinant(&minor)
        })
        .sum()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

/// Nonzero invariant factors `D_k / D_{k-1}`, with `D_k` the gcd of the `k×k` minors.
pub fn invariant_factors_by_minors(a: &[Vec<i64>]) -> Vec<i128> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut prev = 1i128;
    let mut out = Vec::new();
    for k in 1..=rows.min(cols) {
        let mut d = 0i128;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<i128>> = rs.iter().map(|&i| cs.iter().map(|&j| a[i][j] as i128).collect()).collect();
                d = gcd(d, determinant(&minor));
            }
        }
        if d == 0 {
            break;
        }
        out.push(d / prev);
        prev = d;
    }
    out
}

fn is_partial_order(n: usize, leq: &[Vec<bool>]) -> bool {
    for a in 0..n {
        for b in 0..n {
            if a != b && leq[a][b] && leq[b][a] {
                return false;
            }
            for c in 0..n {
                if leq[a][b] && leq[b][c] && !leq[a][c] {
                    return false;
                }
            }
        }
    }
    true
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn canonical(n: usize, leq: &[Vec<bool>], perms: &[Vec<usize>]) -> Vec<bool> {
    perms
        .iter()
        .map(|p| (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| leq[p[a]][p[b]]).collect::<Vec<bool>>())
        .max()
        .unwrap_or_default()
}

/// All partial orders on `n` elements, one per isomorphism class.
pub fn posets_up_to_iso(n: usize) -> Vec<Vec<Vec<bool>>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if mask & (1 << k) != 0 {
                leq[a][b] = true;
            }
        }
        if is_partial_order(n, &leq) && seen.insert(canonical(n, &leq, &perms)) {
            out.push(leq);
        }
    }
    out
}

/// Every finite directed poset with at most `max_len` elements, up to isomorphism: a finite
/// directed poset is an arbitrary poset with a top element added.
pub fn directed_posets(max_len: usize) -> Vec<PosetIndex> {
    let mut out = Vec::new();
    for n in 0..max_len {
        for leq in posets_up_to_iso(n) {
            let mut full = vec![vec![false; n + 1]; n + 1];
            for a in 0..n {
                for b in 0..n {
                    full[a][b] = leq[a][b];
                }
                full[a][n] = true;
            }
            full[n][n] = true;
            let labels: Vec<String> =
                (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).chain(["top".to_string()]).collect();
            out.push(PosetIndex::new(labels, full).expect("a poset with a top is directed"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poset_counts_match_the_known_sequence() {
        let counts: Vec<usize> = (0..=4).map(|n| posets_up_to_iso(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 16]);
        assert_eq!(directed_posets(5).len(), 25);
    }

    #[test]
    fn determinant_of_small_matrices() {
        assert_eq!(determinant(&[vec![2, 1], vec![7, 4]]), 1);
        assert_eq!(determinant(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]), 0);
    }

    #[test]
    fn minors_give_invariant_factors() {
        assert_eq!(invariant_factors_by_minors(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(invariant_factors_by_minors(&[vec![2, 4], vec![4, 8]]), vec![2]);
    }

    #[test]
    fn cancellation_by_enumeration() {
        // f identifies 0 and 1; p separates them, so f does not left-cancel before p.
        assert!(!left_cancels(2, &[0, 0], &[0, 1], 2));
        assert!(left_cancels(2, &[0, 1], &[0, 0], 3));
        // f misses 1 in a 2-element target; p hits it.
        assert!(!right_cancels(2, &[0], &[1], 2));
        assert!(right_cancels(2, &[0, 1], &[1], 2));
    }
}
