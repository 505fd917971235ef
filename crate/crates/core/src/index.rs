//! Strictly increasing index tuples and the signs of the permutations that
//! sort them. Every form in the crate stores its coefficients in the
//! lexicographic order produced by [`index_sets`].

/// Binomial coefficient `n choose k` (0 when `k > n`).
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All strictly increasing `k`-tuples drawn from `0..dim`, in lexicographic order.
pub fn index_sets(dim: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(dim, k));
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, dim: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            if dim - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, dim, k, cur, out);
            cur.pop();
        }
    }
    rec(0, dim, k, &mut cur, &mut out);
    out
}

/// Position of a strictly increasing tuple inside `index_sets(dim, set.len())`.
pub fn index_position(dim: usize, set: &[usize]) -> usize {
    let k = set.len();
    let mut pos = 0;
    let mut prev = 0;
    for (slot, &v) in set.iter().enumerate() {
        for skipped in prev..v {
            pos += binomial(dim - skipped - 1, k - slot - 1);
        }
        prev = v + 1;
    }
    pos
}

/// Sign of the permutation that sorts `seq`, or `None` when it has a repeat.
pub fn sort_sign(seq: &[usize]) -> Option<f64> {
    let mut inversions = 0usize;
    for i in 0..seq.len() {
        for j in (i + 1)..seq.len() {
            if seq[i] == seq[j] {
                return None;
            }
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    Some(if inversions % 2 == 0 { 1.0 } else { -1.0 })
}

/// Merge two increasing tuples into their sorted union together with the sign
/// of `a ++ b`; `None` if they share an index.
pub fn merge(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut cat: Vec<usize> = a.iter().chain(b).copied().collect();
    let sign = sort_sign(&cat)?;
    cat.sort_unstable();
    Some((cat, sign))
}

/// Increasing complement of `set` in `0..dim`.
pub fn complement(dim: usize, set: &[usize]) -> Vec<usize> {
    (0..dim).filter(|i| !set.contains(i)).collect()
}

/// Human label for a tuple using 1-based axes, e.g. `[0, 2]` -> `"1,3"`.
pub fn label(set: &[usize]) -> String {
    set.iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Parse a 1-based label such as `"1,3"` into a 0-based increasing tuple.
pub fn parse_label(s: &str) -> Option<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() {
        return Some(Vec::new());
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        let v: usize = part.trim().parse().ok()?;
        if v == 0 {
            return None;
        }
        out.push(v - 1);
    }
    if out.windows(2).any(|w| w[0] >= w[1]) {
        return None;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sets_are_lexicographic_and_counted() {
        let s = index_sets(4, 2);
        assert_eq!(s.len(), 6);
        assert_eq!(s[0], vec![0, 1]);
        assert_eq!(s[5], vec![2, 3]);
        for (i, set) in s.iter().enumerate() {
            assert_eq!(index_position(4, set), i);
        }
        assert_eq!(index_sets(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(index_sets(5, 5).len(), 1);
    }

    #[test]
    fn positions_round_trip_for_all_degrees() {
        for dim in 0..7 {
            for k in 0..=dim {
                for (i, set) in index_sets(dim, k).iter().enumerate() {
                    assert_eq!(index_position(dim, set), i);
                }
            }
        }
    }

    #[test]
    fn merge_signs() {
        assert_eq!(merge(&[0], &[1]), Some((vec![0, 1], 1.0)));
        assert_eq!(merge(&[1], &[0]), Some((vec![0, 1], -1.0)));
        assert_eq!(merge(&[0, 2], &[1]), Some((vec![0, 1, 2], -1.0)));
        assert_eq!(merge(&[0], &[0, 1]), None);
    }

    #[test]
    fn labels() {
        assert_eq!(label(&[0, 2]), "1,3");
        assert_eq!(parse_label("1,3"), Some(vec![0, 2]));
        assert_eq!(parse_label("3,1"), None);
        assert_eq!(parse_label("0"), None);
        assert_eq!(parse_label(""), Some(vec![]));
    }
}
