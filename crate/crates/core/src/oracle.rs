//! Reference selection by full sort in unrestricted memory.
//!
//! Verification only: it reads raw values, bypassing the instrumentation
//! counters, and uses Θ(N) words of memory.

/// 1-based input index of the k-th smallest element under the
/// (value, index) tie-broken order.
pub fn oracle_select(values: &[i64], k: usize) -> usize {
    assert!(k >= 1 && k <= values.len(), "k={k} out of range");
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by_key(|&i| (values[i], i));
    order[k - 1] + 1
}

/// All input indices in tie-broken ascending order (1-based).
pub fn oracle_order(values: &[i64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by_key(|&i| (values[i], i));
    order.iter().map(|&i| i + 1).collect()
}

/// Rank (1-based) that element `index` holds in the tie-broken order.
pub fn oracle_rank_of(values: &[i64], index: usize) -> usize {
    let key = (values[index - 1], index - 1);
    1 + values
        .iter()
        .enumerate()
        .filter(|&(i, &v)| (v, i) < key)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_kth_smallest() {
        let v = vec![3, 1, 4, 2, 5];
        assert_eq!(oracle_select(&v, 1), 2);
        assert_eq!(oracle_select(&v, 2), 4);
        assert_eq!(oracle_select(&v, 5), 5);
    }

    #[test]
    fn duplicates_break_ties_by_index() {
        let v = vec![5, 5, 5];
        assert_eq!(oracle_select(&v, 1), 1);
        assert_eq!(oracle_select(&v, 2), 2);
        assert_eq!(oracle_select(&v, 3), 3);
    }

    #[test]
    fn rank_inverts_select() {
        let v = vec![9, 2, 9, 2, 7];
        for k in 1..=v.len() {
            assert_eq!(oracle_rank_of(&v, oracle_select(&v, k)), k);
        }
    }
}
