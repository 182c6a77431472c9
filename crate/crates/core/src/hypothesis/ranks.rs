//! Midrank assignment shared by the rank-based tests and Spearman's rho.

/// Ranks starting at 1, tied values receiving the average of the ranks they
/// span. Returns the ranks in input order and the sizes of tie groups
/// (groups of two or more), in ascending value order.
pub fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j share ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_values() {
        let (r, t) = midranks(&[3.0, 1.0, 2.0]);
        assert_eq!(r, vec![3.0, 1.0, 2.0]);
        assert!(t.is_empty());
    }

    #[test]
    fn ties_get_average_rank() {
        let (r, t) = midranks(&[1.0, 2.0, 2.0, 3.0, 2.0]);
        assert_eq!(r, vec![1.0, 3.0, 3.0, 5.0, 3.0]);
        assert_eq!(t, vec![3]);
        let (r, _) = midranks(&[5.0, 5.0]);
        assert_eq!(r, vec![1.5, 1.5]);
    }
}
