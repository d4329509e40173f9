use crate::error::{Error, Result};

pub const MAX_COMPONENTS: usize = 20;
pub const MAX_SUBSETS: usize = 100;

/// Row over GF(2) of the stacked `[left | right]` matrix; `left` occupies the
/// high bits.
fn pack(left: u64, right: u64, m: usize) -> u64 {
    (left << m) | right
}

/// Row-reduces in place and returns the rank.
fn eliminate(rows: &mut [u64], width: usize) -> usize {
    let mut rank = 0;
    for bit in (0..width).rev() {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && *row >> bit & 1 == 1 {
                *row ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

/// Basis of `U ∩ W` by Zassenhaus: reduce `[[U, U], [W, 0]]`; rows with a
/// zero left half span the intersection.
fn intersect(u: &[u64], w: &[u64], m: usize) -> Vec<u64> {
    let mut rows: Vec<u64> = u.iter().map(|&x| pack(x, x, m)).chain(w.iter().map(|&x| pack(x, 0, m))).collect();
    let rank = eliminate(&mut rows, 2 * m);
    let mask = (1u64 << m) - 1;
    rows[..rank].iter().filter(|&&r| r >> m == 0).map(|&r| r & mask).collect()
}

/// Rank of the intersection of the coordinate subspaces spanned by each
/// subset of `0..m`, by exact elimination over the two-element field. An
/// empty list of subsets leaves the whole space.
pub fn subspace_oracle(m: usize, subsets: &[Vec<usize>]) -> Result<usize> {
    if m > MAX_COMPONENTS {
        return Err(Error::OracleLimits(format!("{m} components, limit {MAX_COMPONENTS}")));
    }
    if subsets.len() > MAX_SUBSETS {
        return Err(Error::OracleLimits(format!("{} subsets, limit {MAX_SUBSETS}", subsets.len())));
    }
    let mut basis: Vec<u64> = (0..m).map(|i| 1u64 << i).collect();
    for s in subsets {
        if let Some(&bad) = s.iter().find(|&&i| i >= m) {
            return Err(Error::OracleLimits(format!("index {bad} out of range for {m} components")));
        }
        let span: Vec<u64> = s.iter().map(|&i| 1u64 << i).collect();
        basis = intersect(&basis, &span, m);
    }
    let rank = eliminate(&mut basis, m);
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlapping_pairs() {
        assert_eq!(subspace_oracle(3, &[vec![0, 1], vec![1, 2]]).unwrap(), 1);
    }

    #[test]
    fn full_subset_keeps_everything() {
        assert_eq!(subspace_oracle(5, &[vec![0, 1, 2, 3, 4]]).unwrap(), 5);
        assert_eq!(subspace_oracle(4, &[]).unwrap(), 4);
    }

    #[test]
    fn disjoint_supports() {
        assert_eq!(subspace_oracle(2, &[vec![0], vec![1]]).unwrap(), 0);
        assert_eq!(subspace_oracle(0, &[vec![]]).unwrap(), 0);
    }

    #[test]
    fn limits() {
        assert!(subspace_oracle(21, &[]).is_err());
        assert!(subspace_oracle(2, &vec![vec![0]; 101]).is_err());
        assert!(subspace_oracle(2, &[vec![2]]).is_err());
    }

    #[test]
    fn matches_set_intersection_on_all_small_families() {
        // every family of up to three subsets of a 4-element set
        let m = 4;
        for a in 0u32..16 {
            for b in 0u32..16 {
                for c in 0u32..16 {
                    let sets: Vec<Vec<usize>> =
                        [a, b, c].iter().map(|&x| (0..m).filter(|i| x >> i & 1 == 1).collect()).collect();
                    let expected = (a & b & c).count_ones() as usize;
                    assert_eq!(subspace_oracle(m, &sets).unwrap(), expected);
                }
            }
        }
    }
}
