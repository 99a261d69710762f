//! Smith normal form over ℤ, tracking the column transform.

/// Result of `U·A·V = D`: diagonal entries and the unimodular column transform `V`.
#[derive(Clone, Debug)]
pub struct Smith {
    /// Nonzero invariant factors `d_1 | d_2 | …`, in order.
    pub factors: Vec<i128>,
    /// Column transform, `cols × cols`.
    pub v: Vec<Vec<i128>>,
    pub cols: usize,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Rank of the free part of `ℤ^cols / rowspace(A)`.
    pub fn free_rank(&self) -> usize {
        self.cols - self.rank()
    }

    /// Torsion invariant factors greater than one.
    pub fn torsion(&self) -> Vec<i128> {
        self.factors.iter().copied().filter(|&d| d > 1).collect()
    }

    /// Coordinates of a row vector in the quotient: free part, then torsion residues.
    pub fn coordinates(&self, x: &[i64]) -> (Vec<i128>, Vec<i128>) {
        let y: Vec<i128> = (0..self.cols)
            .map(|j| (0..self.cols).map(|i| x[i] as i128 * self.v[i][j]).sum())
            .collect();
        let free = y[self.rank()..].to_vec();
        let tors = self
            .factors
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 1)
            .map(|(i, &d)| y[i].rem_euclid(d))
            .collect();
        (free, tors)
    }
}

pub fn smith(rows: &[Vec<i64>], cols: usize) -> Smith {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let r = a.len();
    let mut v: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { 1 } else { 0 }).collect())
        .collect();
    let mut t = 0;
    while t < r.min(cols) {
        // Pivot: smallest nonzero absolute value in the remaining block.
        let mut piv = None;
        for i in t..r {
            for j in t..cols {
                if a[i][j] != 0 && piv.map_or(true, |(pi, pj): (usize, usize)| a[i][j].abs() < a[pi][pj].abs()) {
                    piv = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        a.swap(t, pi);
        swap_cols(&mut a, &mut v, t, pj);
        loop {
            let mut done = true;
            for i in t + 1..r {
                let q = a[i][t].div_euclid(a[t][t]);
                if q != 0 {
                    for j in t..cols {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    done = false;
                }
            }
            for j in t + 1..cols {
                let q = a[t][j].div_euclid(a[t][t]);
                if q != 0 {
                    for i in t..r {
                        a[i][j] -= q * a[i][t];
                    }
                    for row in v.iter_mut() {
                        row[j] -= q * row[t];
                    }
                }
                if a[t][j] != 0 {
                    done = false;
                }
            }
            if done {
                // Divisibility: fold any entry not divisible by the pivot into row t.
                let mut bad = None;
                'outer: for i in t + 1..r {
                    for j in t + 1..cols {
                        if a[i][j] % a[t][t] != 0 {
                            bad = Some(i);
                            break 'outer;
                        }
                    }
                }
                match bad {
                    None => break,
                    Some(i) => {
                        for j in t..cols {
                            let x = a[i][j];
                            a[t][j] += x;
                        }
                        continue;
                    }
                }
            }
            // Move the smallest nonzero entry of row/column t to the pivot.
            let mut best = (t, t);
            for i in t..r {
                if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                a.swap(t, best.0);
            }
            if best.1 != t {
                swap_cols(&mut a, &mut v, t, best.1);
            }
        }
        if a[t][t] < 0 {
            for j in t..cols {
                a[t][j] = -a[t][j];
            }
        }
        t += 1;
    }
    let factors = (0..t).map(|i| a[i][i]).collect();
    Smith { factors, v, cols }
}

fn swap_cols(a: &mut [Vec<i128>], v: &mut [Vec<i128>], x: usize, y: usize) {
    if x == y {
        return;
    }
    for row in a.iter_mut() {
        row.swap(x, y);
    }
    for row in v.iter_mut() {
        row.swap(x, y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_factors() {
        let s = smith(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3);
        assert_eq!(s.factors, vec![2, 6, 12]);
        let s = smith(&[vec![1, -1]], 2);
        assert_eq!(s.free_rank(), 1);
        assert!(s.torsion().is_empty());
    }

    #[test]
    fn coordinates_kill_relators() {
        let rows = vec![vec![2, 0, 1], vec![0, 3, 0]];
        let s = smith(&rows, 3);
        for r in &rows {
            let (free, tors) = s.coordinates(r);
            assert!(free.iter().all(|&x| x == 0));
            assert!(tors.iter().all(|&x| x == 0));
        }
        let (free, _) = s.coordinates(&[0, 0, 1]);
        assert_eq!(free.len(), 1);
    }
}
