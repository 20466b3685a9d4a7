use num_traits::{One, Signed, Zero};

use super::Rational;

/// Finds `y ≥ 0` with `a·y = b`, or `None` if no such point exists.
///
/// Dense tableau, phase-one objective (sum of artificials), Bland's rule for
/// both entering and leaving variables so the method always terminates.
pub fn phase_one(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    if m == 0 {
        return Some(vec![Rational::zero(); n]);
    }
    let width = n + m;

    // Rows of [A | I | b], flipped so the right-hand side is nonnegative.
    let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut r: Vec<Rational> = row.iter().map(|v| if flip { -v.clone() } else { v.clone() }).collect();
        r.resize(width, Rational::zero());
        r[n + i] = Rational::one();
        tab.push(r);
        rhs.push(if flip { -bi.clone() } else { bi.clone() });
    }
    let mut basis: Vec<usize> = (n..width).collect();

    // Reduced costs of the phase-one objective.
    let mut cost = vec![Rational::zero(); width];
    let mut value = Rational::zero();
    for (r, bi) in tab.iter().zip(&rhs) {
        for j in 0..n {
            cost[j] -= &r[j];
        }
        value -= bi;
    }

    loop {
        let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) else { break };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if !tab[i][enter].is_positive() {
                continue;
            }
            let ratio = &rhs[i] / &tab[i][enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // The phase-one objective is bounded below by zero, so a pivot row always exists.
        let (row, _) = leave.expect("unbounded phase-one objective");
        pivot(&mut tab, &mut rhs, &mut cost, &mut value, row, enter);
        basis[row] = enter;
    }

    if !value.is_zero() {
        return None;
    }
    let mut y = vec![Rational::zero(); n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            y[var] = rhs[i].clone();
        }
    }
    Some(y)
}

fn pivot(
    tab: &mut [Vec<Rational>],
    rhs: &mut [Rational],
    cost: &mut [Rational],
    value: &mut Rational,
    row: usize,
    col: usize,
) {
    let inv = Rational::one() / &tab[row][col];
    for v in tab[row].iter_mut() {
        *v *= &inv;
    }
    rhs[row] *= &inv;
    let pivot_row = tab[row].clone();
    let pivot_rhs = rhs[row].clone();
    for (i, r) in tab.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let f = r[col].clone();
        for (v, p) in r.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
        rhs[i] -= &f * &pivot_rhs;
    }
    if !cost[col].is_zero() {
        let f = cost[col].clone();
        for (v, p) in cost.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
        *value -= &f * &pivot_rhs;
    }
}
