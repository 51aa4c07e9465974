//! Smith and Hermite normal forms of small integer matrices.

use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<i64>>;

fn overflow() -> Error {
    Error::InvalidParameter("integer overflow in normal form computation".into())
}

fn axpy_row(m: &mut [Vec<i128>], dst: usize, src: usize, q: i128) -> Result<()> {
    for c in 0..m[dst].len() {
        let v = m[src][c].checked_mul(q).and_then(|t| m[dst][c].checked_sub(t)).ok_or_else(overflow)?;
        m[dst][c] = v;
    }
    Ok(())
}

fn axpy_col(m: &mut [Vec<i128>], dst: usize, src: usize, q: i128) -> Result<()> {
    for row in m.iter_mut() {
        let v = row[src].checked_mul(q).and_then(|t| row[dst].checked_sub(t)).ok_or_else(overflow)?;
        row[dst] = v;
    }
    Ok(())
}

fn widen(a: &[Vec<i64>]) -> Vec<Vec<i128>> {
    a.iter().map(|r| r.iter().map(|v| *v as i128).collect()).collect()
}

fn narrow(a: &[Vec<i128>]) -> Result<IntMatrix> {
    a.iter()
        .map(|r| r.iter().map(|v| i64::try_from(*v).map_err(|_| overflow())).collect())
        .collect()
}

fn identity(k: usize) -> Vec<Vec<i128>> {
    (0..k).map(|i| (0..k).map(|j| (i == j) as i128).collect()).collect()
}

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal, `d_i | d_{i+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmithForm {
    pub diagonal: Vec<i64>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

pub fn smith_normal_form(a: &[Vec<i64>]) -> Result<SmithForm> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    if a.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidParameter("ragged matrix".into()));
    }
    let mut m = widen(a);
    let mut u = identity(rows);
    let mut v = identity(cols);
    let kmax = rows.min(cols);
    for t in 0..kmax {
        loop {
            // smallest nonzero entry of the trailing block as pivot
            let mut piv = None;
            for r in t..rows {
                for c in t..cols {
                    if m[r][c] != 0 && piv.map_or(true, |(pr, pc): (usize, usize)| m[r][c].abs() < m[pr][pc].abs()) {
                        piv = Some((r, c));
                    }
                }
            }
            let Some((pr, pc)) = piv else { break };
            m.swap(t, pr);
            u.swap(t, pr);
            for row in m.iter_mut() {
                row.swap(t, pc);
            }
            for row in v.iter_mut() {
                row.swap(t, pc);
            }
            let p = m[t][t];
            let mut clean = true;
            for r in t + 1..rows {
                let q = m[r][t].div_euclid(p);
                axpy_row(&mut m, r, t, q)?;
                axpy_row(&mut u, r, t, q)?;
                clean &= m[r][t] == 0;
            }
            for c in t + 1..cols {
                let q = m[t][c].div_euclid(p);
                axpy_col(&mut m, c, t, q)?;
                axpy_col(&mut v, c, t, q)?;
                clean &= m[t][c] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility of the trailing block
            let bad = (t + 1..rows).find(|&r| (t + 1..cols).any(|c| m[r][c] % p != 0));
            match bad {
                Some(r) => {
                    axpy_row(&mut m, t, r, -1)?;
                    axpy_row(&mut u, t, r, -1)?;
                }
                None => break,
            }
        }
        if m[t][t] < 0 {
            for c in 0..cols {
                m[t][c] = -m[t][c];
            }
            for c in 0..rows {
                u[t][c] = -u[t][c];
            }
        }
    }
    Ok(SmithForm {
        diagonal: (0..kmax).map(|i| m[i][i] as i64).collect(),
        u: narrow(&u)?,
        v: narrow(&v)?,
    })
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> IntMatrix {
    let k = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..cols).map(|c| (0..k).map(|j| row[j] * b[j][c]).sum()).collect())
        .collect()
}

/// Row Hermite normal form: upper triangular, positive pivots, entries above
/// each pivot reduced into `[0, pivot)`; zero rows dropped.
pub fn hermite_normal_form(a: &[Vec<i64>]) -> Result<IntMatrix> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut m = widen(a);
    let rows = m.len();
    let mut r0 = 0;
    for c in 0..cols {
        if r0 == rows {
            break;
        }
        loop {
            let piv = (r0..rows).filter(|&r| m[r][c] != 0).min_by_key(|&r| m[r][c].abs());
            let Some(pr) = piv else { break };
            m.swap(r0, pr);
            let mut done = true;
            for r in r0 + 1..rows {
                let q = m[r][c].div_euclid(m[r0][c]);
                axpy_row(&mut m, r, r0, q)?;
                done &= m[r][c] == 0;
            }
            if done {
                break;
            }
        }
        if m[r0][c] == 0 {
            continue;
        }
        if m[r0][c] < 0 {
            for v in m[r0].iter_mut() {
                *v = -*v;
            }
        }
        for r in 0..r0 {
            let q = m[r][c].div_euclid(m[r0][c]);
            axpy_row(&mut m, r, r0, q)?;
        }
        r0 += 1;
    }
    m.truncate(r0);
    narrow(&m)
}

/// Determinant by fraction-free elimination.
pub fn determinant(a: &[Vec<i64>]) -> Result<i64> {
    let k = a.len();
    if k == 0 {
        return Ok(1);
    }
    let mut m = widen(a);
    let mut sign = 1i128;
    let mut prev = 1i128;
    for t in 0..k {
        let Some(p) = (t..k).find(|&r| m[r][t] != 0) else { return Ok(0) };
        if p != t {
            m.swap(p, t);
            sign = -sign;
        }
        for r in t + 1..k {
            for c in t + 1..k {
                let v = m[r][c]
                    .checked_mul(m[t][t])
                    .and_then(|x| m[r][t].checked_mul(m[t][c]).and_then(|y| x.checked_sub(y)))
                    .ok_or_else(overflow)?;
                m[r][c] = v / prev;
            }
            m[r][t] = 0;
        }
        prev = m[t][t];
    }
    i64::try_from(sign * m[k - 1][k - 1]).map_err(|_| overflow())
}
