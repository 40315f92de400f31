//! Brute-force LP reference: enumerate every basic solution of
//! `max cᵀx, Ax ≤ b, x ≥ 0`. Exponential, so only for n ≤ 6, m ≤ 8.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Best objective over the vertices of `{x : rows·x ≤ rhs}`; `None` if there are none.
fn best_vertex(rows: &[Vec<f64>], rhs: &[f64], c: &[f64]) -> Option<f64> {
    let n = c.len();
    let scale = 1.0 + rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut best: Option<f64> = None;
    for subset in combinations(rows.len(), n) {
        let a = DMatrix::from_fn(n, n, |i, j| rows[subset[i]][j]);
        let b = DVector::from_fn(n, |i, _| rhs[subset[i]]);
        let lu = a.lu();
        if lu.determinant().abs() < 1e-9 {
            continue;
        }
        let Some(x) = lu.solve(&b) else { continue };
        let feasible = rows.iter().zip(rhs).all(|(row, bi)| {
            let ax: f64 = row.iter().zip(x.iter()).map(|(r, v)| r * v).sum();
            ax <= bi + 1e-9 * scale
        });
        if feasible {
            let v: f64 = c.iter().zip(x.iter()).map(|(ci, xi)| ci * xi).sum();
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    }
    best
}

/// Classify and solve `max cᵀx s.t. Ax ≤ b, x ≥ 0` without any pivoting.
///
/// The feasible set is pointed (x ≥ 0), so it is empty iff it has no
/// vertex. It is unbounded in the objective iff some recession direction
/// d ≥ 0, Ad ≤ 0, Σd ≤ 1 has cᵀd > 0, which is again a vertex search.
pub fn solve(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Verdict {
    let n = c.len();
    let identity_rows = (0..n).map(|j| {
        let mut r = vec![0.0; n];
        r[j] = -1.0;
        r
    });
    let mut rows: Vec<Vec<f64>> = a.to_vec();
    rows.extend(identity_rows.clone());
    let mut rhs = b.to_vec();
    rhs.extend(std::iter::repeat_n(0.0, n));

    let Some(value) = best_vertex(&rows, &rhs, c) else {
        return Verdict::Infeasible;
    };

    let mut cone_rows: Vec<Vec<f64>> = a.to_vec();
    cone_rows.extend(identity_rows);
    cone_rows.push(vec![1.0; n]);
    let mut cone_rhs = vec![0.0; a.len() + n];
    cone_rhs.push(1.0);
    let ray = best_vertex(&cone_rows, &cone_rhs, c).unwrap_or(0.0);
    if ray > 1e-9 {
        Verdict::Unbounded
    } else {
        Verdict::Optimal(value)
    }
}
