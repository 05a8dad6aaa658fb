use super::{DecodeError, FieldError, Fp, Poly};

/// Distinct nonzero evaluation points `α_1..α_n`, one per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalPoints<const P: u64> {
    alphas: Vec<Fp<P>>,
}

impl<const P: u64> EvalPoints<P> {
    pub fn new(alphas: Vec<Fp<P>>) -> Result<Self, FieldError> {
        for (i, a) in alphas.iter().enumerate() {
            if a.is_zero() {
                return Err(FieldError::ZeroEvalPoint);
            }
            if alphas[..i].contains(a) {
                return Err(FieldError::DuplicatePoint(a.value()));
            }
        }
        Ok(EvalPoints { alphas })
    }

    /// `α_j = j` for `j = 1..=n`.
    pub fn sequential(n: usize) -> Result<Self, FieldError> {
        if n as u64 >= P {
            return Err(FieldError::TooManyPoints { n, modulus: P });
        }
        Self::new((1..=n as u64).map(Fp::new).collect())
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn as_slice(&self) -> &[Fp<P>] {
        &self.alphas
    }

    /// `α_j` for the 1-based node index `j`.
    pub fn alpha(&self, j: usize) -> Fp<P> {
        self.alphas[j - 1]
    }
}

/// A received word; `None` marks an erasure at a known position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsCodeword<const P: u64> {
    pub symbols: Vec<Option<Fp<P>>>,
}

impl<const P: u64> RsCodeword<P> {
    pub fn encode(message: &Poly<P>, points: &EvalPoints<P>) -> Self {
        RsCodeword {
            symbols: points.as_slice().iter().map(|&a| Some(message.eval(a))).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn erase(&mut self, i: usize) {
        self.symbols[i] = None;
    }

    pub fn erasures(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_none()).count()
    }
}

/// Decodes `received` to the message polynomial of degree below `k`,
/// correcting up to `max_errors` wrong symbols among the non-erased ones.
///
/// Erased positions are punctured first; the remaining `n'` points are
/// decoded with Berlekamp–Welch, which needs `n' >= k + 2 * max_errors`.
pub fn rs_decode<const P: u64>(
    received: &RsCodeword<P>,
    points: &EvalPoints<P>,
    k: usize,
    max_errors: usize,
) -> Result<Poly<P>, DecodeError> {
    rs_decode_avoiding(received, points, k, max_errors, &[]).map(|(m, _)| m)
}

/// [`rs_decode`] that first tries interpolating away from the positions
/// flagged in `suspect`, and also returns the positions found in error.
///
/// Words sharing error positions (one faulty sender, many symbols) then
/// mostly skip the linear solve.
pub fn rs_decode_avoiding<const P: u64>(
    received: &RsCodeword<P>,
    points: &EvalPoints<P>,
    k: usize,
    max_errors: usize,
    suspect: &[bool],
) -> Result<(Poly<P>, Vec<usize>), DecodeError> {
    if received.len() != points.len() {
        return Err(DecodeError::LengthMismatch {
            expected: points.len(),
            got: received.len(),
        });
    }
    let present: Vec<(usize, Fp<P>, Fp<P>)> = points
        .as_slice()
        .iter()
        .zip(&received.symbols)
        .enumerate()
        .filter_map(|(i, (&x, y))| y.map(|y| (i, x, y)))
        .collect();
    let needed = k + 2 * max_errors;
    if present.len() < needed || k == 0 {
        return Err(DecodeError::TooManyErasures {
            available: present.len(),
            needed,
        });
    }
    let errors = |m: &Poly<P>| -> Vec<usize> { present.iter().filter(|&&(_, x, y)| m.eval(x) != y).map(|p| p.0).collect() };

    // A codeword within the budget is unique, so an interpolant that lands
    // within it is the answer.
    let flagged = |i: usize| suspect.get(i).copied().unwrap_or(false);
    let mut basis: Vec<(Fp<P>, Fp<P>)> = present.iter().filter(|p| !flagged(p.0)).map(|&(_, x, y)| (x, y)).collect();
    basis.extend(present.iter().filter(|p| flagged(p.0)).map(|&(_, x, y)| (x, y)));
    let guess = Poly::interpolate(&basis[..k])?;
    let wrong = errors(&guess);
    if wrong.len() <= max_errors {
        return Ok((guess, wrong));
    }
    if max_errors == 0 {
        return Err(DecodeError::Uncorrectable);
    }
    let pairs: Vec<(Fp<P>, Fp<P>)> = present.iter().map(|&(_, x, y)| (x, y)).collect();
    let message = berlekamp_welch(&pairs, k, max_errors)?;
    let wrong = errors(&message);
    if wrong.len() > max_errors {
        return Err(DecodeError::Uncorrectable);
    }
    Ok((message, wrong))
}

/// Solves `Q(x_i) = y_i E(x_i)` with monic `E` of degree `e` and
/// `deg Q < k + e`, then returns `Q / E`.
fn berlekamp_welch<const P: u64>(
    present: &[(Fp<P>, Fp<P>)],
    k: usize,
    e: usize,
) -> Result<Poly<P>, DecodeError> {
    let q_len = k + e;
    let cols = q_len + e;
    let mut rows: Vec<Vec<Fp<P>>> = Vec::with_capacity(present.len());
    for &(x, y) in present {
        let mut row = Vec::with_capacity(cols + 1);
        let mut xp = Fp::ONE;
        for _ in 0..q_len {
            row.push(xp);
            xp *= x;
        }
        let mut xp = Fp::ONE;
        for _ in 0..e {
            row.push(-(y * xp));
            xp *= x;
        }
        // xp == x^e here
        row.push(y * xp);
        rows.push(row);
    }
    let solution = solve_linear(rows, cols).ok_or(DecodeError::Uncorrectable)?;

    let q = Poly::new(solution[..q_len].to_vec());
    let mut e_coeffs = solution[q_len..].to_vec();
    e_coeffs.push(Fp::ONE);
    let locator = Poly::new(e_coeffs);

    let (message, rem) = q.div_rem(&locator)?;
    if !rem.is_zero() || message.degree().is_some_and(|d| d >= k) {
        return Err(DecodeError::Uncorrectable);
    }
    Ok(message)
}

/// Gaussian elimination on an augmented matrix with `cols` unknowns.
/// Free variables are set to zero; `None` if the system is inconsistent.
fn solve_linear<const P: u64>(mut rows: Vec<Vec<Fp<P>>>, cols: usize) -> Option<Vec<Fp<P>>> {
    let mut pivot_cols = Vec::with_capacity(cols);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].inv().expect("pivot is nonzero");
        for v in rows[rank][col..].iter_mut() {
            *v *= inv;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let f = row[col];
            for (v, &p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *v -= f * p;
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    if rows[rank..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Fp::ZERO; cols];
    for (r, &c) in pivot_cols.iter().enumerate() {
        x[c] = rows[r][cols];
    }
    Some(x)
}
