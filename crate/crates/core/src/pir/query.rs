use rand::Rng;

use super::{PirError, PirParams, Row};
use crate::field_rs::{FieldElement, FieldPoly, MODULUS};

/// Query vector for one node and one stripe, entries ordered
/// `(Q_1^1(α_j) … Q_L^1(α_j) … Q_1^M(α_j) … Q_L^M(α_j))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PirQuery {
    /// 1-based node index `j`.
    pub node_index: u16,
    pub stripe_index: u16,
    pub entries: Vec<FieldElement>,
}

/// The random query-code codewords `β_ℓ^m`, kept by the driver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryRandomness {
    /// Indexed `(m - 1) · L + (ℓ - 1)`; each of degree at most `t - 1`.
    pub betas: Vec<FieldPoly>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResponseBody {
    /// One combined value per symbol position.
    Values(Vec<FieldElement>),
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PirResponse {
    pub node_index: u16,
    pub stripe_index: u16,
    pub body: ResponseBody,
}

impl PirResponse {
    pub fn timeout(node_index: u16, stripe_index: u16) -> Self {
        PirResponse { node_index, stripe_index, body: ResponseBody::Timeout }
    }

    pub fn values(&self) -> Option<&[FieldElement]> {
        match &self.body {
            ResponseBody::Values(v) => Some(v),
            ResponseBody::Timeout => None,
        }
    }
}

fn random_element<R: Rng + ?Sized>(rng: &mut R) -> FieldElement {
    FieldElement::new(rng.gen_range(0..MODULUS))
}

/// Builds the `n` per-node queries for one stripe of cell `desired`
/// (1-based). Fresh randomness is drawn on every call.
pub fn make_queries<R: Rng + ?Sized>(
    params: &PirParams,
    desired: usize,
    stripe: u16,
    rng: &mut R,
) -> Result<(Vec<PirQuery>, QueryRandomness), PirError> {
    params.validate()?;
    if desired < 1 || desired > params.cells {
        return Err(PirError::CellOutOfRange { desired, cells: params.cells });
    }
    let l_rows = params.rows_per_stripe();
    let top = params.response_dimension();
    let betas: Vec<FieldPoly> = (0..params.query_len())
        .map(|_| FieldPoly::new((0..params.t).map(|_| random_element(rng)).collect()))
        .collect();

    let points = params.eval_points();
    let queries = (1..=params.n)
        .map(|j| {
            let alpha = points.alpha(j);
            let entries = betas
                .iter()
                .enumerate()
                .map(|(i, beta)| {
                    let (m, l) = (i / l_rows + 1, i % l_rows + 1);
                    let mut v = beta.eval(alpha);
                    if m == desired {
                        v += alpha.pow((top - l) as u64);
                    }
                    v
                })
                .collect();
            PirQuery { node_index: j as u16, stripe_index: stripe, entries }
        })
        .collect();
    Ok((queries, QueryRandomness { betas }))
}

/// Inner product of the query with the node's content, coordinate-wise
/// over the symbol positions.
pub fn answer_query(query: &PirQuery, content: &[Row]) -> Result<PirResponse, PirError> {
    if content.len() != query.entries.len() {
        return Err(PirError::LengthMismatch { expected: query.entries.len(), got: content.len() });
    }
    let width = content.first().map_or(0, Vec::len);
    // products are below 2^33 and there are fewer than 2^16 of them
    let mut acc = vec![0u64; width];
    for (q, row) in query.entries.iter().zip(content) {
        if row.len() != width {
            return Err(PirError::LengthMismatch { expected: width, got: row.len() });
        }
        let q = q.value();
        if q == 0 {
            continue;
        }
        for (a, c) in acc.iter_mut().zip(row) {
            *a += q * c.value();
        }
    }
    Ok(PirResponse {
        node_index: query.node_index,
        stripe_index: query.stripe_index,
        body: ResponseBody::Values(acc.into_iter().map(FieldElement::new).collect()),
    })
}
