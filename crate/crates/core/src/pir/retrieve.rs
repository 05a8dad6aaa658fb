use rand::Rng;

use super::{is_zero_row, make_queries, reconstruct, CellLayout, PirError, PirParams, PirQuery, PirResponse, Row};

/// The set of nodes a driver talks to. One call is one stripe round: all
/// answers must come from the same content version.
pub trait PirServers {
    fn dispatch(&mut self, queries: &[PirQuery]) -> Vec<PirResponse>;
}

impl<F: FnMut(&[PirQuery]) -> Vec<PirResponse>> PirServers for F {
    fn dispatch(&mut self, queries: &[PirQuery]) -> Vec<PirResponse> {
        self(queries)
    }
}

/// Non-padding rows of a retrieved cell, tagged with their row index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RetrievedCell {
    pub rows: Vec<(usize, Row)>,
    pub stripes: usize,
}

impl RetrievedCell {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Retrieves all of cell `desired`, one PIR round per stripe of `L` rows
/// with independent randomness per stripe.
pub fn retrieve_cell<S, R>(
    servers: &mut S,
    params: &PirParams,
    layout: &CellLayout,
    desired: usize,
    rng: &mut R,
) -> Result<RetrievedCell, PirError>
where
    S: PirServers + ?Sized,
    R: Rng + ?Sized,
{
    if layout.cells != params.cells || layout.symbols != params.symbols {
        return Err(PirError::InvalidParams("layout does not match PIR parameters".into()));
    }
    let l_rows = params.rows_per_stripe();
    let stripes = layout.stripes(l_rows);
    let mut rows: Vec<Row> = Vec::with_capacity(stripes * l_rows);
    for stripe in 0..stripes {
        let stripe_index = u16::try_from(stripe).map_err(|_| PirError::InvalidParams("too many stripes".into()))?;
        let (queries, _randomness) = make_queries(params, desired, stripe_index, rng)?;
        let responses = servers.dispatch(&queries);
        if let Some(bad) = responses.iter().find(|r| r.stripe_index != stripe_index) {
            return Err(PirError::StripeMismatch {
                node: bad.node_index,
                expected: stripe_index,
                got: bad.stripe_index,
            });
        }
        rows.extend(reconstruct(&responses, params)?);
    }
    rows.truncate(layout.capacity);
    Ok(RetrievedCell {
        rows: rows.into_iter().enumerate().filter(|(_, r)| !is_zero_row(r)).collect(),
        stripes,
    })
}
