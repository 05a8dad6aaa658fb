use super::{PirError, PirParams, PirResponse, Row};
use crate::field_rs::{rs_decode_avoiding, FieldElement, RsCodeword};

/// Recovers the `L` desired rows of one stripe from the node answers.
///
/// Per symbol position the answers form a word of the
/// `[n, n-2b-r]` Reed–Solomon code; missing nodes and timeouts are
/// erasures. Row `ℓ` is the coefficient of `z^{n-2b-r-ℓ}` of the decoded
/// polynomial. The query-code randomness only reaches degrees below `t`,
/// and `t = n-2b-r-L`, so those coefficients are interference-free.
pub fn reconstruct(responses: &[PirResponse], params: &PirParams) -> Result<Vec<Row>, PirError> {
    params.validate()?;
    let n = params.n;
    let width = params.symbols;
    let mut by_node: Vec<Option<&[FieldElement]>> = vec![None; n];
    let stripe = responses.first().map(|r| r.stripe_index);
    for resp in responses {
        let j = resp.node_index as usize;
        if j < 1 || j > n {
            return Err(PirError::InvalidParams(format!("response from unknown node {j}")));
        }
        if Some(resp.stripe_index) != stripe {
            return Err(PirError::StripeMismatch {
                node: resp.node_index,
                expected: stripe.unwrap_or_default(),
                got: resp.stripe_index,
            });
        }
        if let Some(values) = resp.values() {
            if values.len() != width {
                return Err(PirError::LengthMismatch { expected: width, got: values.len() });
            }
            by_node[j - 1] = Some(values);
        }
    }

    let points = params.eval_points();
    let k = params.response_dimension();
    let l_rows = params.rows_per_stripe();
    let mut rows = vec![vec![FieldElement::ZERO; width]; l_rows];
    let mut suspect = vec![false; n];
    for s in 0..width {
        let word = RsCodeword {
            symbols: by_node.iter().map(|v| v.map(|vals| vals[s])).collect(),
        };
        let (poly, wrong) = rs_decode_avoiding(&word, &points, k, params.b, &suspect)
            .map_err(|source| PirError::DecodeFailure { symbol: s, source })?;
        for i in wrong {
            suspect[i] = true;
        }
        for (l, row) in rows.iter_mut().enumerate() {
            row[s] = poly.coeff(k - 1 - l);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_rs::{DecodeError, MODULUS};
    use crate::pir::{answer_query, make_queries, CellLayout, ResponseBody};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_snapshot(rng: &mut ChaCha8Rng, layout: &CellLayout) -> Vec<Row> {
        (0..layout.total_rows())
            .map(|_| (0..layout.symbols).map(|_| FieldElement::new(rng.gen_range(0..MODULUS))).collect())
            .collect()
    }

    fn answers(params: &PirParams, layout: &CellLayout, snap: &[Row], d: usize, rng: &mut ChaCha8Rng) -> Vec<PirResponse> {
        let (qs, _) = make_queries(params, d, 0, rng).unwrap();
        let content = layout.stripe_content(snap, params.rows_per_stripe(), 0);
        qs.iter().map(|q| answer_query(q, &content).unwrap()).collect()
    }

    fn truth(layout: &CellLayout, snap: &[Row], d: usize, l: usize) -> Vec<Row> {
        snap[(d - 1) * layout.capacity..(d - 1) * layout.capacity + l].to_vec()
    }

    #[test]
    fn honest_nodes_no_faults() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = PirParams::new(6, 2, 0, 0, 3, 5).unwrap();
        let layout = CellLayout { cells: 3, capacity: 4, symbols: 5 };
        let snap = random_snapshot(&mut rng, &layout);
        for d in 1..=3 {
            let resp = answers(&p, &layout, &snap, d, &mut rng);
            assert_eq!(reconstruct(&resp, &p).unwrap(), truth(&layout, &snap, d, 4));
        }
    }

    #[test]
    fn one_silent_one_garbage() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = PirParams::new(9, 1, 1, 1, 3, 20).unwrap();
        let layout = CellLayout { cells: 3, capacity: 5, symbols: 20 };
        let snap = random_snapshot(&mut rng, &layout);
        let mut resp = answers(&p, &layout, &snap, 2, &mut rng);
        resp[3].body = ResponseBody::Timeout;
        resp[6].body = ResponseBody::Values((0..20).map(|_| FieldElement::new(rng.gen_range(0..MODULUS))).collect());
        assert_eq!(reconstruct(&resp, &p).unwrap(), truth(&layout, &snap, 2, 5));
        // dropping the timed-out response entirely is the same erasure
        resp.remove(3);
        assert_eq!(reconstruct(&resp, &p).unwrap(), truth(&layout, &snap, 2, 5));
    }

    #[test]
    fn two_byzantine_exceed_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let p = PirParams::new(9, 1, 1, 1, 3, 20).unwrap();
        let layout = CellLayout { cells: 3, capacity: 5, symbols: 20 };
        let snap = random_snapshot(&mut rng, &layout);
        let mut resp = answers(&p, &layout, &snap, 1, &mut rng);
        resp[0].body = ResponseBody::Timeout;
        for i in [2, 5] {
            resp[i].body = ResponseBody::Values((0..20).map(|_| FieldElement::new(rng.gen_range(0..MODULUS))).collect());
        }
        match reconstruct(&resp, &p) {
            Err(PirError::DecodeFailure { source: DecodeError::Uncorrectable, .. }) => {}
            Ok(rows) => assert_ne!(rows, truth(&layout, &snap, 1, 5)),
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn too_many_timeouts() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let p = PirParams::new(9, 1, 1, 1, 2, 2).unwrap();
        let layout = CellLayout { cells: 2, capacity: 5, symbols: 2 };
        let snap = random_snapshot(&mut rng, &layout);
        let mut resp = answers(&p, &layout, &snap, 1, &mut rng);
        resp[0].body = ResponseBody::Timeout;
        resp[1].body = ResponseBody::Timeout;
        assert!(matches!(
            reconstruct(&resp, &p),
            Err(PirError::DecodeFailure { source: DecodeError::TooManyErasures { .. }, .. })
        ));
    }
}
