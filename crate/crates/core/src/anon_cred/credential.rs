use std::collections::BTreeMap;

use rand::{CryptoRng, RngCore};

use super::codec::{Reader, Writer};
use super::schnorr::SchnorrProof;
use super::{ops, CredentialError, Pairing};

const SIG_DOMAIN: &[u8] = b"parkpir/randomized-sig";
const ETA_DOMAIN: &[u8] = b"parkpir/eta";

/// Public parameters `(g1, g2, p, G1, G2, e, H)`; the groups, order and
/// hash are fixed by the backend `P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupParams<P: Pairing> {
    pub g1: P::G1,
    pub g2: P::G2,
}

impl<P: Pairing> Default for GroupParams<P> {
    fn default() -> Self {
        GroupParams { g1: P::g1_generator(), g2: P::g2_generator() }
    }
}

impl<P: Pairing> GroupParams<P> {
    /// Random-exponent check of `e(g1^a, g2^b) = e(g1, g2)^{ab}` plus
    /// non-degeneracy of `e(g1, g2)`.
    pub fn check_bilinearity<R: RngCore + CryptoRng>(&self, rng: &mut R) -> bool {
        let a = P::random_scalar(rng);
        let b = P::random_scalar(rng);
        let base = P::pair(&self.g1, &self.g2);
        let lhs = P::pair(&P::g1_exp(&self.g1, &a), &P::g2_exp(&self.g2, &b));
        let rhs = P::gt_exp(&base, &P::scalar_mul(&a, &b));
        lhs == rhs && !P::gt_is_identity(&base)
    }
}

/// Group public key `(g2, X̃, Ỹ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupPublicKey<P: Pairing> {
    pub g2: P::G2,
    pub x_tilde: P::G2,
    pub y_tilde: P::G2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackingEntry<P: Pairing> {
    pub gamma: P::G1,
    pub eta: SchnorrProof<P>,
    pub gamma_tilde: P::G2,
}

/// The KDC's group secret `(x, y)`, its public key, and the tracking list
/// of registered drivers.
#[derive(Debug, Clone)]
pub struct KdcKeys<P: Pairing> {
    x: P::Scalar,
    y: P::Scalar,
    pub gpk: GroupPublicKey<P>,
    tracking: BTreeMap<String, TrackingEntry<P>>,
}

pub fn kdc_setup<P: Pairing, R: RngCore + CryptoRng>(rng: &mut R) -> (GroupParams<P>, KdcKeys<P>) {
    let params = GroupParams::<P>::default();
    let x = P::random_scalar(rng);
    let y = P::random_scalar(rng);
    let gpk = GroupPublicKey {
        g2: params.g2,
        x_tilde: P::g2_exp(&params.g2, &x),
        y_tilde: P::g2_exp(&params.g2, &y),
    };
    (params, KdcKeys { x, y, gpk, tracking: BTreeMap::new() })
}

impl<P: Pairing> KdcKeys<P> {
    /// `g2^x`, recomputed from the secret.
    pub fn recompute_x_tilde(&self) -> P::G2 {
        P::g2_exp(&self.gpk.g2, &self.x)
    }

    pub fn tracking_list(&self) -> &BTreeMap<String, TrackingEntry<P>> {
        &self.tracking
    }

    /// Verifies a registration request and issues `(σ1, σ2, σ3)`:
    /// `σ1 = g1^k`, `σ2 = (g1^x · γ^y)^k`, `σ3 = e(σ1, Ỹ)`.
    pub fn register<R: RngCore + CryptoRng>(
        &mut self,
        params: &GroupParams<P>,
        req: &RegistrationRequest<P>,
        rng: &mut R,
    ) -> Result<IssuedCredential<P>, CredentialError> {
        if self.tracking.contains_key(&req.id) {
            return Err(CredentialError::DuplicateId(req.id.clone()));
        }
        if ops::pair::<P>(&req.gamma, &self.gpk.y_tilde) != ops::pair::<P>(&params.g1, &req.gamma_tilde) {
            return Err(CredentialError::PairingCheck);
        }
        req.eta
            .verify(&params.g1, &req.public_key, &eta_context::<P>(&req.gamma))
            .map_err(|_| CredentialError::BadEta)?;
        req.proof.verify(&params.g1, &req.gamma, &req.proof_context())?;

        let k = P::random_scalar(rng);
        let sigma1 = ops::g1_exp::<P>(&params.g1, &k);
        let inner = ops::g1_op::<P>(&ops::g1_exp::<P>(&params.g1, &self.x), &ops::g1_exp::<P>(&req.gamma, &self.y));
        let sigma2 = ops::g1_exp::<P>(&inner, &k);
        let sigma3 = ops::pair::<P>(&sigma1, &self.gpk.y_tilde);
        self.tracking.insert(
            req.id.clone(),
            TrackingEntry { gamma: req.gamma, eta: req.eta, gamma_tilde: req.gamma_tilde },
        );
        Ok(IssuedCredential { sigma1, sigma2, sigma3 })
    }
}

fn eta_context<P: Pairing>(gamma: &P::G1) -> Vec<u8> {
    let mut ctx = ETA_DOMAIN.to_vec();
    ctx.extend(P::encode_g1(gamma));
    ctx
}

/// A driver's long-term key `(a1, A)` and credential secret `a2` with its
/// commitments `γ = g1^{a2}`, `γ̃ = Ỹ^{a2}` and `η = Sig_{a1}(γ)`.
#[derive(Debug, Clone)]
pub struct DriverKeys<P: Pairing> {
    a1: P::Scalar,
    pub public_key: P::G1,
    a2: P::Scalar,
    pub gamma: P::G1,
    pub gamma_tilde: P::G2,
    pub eta: SchnorrProof<P>,
}

impl<P: Pairing> DriverKeys<P> {
    pub fn generate<R: RngCore + CryptoRng>(params: &GroupParams<P>, gpk: &GroupPublicKey<P>, rng: &mut R) -> Self {
        let a1 = P::random_scalar(rng);
        let public_key = ops::g1_exp::<P>(&params.g1, &a1);
        let a2 = P::random_scalar(rng);
        let gamma = ops::g1_exp::<P>(&params.g1, &a2);
        let gamma_tilde = ops::g2_exp::<P>(&gpk.y_tilde, &a2);
        let eta = SchnorrProof::prove(&params.g1, &a1, &public_key, &eta_context::<P>(&gamma), rng);
        DriverKeys { a1, public_key, a2, gamma, gamma_tilde, eta }
    }

    pub fn registration_request<R: RngCore + CryptoRng>(
        &self,
        id: &str,
        params: &GroupParams<P>,
        rng: &mut R,
    ) -> RegistrationRequest<P> {
        let mut req = RegistrationRequest {
            id: id.to_string(),
            public_key: self.public_key,
            gamma: self.gamma,
            gamma_tilde: self.gamma_tilde,
            eta: self.eta,
            proof: SchnorrProof { commitment: params.g1, response: P::scalar_from_u64(0) },
        };
        req.proof = SchnorrProof::prove(&params.g1, &self.a2, &self.gamma, &req.proof_context(), rng);
        req
    }

    /// Turns the KDC's answer into `gsk_D = (a2, σ1, σ2, σ3)`.
    pub fn finish(&self, issued: IssuedCredential<P>) -> DriverCredential<P> {
        DriverCredential { a2: self.a2, sigma1: issued.sigma1, sigma2: issued.sigma2, sigma3: issued.sigma3 }
    }

    pub fn long_term_secret(&self) -> &P::Scalar {
        &self.a1
    }
}

/// What the driver sends the KDC; the proof shows knowledge of `a2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistrationRequest<P: Pairing> {
    pub id: String,
    pub public_key: P::G1,
    pub gamma: P::G1,
    pub gamma_tilde: P::G2,
    pub eta: SchnorrProof<P>,
    pub proof: SchnorrProof<P>,
}

impl<P: Pairing> RegistrationRequest<P> {
    fn proof_context(&self) -> Vec<u8> {
        let mut ctx = b"parkpir/register".to_vec();
        ctx.extend(self.id.as_bytes());
        ctx.extend(P::encode_g1(&self.public_key));
        ctx
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.bytes(self.id.as_bytes());
        w.bytes(&P::encode_g1(&self.public_key));
        w.bytes(&P::encode_g1(&self.gamma));
        w.bytes(&P::encode_g2(&self.gamma_tilde));
        for p in [&self.eta, &self.proof] {
            w.bytes(&P::encode_g1(&p.commitment));
            w.bytes(&P::encode_scalar(&p.response));
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CredentialError> {
        let mut r = Reader::new(bytes);
        let id = String::from_utf8(r.bytes()?.to_vec()).map_err(|_| CredentialError::Malformed("id"))?;
        let public_key = r.g1::<P>()?;
        let gamma = r.g1::<P>()?;
        let gamma_tilde = r.g2::<P>()?;
        let eta = SchnorrProof { commitment: r.g1::<P>()?, response: r.scalar::<P>()? };
        let proof = SchnorrProof { commitment: r.g1::<P>()?, response: r.scalar::<P>()? };
        r.end()?;
        Ok(RegistrationRequest { id, public_key, gamma, gamma_tilde, eta, proof })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IssuedCredential<P: Pairing> {
    pub sigma1: P::G1,
    pub sigma2: P::G1,
    pub sigma3: P::Gt,
}

impl<P: Pairing> IssuedCredential<P> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.bytes(&P::encode_g1(&self.sigma1));
        w.bytes(&P::encode_g1(&self.sigma2));
        w.bytes(&P::encode_gt(&self.sigma3));
        w.finish()
    }
}

/// The driver's group secret key `gsk_D = (a2, σ1, σ2, σ3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DriverCredential<P: Pairing> {
    a2: P::Scalar,
    pub sigma1: P::G1,
    pub sigma2: P::G1,
    pub sigma3: P::Gt,
}

impl<P: Pairing> DriverCredential<P> {
    /// `e(σ1, X̃·Ỹ^{a2}) = e(σ2, g2)` and `σ3 = e(σ1, Ỹ)`.
    pub fn is_valid(&self, gpk: &GroupPublicKey<P>) -> bool {
        let key = ops::g2_op::<P>(&gpk.x_tilde, &ops::g2_exp::<P>(&gpk.y_tilde, &self.a2));
        !P::g1_is_identity(&self.sigma1)
            && P::pair(&self.sigma1, &key) == P::pair(&self.sigma2, &gpk.g2)
            && self.sigma3 == P::pair(&self.sigma1, &gpk.y_tilde)
    }

    #[cfg(test)]
    pub(crate) fn a2(&self) -> P::Scalar {
        self.a2
    }
}

/// Registers `driver` under `id` end to end: request, KDC checks, issuance.
pub fn driver_register<P: Pairing, R: RngCore + CryptoRng>(
    params: &GroupParams<P>,
    driver: &DriverKeys<P>,
    id: &str,
    kdc: &mut KdcKeys<P>,
    rng: &mut R,
) -> Result<DriverCredential<P>, CredentialError> {
    let req = driver.registration_request(id, params, rng);
    let issued = kdc.register(params, &req, rng)?;
    Ok(driver.finish(issued))
}

/// `(σ′1, σ′2, c, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomizedSig<P: Pairing> {
    pub sigma1: P::G1,
    pub sigma2: P::G1,
    pub c: P::Scalar,
    pub s: P::Scalar,
}

impl<P: Pairing> RandomizedSig<P> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.bytes(&P::encode_g1(&self.sigma1));
        w.bytes(&P::encode_g1(&self.sigma2));
        w.bytes(&P::encode_scalar(&self.c));
        w.bytes(&P::encode_scalar(&self.s));
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CredentialError> {
        let mut r = Reader::new(bytes);
        let sig = RandomizedSig { sigma1: r.g1::<P>()?, sigma2: r.g1::<P>()?, c: r.scalar::<P>()?, s: r.scalar::<P>()? };
        r.end()?;
        Ok(sig)
    }
}

fn sig_challenge<P: Pairing>(sigma1: &P::G1, sigma2: &P::G1, third: &P::Gt, message: &[u8]) -> P::Scalar {
    ops::hash_to_scalar::<P>(
        SIG_DOMAIN,
        &[&P::encode_g1(sigma1), &P::encode_g1(sigma2), &P::encode_gt(third), message],
    )
}

/// Randomizes the credential with fresh `r1, r2` and signs `message`:
/// `σ′1 = σ1^{r1}`, `σ′2 = σ2^{r1}`, `σ′3 = σ3^{r1·r2}`,
/// `c = H(σ′1, σ′2, σ′3, m)`, `s = r2 + c·a2`.
pub fn randomized_sign<P: Pairing, R: RngCore + CryptoRng>(
    cred: &DriverCredential<P>,
    message: &[u8],
    rng: &mut R,
) -> RandomizedSig<P> {
    let r1 = P::random_scalar(rng);
    let r2 = P::random_scalar(rng);
    let sigma1 = ops::g1_exp::<P>(&cred.sigma1, &r1);
    let sigma2 = ops::g1_exp::<P>(&cred.sigma2, &r1);
    let sigma3 = ops::gt_exp::<P>(&cred.sigma3, &ops::mul::<P>(&r1, &r2));
    let c = sig_challenge::<P>(&sigma1, &sigma2, &sigma3, message);
    let s = ops::add::<P>(&r2, &ops::mul::<P>(&c, &cred.a2));
    RandomizedSig { sigma1, sigma2, c, s }
}

/// `V = e(σ′1, X̃)^c · e(σ′2, g2)^{-c} · e(σ′1, Ỹ)^s`.
pub fn verification_value<P: Pairing>(gpk: &GroupPublicKey<P>, sig: &RandomizedSig<P>) -> P::Gt {
    let neg_c = P::scalar_neg(&sig.c);
    let a = ops::gt_exp::<P>(&ops::pair::<P>(&sig.sigma1, &gpk.x_tilde), &sig.c);
    let b = ops::gt_exp::<P>(&ops::pair::<P>(&sig.sigma2, &gpk.g2), &neg_c);
    let d = ops::gt_exp::<P>(&ops::pair::<P>(&sig.sigma1, &gpk.y_tilde), &sig.s);
    ops::gt_op::<P>(&ops::gt_op::<P>(&a, &b), &d)
}

/// Accepts iff `c = H(σ′1, σ′2, V, m)` and `σ′1` is not the identity.
pub fn verify_sig<P: Pairing>(
    gpk: &GroupPublicKey<P>,
    sig: &RandomizedSig<P>,
    message: &[u8],
) -> Result<(), CredentialError> {
    if P::g1_is_identity(&sig.sigma1) {
        return Err(CredentialError::IdentitySignature);
    }
    let v = verification_value(gpk, sig);
    if sig_challenge::<P>(&sig.sigma1, &sig.sigma2, &v, message) == sig.c {
        Ok(())
    } else {
        Err(CredentialError::InvalidSignature)
    }
}
