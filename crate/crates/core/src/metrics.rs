//! Evaluation kernel: term-frequency vectors, cosine similarity and its
//! divergence angle, precision/recall/F-measure, and the corpus-size
//! figure.
//!
//! Everything here is generic over the scalar type through
//! [`num_traits::Float`]; the crate root exposes [`crate::Real`] as the
//! concrete choice. Tokens are compared in normalized form and
//! punctuation-only tokens are ignored, so `"Islam,"` and `"islam"` count
//! as the same term.

use std::collections::BTreeMap;

use num_traits::{Float, FromPrimitive};
use thiserror::Error;

use crate::text::{is_punct_token, normalize, tokenize};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("cosine of an empty or zero-frequency document is undefined")]
    ZeroVector,
    #[error("cosine value {value} is outside [-1, 1]")]
    CosineOutOfRange { value: String },
    #[error("reference translation has no countable tokens")]
    EmptyReference,
}

/// Tolerance for cosine values that drift just past ±1 through float
/// round-off; anything further out is a domain error.
const DOMAIN_SLACK: f64 = 1e-9;

/// Term frequencies of one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermVector {
    counts: BTreeMap<String, u64>,
}

impl TermVector {
    /// Count the normalized, non-punctuation tokens of a text.
    pub fn from_text(text: &str) -> TermVector {
        TermVector::from_tokens(
            tokenize(text)
                .iter()
                .filter(|t| !is_punct_token(t))
                .map(|t| normalize(t)),
        )
    }

    pub fn from_tokens<I, S>(tokens: I) -> TermVector
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut counts = BTreeMap::new();
        for token in tokens {
            let token = token.as_ref();
            if token.is_empty() {
                continue;
            }
            *counts.entry(token.to_string()).or_insert(0) += 1;
        }
        TermVector { counts }
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Euclidean norm of the frequency vector.
    pub fn norm<F: Float + FromPrimitive>(&self) -> F {
        self.counts
            .values()
            .map(|&c| {
                let c = F::from_u64(c).unwrap_or_else(F::one);
                c * c
            })
            .fold(F::zero(), |acc, x| acc + x)
            .sqrt()
    }

    /// Every frequency multiplied by `k` (cosine must not notice).
    pub fn scaled(&self, k: u64) -> TermVector {
        TermVector {
            counts: self
                .counts
                .iter()
                .map(|(t, &c)| (t.clone(), c * k))
                .collect(),
        }
    }
}

/// Cosine similarity of two documents' frequency vectors: dot product over
/// the product of norms. Frequencies are non-negative, so the result lives
/// in [0, 1]; it is clamped there against float round-off.
pub fn cosine<F: Float + FromPrimitive>(a: &TermVector, b: &TermVector) -> Result<F, MetricError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricError::ZeroVector);
    }
    let mut dot = F::zero();
    for (term, &ca) in a.counts() {
        if let Some(&cb) = b.counts().get(term) {
            let ca = F::from_u64(ca).unwrap_or_else(F::one);
            let cb = F::from_u64(cb).unwrap_or_else(F::one);
            dot = dot + ca * cb;
        }
    }
    let squares = |v: &TermVector| {
        v.counts()
            .values()
            .map(|&c| {
                let c = F::from_u64(c).unwrap_or_else(F::one);
                c * c
            })
            .fold(F::zero(), |acc, x| acc + x)
    };
    // sqrt(|a|²·|b|²) rather than sqrt(|a|²)·sqrt(|b|²): for equal or
    // proportional vectors the radicand is a perfect square, so identical
    // texts score exactly 1.
    let raw = dot / (squares(a) * squares(b)).sqrt();
    Ok(raw.min(F::one()).max(F::zero()))
}

/// Divergence angle in degrees for a cosine value: `acos` mapped to
/// degrees. Values a hair outside [-1, 1] are clamped; anything further
/// out is rejected.
pub fn angle_degrees<F: Float + FromPrimitive>(cosine: F) -> Result<F, MetricError> {
    let one = F::one();
    let slack = F::from_f64(DOMAIN_SLACK).unwrap_or_else(F::epsilon);
    if cosine > one + slack || cosine < -(one + slack) {
        return Err(MetricError::CosineOutOfRange {
            value: format!("{:?}", cosine.to_f64()),
        });
    }
    let clamped = cosine.min(one).max(-one);
    Ok(clamped.acos().to_degrees())
}

/// Harmonic mean of precision and recall; zero when both are zero.
pub fn f_measure<F: Float>(precision: F, recall: F) -> F {
    let two = F::one() + F::one();
    let denom = precision + recall;
    if denom == F::zero() {
        F::zero()
    } else {
        two * precision * recall / denom
    }
}

/// Precision, recall, and their harmonic mean for one candidate against
/// one reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf<F> {
    pub precision: F,
    pub recall: F,
    pub f_measure: F,
    /// True when the candidate had no countable tokens; the scores are
    /// all zero in that case rather than an error.
    pub empty_candidate: bool,
}

/// Token-multiset precision/recall/F: matches are counted per occurrence,
/// so a token appearing twice in the candidate but once in the reference
/// contributes one match.
pub fn prf<F: Float + FromPrimitive>(candidate: &str, reference: &str) -> Result<Prf<F>, MetricError> {
    let cand = TermVector::from_text(candidate);
    let refv = TermVector::from_text(reference);
    if refv.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    if cand.is_empty() {
        return Ok(Prf {
            precision: F::zero(),
            recall: F::zero(),
            f_measure: F::zero(),
            empty_candidate: true,
        });
    }
    let mut matched: u64 = 0;
    for (term, &cc) in cand.counts() {
        if let Some(&rc) = refv.counts().get(term) {
            matched += cc.min(rc);
        }
    }
    let matched = F::from_u64(matched).unwrap_or_else(F::zero);
    let precision = matched / F::from_u64(cand.total()).unwrap_or_else(F::one);
    let recall = matched / F::from_u64(refv.total()).unwrap_or_else(F::one);
    Ok(Prf {
        precision,
        recall,
        f_measure: f_measure(precision, recall),
        empty_candidate: false,
    })
}

/// All scores for one candidate/reference pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport<F> {
    pub cosine: F,
    pub angle_degrees: F,
    pub precision: F,
    pub recall: F,
    pub f_measure: F,
}

/// Score a candidate translation against its reference.
pub fn evaluate_pair<F: Float + FromPrimitive>(
    candidate: &str,
    reference: &str,
) -> Result<EvalReport<F>, MetricError> {
    let refv = TermVector::from_text(reference);
    if refv.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let cand = TermVector::from_text(candidate);
    let scores = prf::<F>(candidate, reference)?;
    let (cosine, angle) = if cand.is_empty() {
        // An empty candidate shares nothing with the reference: treat the
        // documents as orthogonal rather than erroring the whole record.
        (F::zero(), F::from_f64(90.0).unwrap_or_else(F::one))
    } else {
        let c = self::cosine::<F>(&cand, &refv)?;
        (c, angle_degrees(c)?)
    };
    Ok(EvalReport {
        cosine,
        angle_degrees: angle,
        precision: scores.precision,
        recall: scores.recall,
        f_measure: scores.f_measure,
    })
}

/// Corpus size: the Euclidean norm of the record lengths,
/// `sqrt(len(r1)^2 + ... + len(rn)^2)`.
pub fn corpus_size<F, I>(lengths: I) -> F
where
    F: Float + FromPrimitive,
    I: IntoIterator<Item = usize>,
{
    lengths
        .into_iter()
        .map(|len| {
            let len = F::from_usize(len).unwrap_or_else(F::zero);
            len * len
        })
        .fold(F::zero(), |acc, x| acc + x)
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Real;
    use proptest::prelude::*;

    const TOL: Real = 1e-9;

    #[test]
    fn identical_documents_have_cosine_one_angle_zero() {
        let v = TermVector::from_text("After Islam, Shibam became a populated city.");
        let c: Real = cosine(&v, &v).unwrap();
        assert!((c - 1.0).abs() < TOL);
        assert!(angle_degrees(c).unwrap().abs() < 1e-6);
    }

    #[test]
    fn disjoint_documents_are_orthogonal() {
        let a = TermVector::from_text("alpha beta");
        let b = TermVector::from_text("gamma delta");
        let c: Real = cosine(&a, &b).unwrap();
        assert_eq!(c, 0.0);
        assert!((angle_degrees(c).unwrap() - 90.0).abs() < TOL);
    }

    #[test]
    fn hand_computed_three_quarters_cosine() {
        // Four terms each, three shared: 3 / (2 * 2) = 0.75.
        let a = TermVector::from_text("حاجز يعيق التجارة الحرة");
        let b = TermVector::from_text("الحاجز يعيق التجارة الحرة");
        let c: Real = cosine(&a, &b).unwrap();
        assert!((c - 0.75).abs() < TOL);
        // Oracle: acos(0.75) in degrees, computed independently.
        assert!((angle_degrees(c).unwrap() - 41.40962210927086).abs() < 1e-6);
    }

    #[test]
    fn zero_vectors_are_rejected() {
        let empty = TermVector::from_text("...");
        let full = TermVector::from_text("word");
        assert!(matches!(
            cosine::<Real>(&empty, &full),
            Err(MetricError::ZeroVector)
        ));
    }

    #[test]
    fn angle_domain_is_enforced() {
        assert!(matches!(
            angle_degrees::<Real>(1.5),
            Err(MetricError::CosineOutOfRange { .. })
        ));
        // Round-off slack: a value a hair past 1 clamps to 0 degrees.
        assert_eq!(angle_degrees::<Real>(1.0 + 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn prf_counts_multiset_matches() {
        // Candidate repeats a token the reference holds once.
        let scores: Prf<Real> = prf("the the cat", "the cat sat").unwrap();
        assert!((scores.precision - 2.0 / 3.0).abs() < TOL);
        assert!((scores.recall - 2.0 / 3.0).abs() < TOL);
        assert!((scores.f_measure - 2.0 / 3.0).abs() < TOL);
    }

    #[test]
    fn prf_ignores_punctuation_and_case() {
        let scores: Prf<Real> = prf("After Islam, Shibam", "after islam shibam").unwrap();
        assert!((scores.precision - 1.0).abs() < TOL);
        assert!((scores.recall - 1.0).abs() < TOL);
    }

    #[test]
    fn empty_candidate_scores_zero_without_error() {
        let scores: Prf<Real> = prf("", "reference text").unwrap();
        assert!(scores.empty_candidate);
        assert_eq!(scores.precision, 0.0);
        assert_eq!(scores.f_measure, 0.0);
        assert!(matches!(
            prf::<Real>("candidate", ""),
            Err(MetricError::EmptyReference)
        ));
    }

    #[test]
    fn f_measure_matches_independent_oracle() {
        // Oracles: 2pr/(p+r) recomputed outside the crate.
        let cases: [(Real, Real, Real); 3] = [
            (0.949875, 0.996121, 0.9724484889742837),
            (0.776370, 0.759560, 0.7678730114002591),
            (0.715439, 0.695829, 0.705497756529589),
        ];
        for (p, r, expected) in cases {
            assert!((f_measure(p, r) - expected).abs() < 1e-12);
        }
        assert_eq!(f_measure::<Real>(0.0, 0.0), 0.0);
    }

    #[test]
    fn corpus_size_is_the_length_norm() {
        // sqrt(1 + 4) = sqrt(5).
        let size: Real = corpus_size([1, 2]);
        assert!((size - 2.23606797749979).abs() < TOL);
        assert_eq!(corpus_size::<Real, _>([]), 0.0);
        assert_eq!(corpus_size::<Real, _>([3, 4]), 5.0);
    }

    #[test]
    fn works_at_reduced_precision_too() {
        let a = TermVector::from_text("حاجز يعيق التجارة الحرة");
        let b = TermVector::from_text("الحاجز يعيق التجارة الحرة");
        let c: f32 = cosine(&a, &b).unwrap();
        assert!((c - 0.75).abs() < 1e-6);
        let size: f32 = corpus_size([1, 2]);
        assert!((size - 5f32.sqrt()).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn cosine_is_symmetric_and_bounded(
            a in proptest::collection::vec("[a-f]{1,3}", 1..12),
            b in proptest::collection::vec("[a-f]{1,3}", 1..12),
        ) {
            let va = TermVector::from_tokens(a.iter());
            let vb = TermVector::from_tokens(b.iter());
            let ab: Real = cosine(&va, &vb).unwrap();
            let ba: Real = cosine(&vb, &va).unwrap();
            prop_assert!((ab - ba).abs() < TOL);
            prop_assert!((-TOL..=1.0 + TOL).contains(&ab));
        }

        #[test]
        fn cosine_ignores_uniform_scaling(
            tokens in proptest::collection::vec("[a-f]{1,3}", 1..12),
            k in 1u64..20,
        ) {
            let v = TermVector::from_tokens(tokens.iter());
            let scaled = v.scaled(k);
            let c: Real = cosine(&v, &scaled).unwrap();
            prop_assert!((c - 1.0).abs() < 1e-9);
        }

        #[test]
        fn f_measure_lies_between_precision_and_recall(
            p in 0.0f64..=1.0,
            r in 0.0f64..=1.0,
        ) {
            let f = f_measure(p, r);
            prop_assert!(f <= p.max(r) + TOL);
            prop_assert!(f >= 0.0);
            if p > 0.0 && r > 0.0 {
                prop_assert!(f >= p.min(r) * 1e-3);
            }
        }
    }
}
