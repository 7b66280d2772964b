//! Acceptance suite for the shipped bundle: the two golden translations
//! stage by stage, the frozen metric values, and the property checks that
//! stand in for data we cannot redistribute. Each criterion prints one
//! pass/fail line (visible with `--nocapture`).

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tarjama::bundle::ResourceBundle;
use tarjama::corpus::evaluate_corpus;
use tarjama::metrics::{angle_degrees, cosine, corpus_size, f_measure, TermVector};
use tarjama::parse::{parse, read_bracketed, write_bracketed, ParseTree, Token};
use tarjama::pipeline::{
    disambiguate_multi, fuse_units, mark_unknown, replace, split_by_meaning, translate_single,
};
use tarjama::reorder::{reorder, source_signature, MAX_PASSES};
use tarjama::text::{normalize, split_sentences};
use tarjama::{translate, LanguageTag, Real, TranslateOptions};

fn bundle_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../resources")
}

fn load_bundle() -> ResourceBundle {
    ResourceBundle::load(&bundle_dir()).expect("shipped bundle loads")
}

/// Run one criterion, printing a single pass/fail line either way.
fn check(name: &str, run: impl FnOnce()) {
    match catch_unwind(AssertUnwindSafe(run)) {
        Ok(()) => println!("acceptance: {name}: pass"),
        Err(cause) => {
            println!("acceptance: {name}: FAIL");
            resume_unwind(cause);
        }
    }
}

const ENGLISH_GOLDEN: &str =
    "The point where images were projected on a screen in a darkened theatre";
const ENGLISH_REPLACED: &str =
    "ال النقطة التي فيها الصور كانت عرض على شاشة في مظلم مسرح";
const ENGLISH_FINAL: &str = "النقطة التي فيها يتم عرض الصور على شاشة في مسرح مظلم";

const ARABIC_GOLDEN: &str = "وبعد الاسلام أصبحت شبام مدينة عامرة";
const ARABIC_REPLACED: &str = "After Islam, became Shibam city populated.";
const ARABIC_FINAL: &str = "After Islam, Shibam became a populated city.";

#[test]
fn golden_trace_english_to_arabic() {
    check("golden trace English→Arabic", || {
        let bundle = load_bundle();
        let started = Instant::now();
        let result = translate(ENGLISH_GOLDEN, &bundle, &TranslateOptions::default())
            .expect("golden English sentence translates");
        let elapsed = started.elapsed();
        assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");

        assert_eq!(result.traces.len(), 1);
        let trace = &result.traces[0];
        assert_eq!(trace.language, Some(LanguageTag::English));
        assert_eq!(trace.context.as_ref().map(|c| c.name()), Some("Cinema"));

        let report = trace.report();
        for expected in [
            "the: 1",
            "point: 31",
            "where: 5",
            "images: 19",
            "were: 1",
            "projected: 29",
            "on: 7",
            "a: 2",
            "screen: 13",
            "in: 10",
            "darkened: 1",
            "theater: 6",
        ] {
            assert!(report.contains(expected), "morphology row missing {expected:?}");
        }
        for expected in [
            "theater → مسرح",
            "darkened → مظلم",
            "where → التي فيها",
            "projected → عرض",
            "screen → شاشة",
            "were → كانت",
        ] {
            assert!(report.contains(expected), "mapping missing {expected:?}");
        }

        assert_eq!(trace.replaced.as_deref(), Some(ENGLISH_REPLACED));
        assert_eq!(trace.reordered.as_deref(), Some(ENGLISH_FINAL));
        assert_eq!(result.output, ENGLISH_FINAL);
    });
}

#[test]
fn golden_trace_arabic_to_english() {
    check("golden trace Arabic→English", || {
        let bundle = load_bundle();
        let started = Instant::now();
        let result = translate(ARABIC_GOLDEN, &bundle, &TranslateOptions::default())
            .expect("golden Arabic sentence translates");
        let elapsed = started.elapsed();
        assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");

        let trace = &result.traces[0];
        assert_eq!(trace.language, Some(LanguageTag::Arabic));
        assert_eq!(trace.context.as_ref().map(|c| c.name()), Some("Shibam"));
        assert_eq!(trace.replaced.as_deref(), Some(ARABIC_REPLACED));
        assert_eq!(trace.reordered.as_deref(), Some(ARABIC_FINAL));
        assert_eq!(result.output, ARABIC_FINAL);

        // The explicit-context invocation must agree with auto-detection.
        let pinned = translate(
            ARABIC_GOLDEN,
            &bundle,
            &TranslateOptions {
                language: Some(LanguageTag::Arabic),
                context: Some("Shibam".to_string()),
            },
        )
        .expect("pinned-context run translates");
        assert_eq!(pinned.output, ARABIC_FINAL);
    });
}

#[test]
fn f_measure_reference_values() {
    check("F-measure reference values", || {
        let cases: [(Real, Real, Real); 3] = [
            (0.949875, 0.996121, 0.972448),
            (0.776370, 0.759560, 0.767873),
            (0.715439, 0.695829, 0.705498),
        ];
        for (p, r, expected) in cases {
            let f: Real = f_measure(p, r);
            assert!(
                (f - expected).abs() <= 1e-5,
                "f_measure({p}, {r}) = {f}, expected {expected}"
            );
        }
    });
}

#[test]
fn angle_reference_values() {
    check("angle reference values", || {
        let cases: [(Real, Real); 3] = [
            (0.982676, 10.68039),
            (0.801987, 36.67971),
            (0.763377, 40.23721),
        ];
        for (cos, expected) in cases {
            let angle: Real = angle_degrees(cos).expect("cosine in range");
            assert!(
                (angle - expected).abs() <= 0.001,
                "angle_degrees({cos}) = {angle}, expected {expected}"
            );
        }
    });
}

#[test]
fn cosine_matches_brute_force_oracle() {
    check("cosine vs brute-force oracle", || {
        let mut rng = StdRng::seed_from_u64(0x005E_C0DE);
        let pool: Vec<String> = (0..60).map(|i| format!("t{i}")).collect();

        let random_vector = |rng: &mut StdRng| -> TermVector {
            let vocab = rng.gen_range(1..=50usize);
            let mut tokens = Vec::new();
            let mut picked = pool.clone();
            for _ in 0..vocab {
                let at = rng.gen_range(0..picked.len());
                let term = picked.swap_remove(at);
                let freq = rng.gen_range(1..=20u64);
                for _ in 0..freq {
                    tokens.push(term.clone());
                }
            }
            TermVector::from_tokens(tokens)
        };

        let brute_force = |a: &TermVector, b: &TermVector| -> Real {
            let union: std::collections::BTreeSet<&String> =
                a.counts().keys().chain(b.counts().keys()).collect();
            let mut dot = 0.0;
            let mut na = 0.0;
            let mut nb = 0.0;
            for term in union {
                let ca = *a.counts().get(term).unwrap_or(&0) as Real;
                let cb = *b.counts().get(term).unwrap_or(&0) as Real;
                dot += ca * cb;
                na += ca * ca;
                nb += cb * cb;
            }
            dot / (na.sqrt() * nb.sqrt())
        };

        for round in 0..1000 {
            let a = random_vector(&mut rng);
            let b = random_vector(&mut rng);
            let fast: Real = cosine(&a, &b).expect("non-empty vectors");
            let oracle = brute_force(&a, &b);
            assert!(
                (fast - oracle).abs() <= 1e-12,
                "round {round}: {fast} vs oracle {oracle}"
            );
            let flipped: Real = cosine(&b, &a).unwrap();
            assert!(
                (fast - flipped).abs() <= 1e-12,
                "round {round}: asymmetric ({fast} vs {flipped})"
            );
            let k = rng.gen_range(2..=9u64);
            let scaled: Real = cosine(&a, &b.scaled(k)).unwrap();
            assert!(
                (fast - scaled).abs() <= 1e-12,
                "round {round}: scaling by {k} moved {fast} to {scaled}"
            );
        }
    });
}

#[test]
fn homograph_context_sensitivity() {
    check("homograph context sensitivity", || {
        let bundle = load_bundle();
        let ontologies: Vec<_> = bundle.registry().ontologies().collect();
        let mut cases = 0usize;

        for (i, first) in ontologies.iter().enumerate() {
            for second in &ontologies[i + 1..] {
                for language in [LanguageTag::English, LanguageTag::Arabic] {
                    for concept in first.concepts() {
                        let word = normalize(concept.label(language));
                        if word.contains(' ') {
                            continue;
                        }
                        let twin = second.concepts().iter().find(|c| {
                            normalize(c.label(language)) == word && c.pos == concept.pos
                        });
                        let Some(twin) = twin else { continue };
                        let first_label = concept.label(language.opposite());
                        let second_label = twin.label(language.opposite());
                        if first_label == second_label {
                            continue;
                        }
                        cases += 1;
                        for (ontology, expected) in
                            [(first, first_label), (second, second_label)]
                        {
                            let result = translate(
                                &word,
                                &bundle,
                                &TranslateOptions {
                                    language: Some(language),
                                    context: Some(ontology.context().name().to_string()),
                                },
                            )
                            .unwrap_or_else(|e| {
                                panic!(
                                    "carrier '{word}' failed under {}: {e}",
                                    ontology.context().name()
                                )
                            });
                            assert_eq!(
                                result.output,
                                expected,
                                "carrier '{word}' under {}",
                                ontology.context().name()
                            );
                        }
                    }
                }
            }
        }
        assert!(cases >= 3, "expected at least three homograph pairs, found {cases}");
    });
}

#[test]
fn reordering_conserves_content_words() {
    check("reordering conserves content words", || {
        let bundle = load_bundle();
        let records = bundle.corpus().expect("bundle ships a corpus");
        let mut sentences = 0usize;
        for record in records {
            let language = record.language;
            let target = language.opposite();
            let lexicon = bundle.lexicon(language);
            let store = bundle.parses(language);
            let ontology = bundle
                .registry()
                .get(&record.context)
                .expect("corpus context registered");
            for sentence in split_sentences(&record.source) {
                sentences += 1;
                let tree = parse(&sentence, language, store, lexicon).expect("parses");
                let tokens = tree.tokens();
                let units = fuse_units(&tokens, ontology, language);
                let split = split_by_meaning(&units, lexicon);
                let mut items =
                    translate_single(&split.single, lexicon, target).expect("dictionary stage");
                let (multi, _) = disambiguate_multi(&split.multi, ontology, language);
                let (unknown, _) = mark_unknown(&split.unknown, language);
                items.extend(multi);
                items.extend(unknown);
                let (ordered, _) = replace(&units, &items).expect("replacement stage");

                let before = source_signature(&ordered);
                let outcome = reorder(&ordered, &tree, target).expect("reaches fixpoint");
                let after = source_signature(&outcome.items);
                assert_eq!(before, after, "record {} changed content words", record.id);
                assert!(
                    outcome.passes <= MAX_PASSES,
                    "record {} needed {} passes",
                    record.id,
                    outcome.passes
                );
            }
        }
        assert!(sentences >= records.len(), "corpus produced no sentences");
    });
}

#[test]
fn bracketed_round_trip() {
    check("bracketed round trip", || {
        let mut rng = StdRng::seed_from_u64(0x7EE5);
        for round in 0..500 {
            let tree = random_tree(&mut rng);
            let written = write_bracketed(&tree);
            let reread = read_bracketed(&written)
                .unwrap_or_else(|e| panic!("round {round}: {e} in {written}"));
            assert_eq!(write_bracketed(&reread), written, "round {round}");
            let original: Vec<(String, String)> = tree
                .tokens()
                .iter()
                .map(|t| (t.surface.clone(), t.pos.clone()))
                .collect();
            let recovered: Vec<(String, String)> = reread
                .tokens()
                .iter()
                .map(|t| (t.surface.clone(), t.pos.clone()))
                .collect();
            assert_eq!(original, recovered, "round {round}: leaves diverged");
        }
    });
}

#[test]
fn golden_corpus_rows_perfect() {
    check("golden corpus rows score perfect", || {
        let bundle = load_bundle();
        let records = bundle.corpus().expect("bundle ships a corpus");
        let evaluation = evaluate_corpus(records, &bundle);
        assert_eq!(evaluation.skipped, 0, "no record may be skipped");
        for id in ["CinemaE1", "ShibamA1"] {
            let row = evaluation
                .records
                .iter()
                .find(|r| r.id == id)
                .unwrap_or_else(|| panic!("{id} missing from the evaluation"));
            let report = row.result.as_ref().expect("row scored");
            assert!(
                (report.cosine - 1.0).abs() <= 1e-9,
                "{id}: cosine {}",
                report.cosine
            );
            assert!(
                report.angle_degrees.abs() <= 1e-3,
                "{id}: angle {}",
                report.angle_degrees
            );
        }
    });
}

#[test]
fn corpus_size_reference_values() {
    check("corpus size follows vector length", || {
        let one: Real = corpus_size([3usize]);
        assert!((one - 3.0).abs() < 1e-12);
        let two: Real = corpus_size([3usize, 4]);
        assert!((two - 5.0).abs() < 1e-12);
    });
}

#[test]
fn external_data_not_reproduced() {
    check("external data substitution note", || {
        // Scores quoted for live third-party translators and the full
        // 16-paragraph human-reference set are not redistributable, and the
        // printed corpus-size figure 288.7247824 depends on that unpublished
        // set. The frozen metric values and the property suites in this
        // file stand in for them.
        println!(
            "note: third-party translator scores and the original reference \
             corpus are not bundled; metric pins and property suites cover \
             the same ground"
        );
    });
}

fn random_tree(rng: &mut StdRng) -> ParseTree {
    const LABELS: [&str; 7] = ["S", "NP", "VP", "PP", "SBAR", "ADJP", "X"];
    const TAGS: [&str; 8] = ["NN", "NNS", "VBD", "VBN", "DT", "JJ", "IN", "WRB"];
    const WORDS: [&str; 10] = [
        "point", "screen", "مدينة", "عرض", "tall", "the", "قلم", "on", "where", "z9",
    ];

    fn node(rng: &mut StdRng, depth: usize, next_leaf: &mut usize) -> ParseTree {
        let leafy = depth >= 3 || rng.gen_bool(0.4);
        if leafy {
            let surface = WORDS[rng.gen_range(0..WORDS.len())].to_string();
            let token = Token {
                normalized: normalize(&surface),
                surface,
                pos: TAGS[rng.gen_range(0..TAGS.len())].to_string(),
                index: *next_leaf,
            };
            *next_leaf += 1;
            ParseTree::Leaf { token }
        } else {
            let arity = rng.gen_range(1..=4usize);
            let children = (0..arity)
                .map(|_| node(rng, depth + 1, next_leaf))
                .collect();
            ParseTree::Internal {
                label: LABELS[rng.gen_range(0..LABELS.len())].to_string(),
                children,
            }
        }
    }

    let mut next_leaf = 0usize;
    let arity = rng.gen_range(1..=3usize);
    let children = (0..arity)
        .map(|_| node(rng, 1, &mut next_leaf))
        .collect();
    ParseTree::Internal {
        label: "ROOT".to_string(),
        children,
    }
}
