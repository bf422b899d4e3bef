mod common;

use common::*;
use ideadiv::corpus::{filter_offtask, read_corpus, write_corpus, CorpusFormat};
use ideadiv::{ConditionKind, ConditionSpec, Idea, PersonaPoolKind, Session, Source};
use proptest::prelude::*;

fn text_strategy() -> impl Strategy<Value = String> {
    "[A-Za-z0-9][A-Za-z0-9 ,;:\"'#*()é\n-]{0,40}"
}

fn condition_strategy() -> impl Strategy<Value = ConditionSpec> {
    (
        prop::sample::select(vec![
            ConditionKind::DefaultSequential,
            ConditionKind::Seeded,
            ConditionKind::PersonaSequential,
            ConditionKind::CotBatch,
            ConditionKind::PersonaCotBatch,
            ConditionKind::CotRevisionSequential,
        ]),
        "[a-z_]{1,10}",
        text_strategy(),
        0u32..=20,
    )
        .prop_map(|(kind, name, extra, t)| {
            let mut spec = ConditionSpec::new(name, kind, "gpt-test");
            spec.temperature = t as f64 / 10.0;
            if kind.needs_persona() {
                spec = spec.with_persona(PersonaPoolKind::Entrepreneur, extra);
            } else if kind == ConditionKind::Seeded {
                spec = spec.with_seed_text(extra);
            }
            spec
        })
}

fn session_strategy(id: usize) -> impl Strategy<Value = Session> {
    (
        condition_strategy(),
        prop::collection::vec((text_strategy(), prop::option::of(index_strategy()), any::<bool>()), 1..12),
        prop::option::of(0u32..=100),
    )
        .prop_map(move |(condition, ideas, ratio)| {
            let sid = format!("s{id}");
            let source = if ratio.is_some() { Source::Human } else { Source::Llm };
            Session {
                id: sid.clone(),
                source,
                offtask_ratio: ratio.map(|r| r as f64 / 100.0),
                condition,
                ideas: ideas
                    .into_iter()
                    .enumerate()
                    .map(|(i, (text, lab, flagged))| {
                        let mut idea = Idea::new(&sid, i as u32 + 1, text);
                        idea.label = lab.map(label);
                        if idea.label.is_none() && flagged {
                            idea.label_error = Some("invalid reply".into());
                        }
                        idea
                    })
                    .collect(),
            }
        })
}

fn corpus_strategy() -> impl Strategy<Value = Vec<Session>> {
    (1usize..6).prop_flat_map(|n| (0..n).map(session_strategy).collect::<Vec<_>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn jsonl_round_trip(corpus in corpus_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        write_corpus(&corpus, &path, CorpusFormat::Jsonl).unwrap();
        prop_assert_eq!(read_corpus(&path, CorpusFormat::Jsonl).unwrap(), corpus);
    }

    #[test]
    fn csv_round_trip(corpus in corpus_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        write_corpus(&corpus, &path, CorpusFormat::Csv).unwrap();
        prop_assert_eq!(read_corpus(&path, CorpusFormat::Csv).unwrap(), corpus);
    }

    #[test]
    fn offtask_filter_is_idempotent_and_monotone(
        corpus in corpus_strategy(),
        t1 in 1u32..100,
        t2 in 1u32..100,
    ) {
        let (lo, hi) = (t1.min(t2) as f64 / 100.0, t1.max(t2) as f64 / 100.0);
        let once = filter_offtask(&corpus, lo).unwrap();
        let twice = filter_offtask(&once.sessions, lo).unwrap();
        prop_assert_eq!(&twice.sessions, &once.sessions);
        prop_assert_eq!(twice.removed, 0);
        let wider = filter_offtask(&corpus, hi).unwrap();
        for s in &once.sessions {
            prop_assert!(wider.sessions.contains(s));
        }
        prop_assert_eq!(once.removed + once.sessions.len(), corpus.len());
    }

    #[test]
    fn stored_labels_validate_against_scheme(corpus in corpus_strategy()) {
        let scheme = scheme();
        for s in &corpus {
            prop_assert!(s.check_labels(&scheme).is_ok());
        }
    }
}

#[test]
fn filter_rejects_nonpositive_thresholds() {
    assert!(filter_offtask(&[], 0.0).is_err());
    assert!(filter_offtask(&[], f64::NAN).is_err());
}

#[test]
fn foreign_label_fails_validation() {
    let mut l = label([0, 0, 0]);
    l.product_form = "Spaceship".into();
    let s = session_with("x", "c", &[l]);
    assert!(s.check_labels(&scheme()).is_err());
}
