use std::sync::OnceLock;

use proptest::prelude::*;
use tabviz_core::chart::{Channel, ChartType, SortDirection};
use tabviz_core::filter::Polarity;
use tabviz_core::parser::{
    build_lexicon, fold, parse, Comparator, KeywordFile, Lexicon, LexiconError, Missing, OpClass,
    ParseFailure, Reference,
};
use tabviz_core::{Dataset, SourceFormat, Value};

fn movies() -> &'static Lexicon {
    static LEX: OnceLock<Lexicon> = OnceLock::new();
    LEX.get_or_init(|| build_lexicon(&Dataset::movies(), &KeywordFile::shipped()).unwrap())
}

fn names(cmd: &tabviz_core::parser::ParsedCommand) -> Vec<String> {
    cmd.attribute_names()
}

fn text(v: &[&str]) -> Vec<Value> {
    v.iter().map(|s| Value::Text((*s).into())).collect()
}

#[test]
fn color_by_creative_type() {
    let c = parse("Color by creative type", movies()).unwrap();
    assert_eq!(c.op, Some(OpClass::Bind));
    assert_eq!(c.channel, Some(Channel::Color));
    assert_eq!(names(&c), ["Creative Type"]);
}

#[test]
fn sort_by_gross_descending() {
    let c = parse("Sort by worldwide gross in descending order", movies()).unwrap();
    assert_eq!(c.op, Some(OpClass::Sort));
    assert_eq!(names(&c), ["Worldwide Gross"]);
    assert_eq!(c.direction, Some(SortDirection::Descending));
}

#[test]
fn remove_low_imdb_rating() {
    let c = parse("Remove movies with an imdb rating under 8", movies()).unwrap();
    assert_eq!(c.op, Some(OpClass::Filter));
    assert_eq!(c.polarity, Some(Polarity::Remove));
    assert_eq!(names(&c), ["IMDB Rating"]);
    assert_eq!(c.comparator, Some(Comparator::LessThan));
    assert_eq!(c.bounds, [8.0]);
}

#[test]
fn remove_all_except_three_genres() {
    let c = parse("Remove all movies except action, adventure, and comedy", movies()).unwrap();
    assert_eq!(c.op, Some(OpClass::Filter));
    assert_eq!(c.polarity, Some(Polarity::Remove));
    assert!(c.except);
    assert_eq!(c.value_attribute.as_deref(), Some("Major Genre"));
    assert_eq!(c.values, text(&["Action", "Adventure", "Comedy"]));
}

#[test]
fn exclude_others() {
    let c = parse("exclude others", movies()).unwrap();
    assert_eq!(c.op, Some(OpClass::Filter));
    assert_eq!(c.polarity, Some(Polarity::Remove));
    assert_eq!(c.reference, Some(Reference::Others));
}

#[test]
fn add_four_attributes() {
    let c = parse("Add budget, running time, rotten tomatoes and imdb rating", movies()).unwrap();
    assert_eq!(c.op, Some(OpClass::Bind));
    assert!(c.append);
    assert_eq!(
        names(&c),
        ["Production Budget", "Running Time", "Rotten Tomatoes", "IMDB Rating"]
    );
}

#[test]
fn two_attributes_alone_bind() {
    let c = parse("Worldwide gross and production budget", movies()).unwrap();
    assert_eq!(c.op, Some(OpClass::Bind));
    assert!(!c.append);
    assert_eq!(names(&c), ["Worldwide Gross", "Production Budget"]);
}

#[test]
fn remove_others_and_these() {
    let lex = movies();
    let others = parse("remove others", lex).unwrap();
    assert_eq!((others.op, others.reference), (Some(OpClass::Filter), Some(Reference::Others)));
    let these = parse("Remove these", lex).unwrap();
    assert_eq!((these.op, these.reference), (Some(OpClass::Filter), Some(Reference::These)));
    assert_eq!(these.polarity, Some(Polarity::Remove));
}

#[test]
fn remove_under_1200_is_incomplete() {
    match parse("Remove under 1200", movies()) {
        Err(ParseFailure::Incomplete { missing, partial }) => {
            assert_eq!(missing, Missing::Attribute);
            assert_eq!(partial.bounds, [1200.0]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn magnitude_suffixes() {
    let lex = movies();
    let c = parse("remove movies with worldwide gross under 200M", lex).unwrap();
    assert_eq!(c.bounds, [2e8]);
    let c = parse("keep budget below 1.5 million", lex).unwrap();
    assert_eq!((c.polarity, c.bounds.clone()), (Some(Polarity::Keep), vec![1.5e6]));
    let c = parse("only running time between 90 and 120", lex).unwrap();
    assert_eq!(c.comparator, Some(Comparator::Between));
    assert_eq!(c.bounds, [90.0, 120.0]);
    let c = parse("gross over 1,200,000", lex).unwrap();
    assert_eq!(c.bounds, [1.2e6]);
    let c = parse("budget at least 200k", lex).unwrap();
    assert_eq!(c.bounds, [2e5]);
}

#[test]
fn bare_remove_of_an_attribute_unbinds() {
    let c = parse("remove production budget", movies()).unwrap();
    assert_eq!(c.op, Some(OpClass::Unbind));
    assert_eq!(names(&c), ["Production Budget"]);
}

#[test]
fn chart_type_change() {
    let lex = movies();
    let c = parse("switch to a stacked bar chart", lex).unwrap();
    assert_eq!((c.op, c.chart_type), (Some(OpClass::ChangeChart), Some(ChartType::StackedBarChart)));
    assert!(matches!(
        parse("switch to", lex),
        Err(ParseFailure::Incomplete { missing: Missing::ChartType, .. })
    ));
}

#[test]
fn unrecognized_and_empty() {
    let lex = movies();
    assert!(matches!(parse("hello there", lex), Err(ParseFailure::Unrecognized { .. })));
    assert_eq!(parse("  ?! ", lex), Err(ParseFailure::Empty));
}

#[test]
fn residual_words_are_inert() {
    let lex = movies();
    let plain = parse("color by creative type", lex).unwrap();
    let noisy = parse("please color by creative type now", lex).unwrap();
    assert_eq!(noisy.residual, ["please", "now"]);
    assert_eq!((noisy.op, noisy.channel, names(&noisy)), (plain.op, plain.channel, names(&plain)));
}

#[test]
fn ambiguous_values_are_not_guessed() {
    let ds = Dataset::load(b"Home,Away\nLions,Bears\nBears,Lions\n", SourceFormat::Csv).unwrap();
    let lex = build_lexicon(&ds, &KeywordFile::shipped()).unwrap();
    match parse("remove lions", &lex) {
        Err(ParseFailure::Ambiguous { attributes, .. }) => assert_eq!(attributes, ["Away", "Home"]),
        other => panic!("{other:?}"),
    }
    let c = parse("remove lions from home", &lex).unwrap();
    assert_eq!(c.value_attribute.as_deref(), Some("Home"));
}

#[test]
fn lexicon_variants() {
    let lex = movies();
    let budget = lex.attribute("Production Budget").unwrap();
    assert!(budget.variants.contains(&"budget".to_string()));
    // shared word stays out of both attributes
    assert!(!lex.attribute("IMDB Rating").unwrap().variants.contains(&"rating".to_string()));
    assert_eq!(lex.match_attribute("budget"), [("Production Budget".to_string(), 1.0)]);
    assert_eq!(lex.match_attribute("Production Budget"), [("Production Budget".to_string(), 1.0)]);
    let rt = lex.match_attribute("rotton tomatoes");
    assert_eq!(rt[0].0, "Rotten Tomatoes");
    assert!(rt[0].1 >= 0.6 && rt[0].1 < 1.0);
    assert!(lex.match_attribute("xyzzy").is_empty());
}

#[test]
fn colleges_admission_variant() {
    let csv = b"Name,Admission Rate,Region,Median Earnings\nA,0.5,West,40000\nB,0.2,East,52000\n";
    let ds = Dataset::load(csv, SourceFormat::Csv).unwrap();
    let lex = build_lexicon(&ds, &KeywordFile::shipped()).unwrap();
    assert_eq!(lex.match_attribute("admission")[0], ("Admission Rate".to_string(), 1.0));
}

#[test]
fn empty_keyword_file_keeps_attributes_and_values() {
    let lex = build_lexicon(&Dataset::movies(), &KeywordFile::default()).unwrap();
    assert!(lex.keywords.is_empty());
    assert_eq!(lex.attributes.len(), 9);
    assert!(lex.values.iter().any(|v| v.folded == "science fiction"));
    let c = parse("worldwide gross", &lex).unwrap();
    assert_eq!(c.op, Some(OpClass::Bind));
}

#[test]
fn folding_collision_is_a_build_error() {
    let ds = Dataset::load(b"Gross-Total,gross total\n1,2\n", SourceFormat::Csv).unwrap();
    assert!(matches!(
        build_lexicon(&ds, &KeywordFile::default()),
        Err(LexiconError::AttributeCollision(..))
    ));
}

#[test]
fn keyword_classes_must_be_disjoint() {
    let kw = KeywordFile::from_json(r#"{"sort": ["order"], "ascending": ["Order"]}"#).unwrap();
    assert!(matches!(
        build_lexicon(&Dataset::movies(), &kw),
        Err(LexiconError::KeywordOverlap { .. })
    ));
}

fn utterance() -> impl Strategy<Value = String> {
    let words = prop::sample::select(vec![
        "remove", "Color", "by", "IMDB", "rating", "under", "8", "200M", "creative", "type",
        "sort", "descending", "others", "these", "add", "budget", "Action", "comedy", "except",
        "between", "and", "x-axis", "stacked", "bar", "chart", "movies", "Gross", "1,200",
    ]);
    let punct = prop::sample::select(vec!["", ",", ".", "!", "?", " -", "'"]);
    prop::collection::vec((words, punct), 1..8).prop_map(|ws| {
        ws.into_iter()
            .map(|(w, p)| format!("{w}{p}"))
            .collect::<Vec<_>>()
            .join(" ")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn parse_is_fold_invariant(u in utterance()) {
        let lex = movies();
        prop_assert_eq!(parse(&u, lex), parse(&fold(&u), lex));
        prop_assert_eq!(parse(&u, lex), parse(&u.to_uppercase(), lex));
    }

    #[test]
    fn bounds_only_with_a_comparator(u in utterance()) {
        let lex = movies();
        let cmd = match parse(&u, lex) {
            Ok(c) => c,
            Err(ParseFailure::Incomplete { partial, .. }) => *partial,
            Err(_) => return Ok(()),
        };
        prop_assert!(cmd.bounds.is_empty() || cmd.comparator.is_some());
        prop_assert!(cmd.op.is_some() || cmd.reference.is_some());
    }
}
