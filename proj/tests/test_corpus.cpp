#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"

#include "evdet/corpus.hpp"
#include "evdet/util.hpp"
#include "test_helpers.hpp"

using namespace evdet;
using testutil::TempDir;

namespace {

std::string record(const std::string& id, const std::string& labels_json,
                   const std::string& date = "2003-04-15") {
    return R"({"doc_id":"d1","sentence_id":")" + id + R"(","source_id":"afp","date":")" + date +
           R"(","tokens":["one","two"],"labels":)" + labels_json + "}";
}

void expect_load_error(const std::string& path, const std::string& fragment) {
    try {
        (void)load_corpus(path);
        FAIL_CHECK("expected InputError containing '" << fragment << "'");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
}

}  // namespace

TEST_CASE("parse_date accepts day 00 as unknown and rejects malformed input") {
    Date d = parse_date("2003-04-00");
    CHECK(d == Date{2003, 4, 0});
    CHECK(parse_date("1999-12-31") == Date{1999, 12, 31});
    CHECK(format_date(Date{2003, 4, 0}) == "2003-04-00");
    CHECK(format_date(parse_date("2010-01-05")) == "2010-01-05");

    CHECK_THROWS_AS((void)parse_date("2003-13-01"), InputError);
    CHECK_THROWS_AS((void)parse_date("2003-00-01"), InputError);
    CHECK_THROWS_AS((void)parse_date("03-04-01"), InputError);
    CHECK_THROWS_AS((void)parse_date("2003/04/01"), InputError);
    CHECK_THROWS_AS((void)parse_date("2003-04-32"), InputError);
    CHECK_THROWS_AS((void)parse_date("garbage"), InputError);
}

TEST_CASE("load_corpus reads records and builds first-appearance vocabulary") {
    TempDir dir("load");
    std::string path = dir.file("c.jsonl");
    testutil::write_text(path, record("s1", R"(["Die"])") + "\n" + record("s2", "[]") + "\n" +
                                   record("s3", R"(["Attack","Die"])") + "\n");
    Corpus c = load_corpus(path);
    CHECK(c.sentences.size() == 3);
    CHECK(c.label_vocabulary == std::vector<std::string>{"Die", "Attack"});
    CHECK(c.sentences[0].labels == std::set<std::string>{"Die"});
    CHECK(c.sentences[1].labels.empty());
    CHECK(c.sentences[2].is_multi_event());
    CHECK(c.sentences[0].tokens == std::vector<std::string>{"one", "two"});
}

TEST_CASE("header vocabulary fixes canonical order") {
    TempDir dir("header");
    std::string path = dir.file("c.jsonl");
    testutil::write_text(path, R"({"label_vocabulary":["Attack","Die"]})" "\n" +
                                   record("s1", R"(["Die"])") + "\n");
    Corpus c = load_corpus(path);
    CHECK(c.label_vocabulary == std::vector<std::string>{"Attack", "Die"});
}

TEST_CASE("load_corpus tolerates blank lines and CRLF") {
    TempDir dir("crlf");
    std::string path = dir.file("c.jsonl");
    testutil::write_text(path, "\r\n" + record("s1", R"(["Die"])") + "\r\n\r\n" +
                                   record("s2", "[]") + "\r\n");
    Corpus c = load_corpus(path);
    CHECK(c.sentences.size() == 2);
}

TEST_CASE("load_corpus errors name the offending line") {
    TempDir dir("errors");
    std::string path = dir.file("c.jsonl");

    SUBCASE("duplicate label in a record") {
        testutil::write_text(path, record("s1", "[]") + "\n" +
                                       record("s2", R"(["Die","Die"])") + "\n");
        expect_load_error(path, "line 2: duplicate label 'Die'");
    }
    SUBCASE("label outside declared vocabulary") {
        testutil::write_text(path, R"({"label_vocabulary":["Die"]})" "\n" +
                                       record("s1", R"(["Attack"])") + "\n");
        expect_load_error(path, "line 2: label 'Attack' not in declared vocabulary");
    }
    SUBCASE("duplicate label in header") {
        testutil::write_text(path, R"({"label_vocabulary":["Die","Die"]})" "\n" +
                                       record("s1", "[]") + "\n");
        expect_load_error(path, "line 1");
    }
    SUBCASE("reserved no-event name in header") {
        testutil::write_text(path, R"({"label_vocabulary":["N"]})" "\n" + record("s1", "[]") + "\n");
        expect_load_error(path, "reserved");
    }
    SUBCASE("reserved no-event name used as a record label") {
        testutil::write_text(path, record("s1", R"(["N"])") + "\n");
        expect_load_error(path, "reserved");
    }
    SUBCASE("malformed JSON") {
        testutil::write_text(path, record("s1", "[]") + "\n{broken\n");
        expect_load_error(path, "line 2: invalid JSON");
    }
    SUBCASE("non-object record") {
        testutil::write_text(path, "[1,2,3]\n");
        expect_load_error(path, "line 1: record is not a JSON object");
    }
    SUBCASE("missing field") {
        testutil::write_text(path,
                             R"({"doc_id":"d","sentence_id":"s","source_id":"x","tokens":["a"],"labels":[]})"
                             "\n");
        expect_load_error(path, "line 1: missing or non-string field 'date'");
    }
    SUBCASE("bad date inside record") {
        testutil::write_text(path, record("s1", "[]", "2003-19-01") + "\n");
        expect_load_error(path, "line 1: field 'date'");
    }
    SUBCASE("empty tokens") {
        testutil::write_text(
            path,
            R"({"doc_id":"d","sentence_id":"s","source_id":"x","date":"2003-01-01","tokens":[],"labels":[]})"
            "\n");
        expect_load_error(path, "line 1: field 'tokens'");
    }
    SUBCASE("non-integer annotation count") {
        testutil::write_text(path,
                             R"({"doc_id":"d","sentence_id":"s","source_id":"x","date":"2003-01-01",)"
                             R"("tokens":["a"],"labels":[],"annotations":{"dep":{"nsubj":1.5}}})"
                             "\n");
        expect_load_error(path, "line 1: annotation count");
    }
    SUBCASE("empty file") {
        testutil::write_text(path, "");
        expect_load_error(path, "no sentence records");
    }
    SUBCASE("header only, no sentences") {
        testutil::write_text(path, R"({"label_vocabulary":["Die"]})" "\n");
        expect_load_error(path, "no sentence records");
    }
    SUBCASE("missing file") {
        expect_load_error(dir.file("nope.jsonl"), "cannot open corpus file");
    }
}

TEST_CASE("write_corpus then load_corpus is the identity") {
    Corpus c = testutil::corpus({{{"rebels", "attacked"}, {"Attack"}},
                                 {{"quiet", "day"}, {}},
                                 {{"riot", "deaths"}, {"Attack", "Die"}}},
                                {"Attack", "Die"});
    c.sentences[1].date = Date{2003, 7, 0};  // unknown day survives the round trip
    c.sentences[2].annotations["dep"]["nsubj:riot"] = 2;
    c.sentences[2].annotations["dep"]["dobj:death"] = 1;

    TempDir dir("roundtrip");
    std::string path = dir.file("c.jsonl");
    write_corpus(c, path);
    Corpus back = load_corpus(path);
    CHECK(back == c);

    // writing the reloaded corpus reproduces the bytes
    std::string path2 = dir.file("c2.jsonl");
    write_corpus(back, path2);
    CHECK(read_file(path) == read_file(path2));
}

TEST_CASE("corpus_stats on a three-sentence corpus") {
    Corpus c = testutil::corpus({{{"a"}, {}}, {{"b"}, {"A"}}, {{"c"}, {"A", "B"}}}, {"A", "B"});
    CorpusStats st = corpus_stats(c);
    CHECK(st.n_sentences == 3);
    CHECK(st.n_event_sentences == 2);
    CHECK(st.n_multievent_sentences == 1);
    CHECK(st.event_fraction == doctest::Approx(2.0 / 3.0));
    CHECK(st.multievent_fraction_of_event == doctest::Approx(0.5));
    CHECK(st.multievent_fraction_of_corpus == doctest::Approx(1.0 / 3.0));
    CHECK(st.per_label_counts.at("A") == 2);
    CHECK(st.per_label_counts.at("B") == 1);
}

TEST_CASE("corpus_stats fractions at corpus scale") {
    // 16 event sentences in 100
    std::vector<std::pair<std::vector<std::string>, std::set<std::string>>> rows;
    for (int i = 0; i < 100; ++i)
        rows.push_back({{"tok"}, i < 16 ? std::set<std::string>{"A"} : std::set<std::string>{}});
    CHECK(corpus_stats(testutil::corpus(rows)).event_fraction == doctest::Approx(0.16));

    // 5 multi-event sentences in 200
    rows.clear();
    for (int i = 0; i < 200; ++i)
        rows.push_back({{"tok"}, i < 5 ? std::set<std::string>{"A", "B"} : std::set<std::string>{"A"}});
    CorpusStats st = corpus_stats(testutil::corpus(rows));
    CHECK(st.multievent_fraction_of_corpus == doctest::Approx(0.025));
    CHECK(st.multievent_fraction_of_corpus <= st.event_fraction);
}

TEST_CASE("corpus_stats rejects an empty corpus") {
    CHECK_THROWS_AS((void)corpus_stats(Corpus{}), InputError);
}

TEST_CASE("relax policy names round trip") {
    for (auto p : {RelaxPolicy::FirstInCanonicalOrder, RelaxPolicy::RarestLabel,
                   RelaxPolicy::DropMultiEvent})
        CHECK(parse_relax_policy(relax_policy_name(p)) == p);
    CHECK_THROWS_AS((void)parse_relax_policy("first"), InputError);
}

TEST_CASE("relax first-in-canonical-order follows vocabulary order, not name order") {
    Corpus c = testutil::corpus({{{"x"}, {"Attack", "Die"}}}, {"Die", "Attack"});
    Corpus r = relax_to_single_label(c, RelaxPolicy::FirstInCanonicalOrder);
    CHECK(r.sentences[0].labels == std::set<std::string>{"Die"});
    CHECK(r.label_vocabulary == c.label_vocabulary);
}

TEST_CASE("relax rarest-label keeps the rarest by input-corpus counts") {
    std::vector<std::pair<std::vector<std::string>, std::set<std::string>>> rows;
    for (int i = 0; i < 49; ++i) rows.push_back({{"t"}, {"Die"}});
    for (int i = 0; i < 4; ++i) rows.push_back({{"t"}, {"Injure"}});
    rows.push_back({{"t"}, {"Die", "Injure"}});  // Die=50, Injure=5
    Corpus c = testutil::corpus(rows, {"Die", "Injure"});
    Corpus r = relax_to_single_label(c, RelaxPolicy::RarestLabel);
    CHECK(r.sentences.back().labels == std::set<std::string>{"Injure"});
}

TEST_CASE("relax rarest-label tie falls back to canonical order") {
    Corpus c = testutil::corpus({{{"t"}, {"A"}}, {{"t"}, {"B"}}, {{"t"}, {"A", "B"}}}, {"B", "A"});
    // counts tie at A=2, B=2; canonical order says B first
    Corpus r = relax_to_single_label(c, RelaxPolicy::RarestLabel);
    CHECK(r.sentences.back().labels == std::set<std::string>{"B"});
}

TEST_CASE("relax drop-multievent removes only multi-event sentences") {
    Corpus c = testutil::corpus({{{"a"}, {}}, {{"b"}, {"A"}}, {{"c"}, {"A", "B"}}}, {"A", "B"});
    Corpus r = relax_to_single_label(c, RelaxPolicy::DropMultiEvent);
    CHECK(r.sentences.size() == 2);
    CHECK(r.sentences[0] == c.sentences[0]);
    CHECK(r.sentences[1] == c.sentences[1]);
}

TEST_CASE("relax is idempotent and passes single/no-event sentences through") {
    Corpus c = testutil::corpus(
        {{{"a"}, {}}, {{"b"}, {"A"}}, {{"c"}, {"A", "B"}}, {{"d"}, {"B", "C"}}}, {"A", "B", "C"});
    for (auto p : {RelaxPolicy::FirstInCanonicalOrder, RelaxPolicy::RarestLabel,
                   RelaxPolicy::DropMultiEvent}) {
        Corpus once = relax_to_single_label(c, p);
        for (const auto& s : once.sentences) CHECK(s.labels.size() <= 1);
        CHECK(relax_to_single_label(once, p) == once);
        CHECK(once.sentences[0].labels.empty());
        CHECK(once.sentences[1].labels == std::set<std::string>{"A"});
    }
}

namespace {

// index -> fold containing it in `test`; asserts the folds partition 0..n-1
std::vector<std::size_t> fold_assignment(const FoldsResult& fr, std::size_t n) {
    std::vector<std::size_t> assignment(n, SIZE_MAX);
    for (std::size_t f = 0; f < fr.folds.size(); ++f) {
        for (std::size_t i : fr.folds[f].test) {
            REQUIRE(i < n);
            REQUIRE(assignment[i] == SIZE_MAX);
            assignment[i] = f;
        }
        // train must be exactly the complement
        std::set<std::size_t> train(fr.folds[f].train.begin(), fr.folds[f].train.end());
        REQUIRE(train.size() + fr.folds[f].test.size() == n);
        for (std::size_t i : fr.folds[f].test) REQUIRE(!train.count(i));
    }
    for (std::size_t i = 0; i < n; ++i) REQUIRE(assignment[i] != SIZE_MAX);
    return assignment;
}

}  // namespace

TEST_CASE("stratified folds deal each stratum evenly") {
    std::vector<std::pair<std::vector<std::string>, std::set<std::string>>> rows;
    for (int i = 0; i < 5; ++i) rows.push_back({{"t"}, {"A"}});
    for (int i = 0; i < 5; ++i) rows.push_back({{"t"}, {}});
    Corpus c = testutil::corpus(rows);
    FoldsResult fr = stratified_folds(c, 5, 42);
    CHECK(!fr.degraded_to_plain);
    REQUIRE(fr.folds.size() == 5);
    fold_assignment(fr, 10);
    for (const auto& fold : fr.folds) {
        REQUIRE(fold.test.size() == 2);
        int n_a = 0, n_none = 0;
        for (std::size_t i : fold.test)
            (c.sentences[i].labels.empty() ? n_none : n_a)++;
        CHECK(n_a == 1);
        CHECK(n_none == 1);
    }
}

TEST_CASE("stratified folds are deterministic in the seed") {
    std::vector<std::pair<std::vector<std::string>, std::set<std::string>>> rows;
    for (int i = 0; i < 30; ++i)
        rows.push_back({{"t"}, i % 3 == 0 ? std::set<std::string>{"A"} : std::set<std::string>{}});
    Corpus c = testutil::corpus(rows);

    FoldsResult a = stratified_folds(c, 3, 7);
    FoldsResult b = stratified_folds(c, 3, 7);
    REQUIRE(a.folds.size() == b.folds.size());
    for (std::size_t f = 0; f < a.folds.size(); ++f) {
        CHECK(a.folds[f].test == b.folds[f].test);
        CHECK(a.folds[f].train == b.folds[f].train);
    }

    FoldsResult other = stratified_folds(c, 3, 8);
    bool any_diff = false;
    for (std::size_t f = 0; f < a.folds.size(); ++f)
        if (a.folds[f].test != other.folds[f].test) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("stratified folds keep per-class counts within one of each other") {
    std::vector<std::pair<std::vector<std::string>, std::set<std::string>>> rows;
    for (int i = 0; i < 47; ++i) rows.push_back({{"t"}, {"A"}});
    for (int i = 0; i < 33; ++i) rows.push_back({{"t"}, {"B"}});
    for (int i = 0; i < 20; ++i) rows.push_back({{"t"}, {}});
    Corpus c = testutil::corpus(rows);
    FoldsResult fr = stratified_folds(c, 10, 1);
    CHECK(!fr.degraded_to_plain);
    fold_assignment(fr, 100);
    for (const auto& fold : fr.folds) {
        std::map<std::string, int> per_class;
        for (std::size_t i : fold.test) {
            const auto& ls = c.sentences[i].labels;
            ++per_class[ls.empty() ? "" : *ls.begin()];
        }
        CHECK(per_class["A"] >= 4);
        CHECK(per_class["A"] <= 5);
        CHECK(per_class["B"] >= 3);
        CHECK(per_class["B"] <= 4);
        CHECK(per_class[""] == 2);
    }
}

TEST_CASE("multi-event sentences stratify on their first canonical label") {
    std::vector<std::pair<std::vector<std::string>, std::set<std::string>>> rows;
    for (int i = 0; i < 6; ++i) rows.push_back({{"t"}, {"A", "B"}});
    for (int i = 0; i < 2; ++i) rows.push_back({{"t"}, {"B"}});
    Corpus c = testutil::corpus(rows, {"B", "A"});
    // under canonical-first stratification everything lands in stratum B (8 >= k);
    // keying on the alphabetical first label would leave stratum B with 2 < k
    FoldsResult fr = stratified_folds(c, 4, 3);
    CHECK(!fr.degraded_to_plain);
    fold_assignment(fr, 8);
    for (const auto& fold : fr.folds) CHECK(fold.test.size() == 2);
}

TEST_CASE("a stratum smaller than k degrades to plain shuffled folds") {
    std::vector<std::pair<std::vector<std::string>, std::set<std::string>>> rows;
    for (int i = 0; i < 11; ++i) rows.push_back({{"t"}, {}});
    rows.push_back({{"t"}, {"Rare"}});
    Corpus c = testutil::corpus(rows);
    FoldsResult fr = stratified_folds(c, 3, 9);
    CHECK(fr.degraded_to_plain);
    fold_assignment(fr, 12);
    for (const auto& fold : fr.folds) CHECK(fold.test.size() == 4);
}

TEST_CASE("stratified_folds rejects bad k") {
    Corpus c = testutil::corpus({{{"a"}, {}}, {{"b"}, {}}});
    CHECK_THROWS_AS((void)stratified_folds(c, 1, 0), InputError);
    CHECK_THROWS_AS((void)stratified_folds(c, 3, 0), InputError);
}
