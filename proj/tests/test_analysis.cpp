#include <doctest.h>

#include <algorithm>
#include <random>

#include "maxeval/analysis.hpp"
#include "test_util.hpp"

using namespace maxeval;

namespace {

const SubmaximId q1{Maxim::quantity, 1};
const SubmaximId r2{Maxim::relevance, 2};
const SubmaximId b2{Maxim::benevolence, 2};

/// Full 12-submaxim label set for one slice: violated for the listed ids,
/// satisfied elsewhere.
std::vector<AggregateLabel> labels_for(const std::string& slice_id,
                                       const std::vector<SubmaximId>& violated) {
    std::vector<AggregateLabel> out;
    for (const auto& id : canonical_submaxims()) {
        AggregateLabel l;
        l.slice_id = slice_id;
        l.submaxim = id;
        l.valid_runs = 5;
        const bool is_violated =
            std::find(violated.begin(), violated.end(), id) != violated.end();
        l.violated_votes = is_violated ? 5 : 0;
        l.verdict = is_violated ? Verdict::violated : Verdict::satisfied;
        l.confidence = 1.0;
        out.push_back(l);
    }
    return out;
}

std::vector<AggregateLabel> concat(std::initializer_list<std::vector<AggregateLabel>> parts) {
    std::vector<AggregateLabel> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

}  // namespace

TEST_CASE("build_splits membership follows the violated verdict") {
    const auto aggregates = concat({labels_for("s1", {b2}), labels_for("s2", {q1, r2})});
    const auto splits = build_splits(aggregates);
    REQUIRE(splits.size() == 12);
    CHECK(splits[canonical_index(b2)].member_slice_ids == std::set<std::string>{"s1"});
    CHECK(splits[canonical_index(q1)].member_slice_ids == std::set<std::string>{"s2"});
    CHECK(splits[canonical_index(r2)].member_slice_ids == std::set<std::string>{"s2"});
    CHECK(splits[canonical_index({Maxim::manner, 1})].member_slice_ids.empty());
}

TEST_CASE("build_splits with no violations yields 12 empty splits") {
    const auto splits = build_splits(labels_for("s1", {}));
    for (const auto& split : splits) CHECK(split.member_slice_ids.empty());
}

TEST_CASE("build_splits strict mode rejects missing labels") {
    auto aggregates = labels_for("s1", {q1});
    aggregates.pop_back();  // drop transparency_3
    CHECK_NOTHROW(build_splits(aggregates));
    CHECK_THROWS_AS(build_splits(aggregates, true), MissingSubmaxim);
}

TEST_CASE("violation_pattern matches the hand-enumerated 3-slice table") {
    // s1 violates q1; s2 violates q1 and r2; s3 violates r2.
    const auto aggregates = concat(
        {labels_for("s1", {q1}), labels_for("s2", {q1, r2}), labels_for("s3", {r2})});
    const auto pattern = violation_pattern(aggregates);

    const int iq1 = canonical_index(q1);
    const int ir2 = canonical_index(r2);
    // split r2 = {s2, s3}; q1 violated in s2 only -> 1/2
    REQUIRE(pattern.matrix[iq1][ir2].value.has_value());
    CHECK(*pattern.matrix[iq1][ir2].value == 0.5);
    // split q1 = {s1, s2}; r2 violated in s2 only -> 1/2
    REQUIRE(pattern.matrix[ir2][iq1].value.has_value());
    CHECK(*pattern.matrix[ir2][iq1].value == 0.5);
    CHECK(pattern.split_support[iq1] == 2);
    CHECK(pattern.split_support[ir2] == 2);

    // empty split -> all-null column with support 0
    const int im1 = canonical_index({Maxim::manner, 1});
    CHECK(pattern.split_support[im1] == 0);
    for (int i = 0; i < 12; ++i) {
        CHECK(!pattern.matrix[i][im1].value.has_value());
        CHECK(pattern.matrix[i][im1].support == 0);
    }
}

TEST_CASE("violation_pattern diagonal is exactly 1.0 on nonempty splits") {
    std::mt19937 rng(11);
    std::vector<AggregateLabel> aggregates;
    for (int s = 0; s < 40; ++s) {
        std::vector<SubmaximId> violated;
        for (const auto& id : canonical_submaxims()) {
            if (rng() % 3 == 0) violated.push_back(id);
        }
        auto labels = labels_for("s" + std::to_string(s), violated);
        aggregates.insert(aggregates.end(), labels.begin(), labels.end());
    }
    const auto pattern = violation_pattern(aggregates);
    for (int j = 0; j < 12; ++j) {
        if (pattern.split_support[j] == 0) continue;
        REQUIRE(pattern.matrix[j][j].value.has_value());
        CHECK(*pattern.matrix[j][j].value == 1.0);  // exact
    }
}

TEST_CASE("violation_pattern is invariant under input permutation") {
    auto aggregates = concat(
        {labels_for("s1", {q1}), labels_for("s2", {q1, r2}), labels_for("s3", {b2})});
    const auto reference = violation_pattern(aggregates);
    std::mt19937 rng(3);
    std::shuffle(aggregates.begin(), aggregates.end(), rng);
    const auto shuffled = violation_pattern(aggregates);
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) {
            CHECK(reference.matrix[i][j].value == shuffled.matrix[i][j].value);
            CHECK(reference.matrix[i][j].support == shuffled.matrix[i][j].support);
        }
    }
}

TEST_CASE("undetermined labels are excluded from pattern cells") {
    auto aggregates = concat({labels_for("s1", {q1}), labels_for("s2", {q1})});
    // make s2's r2 label undetermined
    for (auto& l : aggregates) {
        if (l.slice_id == "s2" && l.submaxim == r2) l.verdict = Verdict::undetermined;
    }
    const auto pattern = violation_pattern(aggregates);
    const int iq1 = canonical_index(q1);
    const int ir2 = canonical_index(r2);
    CHECK(pattern.split_support[iq1] == 2);
    CHECK(pattern.matrix[ir2][iq1].support == 1);  // s2 excluded for row r2
    CHECK(*pattern.matrix[ir2][iq1].value == 0.0);
}

TEST_CASE("split_accuracy agrees with a crafted fixture") {
    // split q1 = {s1, s2}; gold covers both; the model is right about r2 on s1
    // (both satisfied) and wrong on s2 (model satisfied, gold violated).
    const auto aggregates = concat({labels_for("s1", {q1}), labels_for("s2", {q1})});
    GoldMap gold;
    for (const auto& id : canonical_submaxims()) {
        gold[{"s1", id}] = id == q1 ? Score::violated : Score::satisfied;
        gold[{"s2", id}] = (id == q1 || id == r2) ? Score::violated : Score::satisfied;
    }

    const auto acc = split_accuracy(aggregates, gold);
    const int iq1 = canonical_index(q1);
    const int ir2 = canonical_index(r2);
    CHECK(*acc.matrix[iq1][iq1].value == 1.0);
    CHECK(*acc.matrix[ir2][iq1].value == 0.5);
    CHECK(acc.matrix[ir2][iq1].support == 2);

    // empty split ∩ gold -> null with support 0
    const int ib2 = canonical_index(b2);
    CHECK(!acc.matrix[0][ib2].value.has_value());
    CHECK(acc.matrix[0][ib2].support == 0);
}

TEST_CASE("accuracy is monotone under correcting one wrong verdict") {
    auto aggregates = concat({labels_for("s1", {q1}), labels_for("s2", {q1})});
    GoldMap gold;
    for (const auto& id : canonical_submaxims()) {
        gold[{"s1", id}] = id == q1 ? Score::violated : Score::satisfied;
        gold[{"s2", id}] = (id == q1 || id == r2) ? Score::violated : Score::satisfied;
    }
    const auto before = split_accuracy(aggregates, gold);
    // correct the wrong verdict: s2's r2 flips to violated (matches gold)
    for (auto& l : aggregates) {
        if (l.slice_id == "s2" && l.submaxim == r2) {
            l.verdict = Verdict::violated;
            l.violated_votes = 5;
        }
    }
    const auto after = split_accuracy(aggregates, gold);
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) {
            if (!before.matrix[i][j].value.has_value()) continue;
            if (!after.matrix[i][j].value.has_value()) continue;
            if (before.matrix[i][j].support != after.matrix[i][j].support) continue;
            CHECK(*after.matrix[i][j].value >= *before.matrix[i][j].value);
        }
    }
}

TEST_CASE("matrix CSV round-trips exactly") {
    const auto aggregates = concat(
        {labels_for("s1", {q1}), labels_for("s2", {q1, r2}), labels_for("s3", {b2})});
    const auto pattern = violation_pattern(aggregates);
    const auto csv = matrix_to_csv(pattern.matrix);

    // header + 12 rows, 25 fields each
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
    const auto round = matrix_from_csv(csv);
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) {
            CHECK(round[i][j].value == pattern.matrix[i][j].value);
            CHECK(round[i][j].support == pattern.matrix[i][j].support);
        }
    }
}
