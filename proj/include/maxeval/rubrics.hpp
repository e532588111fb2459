#pragma once

#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxeval/corpus.hpp"
#include "maxeval/submaxim.hpp"

namespace maxeval {

struct SubmaximRubric {
    SubmaximId id;
    std::string requirement;
    std::string yes_criterion;  // what "satisfied" looks like
    std::string no_criterion;   // what "violated" looks like
};

enum class ExampleClass { positive, negative };

/// A hand-crafted in-context example: context + response, labeled positive
/// (satisfies the submaxim) or negative (violates it). Applicable only to
/// slices whose final speaker matches the response role.
struct LabeledExample {
    std::string id;
    std::vector<Turn> context;
    Turn response;
    ExampleClass klass;

    Role applicable_role() const { return response.role; }
};

struct ExamplePool {
    SubmaximId submaxim;
    std::vector<LabeledExample> examples;
};

struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PoolTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Loads the rubric registry. Throws ValidationFailure unless exactly the 12
/// canonical submaxims are present, each once, with nonempty texts.
std::vector<SubmaximRubric> load_rubrics(const std::string& path);

const SubmaximRubric& find_rubric(const std::vector<SubmaximRubric>& rubrics,
                                  const SubmaximId& id);

/// Loads one example-pool file (JSONL with a versioned header record).
/// Every example must pass the same structural validation as a Slice.
ExamplePool load_pool(const std::string& path);

/// Loads pools/<submaxim>.jsonl for all 12 submaxims from a directory.
std::map<SubmaximId, ExamplePool> load_pools(const std::string& dir);

/// Throws ValidationFailure unless the pool has >=2 positive and >=2 negative
/// examples for each role.
void validate_pool(const ExamplePool& pool);

/// Draws 2 positive then 2 negative examples for `role`, uniformly without
/// replacement within each class. Consumes rng state.
std::vector<LabeledExample> sample_examples(const ExamplePool& pool, Role role,
                                            std::mt19937_64& rng);

/// Stable content hash of a rubric set, used to guard campaign resumes.
std::string rubric_set_hash(const std::vector<SubmaximRubric>& rubrics);

}  // namespace maxeval
