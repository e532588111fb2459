#include "maxeval/rubrics.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace maxeval {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

std::uint64_t fnv1a64(const std::string& data, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::vector<SubmaximRubric> load_rubrics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationFailure("cannot open rubric file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ValidationFailure("rubric file is not valid JSON: " + std::string(e.what()));
    }
    if (doc.value("version", 0) != kSchemaVersion) {
        throw ValidationFailure("rubric file missing or unsupported version field");
    }

    std::vector<SubmaximRubric> rubrics;
    std::set<std::string> seen;
    std::vector<std::string> problems;
    for (const auto& entry : doc.at("rubrics")) {
        const std::string name = entry.at("id").get<std::string>();
        auto id = parse_submaxim(name);
        if (!id) {
            problems.push_back("unknown submaxim id: " + name);
            continue;
        }
        if (!seen.insert(name).second) {
            problems.push_back("duplicate submaxim id: " + name);
            continue;
        }
        SubmaximRubric r{*id, entry.at("requirement").get<std::string>(),
                         entry.at("yes_criterion").get<std::string>(),
                         entry.at("no_criterion").get<std::string>()};
        if (r.requirement.empty() || r.yes_criterion.empty() || r.no_criterion.empty()) {
            problems.push_back("empty text for " + name);
            continue;
        }
        rubrics.push_back(std::move(r));
    }
    for (const auto& id : canonical_submaxims()) {
        if (!seen.count(id.name())) problems.push_back("missing submaxim: " + id.name());
    }
    if (!problems.empty()) {
        std::string msg = "rubric validation failed:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ValidationFailure(msg);
    }

    std::sort(rubrics.begin(), rubrics.end(), [](const auto& a, const auto& b) {
        return canonical_index(a.id) < canonical_index(b.id);
    });
    return rubrics;
}

const SubmaximRubric& find_rubric(const std::vector<SubmaximRubric>& rubrics,
                                  const SubmaximId& id) {
    for (const auto& r : rubrics) {
        if (r.id == id) return r;
    }
    throw ValidationFailure("no rubric for " + id.name());
}

ExamplePool load_pool(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationFailure("cannot open pool file: " + path);

    ExamplePool pool;
    std::string line;
    bool have_header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const std::exception& e) {
            throw ValidationFailure(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!have_header) {
            if (rec.value("version", 0) != kSchemaVersion) {
                throw ValidationFailure(path + ": missing or unsupported version header");
            }
            auto id = parse_submaxim(rec.value("submaxim", ""));
            if (!id) throw ValidationFailure(path + ": header has no valid submaxim field");
            pool.submaxim = *id;
            have_header = true;
            continue;
        }
        LabeledExample ex;
        ex.id = rec.at("id").get<std::string>();
        const std::string klass = rec.at("klass").get<std::string>();
        if (klass == "positive") {
            ex.klass = ExampleClass::positive;
        } else if (klass == "negative") {
            ex.klass = ExampleClass::negative;
        } else {
            throw ValidationFailure(path + ": example " + ex.id + ": bad klass " + klass);
        }
        Conversation conv{ex.id, {}, path};
        for (const auto& t : rec.at("turns")) {
            conv.turns.push_back({role_from_string(t.at("role").get<std::string>()),
                                  t.at("text").get<std::string>()});
        }
        // Examples obey the same structural rules as real slices.
        validate_conversation(conv);
        ex.response = conv.turns.back();
        ex.context.assign(conv.turns.begin(), conv.turns.end() - 1);
        pool.examples.push_back(std::move(ex));
    }
    if (!have_header) throw ValidationFailure(path + ": empty pool file");
    validate_pool(pool);
    return pool;
}

std::map<SubmaximId, ExamplePool> load_pools(const std::string& dir) {
    std::map<SubmaximId, ExamplePool> pools;
    for (const auto& id : canonical_submaxims()) {
        ExamplePool pool = load_pool(dir + "/" + id.name() + ".jsonl");
        if (pool.submaxim != id) {
            throw ValidationFailure("pool file for " + id.name() + " declares " +
                                    pool.submaxim.name());
        }
        pools.emplace(id, std::move(pool));
    }
    return pools;
}

void validate_pool(const ExamplePool& pool) {
    for (Role role : {Role::user, Role::assistant}) {
        for (ExampleClass klass : {ExampleClass::positive, ExampleClass::negative}) {
            const auto count = std::count_if(
                pool.examples.begin(), pool.examples.end(), [&](const LabeledExample& e) {
                    return e.applicable_role() == role && e.klass == klass;
                });
            if (count < 2) {
                throw ValidationFailure(
                    "pool " + pool.submaxim.name() + " has " + std::to_string(count) + " " +
                    (klass == ExampleClass::positive ? "positive" : "negative") +
                    " examples for role " + to_string(role) + ", need >=2");
            }
        }
    }
}

std::vector<LabeledExample> sample_examples(const ExamplePool& pool, Role role,
                                            std::mt19937_64& rng) {
    auto draw_two = [&](ExampleClass klass) {
        std::vector<const LabeledExample*> candidates;
        for (const auto& e : pool.examples) {
            if (e.applicable_role() == role && e.klass == klass) candidates.push_back(&e);
        }
        if (candidates.size() < 2) {
            throw PoolTooSmall("pool " + pool.submaxim.name() + " has fewer than 2 " +
                               (klass == ExampleClass::positive ? "positive" : "negative") +
                               " examples for role " + to_string(role));
        }
        std::vector<LabeledExample> picked;
        for (int i = 0; i < 2; ++i) {
            std::uniform_int_distribution<std::size_t> dist(i, candidates.size() - 1);
            std::swap(candidates[i], candidates[dist(rng)]);
            picked.push_back(*candidates[i]);
        }
        return picked;
    };

    std::vector<LabeledExample> out = draw_two(ExampleClass::positive);
    auto negatives = draw_two(ExampleClass::negative);
    out.insert(out.end(), negatives.begin(), negatives.end());
    return out;
}

std::string rubric_set_hash(const std::vector<SubmaximRubric>& rubrics) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& id : canonical_submaxims()) {
        const auto& r = find_rubric(rubrics, id);
        for (const std::string& part :
             {r.id.name(), r.requirement, r.yes_criterion, r.no_criterion}) {
            h = fnv1a64(part, h);
            h = fnv1a64("\x1f", h);
        }
    }
    std::ostringstream oss;
    oss << std::hex << h;
    return oss.str();
}

}  // namespace maxeval
