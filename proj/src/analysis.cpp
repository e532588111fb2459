#include "maxeval/analysis.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace maxeval {

using nlohmann::json;

namespace {

// verdict per (slice, submaxim); absent entries count as missing.
using VerdictTable = std::map<std::string, std::array<std::optional<Verdict>, 12>>;

VerdictTable build_table(const std::vector<AggregateLabel>& aggregates) {
    VerdictTable table;
    for (const auto& a : aggregates) {
        table[a.slice_id][canonical_index(a.submaxim)] = a.verdict;
    }
    return table;
}

}  // namespace

std::vector<Split> build_splits(const std::vector<AggregateLabel>& aggregates, bool strict) {
    const VerdictTable table = build_table(aggregates);
    std::vector<Split> splits;
    for (const auto& id : canonical_submaxims()) splits.push_back({id, {}});

    for (const auto& [slice_id, verdicts] : table) {
        for (int j = 0; j < 12; ++j) {
            if (!verdicts[j].has_value()) {
                if (strict) {
                    throw MissingSubmaxim("slice " + slice_id + " has no label for " +
                                          canonical_submaxims()[j].name());
                }
                continue;
            }
            if (*verdicts[j] == Verdict::violated) splits[j].member_slice_ids.insert(slice_id);
        }
    }
    return splits;
}

ViolationPattern violation_pattern(const std::vector<AggregateLabel>& aggregates) {
    const VerdictTable table = build_table(aggregates);
    const auto splits = build_splits(aggregates);

    ViolationPattern pattern;
    for (int j = 0; j < 12; ++j) {
        const auto& members = splits[j].member_slice_ids;
        pattern.split_support[j] = static_cast<int>(members.size());
        for (int i = 0; i < 12; ++i) {
            int determined = 0;
            int violated = 0;
            for (const auto& slice_id : members) {
                const auto& verdict = table.at(slice_id)[i];
                if (!verdict.has_value() || *verdict == Verdict::undetermined) continue;
                ++determined;
                if (*verdict == Verdict::violated) ++violated;
            }
            MatrixCell& cell = pattern.matrix[i][j];
            cell.support = determined;
            if (determined > 0) {
                cell.value = static_cast<double>(violated) / determined;
            }
        }
    }
    return pattern;
}

AccuracyMatrix split_accuracy(const std::vector<AggregateLabel>& aggregates,
                              const GoldMap& gold) {
    const VerdictTable table = build_table(aggregates);
    const auto splits = build_splits(aggregates);

    AccuracyMatrix acc;
    for (int j = 0; j < 12; ++j) {
        for (int i = 0; i < 12; ++i) {
            const SubmaximId row_id = canonical_submaxims()[i];
            int covered = 0;
            int correct = 0;
            for (const auto& slice_id : splits[j].member_slice_ids) {
                const auto gold_it = gold.find({slice_id, row_id});
                if (gold_it == gold.end()) continue;
                const auto& verdict = table.at(slice_id)[i];
                if (!verdict.has_value() || *verdict == Verdict::undetermined) continue;
                ++covered;
                const Verdict gold_verdict = gold_it->second == Score::violated
                                                 ? Verdict::violated
                                                 : Verdict::satisfied;
                if (*verdict == gold_verdict) ++correct;
            }
            MatrixCell& cell = acc.matrix[i][j];
            cell.support = covered;
            if (covered > 0) cell.value = static_cast<double>(correct) / covered;
        }
    }
    return acc;
}

// --- serialization ---

namespace {

std::string format_value(double v) {
    // Shortest representation that round-trips a double.
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream iss(line);
    while (std::getline(iss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

}  // namespace

std::string matrix_to_csv(const CellMatrix& matrix) {
    std::ostringstream out;
    out << "submaxim";
    for (const auto& id : canonical_submaxims()) {
        out << "," << id.name() << "," << id.name() << "_support";
    }
    out << "\n";
    for (int i = 0; i < 12; ++i) {
        out << canonical_submaxims()[i].name();
        for (int j = 0; j < 12; ++j) {
            const MatrixCell& cell = matrix[i][j];
            out << ",";
            if (cell.value.has_value()) out << format_value(*cell.value);
            out << "," << cell.support;
        }
        out << "\n";
    }
    return out.str();
}

CellMatrix matrix_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV");

    CellMatrix matrix{};
    int i = 0;
    while (std::getline(in, line) && i < 12) {
        const auto fields = split_csv_line(line);
        if (fields.size() != 25) {
            throw std::runtime_error("CSV row has " + std::to_string(fields.size()) +
                                     " fields, expected 25");
        }
        if (fields[0] != canonical_submaxims()[i].name()) {
            throw std::runtime_error("CSV rows are not in canonical order");
        }
        for (int j = 0; j < 12; ++j) {
            MatrixCell& cell = matrix[i][j];
            const std::string& value = fields[1 + 2 * j];
            if (!value.empty()) cell.value = std::stod(value);
            cell.support = std::stoi(fields[2 + 2 * j]);
        }
        ++i;
    }
    if (i != 12) throw std::runtime_error("CSV has " + std::to_string(i) + " rows, expected 12");
    return matrix;
}

std::string matrices_to_json(const ViolationPattern& pattern, const AccuracyMatrix& accuracy) {
    auto matrix_to_json = [](const CellMatrix& m) {
        json rows = json::array();
        for (int i = 0; i < 12; ++i) {
            json row = json::array();
            for (int j = 0; j < 12; ++j) {
                json cell;
                cell["value"] = m[i][j].value.has_value() ? json(*m[i][j].value) : json(nullptr);
                cell["support"] = m[i][j].support;
                row.push_back(cell);
            }
            rows.push_back(row);
        }
        return rows;
    };

    json doc;
    doc["submaxims"] = json::array();
    for (const auto& id : canonical_submaxims()) doc["submaxims"].push_back(id.name());
    doc["violation_pattern"] = matrix_to_json(pattern.matrix);
    doc["split_support"] = pattern.split_support;
    doc["split_accuracy"] = matrix_to_json(accuracy.matrix);
    return doc.dump(2);
}

}  // namespace maxeval
