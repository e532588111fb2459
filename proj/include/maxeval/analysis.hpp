#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxeval/labels.hpp"
#include "maxeval/submaxim.hpp"

namespace maxeval {

/// The subset of slices whose majority verdict for the pivot submaxim is
/// "violated". Splits overlap; all other submaxim dimensions are unconstrained.
struct Split {
    SubmaximId pivot;
    std::set<std::string> member_slice_ids;
};

struct MatrixCell {
    std::optional<double> value;  // nullopt = no data, distinct from 0
    int support = 0;
};

/// 12x12 grid in canonical submaxim order; rows = measured submaxim,
/// columns = pivot split.
using CellMatrix = std::array<std::array<MatrixCell, 12>, 12>;

struct ViolationPattern {
    CellMatrix matrix;                    // cell support = determined members
    std::array<int, 12> split_support{};  // members per pivot split
};

struct AccuracyMatrix {
    CellMatrix matrix;  // cell support = gold-covered determined members
};

struct MissingSubmaxim : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using GoldMap = std::map<std::pair<std::string, SubmaximId>, Score>;

/// Split j = slices whose verdict for submaxim j is violated. In strict mode
/// a slice lacking a label for some submaxim raises MissingSubmaxim.
std::vector<Split> build_splits(const std::vector<AggregateLabel>& aggregates,
                                bool strict = false);

/// Entry (i,j) = fraction of split j's members whose verdict for submaxim i is
/// violated; undetermined pairs are excluded from numerator and denominator,
/// and empty cells are null.
ViolationPattern violation_pattern(const std::vector<AggregateLabel>& aggregates);

/// Entry (i,j) = fraction of gold-covered slices in split j whose model
/// verdict for submaxim i equals the gold verdict. Null iff no support.
AccuracyMatrix split_accuracy(const std::vector<AggregateLabel>& aggregates,
                              const GoldMap& gold);

/// CSV with canonical row/column headers and value/support column pairs;
/// null cells render as empty fields. Lossless round trip.
std::string matrix_to_csv(const CellMatrix& matrix);
CellMatrix matrix_from_csv(const std::string& csv);

/// JSON report carrying both matrices plus split supports.
std::string matrices_to_json(const ViolationPattern& pattern, const AccuracyMatrix& accuracy);

}  // namespace maxeval
