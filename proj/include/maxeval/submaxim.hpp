#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

namespace maxeval {

enum class Maxim {
    quantity,
    quality,
    relevance,
    manner,
    benevolence,
    transparency,
};

std::string to_string(Maxim m);

/// One of the 12 in-scope submaxims, e.g. relevance_2.
struct SubmaximId {
    Maxim maxim;
    int index;  // 1-based within the maxim

    std::string name() const;

    bool operator==(const SubmaximId&) const = default;
    auto operator<=>(const SubmaximId&) const = default;
};

/// Canonical ordering used everywhere: matrices, reports, campaign loops.
const std::array<SubmaximId, 12>& canonical_submaxims();

/// Position of `id` in the canonical order, 0..11.
int canonical_index(const SubmaximId& id);

/// Parses "quantity_1" style names; rejects anything outside the 12-id set
/// (including quality_2).
std::optional<SubmaximId> parse_submaxim(const std::string& name);

}  // namespace maxeval
