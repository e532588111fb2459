#include "maxeval/submaxim.hpp"

namespace maxeval {

std::string to_string(Maxim m) {
    switch (m) {
        case Maxim::quantity: return "quantity";
        case Maxim::quality: return "quality";
        case Maxim::relevance: return "relevance";
        case Maxim::manner: return "manner";
        case Maxim::benevolence: return "benevolence";
        case Maxim::transparency: return "transparency";
    }
    throw std::logic_error("unknown maxim");
}

std::string SubmaximId::name() const {
    return to_string(maxim) + "_" + std::to_string(index);
}

const std::array<SubmaximId, 12>& canonical_submaxims() {
    static const std::array<SubmaximId, 12> ids = {{
        {Maxim::quantity, 1},
        {Maxim::quantity, 2},
        {Maxim::quality, 1},
        {Maxim::relevance, 1},
        {Maxim::relevance, 2},
        {Maxim::manner, 1},
        {Maxim::manner, 2},
        {Maxim::benevolence, 1},
        {Maxim::benevolence, 2},
        {Maxim::transparency, 1},
        {Maxim::transparency, 2},
        {Maxim::transparency, 3},
    }};
    return ids;
}

int canonical_index(const SubmaximId& id) {
    const auto& ids = canonical_submaxims();
    for (int i = 0; i < static_cast<int>(ids.size()); ++i) {
        if (ids[i] == id) return i;
    }
    throw std::invalid_argument("submaxim not in the canonical 12-id set: " + id.name());
}

std::optional<SubmaximId> parse_submaxim(const std::string& name) {
    for (const auto& id : canonical_submaxims()) {
        if (id.name() == name) return id;
    }
    return std::nullopt;
}

}  // namespace maxeval
