#include "tod/debate_types.hpp"

namespace tod {

std::string_view to_string(Side side) {
    return side == Side::author_0 ? "author_0" : "author_1";
}

std::optional<Side> side_from_string(std::string_view name) {
    if (name == "author_0") return Side::author_0;
    if (name == "author_1") return Side::author_1;
    return std::nullopt;
}

std::string side_label(Side side) { return side == Side::author_0 ? "Author 0" : "Author 1"; }

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::present: return "present";
        case Stage::respond: return "respond";
        case Stage::revise: return "revise";
    }
    return "present";
}

std::optional<Stage> stage_from_string(std::string_view name) {
    if (name == "present") return Stage::present;
    if (name == "respond") return Stage::respond;
    if (name == "revise") return Stage::revise;
    return std::nullopt;
}

}  // namespace tod
