#include "bsv/error.hpp"

namespace bsv {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::empty_input: return "EmptyInput";
        case Errc::format_error: return "FormatError";
        case Errc::ambiguous_surface: return "AmbiguousSurface";
        case Errc::syntax_error: return "SyntaxError";
        case Errc::duplicate_rule: return "DuplicateRule";
        case Errc::mismatched_itemset: return "MismatchedItemset";
        case Errc::inconsistent_inputs: return "InconsistentInputs";
        case Errc::io_error: return "IoError";
        case Errc::invalid_query: return "InvalidQuery";
        case Errc::unknown_region: return "UnknownRegion";
    }
    return "Unknown";
}

}  // namespace bsv
