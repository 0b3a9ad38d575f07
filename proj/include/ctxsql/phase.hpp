#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace ctxsql {

/// Experimental condition: which corpus backs retrieval and validation.
enum class Phase {
    schema_only,          // full schema rendering
    schema_plus_context,  // full schema + business context document
    narrowed_schema,      // essential-table schema rendering only
};

inline constexpr std::array<Phase, 3> kAllPhases = {Phase::schema_only, Phase::schema_plus_context,
                                                    Phase::narrowed_schema};

std::string_view phase_name(Phase phase) noexcept;
std::string_view phase_short_name(Phase phase) noexcept;  // phase1 / phase2 / phase3

/// Accepts the canonical names, "phase1".."phase3" and "1".."3".
std::optional<Phase> parse_phase(std::string_view text) noexcept;

}  // namespace ctxsql
