#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "curirl/domain.hpp"

namespace curirl {

/// Which demonstrations count as "best". Later trials are assumed to show the
/// demonstrator at their peak; the game score is the alternative measure.
enum class CurriculumKey {
    trial_index_descending,
    score_descending,
};

std::string_view to_string(CurriculumKey key) noexcept;
std::optional<CurriculumKey> parse_curriculum_key(std::string_view text) noexcept;

/// Best-first presentation order: stable descending sort by the key, ties broken by
/// (participant_id, trial_index) ascending. The input set is left untouched.
std::vector<Trajectory> order_demonstrations(const DemoSet& demos, CurriculumKey key);

} // namespace curirl
