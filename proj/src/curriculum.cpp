#include "curirl/curriculum.hpp"

#include <algorithm>

#include "curirl/error.hpp"

namespace curirl {

std::string_view to_string(CurriculumKey key) noexcept {
    return key == CurriculumKey::trial_index_descending ? "trial_desc" : "score_desc";
}

std::optional<CurriculumKey> parse_curriculum_key(std::string_view text) noexcept {
    if (text == "trial_desc" || text == "trial_index_descending") return CurriculumKey::trial_index_descending;
    if (text == "score_desc" || text == "score_descending") return CurriculumKey::score_descending;
    return std::nullopt;
}

std::vector<Trajectory> order_demonstrations(const DemoSet& demos, CurriculumKey key) {
    require(!demos.trajectories.empty(), ErrorKind::empty_input, "no demonstrations to order");
    if (key == CurriculumKey::score_descending) {
        for (std::size_t i = 0; i < demos.trajectories.size(); ++i) {
            const auto& t = demos.trajectories[i];
            require(t.score.has_value(), ErrorKind::missing_score,
                    "trajectory " + std::to_string(i) + " (" + t.participant_id + ", trial " +
                        std::to_string(t.trial_index) + ") has no score");
        }
    }

    std::vector<Trajectory> ordered = demos.trajectories;
    auto tie_less = [](const Trajectory& a, const Trajectory& b) {
        if (a.participant_id != b.participant_id) return a.participant_id < b.participant_id;
        return a.trial_index < b.trial_index;
    };
    if (key == CurriculumKey::trial_index_descending) {
        std::stable_sort(ordered.begin(), ordered.end(), [&](const Trajectory& a, const Trajectory& b) {
            if (a.trial_index != b.trial_index) return a.trial_index > b.trial_index;
            return tie_less(a, b);
        });
    } else {
        std::stable_sort(ordered.begin(), ordered.end(), [&](const Trajectory& a, const Trajectory& b) {
            if (*a.score != *b.score) return *a.score > *b.score;
            return tie_less(a, b);
        });
    }
    return ordered;
}

} // namespace curirl
