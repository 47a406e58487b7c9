#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "curirl/domain.hpp"

namespace curirl {

struct Series {
    std::string label;
    std::vector<double> values;
    std::string color;
};

/// Line chart of one or more series against a 1-based index axis.
void write_line_chart_svg(std::ostream& out, const std::string& title, std::span<const Series> series);

struct PathOverlay {
    std::vector<Position2> points;
    bool highlighted = false;
};

/// Paths drawn inside the square room with the goal marked.
void write_room_svg(std::ostream& out, double room_size, Position2 goal, double goal_radius,
                    std::span<const PathOverlay> paths);

} // namespace curirl
