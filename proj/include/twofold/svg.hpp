#pragma once

#include "twofold/integrator.hpp"
#include "twofold/sliding.hpp"

#include <string>

namespace twofold {

struct PlotStyle {
    int width = 640;
    int height = 480;
    /// Viewing direction in state coordinates; the default looks along x2 - x3.
    Vec3 view{0.0, 1.0, -1.0};
    /// Projected onto the screen's vertical axis.
    Vec3 up{1.0, 0.0, 0.0};
    std::string title;
    std::string horizontal_label = "x2+x3";
    std::string vertical_label = "x1";
};

/// Orthographic projection of the samples, colored by mode, events as markers.
/// Throws ContractViolation for an empty trajectory.
[[nodiscard]] std::string emit_plot(const Trajectory& traj, const PlotStyle& style = {});

/// Region map over (x2, x3).
[[nodiscard]] std::string emit_plot(const SlideMap& map, const PlotStyle& style = {});

/// Screen coordinates (horizontal, vertical) of a state under the style's projection.
[[nodiscard]] Vec2 project(const PlotStyle& style, const Vec3& x);

}  // namespace twofold
