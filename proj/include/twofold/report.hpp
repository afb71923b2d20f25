#pragma once

#include "twofold/integrator.hpp"
#include "twofold/singularity.hpp"
#include "twofold/transform.hpp"

#include <string>
#include <vector>

namespace twofold {

/// Flavor, determinacy-breaking flag and folded singularities as JSON.
/// Singularity errors are reported in an "error" field instead of thrown.
[[nodiscard]] std::string classify_report(const TwoFoldParams& p);

[[nodiscard]] std::string singularity_report(const TwoFoldParams& p, const std::vector<FoldedSingularity>& list);

[[nodiscard]] std::string transform_check_report(const std::vector<TransformCheck>& checks);

/// Status, counts per event kind, end state and the seed if one was used.
[[nodiscard]] std::string run_summary(const Trajectory& traj);

}  // namespace twofold
