#pragma once

#include "twofold/field.hpp"
#include "twofold/integrator.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace twofold {

struct SimSettings {
    double epsilon = 1e-3;
    double t_end = 200.0;
    Vec3 x0{0.1, 0.5, 0.5};
    Sigmoid sigmoid = Sigmoid::Tanh;

    friend bool operator==(const SimSettings&, const SimSettings&) = default;
};

struct Scenario {
    std::string name;
    PiecewiseSmoothSystem system;
    SimSettings sim;
    std::string provenance;
};

[[nodiscard]] std::vector<std::string> builtin_names();

/// Throws ContractViolation for an unknown name.
[[nodiscard]] Scenario builtin(const std::string& name);

/// Parses a config document. Throws SchemaError with a JSON pointer to the bad field.
[[nodiscard]] Scenario parse_config(const std::string& text);
[[nodiscard]] Scenario load_config(const std::filesystem::path& path);

/// Params when the system came from normal-form constants, expressions otherwise.
[[nodiscard]] std::string config_json(const Scenario& scenario);
void save_config(const Scenario& scenario, const std::filesystem::path& path);

/// Trajectory CSV at `trajectory_path`; event CSV too when `events_path` is non-empty.
void save_run(const Trajectory& traj, const std::filesystem::path& trajectory_path,
              const std::filesystem::path& events_path = {});

}  // namespace twofold
