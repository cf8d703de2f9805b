#pragma once

#include <stdexcept>
#include <string>

namespace panogan {

// Error taxonomy mirrors the CLI exit codes.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainingDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UndefinedMetric : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace exit_code {
constexpr int ok = 0;
constexpr int config_error = 2;
constexpr int input_error = 3;
constexpr int training_diverged = 4;
constexpr int undefined_metric = 5;
}  // namespace exit_code

}  // namespace panogan
