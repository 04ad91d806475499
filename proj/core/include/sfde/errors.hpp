#pragma once

#include <stdexcept>
#include <string>

namespace sfde {

/// Thrown when a time argument is not a multiple of the grid step.
class AlignmentError : public std::invalid_argument {
public:
    explicit AlignmentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a simulated state leaves the finite range |x| <= 1e12.
/// Carries the step index at which the guard tripped and, for batch runs,
/// the index of the offending path.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(long step, long path, const std::string& what)
        : std::runtime_error(what), step_index(step), path_index(path) {}

    long step_index;
    long path_index;

    BlowUpError with_path(long path) const {
        return BlowUpError(step_index, path,
                           std::string(what()) + " (path " + std::to_string(path) + ")");
    }
};

/// Thrown when array dimensions disagree (e.g. diffusion columns vs noise dimension).
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace sfde
