#pragma once

#include <cstddef>
#include <string>

#include "adiacheck/errors.hpp"

namespace adiacheck {

/// Uniform grid t_k = t_start + k*dt, k = 0..steps.
class TimeGrid {
public:
    TimeGrid(double t_start, double t_end, std::size_t steps)
        : t_start_(t_start), t_end_(t_end), steps_(steps)
    {
        if (!(t_end > t_start)) {
            throw InvalidInput("TimeGrid: t_end must exceed t_start");
        }
        if (steps < 2) {
            throw InvalidInput("TimeGrid: at least 2 steps required, got " + std::to_string(steps));
        }
    }

    double t_start() const noexcept { return t_start_; }
    double t_end() const noexcept { return t_end_; }
    std::size_t steps() const noexcept { return steps_; }
    std::size_t points() const noexcept { return steps_ + 1; }
    double dt() const noexcept { return (t_end_ - t_start_) / static_cast<double>(steps_); }

    double time(std::size_t k) const noexcept
    {
        // Exact endpoint at k == steps.
        if (k == steps_) {
            return t_end_;
        }
        return t_start_ + static_cast<double>(k) * dt();
    }

    /// Every stride-th point of this grid; stride must divide steps.
    TimeGrid coarsened(std::size_t stride) const
    {
        if (stride == 0 || steps_ % stride != 0) {
            throw InvalidInput("TimeGrid: stride " + std::to_string(stride) +
                               " does not divide " + std::to_string(steps_) + " steps");
        }
        return TimeGrid(t_start_, t_end_, steps_ / stride);
    }

    bool operator==(const TimeGrid&) const = default;

private:
    double t_start_;
    double t_end_;
    std::size_t steps_;
};

} // namespace adiacheck
