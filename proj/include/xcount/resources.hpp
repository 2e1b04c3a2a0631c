#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>

namespace xcount {

using Clock = std::chrono::steady_clock;

struct ResourceLimits {
    std::optional<Clock::time_point> deadline;
    std::size_t memory_cap_bytes = 0; // 0 means unlimited

    static ResourceLimits from_seconds(double timeout_seconds, std::size_t memory_cap_bytes);
};

/// Shared accounting for every decision-diagram manager participating in one
/// run. Enforcement is cooperative: managers call `check_time` and `charge`
/// from their allocation paths and throw when a limit is hit.
class ResourceBudget {
public:
    explicit ResourceBudget(ResourceLimits limits = {}) : limits_(limits) {}

    ResourceBudget(const ResourceBudget&) = delete;
    ResourceBudget& operator=(const ResourceBudget&) = delete;

    /// Throws TimeoutError once the deadline has passed.
    void check_time() const;

    void charge(std::int64_t delta_bytes);
    bool over_cap() const;

    std::size_t used_bytes() const { return static_cast<std::size_t>(used_.load()); }
    std::size_t peak_bytes() const { return static_cast<std::size_t>(peak_.load()); }
    const ResourceLimits& limits() const { return limits_; }

private:
    ResourceLimits limits_;
    std::atomic<std::int64_t> used_{0};
    std::atomic<std::int64_t> peak_{0};
};

using BudgetPtr = std::shared_ptr<ResourceBudget>;

inline BudgetPtr make_budget(ResourceLimits limits = {}) {
    return std::make_shared<ResourceBudget>(limits);
}

} // namespace xcount
