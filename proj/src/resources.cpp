#include "xcount/resources.hpp"

#include "xcount/errors.hpp"

namespace xcount {

ResourceLimits ResourceLimits::from_seconds(double timeout_seconds, std::size_t memory_cap_bytes) {
    ResourceLimits limits;
    if (timeout_seconds > 0) {
        limits.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(timeout_seconds));
    }
    limits.memory_cap_bytes = memory_cap_bytes;
    return limits;
}

void ResourceBudget::check_time() const {
    if (limits_.deadline && Clock::now() >= *limits_.deadline) {
        throw TimeoutError();
    }
}

void ResourceBudget::charge(std::int64_t delta_bytes) {
    const std::int64_t now = used_.fetch_add(delta_bytes) + delta_bytes;
    std::int64_t prev = peak_.load();
    while (now > prev && !peak_.compare_exchange_weak(prev, now)) {
    }
}

bool ResourceBudget::over_cap() const {
    return limits_.memory_cap_bytes != 0 &&
           used_.load() > static_cast<std::int64_t>(limits_.memory_cap_bytes);
}

} // namespace xcount
