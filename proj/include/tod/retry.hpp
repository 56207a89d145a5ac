#pragma once

#include <algorithm>
#include <chrono>
#include <random>
#include <string>
#include <thread>

#include "tod/error.hpp"

namespace tod {

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds base_delay{500};
    double jitter = 0.25;  // fraction of the delay added at random

    bool operator==(const RetryPolicy&) const = default;
};

inline std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry) {
    thread_local std::mt19937 rng{std::random_device{}()};
    auto base = static_cast<double>(policy.base_delay.count()) * static_cast<double>(1 << std::min(retry, 20));
    std::uniform_real_distribution<double> spread(0.0, policy.jitter);
    return std::chrono::milliseconds(static_cast<long>(base * (1.0 + spread(rng))));
}

// Runs `fn`, retrying retryable TransportErrors with exponential backoff.
// The final failure is rethrown with the attempt count and last diagnostic.
template <class Fn>
auto with_retries(const RetryPolicy& policy, const std::string& what, Fn&& fn) -> decltype(fn()) {
    for (int attempt = 0;; ++attempt) {
        try {
            return fn();
        } catch (const TransportError& e) {
            if (!e.retryable()) throw;
            if (attempt >= policy.max_retries) {
                throw TransportError(what + " failed after " + std::to_string(attempt + 1) +
                                         " attempts: " + e.what(),
                                     false);
            }
            std::this_thread::sleep_for(backoff_delay(policy, attempt));
        }
    }
}

}  // namespace tod
