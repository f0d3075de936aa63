#pragma once

#include <cstddef>
#include <functional>
#include <memory>

namespace mar {

/// Runs body(begin, end) over disjoint chunks of [0, count). Every index is
/// visited exactly once; callers must only write to locations owned by their
/// chunk so the result does not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

/// Limits the worker count for the lifetime of the returned guard.
/// threads == 0 keeps the library default (all cores).
class ThreadLimit {
public:
    explicit ThreadLimit(std::size_t threads);
    ~ThreadLimit();
    ThreadLimit(const ThreadLimit&) = delete;
    ThreadLimit& operator=(const ThreadLimit&) = delete;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::size_t hardware_threads();

}  // namespace mar
