#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace dworklab {

inline unsigned default_threads() {
    unsigned h = std::thread::hardware_concurrency();
    return h ? h : 1;
}

// Runs fn(i) for i in [0, count). Results must be written to slot i by the caller,
// so the merge order never depends on scheduling. The lowest-index exception wins.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::exception_ptr err;
    std::size_t err_index = count;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (i < err_index) {
                    err_index = i;
                    err = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    unsigned t = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// Set by the CLI; library callers stay silent by default.
inline std::atomic<bool>& progress_to_stderr() {
    static std::atomic<bool> on{false};
    return on;
}

// Progress line on stderr at most once per second.
class Progress {
public:
    Progress(std::string label, std::size_t total)
        : label_(std::move(label)), total_(total), enabled_(progress_to_stderr().load()),
          last_(std::chrono::steady_clock::now()) {}

    void tick(std::size_t done_delta = 1) {
        std::size_t d = done_ += done_delta;
        if (!enabled_) return;
        auto now = std::chrono::steady_clock::now();
        std::lock_guard<std::mutex> lock(mu_);
        if (now - last_ < std::chrono::seconds(1)) return;
        last_ = now;
        std::fprintf(stderr, "[%s] %zu/%zu\n", label_.c_str(), d, total_);
    }

private:
    std::string label_;
    std::size_t total_;
    bool enabled_;
    std::atomic<std::size_t> done_{0};
    std::mutex mu_;
    std::chrono::steady_clock::time_point last_;
};

}  // namespace dworklab
