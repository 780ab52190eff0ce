#pragma once

// Shared plumbing: error types mapped to CLI exit codes, a deterministic
// uniform RNG, and a static-partition parallel_for whose results do not
// depend on thread count.

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace emlab {

struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EscapeError : std::runtime_error {
    int escape_time;
    explicit EscapeError(int t)
        : std::runtime_error("trajectory escaped at step " + std::to_string(t)),
          escape_time(t) {}
};

struct DegenerateDataError : std::runtime_error {
    explicit DegenerateDataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SaturationError : std::runtime_error {
    double floor_residual;
    explicit SaturationError(double floor)
        : std::runtime_error("target epsilon below achievable floor residual " +
                             std::to_string(floor)),
          floor_residual(floor) {}
};

struct NoPreimageError : std::runtime_error {
    explicit NoPreimageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularLocusError : std::runtime_error {
    explicit SingularLocusError(const std::string& msg) : std::runtime_error(msg) {}
};

struct OutOfDomainError : std::runtime_error {
    explicit OutOfDomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// splitmix64, used both directly and to seed sub-streams. Deterministic
// across platforms, unlike std::uniform_real_distribution.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo,hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform integer in [0,n)
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    // derive an independent stream for task `id`
    Rng split(std::uint64_t id) const {
        Rng r(state_ ^ (0xd1342543de82ef95ULL * (id + 1)));
        r.next_u64();
        return r;
    }

  private:
    std::uint64_t state_;
};

// Runs fn(i) for i in [0,n). Work is split into contiguous blocks, one per
// worker; fn must only write to per-index slots so the result is identical
// for any thread count.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 0) threads = int(std::thread::hardware_concurrency());
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t nt = std::min<std::size_t>(std::size_t(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::size_t chunk = (n + nt - 1) / nt;
    for (std::size_t t = 0; t < nt; ++t) {
        std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// 17 significant digits round-trip doubles exactly; shared by every CSV writer.
std::string format_double(double v);

// FNV-1a, used for input hashes in run manifests.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace emlab
