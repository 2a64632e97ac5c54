#pragma once

#include <cstdint>
#include <exception>
#include <mutex>
#include <vector>

namespace lcarand {

// Exceptions must not leave an OpenMP region; the first one is kept and rethrown after it.
class ErrorSlot {
public:
    template <class Fn>
    void guard(Fn&& fn) noexcept {
        try {
            fn();
        } catch (...) {
            std::lock_guard<std::mutex> lk(mu_);
            if (!err_) err_ = std::current_exception();
        }
    }
    void rethrow() const {
        if (err_) std::rethrow_exception(err_);
    }

private:
    std::mutex mu_;
    std::exception_ptr err_;
};

// Deterministic sum of fn(i), i in [0,count): fixed chunks, summed in order.
template <class Fn>
double ordered_sum(std::uint64_t count, Fn&& fn, bool parallel = true, std::uint64_t chunk = 1 << 14) {
    const auto nc = static_cast<std::int64_t>((count + chunk - 1) / chunk);
    std::vector<double> part(nc, 0.0);
    ErrorSlot err;
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (std::int64_t c = 0; c < nc; ++c) {
        err.guard([&] {
            double acc = 0.0;
            const std::uint64_t lo = c * chunk, hi = lo + chunk < count ? lo + chunk : count;
            for (std::uint64_t i = lo; i < hi; ++i) acc += fn(i);
            part[c] = acc;
        });
    }
    err.rethrow();
    double total = 0.0;
    for (double x : part) total += x;
    return total;
}

}  // namespace lcarand
