#include "geodist/util.hpp"

#include <cstdlib>
#include <stdexcept>

namespace geodist {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    LineFit fit;
    fit.n_points = x.size();
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("fit_line: need at least two points");

    KahanSum sx, sy;
    for (std::size_t i = 0; i < n; ++i) { sx.add(x[i]); sy.add(y[i]); }
    const double mx = sx.value() / static_cast<double>(n);
    const double my = sy.value() / static_cast<double>(n);

    KahanSum sxx, sxy, syy;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx.add(dx * dx);
        sxy.add(dx * dy);
        syy.add(dy * dy);
    }
    if (sxx.value() == 0.0) throw std::invalid_argument("fit_line: degenerate abscissa");
    fit.slope = sxy.value() / sxx.value();
    fit.intercept = my - fit.slope * mx;
    if (syy.value() == 0.0) {
        fit.r_squared = 1.0;
    } else {
        const double ss_res = syy.value() - fit.slope * sxy.value();
        fit.r_squared = 1.0 - ss_res / syy.value();
        if (fit.r_squared < 0.0) fit.r_squared = 0.0;
        if (fit.r_squared > 1.0) fit.r_squared = 1.0;
    }
    return fit;
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("GEODIST_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

void run_indexed(std::size_t n, const std::function<void(std::size_t)>& fn,
                 unsigned threads) {
    if (n == 0) return;
    if (threads == 0) threads = default_thread_count();
    if (threads > n) threads = static_cast<unsigned>(n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failed.load() && error) std::rethrow_exception(error);
}

} // namespace geodist
