#include "membrane/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "membrane/errors.hpp"

namespace membrane::montecarlo {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Stream {
public:
    explicit Stream(std::uint64_t state) : state_(state) {}

    double uniform() {
        state_ += kGolden;
        return static_cast<double>(mix(state_) >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

// Site layout shared by all replicates.
struct Geometry {
    std::vector<Site> receptors;
    std::vector<Site> starts;
    std::int64_t period = 0;  // 0 on the line
    double p = 0.5;

    bool on_receptor(Site x) const {
        if (period > 0) x = ((x % period) + period) % period;
        return std::binary_search(receptors.begin(), receptors.end(), x);
    }
};

void run_block(const Geometry& g, std::size_t n, std::uint64_t seed, std::uint64_t first, std::uint64_t last,
               std::vector<std::uint64_t>& counts) {
    std::vector<Site> pos(g.starts.size());
    for (std::uint64_t rep = first; rep < last; ++rep) {
        Stream rng(splitmix64(seed ^ splitmix64(rep)));
        std::copy(g.starts.begin(), g.starts.end(), pos.begin());
        std::size_t k = 0;
        for (std::size_t step = 0; step < n; ++step) {
            bool hit = false;
            for (auto& x : pos) {
                x += rng.uniform() < g.p ? 1 : -1;
                hit = hit || g.on_receptor(x);
            }
            if (hit) ++k;
        }
        ++counts[k];
    }
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t z) { return mix(z + kGolden); }

unsigned worker_count() {
    unsigned hw = std::max(1U, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MEMBRANE_SOJOURN_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(std::min<unsigned long>(v, 1024));
    }
    return hw;
}

template <Field T>
McEstimate simulate_sojourn(const WalkModel<T>& m, std::size_t n, std::uint64_t samples, std::uint64_t seed,
                            unsigned workers) {
    if (samples < 1) throw DomainError("simulation needs at least one sample");
    Geometry g{m.receptors, m.starts, m.period(), to_double(m.params.p)};

    if (workers == 0) workers = worker_count();
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, samples));
    std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(n + 1, 0));
    const std::uint64_t chunk = samples / workers;
    const std::uint64_t extra = samples % workers;
    auto bounds = [&](unsigned w) {
        const std::uint64_t first = w * chunk + std::min<std::uint64_t>(w, extra);
        return std::pair{first, first + chunk + (w < extra ? 1 : 0)};
    };
    if (workers == 1) {
        run_block(g, n, seed, 0, samples, partial[0]);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            const auto [first, last] = bounds(w);
            pool.emplace_back(run_block, std::cref(g), n, seed, first, last, std::ref(partial[w]));
        }
        for (auto& t : pool) t.join();
    }

    McEstimate est;
    est.n = n;
    est.samples = samples;
    est.seed = seed;
    est.p = g.p;
    est.counts.assign(n + 1, 0);
    for (const auto& part : partial)
        for (std::size_t k = 0; k <= n; ++k) est.counts[k] += part[k];
    const double total = static_cast<double>(samples);
    for (std::size_t k = 0; k <= n; ++k) {
        const double ph = static_cast<double>(est.counts[k]) / total;
        est.pmf_hat.push_back(ph);
        est.stderr_hat.push_back(std::sqrt(ph * (1.0 - ph) / total));
    }
    return est;
}

template McEstimate simulate_sojourn<double>(const WalkModel<double>&, std::size_t, std::uint64_t, std::uint64_t,
                                             unsigned);
template McEstimate simulate_sojourn<Rational>(const WalkModel<Rational>&, std::size_t, std::uint64_t, std::uint64_t,
                                               unsigned);

}  // namespace membrane::montecarlo
