#ifndef MEMBRANE_MODEL_HPP
#define MEMBRANE_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "membrane/field.hpp"
#include "membrane/walk1d.hpp"

namespace membrane {

using walk1d::Site;
using walk1d::WalkParams;

struct Line {};
struct Torus {
    std::int64_t period;
};
using Topology = std::variant<Line, Torus>;

/// ell independent walkers, r receptors, on the line or on Z/NZ.
template <Field T>
struct WalkModel {
    WalkParams<T> params;
    std::vector<Site> receptors;  ///< strictly increasing; reduced to 0..N-1 on the torus
    std::vector<Site> starts;     ///< one entry per walker
    Topology topology = Line{};

    /// Validates and normalizes. On the torus every site is reduced mod N and the
    /// receptor list is sorted; duplicates after reduction are rejected.
    static WalkModel make(const T& p, std::vector<Site> receptors, std::vector<Site> starts,
                          Topology topology = Line{});

    std::size_t walkers() const { return starts.size(); }
    bool on_torus() const { return std::holds_alternative<Torus>(topology); }
    std::int64_t period() const { return on_torus() ? std::get<Torus>(topology).period : 0; }

    /// Site reduced to the canonical representative (identity on the line).
    Site reduce(Site x) const;
    bool is_receptor(Site x) const;
    /// Membership in E: some coordinate sits on a receptor.
    bool in_e(std::span<const Site> y) const;
    /// Index of x among the receptors, or -1.
    std::int64_t receptor_index(Site x) const;
};

enum class Method { gf, dp, mc, qconv, closed };

const char* to_string(Method m);

/// pmf of T_n over k = 0..n, with the method that produced it.
template <Field T>
struct SojournDistribution {
    std::size_t n = 0;
    std::vector<T> pmf;
    Method method = Method::dp;
    std::map<std::string, std::string> meta;

    T total() const {
        T s = from_int<T>(0);
        for (const auto& v : pmf) s += v;
        return s;
    }
};

template <Field T>
T max_abs_diff(const SojournDistribution<T>& a, const SojournDistribution<T>& b) {
    const std::size_t m = std::max(a.pmf.size(), b.pmf.size());
    T worst = from_int<T>(0);
    for (std::size_t k = 0; k < m; ++k) {
        T x = k < a.pmf.size() ? a.pmf[k] : from_int<T>(0);
        T y = k < b.pmf.size() ? b.pmf[k] : from_int<T>(0);
        T d = x - y;
        if (d < 0) d = -d;
        if (d > worst) worst = d;
    }
    return worst;
}

}  // namespace membrane

#endif  // MEMBRANE_MODEL_HPP
