#include "membrane/model.hpp"

#include <algorithm>

#include "membrane/errors.hpp"

namespace membrane {

const char* to_string(Method m) {
    switch (m) {
        case Method::gf: return "gf";
        case Method::dp: return "dp";
        case Method::mc: return "mc";
        case Method::qconv: return "qconv";
        case Method::closed: return "closed";
    }
    return "?";
}

template <Field T>
WalkModel<T> WalkModel<T>::make(const T& p, std::vector<Site> receptors, std::vector<Site> starts,
                                Topology topology) {
    WalkModel m;
    m.params = WalkParams<T>::make(p);
    m.topology = topology;
    if (receptors.empty()) throw DomainError("receptor set must be nonempty");
    if (starts.empty()) throw DomainError("at least one walker is required");
    if (m.on_torus()) {
        const std::int64_t n = m.period();
        if (n < 2) throw DomainError("torus period must be at least 2");
        for (auto& a : receptors) a = m.reduce(a);
        for (auto& x : starts) x = m.reduce(x);
        std::sort(receptors.begin(), receptors.end());
        if (static_cast<std::int64_t>(receptors.size()) >= n)
            throw DomainError("torus needs fewer receptors than sites");
    }
    for (std::size_t i = 1; i < receptors.size(); ++i)
        if (!(receptors[i - 1] < receptors[i])) throw DomainError("receptors must be strictly increasing and distinct");
    m.receptors = std::move(receptors);
    m.starts = std::move(starts);
    return m;
}

template <Field T>
Site WalkModel<T>::reduce(Site x) const {
    if (!on_torus()) return x;
    const std::int64_t n = period();
    return ((x % n) + n) % n;
}

template <Field T>
bool WalkModel<T>::is_receptor(Site x) const {
    return std::binary_search(receptors.begin(), receptors.end(), reduce(x));
}

template <Field T>
bool WalkModel<T>::in_e(std::span<const Site> y) const {
    return std::any_of(y.begin(), y.end(), [this](Site s) { return is_receptor(s); });
}

template <Field T>
std::int64_t WalkModel<T>::receptor_index(Site x) const {
    auto it = std::lower_bound(receptors.begin(), receptors.end(), reduce(x));
    if (it == receptors.end() || *it != reduce(x)) return -1;
    return it - receptors.begin();
}

template struct WalkModel<double>;
template struct WalkModel<Rational>;

}  // namespace membrane
