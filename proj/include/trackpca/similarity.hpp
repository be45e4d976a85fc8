#pragma once

// Statistical Diversity Index: squared score distance between two entities.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "trackpca/errors.hpp"
#include "trackpca/matrix.hpp"
#include "trackpca/pca.hpp"

namespace trackpca {

/// Sorted, duplicate-free set of 0-based component indices.
class ComponentSet {
public:
    ComponentSet() = default;
    ComponentSet(std::initializer_list<std::size_t> ids) : ComponentSet(std::vector<std::size_t>(ids)) {}
    explicit ComponentSet(std::vector<std::size_t> ids) : ids_(std::move(ids)) {
        std::sort(ids_.begin(), ids_.end());
        ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    }

    /// The first `count` components.
    static ComponentSet leading(std::size_t count) {
        std::vector<std::size_t> ids(count);
        std::iota(ids.begin(), ids.end(), std::size_t{0});
        return ComponentSet(std::move(ids));
    }

    bool empty() const noexcept { return ids_.empty(); }
    std::size_t size() const noexcept { return ids_.size(); }
    std::size_t max() const { return ids_.back(); }
    auto begin() const noexcept { return ids_.begin(); }
    auto end() const noexcept { return ids_.end(); }
    const std::vector<std::size_t>& indices() const noexcept { return ids_; }

    friend bool operator==(const ComponentSet&, const ComponentSet&) = default;

private:
    std::vector<std::size_t> ids_;
};

/// Optional per-component weights (missing entries weigh 1). The plain index
/// uses no weights.
using SdiWeights = std::map<std::size_t, double>;

inline void check_components(const ComponentSet& components, std::size_t available) {
    if (components.empty()) throw ParameterError("component set is empty");
    if (components.max() >= available)
        throw ParameterError("component " + std::to_string(components.max() + 1) + " out of range (" +
                             std::to_string(available) + " available)");
}

/// Sum over the chosen components of (a_k - b_k)^2.
inline double sdi(std::span<const double> a, std::span<const double> b, const ComponentSet& components,
                  const SdiWeights& weights = {}) {
    check_components(components, std::min(a.size(), b.size()));
    double s = 0.0;
    for (std::size_t k : components) {
        const double d = a[k] - b[k];
        auto it = weights.find(k);
        s += (it == weights.end() ? 1.0 : it->second) * d * d;
    }
    return s;
}

struct SdiEntry {
    std::string entity_id;
    std::string entity_name;
    double sdi = 0.0;

    friend bool operator==(const SdiEntry&, const SdiEntry&) = default;
};

struct SdiRanking {
    std::string query_id;
    ComponentSet components_used;
    std::vector<SdiEntry> entries;  // ascending sdi, ties by entity id
};

/// The `top` entities closest to `query_id`, excluding the query itself.
inline SdiRanking rank_similar(const ScoreSet& scores, const std::string& query_id, std::size_t top,
                               const ComponentSet& components, const SdiWeights& weights = {}) {
    const std::size_t q = scores.index_of(query_id);
    check_components(components, scores.scores.cols());

    SdiRanking out{query_id, components, {}};
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (i == q) continue;
        const std::string& name = i < scores.entity_names.size() ? scores.entity_names[i] : scores.entity_ids[i];
        out.entries.push_back({scores.entity_ids[i], name, sdi(scores.scores.row(q), scores.scores.row(i), components, weights)});
    }
    auto less = [](const SdiEntry& a, const SdiEntry& b) {
        return a.sdi != b.sdi ? a.sdi < b.sdi : a.entity_id < b.entity_id;
    };
    const std::size_t keep = std::min(top, out.entries.size());
    std::partial_sort(out.entries.begin(), out.entries.begin() + static_cast<std::ptrdiff_t>(keep), out.entries.end(), less);
    out.entries.resize(keep);
    return out;
}

/// Symmetric matrix of SDI values for every entity pair; zero diagonal.
inline Matrix pairwise_sdi(const ScoreSet& scores, const ComponentSet& components, const SdiWeights& weights = {}) {
    const std::size_t n = scores.size();
    if (n < 2) throw InsufficientDataError("pairwise_sdi needs at least 2 entities");
    check_components(components, scores.scores.cols());
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            m(i, j) = m(j, i) = sdi(scores.scores.row(i), scores.scores.row(j), components, weights);
    return m;
}

}  // namespace trackpca
