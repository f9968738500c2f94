#include "dice/local_learn.hpp"

#include <algorithm>

namespace dice {
namespace {

// Enumerate the k-subsets of `pool` (sorted) in lexicographic order; fn
// returning true stops the enumeration early.
template <typename Fn>
void for_each_subset(const std::vector<int>& pool, int k, Fn fn) {
    const int n = static_cast<int>(pool.size());
    if (k > n) return;
    std::vector<int> pos(k);
    for (int i = 0; i < k; ++i) pos[i] = i;
    std::vector<int> subset(k);
    while (true) {
        for (int i = 0; i < k; ++i) subset[i] = pool[pos[i]];
        if (fn(subset)) return;
        int i = k - 1;
        while (i >= 0 && pos[i] == n - k + i) --i;
        if (i < 0) return;
        ++pos[i];
        for (int j = i + 1; j < k; ++j) pos[j] = pos[j - 1] + 1;
    }
}

}  // namespace

LocalAdjacencyResult local_adjacency_audited(const Dataset& data, int target,
                                             const CiTest& test, double alpha,
                                             int max_cond) {
    if (target < 0 || target >= data.cols())
        throw LearnError(LearnError::Code::TargetMissing,
                         "local_adjacency: target column " + std::to_string(target) +
                             " not in dataset");
    if (max_cond < 0)
        throw LearnError(LearnError::Code::BadParameter,
                         "local_adjacency: max_cond must be non-negative");
    if (test.columns() != data.cols())
        throw LearnError(LearnError::Code::BadParameter,
                         "local_adjacency: test covers " + std::to_string(test.columns()) +
                             " columns, dataset has " + std::to_string(data.cols()));

    LocalAdjacencyResult out;
    std::vector<int> cand;
    cand.reserve(data.cols() - 1);
    for (int c = 0; c < data.cols(); ++c)
        if (c != target) cand.push_back(c);

    for (int level = 0; level <= max_cond; ++level) {
        bool removed_any = true;
        while (removed_any && !cand.empty()) {
            std::vector<char> drop(cand.size(), 0);
            std::vector<int> pool(cand.size() - 1);
            for (std::size_t xi = 0; xi < cand.size(); ++xi) {
                const int x = cand[xi];
                pool.clear();
                for (int c : cand)
                    if (c != x) pool.push_back(c);
                for_each_subset(pool, level, [&](const std::vector<int>& s) {
                    ++out.tests_run;
                    CiResult r = test.test(x, target, s, alpha);
                    if (r.independent) {
                        drop[xi] = 1;
                        out.removals.push_back({x, s, r.p_value, level});
                        return true;
                    }
                    return false;
                });
            }
            std::vector<int> next;
            next.reserve(cand.size());
            for (std::size_t xi = 0; xi < cand.size(); ++xi)
                if (!drop[xi]) next.push_back(cand[xi]);
            removed_any = next.size() != cand.size();
            cand = std::move(next);
        }
    }
    out.adjacency = std::move(cand);
    return out;
}

std::vector<int> local_adjacency(const Dataset& data, int target, const CiTest& test,
                                 double alpha, int max_cond) {
    return local_adjacency_audited(data, target, test, alpha, max_cond).adjacency;
}

CandidateResult find_candidates_audited(const Dataset& data, int w, int y,
                                        const CiTest& test, double alpha, int max_cond) {
    if (w < 0 || w >= data.cols() || y < 0 || y >= data.cols() || w == y)
        throw LearnError(LearnError::Code::TargetMissing,
                         "find_candidates: treatment/outcome columns invalid");
    if (data.kind(w) != ColumnKind::Binary)
        throw DataError(DataError::Code::NonBinaryTreatment,
                        "find_candidates: treatment column '" + data.label(w) +
                            "' is not binary");

    CandidateResult out;
    out.treatment_detail = local_adjacency_audited(data, w, test, alpha, max_cond);
    out.outcome_detail = local_adjacency_audited(data, y, test, alpha, max_cond);

    std::vector<int> adj_w;
    for (int c : out.treatment_detail.adjacency)
        if (c != y) adj_w.push_back(c);
    if (adj_w.empty()) {
        // No adjacency around the treatment: the caller must report that no
        // adjustment set can be found rather than fall back to the outcome side.
        out.treatment_adjacency_empty = true;
        return out;
    }

    std::vector<int> merged = adj_w;
    for (int c : out.outcome_detail.adjacency)
        if (c != w) merged.push_back(c);
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    for (int c : merged)
        if (c != w && c != y && data.role(c) == Role::Pretreatment)
            out.candidates.push_back(c);
    return out;
}

std::vector<int> find_candidates(const Dataset& data, int w, int y, const CiTest& test,
                                 double alpha, int max_cond) {
    return find_candidates_audited(data, w, y, test, alpha, max_cond).candidates;
}

}  // namespace dice
