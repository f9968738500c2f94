#include "dice/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "dice/ci_test.hpp"
#include "dice/criteria.hpp"

namespace dice {
namespace {

void validate_config(const DiceConfig& c) {
    if (!(c.alpha > 0.0 && c.alpha < 1.0))
        throw EngineError(EngineError::Code::BadConfig, "config: alpha must lie in (0, 1)");
    if (c.tau < 0.0)
        throw EngineError(EngineError::Code::BadConfig, "config: tau must be non-negative");
    if (c.max_cond < 0)
        throw EngineError(EngineError::Code::BadConfig, "config: max_cond must be non-negative");
    if (c.max_candidates < 1 || c.max_candidates > 24)
        throw EngineError(EngineError::Code::BadConfig,
                          "config: max_candidates must lie in [1, 24]");
    if (c.bin_divisor < 1)
        throw EngineError(EngineError::Code::BadConfig, "config: bin_divisor must be >= 1");
}

// Bit position of column x in the candidate list.
int candidate_bit(const Ascet& a, int x) {
    auto it = std::find(a.candidates.begin(), a.candidates.end(), x);
    if (it == a.candidates.end())
        throw EngineError(EngineError::Code::UnknownCandidate,
                          "ascet: column " + std::to_string(x) + " is not a candidate");
    return static_cast<int>(it - a.candidates.begin());
}

void require_complete(const Ascet& a) {
    const std::size_t k = a.candidates.size();
    if (k >= 31 || a.rows.size() != (std::size_t{1} << k))
        throw EngineError(EngineError::Code::MissingRows,
                          "ascet: expected one row per candidate subset, have " +
                              std::to_string(a.rows.size()));
    for (std::size_t m = 0; m < a.rows.size(); ++m)
        if (a.rows[m].mask != m)
            throw EngineError(EngineError::Code::MissingRows,
                              "ascet: rows are not in subset order");
}

double elapsed_seconds(std::chrono::steady_clock::time_point from) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - from).count();
}

}  // namespace

double sensitivity(const Ascet& a, int x) {
    require_complete(a);
    const std::uint32_t bit = std::uint32_t{1} << candidate_bit(a, x);
    double sum = 0.0;
    long pairs = 0;
    for (std::uint32_t m = 0; m < a.rows.size(); ++m) {
        if (!(m & bit)) continue;
        const AscetRow& with = a.rows[m];
        const AscetRow& without = a.rows[m ^ bit];
        if (!with.valid || !without.valid) continue;
        sum += std::abs(with.effect - without.effect);
        ++pairs;
    }
    // No measurable pair: treat the variable as maximally sensitive so it is
    // never pruned on missing evidence.
    if (pairs == 0) return std::numeric_limits<double>::infinity();
    return sum / static_cast<double>(pairs);
}

Ascet prune(const Ascet& a, double tau) {
    require_complete(a);
    if (tau < 0.0)
        throw EngineError(EngineError::Code::BadConfig, "prune: tau must be non-negative");

    const int k = static_cast<int>(a.candidates.size());
    std::uint32_t drop = 0;
    for (int i = 0; i < k; ++i)
        if (sensitivity(a, a.candidates[i]) < tau) drop |= std::uint32_t{1} << i;

    Ascet out;
    out.config = a.config;
    out.pruned = a.pruned;
    for (int i = 0; i < k; ++i) {
        if (drop & (std::uint32_t{1} << i)) {
            out.pruned.push_back(a.candidates[i]);
        } else {
            out.candidates.push_back(a.candidates[i]);
            out.labels.push_back(a.labels[i]);
        }
    }
    std::sort(out.pruned.begin(), out.pruned.end());

    for (const AscetRow& row : a.rows) {
        if (row.mask & drop) continue;
        AscetRow kept = row;
        std::uint32_t remapped = 0;
        int new_bit = 0;
        for (int i = 0; i < k; ++i) {
            if (drop & (std::uint32_t{1} << i)) continue;
            if (row.mask & (std::uint32_t{1} << i)) remapped |= std::uint32_t{1} << new_bit;
            ++new_bit;
        }
        kept.mask = remapped;
        out.rows.push_back(kept);
    }
    return out;
}

EstimateReport effect_histogram(const Ascet& a, double max_y, int bin_divisor) {
    if (!(max_y > 0.0))
        throw EngineError(EngineError::Code::BadConfig,
                          "histogram: max_y must be positive");
    if (bin_divisor < 1)
        throw EngineError(EngineError::Code::BadConfig,
                          "histogram: bin_divisor must be >= 1");
    std::vector<double> effects;
    for (const AscetRow& r : a.rows)
        if (r.valid) effects.push_back(r.effect);
    if (effects.empty())
        throw EngineError(EngineError::Code::EmptyAscet,
                          "histogram: no estimable rows in the table");

    EstimateReport rep;
    rep.width = max_y / static_cast<double>(bin_divisor);
    std::vector<double> sorted = effects;
    std::sort(sorted.begin(), sorted.end());
    rep.median = sorted[sorted.size() / 2];

    const double anchor = sorted.front();
    const int n_bins =
        static_cast<int>(std::floor((sorted.back() - anchor) / rep.width)) + 1;
    rep.bins.assign(n_bins, HistogramBin{});
    for (int b = 0; b < n_bins; ++b) {
        rep.bins[b].lo = anchor + b * rep.width;
        rep.bins[b].hi = anchor + (b + 1) * rep.width;
    }
    for (double e : effects) {
        int b = std::min(static_cast<int>(std::floor((e - anchor) / rep.width)),
                         n_bins - 1);
        ++rep.bins[b].count;
        rep.bins[b].mean += e;
    }
    for (HistogramBin& bin : rep.bins)
        if (bin.count > 0) bin.mean /= bin.count;

    for (int b = 0; b < n_bins; ++b) {
        const HistogramBin& bin = rep.bins[b];
        if (bin.count == 0) continue;
        if (rep.chosen < 0) {
            rep.chosen = b;
            continue;
        }
        const HistogramBin& best = rep.bins[rep.chosen];
        if (bin.count > best.count ||
            (bin.count == best.count &&
             std::abs(bin.mean - rep.median) < std::abs(best.mean - rep.median)))
            rep.chosen = b;
    }
    rep.estimate = rep.bins[rep.chosen].mean;
    return rep;
}

double most_probable_estimate(const Ascet& a, double max_y, int bin_divisor) {
    return effect_histogram(a, max_y, bin_divisor).estimate;
}

double max_abs_outcome(const Dataset& data) {
    return data.column(data.outcome()).cwiseAbs().maxCoeff();
}

DiceResult run_dice(const Dataset& data, const DiceConfig& config,
                    const MixedGraph* truth) {
    validate_config(config);
    const int w = data.treatment();
    const int y = data.outcome();

    DiceResult out;
    out.table.config = config;
    out.full.config = config;

    NodeId wn = -1, yn = -1;
    std::unique_ptr<CiTest> test;
    if (truth != nullptr) {
        wn = truth->node_index(data.label(w));
        yn = truth->node_index(data.label(y));
        if (!is_amenable(*truth, wn, yn)) {
            out.status = DiceStatus::NoAdjustmentFound;
            out.message =
                "Adjustment set could not be found: the graph is not amenable "
                "to adjustment for this treatment/outcome pair";
            return out;
        }
        test = std::make_unique<OracleCiTest>(*truth, data.labels());
    } else {
        test = std::make_unique<FisherZTest>(data);
    }

    auto t0 = std::chrono::steady_clock::now();
    out.discovery = find_candidates_audited(data, w, y, *test, config.alpha,
                                            config.max_cond);
    out.discovery_seconds = elapsed_seconds(t0);

    if (out.discovery.treatment_adjacency_empty || out.discovery.candidates.empty()) {
        out.status = DiceStatus::NoAdjustmentFound;
        out.message = "Adjustment set could not be found: the treatment has no "
                      "adjacent pretreatment variables";
        return out;
    }

    const std::vector<int>& cand = out.discovery.candidates;
    const int k = static_cast<int>(cand.size());
    if (k > config.max_candidates)
        throw GraphError(GraphError::Code::CandidateCapExceeded,
                         "run_dice: " + std::to_string(k) +
                             " candidates exceed max_candidates = " +
                             std::to_string(config.max_candidates));

    out.full.candidates = cand;
    for (int c : cand) out.full.labels.push_back(data.label(c));

    auto t1 = std::chrono::steady_clock::now();
    const std::uint32_t n_rows = std::uint32_t{1} << k;
    out.full.rows.resize(n_rows);
    for (std::uint32_t mask = 0; mask < n_rows; ++mask) {
        AscetRow& row = out.full.rows[mask];
        row.mask = mask;
        std::vector<int> z;
        for (int i = 0; i < k; ++i)
            if (mask & (std::uint32_t{1} << i)) z.push_back(cand[i]);
        try {
            row.effect = psm_effect(data, w, y, z, config.estimand).value;
        } catch (const std::runtime_error& e) {
            row.valid = false;
            row.note = e.what();
            ++out.failed_rows;
        }
        if (truth != nullptr) {
            std::vector<NodeId> zn;
            for (int c : z) zn.push_back(truth->node_index(data.label(c)));
            row.gbc = satisfies_gbc(*truth, wn, yn, zn) ? 1 : 0;
        }
    }
    out.estimation_seconds = elapsed_seconds(t1);

    out.sensitivities.reserve(k);
    for (int c : cand) out.sensitivities.push_back(sensitivity(out.full, c));
    out.table = prune(out.full, config.tau);
    out.status = DiceStatus::Ok;
    return out;
}

std::string ascet_to_csv(const Ascet& a) {
    std::ostringstream out;
    for (const std::string& lbl : a.labels) out << lbl << ',';
    out << "CE\n";
    for (const AscetRow& row : a.rows) {
        for (std::size_t i = 0; i < a.candidates.size(); ++i)
            out << ((row.mask >> i) & 1u) << ',';
        out << (row.valid ? format_double(row.effect) : "nan") << '\n';
    }
    return out.str();
}

}  // namespace dice
