#ifndef DICE_ENGINE_HPP
#define DICE_ENGINE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dice/dataset.hpp"
#include "dice/effect.hpp"
#include "dice/graph.hpp"
#include "dice/local_learn.hpp"

namespace dice {

class EngineError : public std::runtime_error {
public:
    enum class Code { MissingRows, EmptyAscet, UnknownCandidate, BadConfig };
    EngineError(Code code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

struct DiceConfig {
    double alpha = 0.05;      // CI test level
    double tau = 0.1;         // sensitivity threshold
    int max_cond = 3;         // conditioning-set cap for local discovery
    Estimand estimand = Estimand::Ate;
    int max_candidates = 16;  // hard cap, <= 24
    int bin_divisor = 100;    // histogram bin width = max|Y| / bin_divisor
};

struct AscetRow {
    std::uint32_t mask = 0;  // bit i set = candidates[i] in the adjustment set
    double effect = 0.0;
    bool valid = true;       // estimation failures are row-local
    std::string note;        // failure reason when !valid
    int gbc = -1;            // graph mode: 1/0 back-door check; -1 unknown
};

// Adjustment set-causal effect table: one row per subset of the candidate
// columns, in subset-integer order (row index == bitmask before pruning).
struct Ascet {
    std::vector<int> candidates;       // dataset column indices, ascending
    std::vector<std::string> labels;   // column labels, parallel to candidates
    std::vector<AscetRow> rows;
    std::vector<int> pruned;           // columns removed by prune()
    DiceConfig config;
};

// Mean |CE_Z - CE_{Z \ {x}}| over all subsets Z containing candidate column
// x; pairs with a failed row are skipped and the divisor reduced to match.
// Requires the complete 2^k table.
double sensitivity(const Ascet& a, int x);

// Drops every candidate with sensitivity below tau, removes all rows whose
// subset contains a dropped candidate, and re-indexes the masks over the
// surviving candidates.  Single pass: sensitivities are not recomputed.
Ascet prune(const Ascet& a, double tau);

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
    double mean = 0.0;
};

struct EstimateReport {
    std::vector<HistogramBin> bins;
    int chosen = -1;
    double estimate = 0.0;
    double median = 0.0;   // upper median of the row effects
    double width = 0.0;
};

// Histogram of row effects with bin width max_y / bin_divisor anchored at
// the smallest effect; the estimate is the mean effect inside the most
// populated bin, ties resolved toward the bin mean closest to the median.
EstimateReport effect_histogram(const Ascet& a, double max_y, int bin_divisor);

double most_probable_estimate(const Ascet& a, double max_y, int bin_divisor);

// max|Y| over the outcome column, the histogram scale.
double max_abs_outcome(const Dataset& data);

enum class DiceStatus { Ok, NoAdjustmentFound };

struct DiceResult {
    DiceStatus status = DiceStatus::Ok;
    std::string message;               // human-readable status detail
    Ascet table;                       // final (pruned) table
    Ascet full;                        // complete pre-pruning table
    std::vector<double> sensitivities; // parallel to full.candidates
    int failed_rows = 0;               // invalid rows in the full table
    CandidateResult discovery;         // local-learning audit trail
    double discovery_seconds = 0.0;
    double estimation_seconds = 0.0;
};

// The full pipeline: local candidate discovery around treatment/outcome,
// effect estimation for every candidate subset, sensitivity analysis, and
// pruning.  Supplying a truth graph switches discovery to the perfect
// m-separation oracle, gates on amenability, and annotates each row with
// the back-door criterion verdict for its subset.
DiceResult run_dice(const Dataset& data, const DiceConfig& config,
                    const MixedGraph* truth = nullptr);

// Table-shaped CSV: one 0/1 column per candidate plus a CE column; failed
// rows carry nan.
std::string ascet_to_csv(const Ascet& a);

}  // namespace dice

#endif
