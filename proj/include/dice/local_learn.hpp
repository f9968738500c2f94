#ifndef DICE_LOCAL_LEARN_HPP
#define DICE_LOCAL_LEARN_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "dice/ci_test.hpp"
#include "dice/dataset.hpp"

namespace dice {

class LearnError : public std::runtime_error {
public:
    enum class Code { TargetMissing, BadParameter };
    LearnError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

/// Audit trail for one removed variable: the first separating set found, in
/// lexicographic search order, together with the passing test's p-value.
struct RemovalRecord {
    int column = -1;
    std::vector<int> sepset;
    double p_value = 1.0;
    int level = 0;
};

struct LocalAdjacencyResult {
    std::vector<int> adjacency;  // sorted column indices
    std::vector<RemovalRecord> removals;
    long tests_run = 0;
};

// PC-Select-style local discovery of the adjacency set of `target`.
// Starting from all other columns, conditioning-set size grows from 0 to
// max_cond; within one size, sweeps test every surviving column against
// lexicographically ordered subsets of the other survivors, removals are
// applied as a batch at sweep end, and sweeps repeat until none is removed.
LocalAdjacencyResult local_adjacency_audited(const Dataset& data, int target,
                                             const CiTest& test, double alpha,
                                             int max_cond = 3);

std::vector<int> local_adjacency(const Dataset& data, int target, const CiTest& test,
                                 double alpha, int max_cond = 3);

struct CandidateResult {
    std::vector<int> candidates;  // sorted column indices
    LocalAdjacencyResult treatment_detail;
    LocalAdjacencyResult outcome_detail;
    // True when adjacency of the treatment (minus the outcome) came back
    // empty, in which case `candidates` is empty regardless of the outcome
    // side and the caller reports that no adjustment set can be found.
    bool treatment_adjacency_empty = false;
};

// Candidate adjustment variables around the treatment/outcome pair:
// (adj(w) \ {y}) union (adj(y) \ {w}), restricted to pretreatment columns.
CandidateResult find_candidates_audited(const Dataset& data, int w, int y,
                                        const CiTest& test, double alpha,
                                        int max_cond = 3);

std::vector<int> find_candidates(const Dataset& data, int w, int y, const CiTest& test,
                                 double alpha, int max_cond = 3);

}  // namespace dice

#endif
