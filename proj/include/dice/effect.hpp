#ifndef DICE_EFFECT_HPP
#define DICE_EFFECT_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

#include "dice/dataset.hpp"

namespace dice {

class EffectError : public std::runtime_error {
public:
    enum class Code {
        EmptyArm,
        EmptyStratumArm,
        SeparationDetected,
        RankDeficient,
        BadColumns,
    };
    EffectError(Code code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

enum class Estimand { Ate, Att };

struct EffectEstimate {
    double value = 0.0;
    Estimand estimand = Estimand::Ate;
    std::vector<int> adjustment;  // sorted column indices
    int n_matched = 0;
    // Set when propensity scores were all equal and the estimate fell back
    // to the unadjusted difference of means.
    bool degenerate_scores = false;
};

// mean(Y | W=1) - mean(Y | W=0); both arms must be non-empty.
EffectEstimate difference_of_means(const Dataset& data, int w, int y);

// Plug-in covariate adjustment over the observed strata of discrete columns
// z: sum over strata of (mean treated - mean control) weighted by stratum
// frequency.  Every stratum must contain both arms.
EffectEstimate stratified_adjustment(const Dataset& data, int w, int y,
                                     const std::vector<int>& z);

struct PropensityFit {
    std::vector<double> scores;       // fitted P(W=1 | Z) per row
    Eigen::VectorXd coefficients;     // intercept first, then z columns
    int iterations = 0;
    bool converged = false;
};

// Logistic regression of w on z (plus intercept) via iteratively reweighted
// least squares; converged when the max coefficient change drops below 1e-8,
// capped at 100 iterations.
PropensityFit logistic_propensity_fit(const Dataset& data, int w,
                                      const std::vector<int>& z);

std::vector<double> logistic_propensity(const Dataset& data, int w,
                                        const std::vector<int>& z);

// Propensity-score matching, 1 nearest neighbor with replacement, ties
// broken by lowest row index.  ATT averages Y_treated - Y_matched_control
// over treated rows; ATE symmetrizes by also matching controls to treated.
// Empty z, or degenerate (all-equal) scores, falls back to the difference
// of means.
EffectEstimate psm_effect(const Dataset& data, int w, int y,
                          const std::vector<int>& z, Estimand estimand);

}  // namespace dice

#endif
