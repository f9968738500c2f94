// Shared fixed test data: a frozen 50-row logistic dataset and the
// three-candidate worked example used for sensitivity analysis, pruning and
// the most-probable-estimate rule.
#ifndef DICE_TESTS_FIXTURES_HPP
#define DICE_TESTS_FIXTURES_HPP

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dice/dataset.hpp"
#include "dice/engine.hpp"

namespace fixtures {

// 50 rows of (w, z1, z2): w ~ Bernoulli(sigmoid(0.3 + 0.8 z1 - 0.5 z2)),
// z1, z2 standard normal.  Frozen literals; 33 treated, 17 control.
inline constexpr std::array<std::array<double, 3>, 50> kLogistic50 = {{
    {1, 0.48815611856195507, -0.50366321098481615},
    {1, 1.071410989338037, 1.7380365908875495},
    {0, 0.60799316341677589, -0.72626588638858047},
    {0, 0.10256640466375502, 1.501932614307703},
    {1, 2.735109145918174, 0.59106311412845081},
    {1, 0.42252751828537516, -1.5119023643164449},
    {1, -0.54072781073918519, -0.79895600908660958},
    {1, 0.033313288255909901, -0.65819657788470187},
    {1, 0.74354426780283789, 0.7022770837798209},
    {1, 0.13425338667702164, 0.43052962516971055},
    {1, 0.49349025437201072, -0.365713382197554},
    {0, 0.16631213021072144, -0.11029981447558583},
    {1, 0.64660968073018976, 0.16812630153395297},
    {0, -2.1451737131302906, 0.62128104315971333},
    {1, 0.27267495953231013, 0.67357331972317658},
    {0, -1.0792667876441964, 0.72352074469350047},
    {0, -0.12210305252511604, -0.37365355570938313},
    {1, 0.96706826869140683, 0.095082494411187629},
    {0, 1.095103147801318, 0.52343438967144118},
    {1, 1.0676290693686981, -0.033925883372966752},
    {1, 0.41075399032931625, -0.43286550495931542},
    {1, 0.67217650968090337, -0.17153324830247685},
    {1, 1.9196778395166028, 0.98594780811160798},
    {0, -0.61103188326934432, -0.54782354082750584},
    {1, -1.0448743336671436, -0.44871404456541469},
    {1, -0.18834750111790052, -1.2924083778716731},
    {1, -0.097994371847896902, -0.13791113732614968},
    {0, -1.3892187074735909, 0.35044084422445804},
    {0, -0.53718365306610982, 0.34618775776362937},
    {1, 1.450275976613705, -0.81542459946788304},
    {1, 1.3562121223267418, -0.82780874374480784},
    {0, 1.107536308867028, 0.41732658833980713},
    {1, 0.089573030746614296, -0.44923102488834626},
    {1, 0.27414480366417304, 0.93955302307562349},
    {0, -0.27496971514903912, 0.64776521290050615},
    {1, 0.064158161104064249, -1.3975814902579018},
    {1, 0.85374386021712645, -0.14664265594406761},
    {1, -1.1581874107495567, -0.21204937705688445},
    {0, 0.042176802214484693, 0.80496997385377589},
    {0, 0.59408681170735511, 0.28742996834880363},
    {0, -0.95128444967054293, 0.43647941292891285},
    {1, 0.48756872489537462, -0.173597721803567},
    {1, -0.61786656551643793, 1.2491357688344038},
    {1, 0.041385818137978217, 0.88357040183730651},
    {0, 0.72689921706363403, -0.3016471379884586},
    {1, 1.0292546127335975, 1.7311790250365577},
    {1, -0.36597464116081679, -1.6880914188960801},
    {0, 0.0013826581881952787, -0.12151610297436392},
    {1, -1.7594658882572354, -0.63116431292872355},
    {1, -0.082326703174438493, -0.54158206101793605},
}};

// Dataset wrapper around the frozen logistic rows.  The outcome column is a
// placeholder (propensity fitting ignores it).
inline dice::Dataset logistic50_dataset() {
    Eigen::MatrixXd m(50, 4);
    for (int r = 0; r < 50; ++r) {
        m(r, 0) = kLogistic50[r][0];
        m(r, 1) = kLogistic50[r][1];
        m(r, 2) = kLogistic50[r][2];
        m(r, 3) = 0.0;
    }
    return dice::Dataset({"w", "z1", "z2", "y"}, std::move(m), "w", "y");
}

// Worked three-candidate example.  Row order is subset-integer order over
// candidates (X1, X2, X3): {}, {X1}, {X2}, {X1,X2}, {X3}, {X1,X3}, {X2,X3},
// {X1,X2,X3}.
inline constexpr std::array<double, 8> kExampleEffects = {0.4, 0.3, 0.4, 0.4,
                                                          0.5, 0.1, 0.5, 0.1};

inline dice::Ascet example_ascet() {
    dice::Ascet a;
    a.candidates = {1, 2, 3};
    a.labels = {"X1", "X2", "X3"};
    for (std::uint32_t mask = 0; mask < 8; ++mask) {
        dice::AscetRow row;
        row.mask = mask;
        row.effect = kExampleEffects[mask];
        a.rows.push_back(row);
    }
    return a;
}

// Column-major convenience constructor for small hand datasets.
inline dice::Dataset make_dataset(const std::vector<std::string>& labels,
                                  const std::vector<std::vector<double>>& columns,
                                  const std::string& treatment,
                                  const std::string& outcome) {
    const int n = static_cast<int>(columns.front().size());
    const int p = static_cast<int>(columns.size());
    Eigen::MatrixXd m(n, p);
    for (int c = 0; c < p; ++c)
        for (int r = 0; r < n; ++r) m(r, c) = columns[c][r];
    return dice::Dataset(labels, std::move(m), treatment, outcome);
}

}  // namespace fixtures

#endif
