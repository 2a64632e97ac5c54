#pragma once

#include <string>
#include <vector>

#include "lcarand/measures.hpp"

namespace lcarand {

// One section per file:
//   [markov]    p, s, Q (rows split by ';'), optional pi
//   [bernoulli] p, s, weights
//   [quasi]     p, s, hidden_states, hidden_Q, left, right, psi
//   [irdi]      alpha, nmax
// Numbers may be decimals or fractions like 2/3; '#' starts a comment.
MeasureModel parse_model(const std::string& text);
MeasureModel load_model(const std::string& path);
std::string serialize_model(const MeasureModel& m);

std::vector<std::string> preset_names();
MeasureModel preset(const std::string& name, u64 p = 2);

}  // namespace lcarand
