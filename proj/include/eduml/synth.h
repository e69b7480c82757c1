#ifndef EDUML_SYNTH_H_
#define EDUML_SYNTH_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "eduml/schema.h"
#include "eduml/table.h"

namespace eduml {

// One additive term of the planted log-odds of passing. With an empty
// `level` the term multiplies the column's numeric value (ordinal rank for
// ordinal categoricals); otherwise it multiplies the indicator of `level`.
struct SignalTerm {
  std::string column;
  std::string level;
  double coefficient = 0.0;
};

struct PlantedSignal {
  double intercept = 0.0;
  std::vector<SignalTerm> terms;
};

// Parses expressions such as "2*Quintile - 6" or
// "logit = 1.5*Urban_Rural[urban] - 0.8*RateToilet[poor] + 0.02*ratio - 1".
PlantedSignal parse_signal(std::string_view text);
std::string format_signal(const PlantedSignal& signal);

// Deterministic synthetic table with the schema's non-ignored columns. The
// score column is a pass rate: rows pass with probability
// sigmoid(intercept + sum of terms) and get a score in [50, 100], failing
// rows get one in [0, 50). Key columns hold 1..n.
Table synth_generate(const SchemaSpec& schema, size_t n, const PlantedSignal& signal,
                     uint64_t seed);

}  // namespace eduml

#endif  // EDUML_SYNTH_H_
