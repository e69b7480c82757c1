#include "eduml/synth.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "eduml/error.h"
#include "eduml/rng.h"

namespace eduml {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_space(char c) { return c == ' ' || c == '\t'; }

std::optional<double> number_of(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string> level_set(const ColumnSpec& spec) {
  if (!spec.synth.levels.empty()) return spec.synth.levels;
  return spec.levels;
}

size_t draw_weighted(Rng& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rng.uniform01() * total;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return weights.size() - 1;
}

// Numeric value a signal term sees for a generated categorical cell.
double ordinal_value(const ColumnSpec& spec, const std::string& level) {
  if (!spec.levels.empty()) {
    for (size_t i = 0; i < spec.levels.size(); ++i) {
      if (spec.levels[i] == level) return static_cast<double>(i + 1);
    }
  }
  if (auto v = number_of(level)) return *v;
  const auto levels = level_set(spec);
  for (size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] == level) return static_cast<double>(i + 1);
  }
  return kNaN;
}

}  // namespace

PlantedSignal parse_signal(std::string_view text) {
  if (const size_t eq = text.find('='); eq != std::string_view::npos) {
    text.remove_prefix(eq + 1);
  }
  PlantedSignal signal;
  size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && is_space(text[i])) ++i;
  };
  auto fail = [&](const std::string& what) -> void {
    throw Error(ErrorCode::kInvalidConfig,
                "signal '" + std::string(text) + "': " + what);
  };
  bool first = true;
  skip();
  while (i < text.size()) {
    double sign = 1.0;
    if (text[i] == '+' || text[i] == '-') {
      sign = text[i] == '-' ? -1.0 : 1.0;
      ++i;
      skip();
    } else if (!first) {
      fail("expected + or - at position " + std::to_string(i));
    }
    first = false;
    // Optional coefficient.
    size_t start = i;
    while (i < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.' ||
            (i > start && (text[i] == 'e' || text[i] == 'E')))) {
      // Exponent sign.
      if ((text[i] == 'e' || text[i] == 'E') && i + 1 < text.size() &&
          (text[i + 1] == '-' || text[i + 1] == '+')) {
        ++i;
      }
      ++i;
    }
    std::optional<double> coef;
    if (i > start) {
      coef = number_of(text.substr(start, i - start));
      if (!coef) fail("bad number '" + std::string(text.substr(start, i - start)) + "'");
    }
    skip();
    bool has_column = false;
    if (i < text.size() && text[i] == '*') {
      if (!coef) fail("'*' without a coefficient");
      ++i;
      skip();
      has_column = true;
    } else if (i < text.size() && text[i] != '+' && text[i] != '-') {
      has_column = true;  // bare column name, coefficient 1
    }
    if (!has_column) {
      if (!coef) fail("empty term");
      signal.intercept += sign * *coef;
      continue;
    }
    start = i;
    while (i < text.size() && !is_space(text[i]) && text[i] != '[' && text[i] != '+' &&
           text[i] != '-') {
      ++i;
    }
    SignalTerm term;
    term.column = std::string(text.substr(start, i - start));
    if (term.column.empty()) fail("missing column name");
    if (i < text.size() && text[i] == '[') {
      const size_t close = text.find(']', i);
      if (close == std::string_view::npos) fail("unclosed '['");
      term.level = std::string(text.substr(i + 1, close - i - 1));
      i = close + 1;
    }
    term.coefficient = sign * coef.value_or(1.0);
    signal.terms.push_back(std::move(term));
    skip();
  }
  return signal;
}

std::string format_signal(const PlantedSignal& signal) {
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  for (const SignalTerm& t : signal.terms) {
    if (!first) out << (t.coefficient < 0 ? " - " : " + ");
    else if (t.coefficient < 0) out << "-";
    out << std::abs(t.coefficient) << "*" << t.column;
    if (!t.level.empty()) out << "[" << t.level << "]";
    first = false;
  }
  if (signal.intercept != 0.0 || first) {
    if (!first) out << (signal.intercept < 0 ? " - " : " + ");
    else if (signal.intercept < 0) out << "-";
    out << std::abs(signal.intercept);
  }
  return out.str();
}

Table synth_generate(const SchemaSpec& schema, size_t n, const PlantedSignal& signal,
                     uint64_t seed) {
  for (const SignalTerm& t : signal.terms) {
    const ColumnSpec& spec = schema.at(t.column);
    if (spec.role == ColumnRole::kIgnore || spec.role == ColumnRole::kScore) {
      throw Error(ErrorCode::kInvalidConfig,
                  "signal term uses non-generated column '" + t.column + "'");
    }
  }

  // Generated cells, kept as text for categoricals to evaluate the signal.
  struct Generated {
    const ColumnSpec* spec;
    std::vector<double> numbers;
    std::vector<std::optional<std::string>> strings;
  };
  std::vector<Generated> generated;
  const ColumnSpec* score_spec = nullptr;

  for (const ColumnSpec& spec : schema.columns()) {
    if (spec.role == ColumnRole::kIgnore) continue;
    if (spec.role == ColumnRole::kScore) {
      score_spec = &spec;
      generated.push_back({&spec, {}, {}});
      continue;
    }
    Rng rng(derive_seed(seed, "synth-column:" + spec.name));
    Generated g{&spec, {}, {}};
    const bool is_key = spec.role == ColumnRole::kKey;
    const double missing = is_key ? 0.0 : spec.synth.missing_fraction;
    switch (spec.kind) {
      case ColumnKind::kNumeric:
      case ColumnKind::kInteger: {
        g.numbers.resize(n);
        for (size_t r = 0; r < n; ++r) {
          double v;
          if (is_key) {
            v = static_cast<double>(r + 1);
          } else if (spec.synth.sd) {
            v = spec.synth.mean.value_or(0.0) + *spec.synth.sd * rng.normal();
          } else {
            v = rng.uniform(spec.synth.min, spec.synth.max);
          }
          if (spec.kind == ColumnKind::kInteger) v = std::round(v);
          if (missing > 0.0 && rng.bernoulli(missing)) v = kNaN;
          g.numbers[r] = v;
        }
        break;
      }
      case ColumnKind::kCategorical: {
        const auto levels = level_set(spec);
        if (levels.empty()) {
          throw Error(ErrorCode::kInvalidConfig,
                      "categorical column '" + spec.name + "' needs synth.levels");
        }
        std::vector<double> weights = spec.synth.weights;
        if (weights.empty()) weights.assign(levels.size(), 1.0);
        if (weights.size() != levels.size()) {
          throw Error(ErrorCode::kInvalidConfig,
                      "synth.weights and levels differ in length for '" + spec.name + "'");
        }
        g.strings.resize(n);
        for (size_t r = 0; r < n; ++r) {
          const size_t pick = is_key ? r % levels.size() : draw_weighted(rng, weights);
          g.strings[r] = levels[pick];
          if (missing > 0.0 && rng.bernoulli(missing)) g.strings[r].reset();
        }
        break;
      }
      case ColumnKind::kText: {
        g.strings.resize(n);
        for (size_t r = 0; r < n; ++r) {
          g.strings[r] = spec.name + "_" + std::to_string(r + 1);
          if (missing > 0.0 && rng.bernoulli(missing)) g.strings[r].reset();
        }
        break;
      }
    }
    generated.push_back(std::move(g));
  }

  if (score_spec != nullptr) {
    std::vector<double> logit(n, signal.intercept);
    for (const SignalTerm& t : signal.terms) {
      const Generated* g = nullptr;
      for (const Generated& cand : generated) {
        if (cand.spec->name == t.column) g = &cand;
      }
      for (size_t r = 0; r < n; ++r) {
        double x = 0.0;
        if (!g->numbers.empty()) {
          x = std::isnan(g->numbers[r]) ? 0.0 : g->numbers[r];
        } else if (g->strings[r]) {
          if (!t.level.empty()) {
            x = *g->strings[r] == t.level ? 1.0 : 0.0;
          } else {
            x = ordinal_value(*g->spec, *g->strings[r]);
            if (std::isnan(x)) {
              throw Error(ErrorCode::kInvalidConfig,
                          "signal term '" + t.column + "' needs a level or ordinal values");
            }
          }
        }
        logit[r] += t.coefficient * x;
      }
    }
    Rng rng(derive_seed(seed, "synth-outcome"));
    for (Generated& g : generated) {
      if (g.spec != score_spec) continue;
      g.numbers.resize(n);
      for (size_t r = 0; r < n; ++r) {
        const double p_pass = 1.0 / (1.0 + std::exp(-logit[r]));
        const bool pass = rng.bernoulli(p_pass);
        const double u = rng.uniform01();
        // One decimal; failing scores stay strictly below 50.
        g.numbers[r] = pass ? std::round((50.0 + 50.0 * u) * 10.0) / 10.0
                            : std::floor(500.0 * u) / 10.0;
        if (score_spec->kind == ColumnKind::kInteger) {
          g.numbers[r] = pass ? std::ceil(g.numbers[r]) : std::floor(g.numbers[r]);
        }
      }
    }
  }

  std::vector<Column> cols;
  for (Generated& g : generated) {
    const ColumnSpec& spec = *g.spec;
    switch (spec.kind) {
      case ColumnKind::kNumeric:
        cols.push_back(Column::numeric(spec.name, std::move(g.numbers)));
        break;
      case ColumnKind::kInteger:
        cols.push_back(Column::integer(spec.name, std::move(g.numbers)));
        break;
      case ColumnKind::kCategorical:
        cols.push_back(Column::categorical(spec.name, g.strings));
        break;
      case ColumnKind::kText:
        cols.push_back(Column::text(spec.name, g.strings));
        break;
    }
  }
  return cols.empty() ? Table() : Table(std::move(cols));
}

}  // namespace eduml
