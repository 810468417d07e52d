#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "halftsp/instance.hpp"
#include "halftsp/ojoin.hpp"
#include "halftsp/rational.hpp"

namespace halftsp {

/// One evaluated inequality (or equality) of the battery.
struct LemmaCheck {
  std::string lemma;
  std::string instance;
  std::string subject;  // cut side, edge id, configuration, ...
  Rational value;
  Rational bound;
  std::string relation;  // ">=", "<=", "=="
  Rational tolerance;    // nonzero only when some fitted lambda is not exactly rational
  bool pass = true;
};

struct LemmaSummary {
  std::string lemma;
  long checks = 0;
  long failures = 0;
  Rational worst;  // value closest to (or furthest past) the bound
  Rational bound;
  std::string relation;
};

struct VerifyOptions {
  ChargingParams params;
  std::vector<HalfIntegralInstance> instances;  // empty: the built-in battery
  std::vector<int> degree_sizes{5, 6, 7, 8};    // degree-cut instances (k5_degree family)
  bool fixed_values = true;                     // gadget, census, Hoeffding, decomposition
  long random_configs = 10000;                  // per Hoeffding functional
  std::uint64_t seed = 1;
  long cap = 10000000;
};

struct VerifyReport {
  std::vector<LemmaCheck> checks;
  std::vector<LemmaSummary> summary;  // in first-seen order
  std::vector<std::string> notes;
  bool passed() const;
};

/// Split K5, cycle chains (k <= 4), envelopes (k <= 5), the two gadget instances and a nested degree instance.
std::vector<HalfIntegralInstance> default_battery();

VerifyReport verify_lemmas(const VerifyOptions& opts);

std::string verify_json(const VerifyReport& report, const VerifyOptions& opts);
std::string verify_table(const VerifyReport& report);

}  // namespace halftsp
