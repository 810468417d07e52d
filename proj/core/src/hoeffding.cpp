#include <algorithm>

#include "halftsp/error.hpp"
#include "halftsp/oracle.hpp"

namespace halftsp {

namespace {

std::vector<Rational> sum_law(const std::vector<Rational>& p) {
  std::vector<Rational> law{Rational(1)};
  for (const auto& pi : p) {
    std::vector<Rational> next(law.size() + 1, Rational(0));
    for (size_t k = 0; k < law.size(); ++k) {
      next[k] += law[k] * (1 - pi);
      next[k + 1] += law[k] * pi;
    }
    law = std::move(next);
  }
  return law;
}

Rational at(const std::vector<Rational>& law, size_t k) { return k < law.size() ? law[k] : Rational(0); }

}  // namespace

const char* to_string(Functional f) {
  switch (f) {
    case Functional::ParityEven: return "parity_even";
    case Functional::PDeltaBound: return "p_delta_bound";
    case Functional::PWBound: return "p_W_bound";
  }
  return "unknown";
}

Functional parse_functional(const std::string& name) {
  for (Functional f : {Functional::ParityEven, Functional::PDeltaBound, Functional::PWBound})
    if (name == to_string(f)) return f;
  throw Error(ErrorKind::InvalidArgument, "unknown functional: " + name);
}

bool requires_certain_success(Functional f) { return f != Functional::ParityEven; }

Rational evaluate_functional(Functional f, const std::vector<Rational>& p) {
  const auto law = sum_law(p);
  switch (f) {
    case Functional::ParityEven: {
      Rational even(0);
      for (size_t k = 0; k < law.size(); k += 2) even += law[k];
      return even;
    }
    case Functional::PDeltaBound:
      return Rational(52, 27) - 3 * at(law, 1) - 4 * at(law, 3);
    case Functional::PWBound:
      return Rational(13, 9) - Rational(5, 2) * at(law, 1) - 3 * at(law, 3);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown functional");
}

HoeffdingResult hoeffding_extremal(int m, const Rational& q, Functional f) {
  if (m < 1 || m > 6) throw Error(ErrorKind::InvalidArgument, "Bernoulli count must lie in [1, 6]");
  if (q < 0 || q > m) throw Error(ErrorKind::InvalidArgument, "total success probability out of range");
  const bool certain = requires_certain_success(f);
  HoeffdingResult best;
  int best_ones = -1;
  for (int ones = certain ? 1 : 0; ones <= m; ++ones)
    for (int nonzero = ones; nonzero <= m; ++nonzero) {
      std::vector<Rational> config(ones, Rational(1));
      if (nonzero == ones) {
        if (q != ones) continue;
      } else {
        const Rational x = (q - ones) / (nonzero - ones);
        if (x <= 0 || x >= 1) continue;
        config.resize(nonzero, x);
      }
      config.resize(m, Rational(0));
      const Rational v = evaluate_functional(f, config);
      if (best_ones < 0 || v < best.value || (v == best.value && ones > best_ones)) {
        best.value = v;
        best.config = config;
        best_ones = ones;
      }
    }
  if (best_ones < 0) throw Error(ErrorKind::InvalidArgument, "no admissible configuration");
  return best;
}

std::vector<Rational> random_bernoulli_config(int m, const Rational& q, bool certain_success, Rng& rng) {
  const int free = certain_success ? m - 1 : m;
  const Rational rest = certain_success ? q - 1 : q;
  const Rational scaled = rest * 1000;
  if (scaled.get_den() != 1 || free < 1 || rest < 0 || rest > free)
    throw Error(ErrorKind::InvalidArgument, "total must be a multiple of 1/1000 within range");
  const long total = scaled.get_num().get_si();
  std::uniform_int_distribution<long> pick(0, 1000);
  while (true) {
    std::vector<long> a(free);
    long used = 0;
    for (int i = 0; i + 1 < free; ++i) used += a[i] = pick(rng);
    a[free - 1] = total - used;
    if (a[free - 1] < 0 || a[free - 1] > 1000) continue;
    std::shuffle(a.begin(), a.end(), rng);
    std::vector<Rational> out;
    if (certain_success) out.emplace_back(1);
    for (long v : a) out.emplace_back(v, 1000);
    for (auto& r : out) r.canonicalize();
    return out;
  }
}

}  // namespace halftsp
