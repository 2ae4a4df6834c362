// Lowest Wigner value vs lowest marginal value for each catalog state.
// Negative quasi-probability shows up in W only; every marginal stays a density.

#include <cstdio>
#include <numbers>

#include "symtomo/marginal_field.hpp"
#include "symtomo/state_catalog.hpp"

using namespace symtomo;

int main() {
  const StateSpec states[] = {StateSpec::ground(), StateSpec::excited_first(), StateSpec::coherent(1.0, -0.5),
                              StateSpec::odd_cat(std::numbers::sqrt2, 0.0)};
  std::printf("%-10s %12s %12s %12s\n", "state", "min W", "min w", "W norm");
  for (const auto& s : states) {
    const auto w = sample_wigner_field(s, default_phase_grid(), default_phase_grid());
    const auto field = make_marginal_field(marginal_source(s));
    double lowest = 0.0;
    for (double v : field.data()) lowest = std::min(lowest, v);
    std::printf("%-10s %12.5f %12.2e %12.8f\n", std::string(to_string(s.kind)).c_str(), w.values.minCoeff(), lowest,
                w.normalization());
  }
}
