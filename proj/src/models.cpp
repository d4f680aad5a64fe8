#include "abcgof/models.hpp"

#include "abcgof/coalescent.hpp"
#include "abcgof/error.hpp"
#include "abcgof/toy.hpp"

namespace abcgof {

const std::vector<std::string>& builtin_models() {
  static const std::vector<std::string> ids{
      "toy-gaussian", "toy-laplace", "constant", "bottleneck", "expansion"};
  return ids;
}

bool is_toy_model(const std::string& id) {
  return id == "toy-gaussian" || id == "toy-laplace";
}

std::unique_ptr<Simulator> make_simulator(const std::string& id,
                                          const ModelOptions& options) {
  if (is_toy_model(id)) {
    ToyModelSpec spec;
    spec.family = id == "toy-gaussian" ? ToyFamily::gaussian : ToyFamily::laplace;
    spec.sample_size = options.sample_size;
    return std::make_unique<ToySimulator>(spec);
  }
  if (id == "constant" || id == "bottleneck" || id == "expansion") {
    return std::make_unique<CoalescentSimulator>(
        parse_demography_label(id), parse_stat_set(options.stat_set));
  }
  std::string known;
  for (const auto& m : builtin_models()) known += (known.empty() ? "" : ", ") + m;
  throw usage_error("unknown model '" + id + "' (expected one of " + known + ")");
}

}  // namespace abcgof
