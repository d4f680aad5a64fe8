#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "abcgof/simulator.hpp"

namespace abcgof {

// Options shared by the built-in simulators. Each model reads only the
// fields that apply to it.
struct ModelOptions {
  std::string stat_set = "pi-tajima";  // coalescent models
  std::size_t sample_size = 50;        // toy models
};

// toy-gaussian, toy-laplace, constant, bottleneck, expansion.
const std::vector<std::string>& builtin_models();

bool is_toy_model(const std::string& id);

std::unique_ptr<Simulator> make_simulator(const std::string& id,
                                          const ModelOptions& options = {});

}  // namespace abcgof
