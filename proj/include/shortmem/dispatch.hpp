#pragma once

#include "shortmem/config.hpp"

#include <string>
#include <vector>

namespace shortmem {

// simulate, couple, counterexample, variance, weighted, coboundary, diagnose
const std::vector<std::string>& command_names();

// Runs `command` and writes its data files plus meta.json into config.out_dir.
// Data files depend only on the config, never on `workers` or the clock.
// Returns the data file names in the order written.
std::vector<std::string> dispatch(const std::string& command, const SimConfig& config, int workers = 1);

}  // namespace shortmem
