#ifndef NLHOMOG_CONFIG_HPP
#define NLHOMOG_CONFIG_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlhomog/cell.hpp"
#include "nlhomog/coefficients.hpp"
#include "nlhomog/evolution.hpp"
#include "nlhomog/kernels.hpp"

namespace nlhomog {

// One JSON document drives a run. Unknown fields are rejected outright so a
// typo cannot silently fall back to a default.
struct RunConfig {
    std::string study;  // cell | evolve | einstein | oracle
    std::uint64_t seed = 1;
    std::string output_dir = "nlhomog_out";
    int dim = 1;
    int grid_n = 128;
    std::shared_ptr<const KernelSpec> kernel;
    std::shared_ptr<const CoefficientSpec> mu;
    CellTolerances tolerances;

    // evolve study
    std::vector<int> inv_epsilons = {8, 16, 32};
    EvolutionConfig evolution;  // per-epsilon template; inv_epsilon filled per run

    // einstein study
    std::vector<double> fd_steps = {1e-2, 5e-3, 2.5e-3};

    nlohmann::json resolved;  // every default materialized, for the manifest
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config_file(const std::string& path);

}  // namespace nlhomog

#endif
