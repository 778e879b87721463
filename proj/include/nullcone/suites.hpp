#pragma once

#include "nullcone/decay.hpp"
#include "nullcone/energy.hpp"
#include "nullcone/evolve.hpp"
#include "nullcone/frame.hpp"
#include "nullcone/report.hpp"

namespace nullcone {

// Verification suites behind the CLI subcommands. Every check carries a rule
// id; a report passes iff all its checks pass.

Report background_suite(double M, double a, double r_min, double r_max,
                        int n_samples);
Report hodge_verify_suite(int L, int trials, std::uint64_t seed);
Report hodge_poincare_suite(int L, double eps, int trials, std::uint64_t seed);
Report decay_suite(const std::string& db_path, double s_lo, double s_hi);
Report frames_suite(std::uint64_t seed, double f_amp, double lambda);
Report energy_run_suite(const std::string& pair_name, double p, const GridSpec& gs);
Report energy_divergence_suite(const GridSpec& base, const std::vector<int>& levels);
Report energy_cases_suite();
Report energy_peeling_suite();
Report transport_suite();
Report bianchi_suite(const GridSpec& spec, double s, const std::string& profile,
                     int l, int m, double amplitude);

GridSpec grid_from_config(const RunConfig& cfg);

}  // namespace nullcone
