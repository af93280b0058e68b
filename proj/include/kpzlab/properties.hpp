#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kpzlab/hirota.hpp"
#include "kpzlab/lax_zc.hpp"

namespace kpz {

struct PropertyResult {
  std::string name;
  long instances = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// A positive random field given through exact Taylor jets at every lattice
// offset. RBM jets are smooth in (t, a); TASEP jets are smooth in t with a
// discrete; Parallel jets are constants.
JetField random_jet_field(EquationId eq, std::uint64_t seed);

// Checks [M, Mbar] = prefactor * (K' - K) e^{-d_n} and that no other shift
// survives.
PropertyResult check_zc_identity(EquationId eq, int instances, std::uint64_t seed, double tol = 1e-10);

PropertyResult check_cyclicity(int instances, std::uint64_t seed, double tol = 1e-10);
PropertyResult check_parameter_differentiation(int instances, std::uint64_t seed, double tol = 1e-6);
PropertyResult check_rank_one_perturbation(int instances, std::uint64_t seed, double tol = 1e-10);
PropertyResult check_rank_one_resolvent(int instances, std::uint64_t seed, double tol = 1e-10);

// Raising/lowering and time flows of the basis functions of every model.
PropertyResult check_flow_identities(int instances, std::uint64_t seed, double tol = 1e-10);

// D^k f.f = 0 for odd k on random smooth fields.
PropertyResult check_odd_annihilation(int instances, std::uint64_t seed, double tol = 1e-12);

// Ensembles drawn with one and with several threads are bit-identical.
PropertyResult check_seed_determinism(std::uint64_t seed, long runs = 200, int threads = 8);

std::vector<PropertyResult> run_property_suite(std::uint64_t seed, int instances = 100);

}  // namespace kpz
