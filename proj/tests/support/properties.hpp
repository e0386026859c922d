#pragma once

// Property checks shared by the unit tests and the acceptance suite.

#include <functional>
#include <string>
#include <vector>

namespace spde::property {

struct Result {
    std::string name;
    bool pass = false;
    std::string detail;
};

Result adjoint_identity();
Result product_rule();
Result linearity();
Result restriction_identities();
Result determinism();
Result noise_moments();
Result parabolicity_monotonicity();
Result residual_contract();
Result oracle_equivalence();
Result stability_witness();
Result weight_identities();
Result extrapolation_annihilation();
Result correction_coefficients_exact();

/// Every check above, in declaration order.
std::vector<Result> run_all();

}  // namespace spde::property
