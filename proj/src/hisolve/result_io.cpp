#include "hics/hisolve.hpp"
#include "hics/operator_io.hpp"

namespace hics {

using nlohmann::json;

template <typename Scalar>
json solver_result_to_json(const SolverResult<Scalar>& r, bool include_estimate) {
  json j{{"iterations", r.iterations},
         {"converged", r.converged},
         {"stop_reason", to_string(r.stop_reason)},
         {"residual_history", r.residual_history},
         {"warnings", r.warnings},
         {"field", to_string(field_of<Scalar>())},
         {"blocks", {r.estimate.block_count(), r.estimate.block_len()}}};
  if (include_estimate) {
    j["estimate"] = vector_to_json<Scalar>(r.estimate.data());
  }
  if (!r.support_history.empty()) {
    json hist = json::array();
    for (const auto& s : r.support_history) {
      hist.push_back(support_to_json(s));
    }
    j["support_history"] = std::move(hist);
  }
  return j;
}

json demix_result_to_json(const DemixResult& r, bool include_estimate) {
  json j{{"iterations", r.iterations},
         {"converged", r.converged},
         {"stop_reason", to_string(r.stop_reason)},
         {"residual_history", r.residual_history},
         {"warnings", r.warnings},
         {"active_blocks", r.estimate.nonzero_blocks()}};
  if (include_estimate) {
    json blocks = json::array();
    for (const auto& b : r.estimate.blocks) {
      // column-major entries
      const Eigen::Map<const Eigen::VectorXcd> flat(b.data(), b.size());
      blocks.push_back(vector_to_json<cplx>(flat));
    }
    j["estimate"] = {{"shape", {r.estimate.block_count(), r.estimate.rows(), r.estimate.cols()}},
                     {"blocks", std::move(blocks)}};
  }
  return j;
}

json guarantee_to_json(const GuaranteeConstants& g) {
  json j{{"algorithm", to_string(g.algorithm)},
         {"rho", g.rho},
         {"applicable", g.applicable},
         {"delta_threshold", g.delta_threshold}};
  // JSON has no infinity; leave tau null when the guarantee does not apply.
  j["tau"] = g.applicable ? json(g.tau) : json(nullptr);
  if (g.algorithm == GuaranteeAlgorithm::hihtp) {
    j["rho_squared_reading"] = std::isfinite(g.rho_squared_reading) ? json(g.rho_squared_reading) : json(nullptr);
  }
  if (!std::isfinite(g.rho)) {
    j["rho"] = nullptr;
  }
  return j;
}

template json solver_result_to_json<double>(const SolverResult<double>&, bool);
template json solver_result_to_json<cplx>(const SolverResult<cplx>&, bool);

}  // namespace hics
