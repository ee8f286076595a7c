#ifndef DNSURF_ERROR_HPP
#define DNSURF_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dnsurf {

/// Failure categories raised by the library.
enum class errc {
  invalid_grid,
  near_zero_crossing,
  unreliable_winding,
  degenerate_parametrization,
  division_by_zero,
  not_an_embedding,
  ambiguous_response,
  xi_too_close,
  ill_conditioned_nodes,
  estimate_failure,
  root_failure,
  branch_collision,
  ill_posed_fiber,
  not_a_shock_trace,
  degenerate_discriminant,
  precondition,
  not_affine_decomposable,
  not_implemented,
  placement,
  resolution,
  parse,
  unknown_scenario,
};

inline const char* to_string(errc c) {
  switch (c) {
    case errc::invalid_grid: return "invalid-grid";
    case errc::near_zero_crossing: return "near-zero-crossing";
    case errc::unreliable_winding: return "unreliable-winding";
    case errc::degenerate_parametrization: return "degenerate-parametrization";
    case errc::division_by_zero: return "division-by-zero";
    case errc::not_an_embedding: return "not-an-embedding";
    case errc::ambiguous_response: return "ambiguous-response";
    case errc::xi_too_close: return "xi-too-close";
    case errc::ill_conditioned_nodes: return "ill-conditioned-nodes";
    case errc::estimate_failure: return "estimate-failure";
    case errc::root_failure: return "root-failure";
    case errc::branch_collision: return "branch-collision";
    case errc::ill_posed_fiber: return "ill-posed-fiber";
    case errc::not_a_shock_trace: return "not-a-shock-trace";
    case errc::degenerate_discriminant: return "degenerate-discriminant";
    case errc::precondition: return "precondition";
    case errc::not_affine_decomposable: return "not-affine-decomposable";
    case errc::not_implemented: return "not-implemented";
    case errc::placement: return "placement";
    case errc::resolution: return "resolution";
    case errc::parse: return "parse";
    case errc::unknown_scenario: return "unknown-scenario";
  }
  return "unknown";
}

/// Library exception. `detail` carries numeric context (indices, distances,
/// residuals) and `stage` names the pipeline step that raised it.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& message, std::vector<double> detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  errc code() const noexcept { return code_; }
  const std::vector<double>& detail() const noexcept { return detail_; }
  const std::string& stage() const noexcept { return stage_; }

  error with_stage(std::string stage) const {
    error e = *this;
    if (e.stage_.empty()) e.stage_ = std::move(stage);
    return e;
  }

 private:
  errc code_;
  std::vector<double> detail_;
  std::string stage_;
};

}  // namespace dnsurf

#endif
