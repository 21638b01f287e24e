#include "sphererig/report_json.hpp"

#include <cmath>

#include "json.hpp"

namespace sphererig {

namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json matrix(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({number(m(r, 0)), number(m(r, 1)), number(m(r, 2))});
  return rows;
}

json transform(const std::optional<MoebiusTransform>& t) {
  return t ? json(t->to_line()) : json(nullptr);
}

}  // namespace

std::string report_to_json(const RigidityReport& r, int indent) {
  json j;
  j["schema"] = "sphererig.report/1";
  j["status"] = to_string(r.status);
  j["message"] = r.message;
  j["degree"] = number(r.degree);
  j["reflected"] = r.reflected;
  j["deficit"] = number(r.deficit);
  j["lhs"] = number(r.lhs);
  j["ratio"] = r.ratio ? number(*r.ratio) : json(nullptr);
  j["detA"] = r.polar ? number(r.polar->detA) : number(r.A.determinant());
  j["Lambda_sq"] = r.polar ? number(r.polar->Lambda_sq) : json(nullptr);
  j["lambda_sum"] = r.polar ? number(r.polar->lambda_sum) : json(nullptr);
  j["alpha"] = r.polar ? json{r.polar->alpha[0], r.polar->alpha[1], r.polar->alpha[2]}
                       : json(nullptr);
  j["A"] = matrix(r.A);
  j["R0"] = r.polar ? matrix(r.polar->R0) : json(nullptr);
  j["qv3"] = number(r.qv3);
  j["cubic"] = number(r.cubic);
  j["w_norm_sq"] = number(r.w_norm_sq);
  j["wente_rhs"] = number(r.wente_rhs);
  j["identity_residual"] = number(r.identity_residual);
  j["poincare_lhs"] = number(r.poincare_lhs);
  j["poincare_bound"] = number(r.poincare_bound);
  j["closeness"] = number(r.closeness);
  j["closeness_raw"] = number(r.closeness_raw);
  j["in_gate"] = r.in_gate;
  j["trivial_bound"] = r.trivial_bound;
  j["regime"] = r.regime;
  j["certified"] = r.certified;
  j["centering_residual"] = number(r.centering_residual);
  j["centering_iterations"] = r.centering_iterations;
  j["centered_deficit"] = number(r.centered_deficit);
  j["psi"] = transform(r.psi);
  j["phi"] = transform(r.phi);
  j["phi_opt"] = transform(r.phi_opt);
  j["lhs_opt"] = number(r.lhs_opt);
  j["theta"] = r.theta;
  j["c1"] = r.c1;
  j["c"] = r.c;
  return j.dump(indent);
}

}  // namespace sphererig
