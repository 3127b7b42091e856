#pragma once

#include "tocq/numerics.hpp"

#include <algorithm>
#include <string_view>
#include <vector>

namespace tocq {

enum class FidelityMethod { TraceFormula, AvgFromChoi, State };

inline std::string_view to_string(FidelityMethod m) {
  switch (m) {
    case FidelityMethod::TraceFormula: return "trace_formula";
    case FidelityMethod::AvgFromChoi: return "avg_from_choi";
    case FidelityMethod::State: return "state";
  }
  return "?";
}

struct FidelityReport {
  double value = 0.0;  // raw, unclipped
  FidelityMethod method = FidelityMethod::TraceFormula;
  double leakage = 0.0;
  double process = 0.0;  // process (entanglement) fidelity where applicable

  double clipped() const { return std::clamp(value, 0.0, 1.0); }
};

/// |Tr(U_ideal^dag U_actual)| / d
inline FidelityReport gate_fidelity_trace(const CMatrix& u_ideal, const CMatrix& u_actual) {
  if (u_ideal.rows() != u_actual.rows() || u_ideal.cols() != u_actual.cols())
    throw std::invalid_argument("gate_fidelity_trace: dimension mismatch");
  const double d = static_cast<double>(u_ideal.rows());
  const double f = std::abs((u_ideal.adjoint() * u_actual).trace()) / d;
  return {f, FidelityMethod::TraceFormula, 0.0, f * f};
}

/// Choi matrix of rho -> U rho U^dag in the block convention
/// choi(k d + i, l d + j) = <i| U |k><l| U^dag |j>.
inline CMatrix unitary_choi(const CMatrix& u) {
  const Eigen::Index d = u.rows();
  CVector v(d * d);
  for (Eigen::Index k = 0; k < d; ++k) v.segment(k * d, d) = u.col(k);
  return v * v.adjoint();
}

/// F_pro = Tr(Choi_ideal Choi) / d^2, F_avg = (d F_pro + 1) / (d + 1),
/// leakage = (d - Tr Choi) / d.
inline FidelityReport avg_gate_fidelity_from_choi(const CMatrix& choi, const CMatrix& u_ideal, Eigen::Index d) {
  if (choi.rows() != d * d || choi.cols() != d * d || u_ideal.rows() != d)
    throw std::invalid_argument("avg_gate_fidelity_from_choi: dimension mismatch");
  const double dd = static_cast<double>(d);
  const double f_pro = (unitary_choi(u_ideal) * choi).trace().real() / (dd * dd);
  const double leak = (dd - choi.trace().real()) / dd;
  return {(dd * f_pro + 1.0) / (dd + 1.0), FidelityMethod::AvgFromChoi, leak, f_pro};
}

/// <psi| rho |psi>
inline double state_fidelity(const CMatrix& rho, const CVector& psi) {
  if (rho.rows() != psi.size()) throw std::invalid_argument("state_fidelity: dimension mismatch");
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

struct Populations {
  std::vector<double> values;
  double residual = 0.0;  // 1 - sum, population outside the listed kets
};

inline Populations populations(const CMatrix& rho, const std::vector<CVector>& kets) {
  Populations p;
  double sum = 0.0;
  for (const auto& k : kets) {
    p.values.push_back(state_fidelity(rho, k));
    sum += p.values.back();
  }
  p.residual = 1.0 - sum;
  return p;
}

/// Dominant Kraus operator of a Choi matrix, projected to the nearest unitary
/// (polar factor). Used to evaluate the trace formula on a noisy channel.
inline CMatrix leading_unitary_fit(const CMatrix& choi, Eigen::Index d) {
  if (choi.rows() != d * d) throw std::invalid_argument("leading_unitary_fit: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (choi + choi.adjoint()));
  const CVector top = es.eigenvectors().col(d * d - 1);
  CMatrix k(d, d);
  for (Eigen::Index col = 0; col < d; ++col) k.col(col) = top.segment(col * d, d);
  Eigen::JacobiSVD<CMatrix> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace tocq
