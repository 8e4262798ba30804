#include "lpdr/contract.hpp"

#include "lpdr/complex_io.hpp"

namespace lpdr {

MatrixComplex<double> assemble(const MetricComplex& K, std::size_t max_simplices) {
  if (K.total_count() > max_simplices) {
    throw Error(ErrorCode::kSizeLimit, std::to_string(K.total_count()) + " simplices exceed the dense limit of " +
                                           std::to_string(max_simplices));
  }
  MatrixComplex<double> M;
  for (int k = 0; k <= K.dim(); ++k) M.dims.push_back(Eigen::Index(K.count(k)));
  for (int k = 0; k < K.dim(); ++k) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(M.dims[std::size_t(k + 1)], M.dims[std::size_t(k)]);
    const auto upper = K.simplices(k + 1);
    for (Index r = 0; r < upper.size(); ++r) {
      const Simplex& tau = upper[r];
      for (int i = 0; i < tau.size(); ++i) {
        D(Eigen::Index(r), Eigen::Index(K.require_index(tau.face(i)))) = i % 2 ? -1.0 : 1.0;
      }
    }
    M.D.push_back(std::move(D));
  }
  return M;
}

std::string write_matrix_complex(const MatrixComplex<double>& M) {
  std::string out;
  for (std::size_t i = 0; i < M.D.size(); ++i) {
    const auto& D = M.D[i];
    out += "D " + std::to_string(i) + " " + std::to_string(D.rows()) + " " + std::to_string(D.cols()) + "\n";
    for (Eigen::Index r = 0; r < D.rows(); ++r) {
      for (Eigen::Index c = 0; c < D.cols(); ++c) {
        if (c) out += ' ';
        out += format_real(D(r, c));
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace lpdr
