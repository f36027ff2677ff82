#pragma once

#include <utility>
#include <variant>

#include <Eigen/SparseCore>

#include "ryd/core/state.hpp"

namespace ryd {

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

// Matrix-free Rydberg-type operator:
//   sum_k diagonal_k |k><k| - i sum_k decay_k |k><k|
//   + sum_i (drive |r><m|_i + conj(drive) |m><r|_i)
// With drive = (Omega/2) e^{i phi} this is the usual global Rabi drive.
struct TermList {
  Eigen::VectorXd diagonal;
  Complex drive{0.0, 0.0};
  Eigen::VectorXd decay;  // empty or length dim; non-negative half widths
};

class Operator {
 public:
  struct Diagonal {
    Eigen::VectorXd values;
  };
  struct Sparse {
    SparseMatrix matrix;
  };

  static Operator diagonal(BasisPtr basis, Eigen::VectorXd values);
  static Operator sparse(BasisPtr basis, SparseMatrix matrix);
  static Operator terms(BasisPtr basis, TermList terms);

  const BasisPtr& basis() const { return basis_; }
  Index dim() const { return basis_->dim(); }

  // False only for term lists carrying an explicit anti-Hermitian decay part.
  bool is_hermitian() const;
  bool has_decay() const;

  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  Eigen::MatrixXcd dense() const;

  // Upper bound on the spectral radius, used for step-size heuristics.
  double norm_bound() const;
  // Gershgorin interval containing the spectrum of a Hermitian operator.
  std::pair<double, double> spectral_interval() const;

  const std::variant<Diagonal, Sparse, TermList>& representation() const { return rep_; }

 private:
  Operator(BasisPtr basis, std::variant<Diagonal, Sparse, TermList> rep) : basis_(std::move(basis)), rep_(std::move(rep)) {}

  BasisPtr basis_;
  std::variant<Diagonal, Sparse, TermList> rep_;
};

Operator number_operator(const BasisPtr& basis, int site);
Operator total_number_operator(const BasisPtr& basis);
Operator pair_number_operator(const BasisPtr& basis, int i, int j);
Operator sigma_x_operator(const BasisPtr& basis, int site);

// <psi|O|psi> / <psi|psi>
double expectation(const StateVector& state, const Operator& observable);

}  // namespace ryd
