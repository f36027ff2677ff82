#include "ryd/core/operator.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ryd {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void check_length(const BasisPtr& basis, Index n, const char* what) {
  if (n != basis->dim()) throw Error(std::string(what) + " length does not match the basis dimension");
}

}  // namespace

Operator Operator::diagonal(BasisPtr basis, Eigen::VectorXd values) {
  check_length(basis, values.size(), "diagonal");
  return Operator(std::move(basis), Diagonal{std::move(values)});
}

Operator Operator::sparse(BasisPtr basis, SparseMatrix matrix) {
  if (matrix.rows() != basis->dim() || matrix.cols() != basis->dim()) throw Error("sparse operator shape does not match the basis");
  matrix.makeCompressed();
  return Operator(std::move(basis), Sparse{std::move(matrix)});
}

Operator Operator::terms(BasisPtr basis, TermList terms) {
  check_length(basis, terms.diagonal.size(), "diagonal");
  if (terms.decay.size() != 0) {
    check_length(basis, terms.decay.size(), "decay");
    if ((terms.decay.array() < 0.0).any()) throw InvalidModelError("decay widths must be non-negative");
  }
  return Operator(std::move(basis), std::move(terms));
}

bool Operator::has_decay() const {
  const auto* t = std::get_if<TermList>(&rep_);
  return t != nullptr && t->decay.size() != 0 && t->decay.maxCoeff() > 0.0;
}

bool Operator::is_hermitian() const {
  if (has_decay()) return false;
  if (const auto* s = std::get_if<Sparse>(&rep_)) {
    const SparseMatrix diff = s->matrix - SparseMatrix(s->matrix.adjoint());
    double scale = 0.0;
    for (Index k = 0; k < s->matrix.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(s->matrix, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
    for (Index k = 0; k < diff.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(diff, k); it; ++it)
        if (std::abs(it.value()) > 1e-12 * std::max(1.0, scale)) return false;
  }
  return true;
}

void Operator::apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
  out.resize(in.size());
  std::visit(Overloaded{
                 [&](const Diagonal& d) { out = d.values.cast<Complex>().cwiseProduct(in); },
                 [&](const Sparse& s) { out.noalias() = s.matrix * in; },
                 [&](const TermList& t) {
                   const Basis& b = *basis_;
                   const int n = b.n_sites();
                   const Complex up = t.drive, down = std::conj(t.drive);
                   const bool decay = t.decay.size() != 0;
                   const bool drive = t.drive != Complex{};
                   if (b.mode() == BasisMode::kFull) {
                     // index == bits, so the flip partner is a plain xor
                     const double* x = reinterpret_cast<const double*>(in.data());
                     double* y = reinterpret_cast<double*>(out.data());
                     // real diagonal on interleaved re/im; avoids complex-by-complex products
                     Eigen::Map<Eigen::ArrayXXd>(y, 2, in.size()) =
                         Eigen::Map<const Eigen::ArrayXXd>(x, 2, in.size()).rowwise() * t.diagonal.transpose().array();
                     if (decay) {
                       // -i d (a + ib) = d b - i d a
                       Eigen::Map<const Eigen::ArrayXXd> xa(x, 2, in.size());
                       Eigen::Map<Eigen::ArrayXXd> ya(y, 2, in.size());
                       ya.row(0) += xa.row(1) * t.decay.transpose().array();
                       ya.row(1) -= xa.row(0) * t.decay.transpose().array();
                     }
                     if (!drive) return;
                     const bool real_drive = t.drive.imag() == 0.0;
                     // site masks are powers of two: blocks of length m pair with the next m entries
                     for (int s = 0; s < n; ++s) {
                       const Index m = static_cast<Index>(b.site_mask(s));
                       if (real_drive && m >= 4) {
                         const double a = t.drive.real();
                         Eigen::Map<const Eigen::ArrayXd> xs(x, 2 * in.size());
                         Eigen::Map<Eigen::ArrayXd> ys(y, 2 * in.size());
                         for (Index base = 0; base < in.size(); base += 2 * m) {
                           ys.segment(2 * base, 2 * m) += a * xs.segment(2 * (base + m), 2 * m);
                           ys.segment(2 * (base + m), 2 * m) += a * xs.segment(2 * base, 2 * m);
                         }
                         continue;
                       }
                       if (m >= 16) {
                         for (Index base = 0; base < in.size(); base += 2 * m) {
                           out.segment(base, m) += down * in.segment(base + m, m);
                           out.segment(base + m, m) += up * in.segment(base, m);
                         }
                         continue;
                       }
                       // short blocks: plain loop over interleaved re/im
                       if (real_drive) {
                         const double a = t.drive.real();
                         for (Index k = 0; k < in.size(); ++k) {
                           const Index j = k ^ m;
                           y[2 * k] += a * x[2 * j];
                           y[2 * k + 1] += a * x[2 * j + 1];
                         }
                         continue;
                       }
                       for (Index k = 0; k < in.size(); ++k) {
                         const Index j = k ^ m;
                         const Complex c = (k & m) ? up : down;
                         y[2 * k] += c.real() * x[2 * j] - c.imag() * x[2 * j + 1];
                         y[2 * k + 1] += c.real() * x[2 * j + 1] + c.imag() * x[2 * j];
                       }
                     }
                     return;
                   }
                   for (Index k = 0; k < in.size(); ++k) {
                     Complex acc = decay ? Complex(t.diagonal[k], -t.decay[k]) * in[k] : t.diagonal[k] * in[k];
                     if (drive) {
                       const std::uint64_t bits = b.bits(k);
                       for (int s = 0; s < n; ++s) {
                         const Index j = b.flip_site(k, s);
                         if (j < 0) continue;
                         // <k| (|r><m|) |j> is nonzero when site s is excited in k
                         acc += ((bits & b.site_mask(s)) ? up : down) * in[j];
                       }
                     }
                     out[k] = acc;
                   }
                 },
             },
             rep_);
}

Eigen::MatrixXcd Operator::dense() const {
  const Index d = dim();
  Eigen::MatrixXcd m(d, d);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(d), col;
  for (Index j = 0; j < d; ++j) {
    e[j] = 1.0;
    apply(e, col);
    m.col(j) = col;
    e[j] = 0.0;
  }
  return m;
}

double Operator::norm_bound() const {
  return std::visit(Overloaded{
                        [](const Diagonal& d) { return d.values.cwiseAbs().maxCoeff(); },
                        [](const Sparse& s) {
                          double best = 0.0;
                          for (Index k = 0; k < s.matrix.outerSize(); ++k) {
                            double row = 0.0;
                            for (SparseMatrix::InnerIterator it(s.matrix, k); it; ++it) row += std::abs(it.value());
                            best = std::max(best, row);
                          }
                          return best;
                        },
                        [&](const TermList& t) {
                          double diag = t.diagonal.cwiseAbs().maxCoeff();
                          if (t.decay.size() != 0) diag += t.decay.maxCoeff();
                          return diag + basis_->n_sites() * std::abs(t.drive);
                        },
                    },
                    rep_);
}

std::pair<double, double> Operator::spectral_interval() const {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  auto widen = [&](double centre, double radius) {
    lo = std::min(lo, centre - radius);
    hi = std::max(hi, centre + radius);
  };
  std::visit(Overloaded{
                 [&](const Diagonal& d) {
                   for (Index k = 0; k < d.values.size(); ++k) widen(d.values[k], 0.0);
                 },
                 [&](const Sparse& s) {
                   for (Index k = 0; k < s.matrix.outerSize(); ++k) {
                     double centre = 0.0, radius = 0.0;
                     for (SparseMatrix::InnerIterator it(s.matrix, k); it; ++it) {
                       if (it.col() == k)
                         centre = it.value().real();
                       else
                         radius += std::abs(it.value());
                     }
                     widen(centre, radius);
                   }
                 },
                 [&](const TermList& t) {
                   const Basis& b = *basis_;
                   const double a = std::abs(t.drive);
                   for (Index k = 0; k < b.dim(); ++k) {
                     int flips = 0;
                     if (a != 0.0)
                       for (int s = 0; s < b.n_sites(); ++s) flips += b.flip_site(k, s) >= 0;
                     widen(t.diagonal[k], a * flips);
                   }
                 },
             },
             rep_);
  return {lo, hi};
}

Operator number_operator(const BasisPtr& basis, int site) {
  Eigen::VectorXd v(basis->dim());
  for (Index k = 0; k < basis->dim(); ++k) v[k] = basis->excited(k, site) ? 1.0 : 0.0;
  return Operator::diagonal(basis, std::move(v));
}

Operator total_number_operator(const BasisPtr& basis) {
  Eigen::VectorXd v(basis->dim());
  for (Index k = 0; k < basis->dim(); ++k) v[k] = basis->excitations(k);
  return Operator::diagonal(basis, std::move(v));
}

Operator pair_number_operator(const BasisPtr& basis, int i, int j) {
  Eigen::VectorXd v(basis->dim());
  for (Index k = 0; k < basis->dim(); ++k) v[k] = (basis->excited(k, i) && basis->excited(k, j)) ? 1.0 : 0.0;
  return Operator::diagonal(basis, std::move(v));
}

Operator sigma_x_operator(const BasisPtr& basis, int site) {
  std::vector<Eigen::Triplet<Complex>> trips;
  for (Index k = 0; k < basis->dim(); ++k) {
    const Index j = basis->flip_site(k, site);
    if (j >= 0) trips.emplace_back(k, j, 1.0);
  }
  SparseMatrix m(basis->dim(), basis->dim());
  m.setFromTriplets(trips.begin(), trips.end());
  return Operator::sparse(basis, std::move(m));
}

double expectation(const StateVector& state, const Operator& observable) {
  if (state.basis != observable.basis() && (state.basis->dim() != observable.dim() || state.basis->n_sites() != observable.basis()->n_sites())) {
    throw Error("state and observable live on different bases");
  }
  const double norm2 = state.norm_squared();
  if (norm2 == 0.0) throw DegenerateStateError("expectation value of a zero-norm state");
  Eigen::VectorXcd o;
  observable.apply(state.amplitudes, o);
  const Complex v = state.amplitudes.dot(o) / norm2;
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real()))) {
    throw Error("observable expectation has an imaginary part; operator is not Hermitian");
  }
  return v.real();
}

}  // namespace ryd
