#include "ryd/core/basis.hpp"

#include <algorithm>
#include <bit>

namespace ryd {

int BasisConfig::excitation_count() const { return std::popcount(bits); }

BasisConfig BasisConfig::flipped() const {
  const std::uint64_t all = n_sites == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_sites) - 1;
  return {bits ^ all, n_sites};
}

std::string BasisConfig::to_string() const {
  std::string s(n_sites, '0');
  for (int i = 0; i < n_sites; ++i)
    if (excited(i)) s[i] = '1';
  return s;
}

BasisConfig BasisConfig::from_string(std::string_view s) {
  BasisConfig c{0, static_cast<int>(s.size())};
  for (int i = 0; i < c.n_sites; ++i) {
    if (s[i] == '1') {
      c.bits |= mask(c.n_sites, i);
    } else if (s[i] != '0') {
      throw Error("config string must contain only 0 and 1: " + std::string(s));
    }
  }
  return c;
}

BasisConfig BasisConfig::from_sites(int n_sites, std::span<const int> excited_sites) {
  BasisConfig c{0, n_sites};
  for (int s : excited_sites) c.bits |= mask(n_sites, s);
  return c;
}

Index Basis::index(std::uint64_t b) const {
  if (mode_ == BasisMode::kFull) {
    return b < static_cast<std::uint64_t>(dim_) ? static_cast<Index>(b) : -1;
  }
  auto it = std::lower_bound(configs_.begin(), configs_.end(), b);
  if (it == configs_.end() || *it != b) return -1;
  return it - configs_.begin();
}

BasisPtr enumerate_basis(int n_sites, BasisMode mode, std::span<const Edge> adjacency, BasisLimits limits) {
  if (n_sites < 1) throw Error("basis needs at least one site");
  if (n_sites > 62) throw CapacityError("at most 62 sites are representable");

  auto basis = std::shared_ptr<Basis>(new Basis());
  basis->n_sites_ = n_sites;
  basis->mode_ = mode;

  if (mode == BasisMode::kFull) {
    if (n_sites > limits.max_full_sites) {
      throw CapacityError("full basis with " + std::to_string(n_sites) + " sites exceeds the cap of " +
                          std::to_string(limits.max_full_sites));
    }
    basis->dim_ = Index{1} << n_sites;
    basis->excitations_.resize(basis->dim_);
    for (Index k = 0; k < basis->dim_; ++k) basis->excitations_[k] = std::popcount(static_cast<std::uint64_t>(k));
    return basis;
  }

  // neighbours[i] holds the lower-indexed sites adjacent to i
  std::vector<std::uint64_t> earlier(n_sites, 0);
  for (const Edge& e : adjacency) {
    if (e.a < 0 || e.b < 0 || e.a >= n_sites || e.b >= n_sites || e.a == e.b) {
      throw Error("adjacency edge (" + std::to_string(e.a) + "," + std::to_string(e.b) + ") is invalid");
    }
    basis->edges_.push_back(e);
    const int hi = std::max(e.a, e.b), lo = std::min(e.a, e.b);
    earlier[hi] |= BasisConfig::mask(n_sites, lo);
  }

  // depth-first over sites 0..N-1, choosing 0 before 1, gives sorted output
  std::vector<std::uint64_t>& out = basis->configs_;
  auto recurse = [&](auto&& self, int site, std::uint64_t bits) -> void {
    if (site == n_sites) {
      if (static_cast<Index>(out.size()) >= limits.max_dim) {
        throw CapacityError("constrained basis exceeds the dimension cap of " + std::to_string(limits.max_dim));
      }
      out.push_back(bits);
      return;
    }
    self(self, site + 1, bits);
    if ((bits & earlier[site]) == 0) self(self, site + 1, bits | BasisConfig::mask(n_sites, site));
  };
  recurse(recurse, 0, 0);

  basis->dim_ = static_cast<Index>(out.size());
  basis->excitations_.resize(basis->dim_);
  basis->flips_.assign(basis->dim_ * n_sites, -1);
  for (Index k = 0; k < basis->dim_; ++k) {
    basis->excitations_[k] = std::popcount(out[k]);
    for (int s = 0; s < n_sites; ++s) basis->flips_[k * n_sites + s] = basis->index(out[k] ^ BasisConfig::mask(n_sites, s));
  }
  return basis;
}

}  // namespace ryd
