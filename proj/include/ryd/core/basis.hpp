#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ryd/core/types.hpp"

namespace ryd {

// Occupation string over {m, r}. Site 0 is the most significant bit of
// `bits`, so numeric order of `bits` equals lexicographic order of the
// printed string "s0 s1 ... s(N-1)".
struct BasisConfig {
  std::uint64_t bits = 0;
  int n_sites = 0;

  static std::uint64_t mask(int n_sites, int site) { return std::uint64_t{1} << (n_sites - 1 - site); }

  bool excited(int site) const { return (bits & mask(n_sites, site)) != 0; }
  int excitation_count() const;
  BasisConfig flipped() const;
  std::string to_string() const;

  static BasisConfig from_string(std::string_view s);
  static BasisConfig from_sites(int n_sites, std::span<const int> excited_sites);

  friend bool operator==(const BasisConfig&, const BasisConfig&) = default;
};

enum class BasisMode { kFull, kConstrained };

struct Edge {
  int a = 0;
  int b = 0;
};

struct BasisLimits {
  int max_full_sites = 22;
  Index max_dim = Index{1} << 22;
};

class Basis {
 public:
  int n_sites() const { return n_sites_; }
  BasisMode mode() const { return mode_; }
  Index dim() const { return dim_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::uint64_t bits(Index k) const { return mode_ == BasisMode::kFull ? static_cast<std::uint64_t>(k) : configs_[k]; }
  BasisConfig config(Index k) const { return {bits(k), n_sites_}; }
  std::uint64_t site_mask(int site) const { return BasisConfig::mask(n_sites_, site); }
  bool excited(Index k, int site) const { return (bits(k) & site_mask(site)) != 0; }
  int excitations(Index k) const { return excitations_[k]; }

  // -1 when the config is not part of the basis.
  Index index(std::uint64_t bits) const;
  Index index(const BasisConfig& c) const { return index(c.bits); }

  // Index of the config with `site` toggled, or -1 if that config is excluded.
  Index flip_site(Index k, int site) const {
    if (mode_ == BasisMode::kFull) return k ^ static_cast<Index>(site_mask(site));
    return flips_[k * n_sites_ + site];
  }

  std::string mode_name() const { return mode_ == BasisMode::kFull ? "full" : "constrained"; }

 private:
  friend std::shared_ptr<const Basis> enumerate_basis(int, BasisMode, std::span<const Edge>, BasisLimits);
  Basis() = default;

  int n_sites_ = 0;
  BasisMode mode_ = BasisMode::kFull;
  Index dim_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint64_t> configs_;
  std::vector<Index> flips_;
  std::vector<int> excitations_;
};

using BasisPtr = std::shared_ptr<const Basis>;

BasisPtr enumerate_basis(int n_sites, BasisMode mode, std::span<const Edge> adjacency = {}, BasisLimits limits = {});

inline BasisPtr full_basis(int n_sites, BasisLimits limits = {}) {
  return enumerate_basis(n_sites, BasisMode::kFull, {}, limits);
}

}  // namespace ryd
