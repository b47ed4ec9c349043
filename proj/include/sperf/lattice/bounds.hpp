#pragma once

#include "sperf/exact/rational.hpp"

#include <map>
#include <optional>
#include <string>

namespace sperf {

// Upper bounds for the Hermite constant, stored as exact rationals.
// `pow_n` dominates gamma_n^n; `gamma` (when set) dominates gamma_n.
struct HermiteBound {
  unsigned n;
  Rat pow_n;
  std::optional<Rat> gamma;
  bool exact;
  std::string source;
};

class BoundsTable {
 public:
  static const BoundsTable& standard() {
    static const BoundsTable t;
    return t;
  }

  std::optional<HermiteBound> get(unsigned n) const {
    auto it = entries_.find(n);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  const HermiteBound& at(unsigned n) const {
    auto it = entries_.find(n);
    if (it == entries_.end()) throw std::out_of_range("no Hermite bound stored for dimension " + std::to_string(n));
    return it->second;
  }

  // gamma_12 <= 2522/1000
  static Rat gamma12() { return make_rat(2522, 1000); }
  static Rat gamma11() { return make_rat(239, 100); }

 private:
  BoundsTable() {
    auto exact = [&](unsigned n, Rat p) { entries_[n] = {n, p, std::nullopt, true, "exact value (Korkine-Zolotarev, Blichfeldt, Watson)"}; };
    exact(1, Rat(1));
    exact(2, make_rat(4, 3));
    exact(3, Rat(2));
    exact(4, Rat(4));
    exact(5, Rat(8));
    exact(6, make_rat(64, 3));
    exact(7, Rat(64));
    exact(8, Rat(256));
    auto upper = [&](unsigned n, Rat g, const char* src) {
      entries_[n] = {n, rat_pow(g, n), g, false, src};
    };
    upper(9, make_rat(2241, 1000), "Blichfeldt bound, rounded up");
    upper(10, make_rat(2374, 1000), "Blichfeldt bound, rounded up");
    upper(11, gamma11(), "Cohn-Elkies linear programming bound");
    upper(12, gamma12(), "Cohn-Elkies linear programming bound");
    entries_[24] = {24, rat_pow(Rat(4), 24), Rat(4), true, "exact value (Cohn-Kumar)"};
  }
  std::map<unsigned, HermiteBound> entries_;
};

}  // namespace sperf
