#pragma once

#include <vector>

#include "smc/grids.hpp"
#include "smc/specfun.hpp"

namespace smc::detail {

struct Ladder {
  std::vector<Complex> v;
  int valid = 0;  // usable orders are 0..valid-1
  const Complex* data() const { return v.data(); }
};

inline Ladder ladder_j(int n_max, Complex z) {
  Ladder l;
  l.v.resize(n_max + 1);
  specfun::sph_bessel_j_many(n_max, z, l.v.data());
  l.valid = n_max + 1;
  return l;
}

inline Ladder ladder_y(int n_max, Complex z) {
  Ladder l;
  l.v.resize(n_max + 1);
  l.valid = specfun::sph_bessel_y_many(n_max, z, l.v.data());
  return l;
}

inline Ladder ladder_h(int n_max, Complex z) {
  Ladder l;
  l.v.resize(n_max + 1);
  l.valid = specfun::sph_hankel1_many(n_max, z, l.v.data());
  return l;
}

}  // namespace smc::detail
