#pragma once

// Independent cross-check constructions used by the test suite only.
//
// The library builds root systems abstractly (reflection closure over the
// Cartan matrix, roots stored as simple-root coefficient vectors).  To check
// that machinery against something with different failure modes, this header
// builds the same systems concretely in Euclidean coordinates from the
// textbook descriptions ("e_i - e_j" etc.) and exposes:
//
//   * the full (positive and negative) root list in integer coordinates
//     (everything is scaled by 2 so the half-integer roots of F4 stay exact),
//   * the simple roots in the same coordinates and numbering as the library,
//   * brute-force enumeration of every strongly orthogonal system of a
//     (small-rank) root system, for checking dominance claims exhaustively.

#include <algorithm>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "homflow/rootsys.hpp"

namespace homflow::testing {

using IntVec = std::vector<int>;

struct EuclidRoots {
  int dim = 0;                       // ambient dimension
  std::vector<IntVec> all;           // every root, scaled by 2
  std::vector<IntVec> simples;       // simple roots, library numbering, scaled by 2
  std::unordered_set<IntVec, VecHash> set;  // same contents as `all`
};

inline IntVec scaled_unit(int dim, int i, int c) {
  IntVec v(dim, 0);
  v[i] = c;
  return v;
}

inline IntVec vec_add(const IntVec& a, const IntVec& b) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline IntVec vec_sub(const IntVec& a, const IntVec& b) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline IntVec vec_neg(const IntVec& a) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

// Textbook realizations (Bourbaki numbering throughout, coordinates x2):
//   A_n in R^{n+1}:  e_i - e_j (i != j);          alpha_i = e_i - e_{i+1}
//   B_n in R^n:      +-e_i +-e_j (i<j), +-e_i;    alpha_n = e_n
//   C_n in R^n:      +-e_i +-e_j (i<j), +-2e_i;   alpha_n = 2 e_n
//   D_n in R^n:      +-e_i +-e_j (i<j);           alpha_n = e_{n-1} + e_n
//   F_4 in R^4:      +-e_i, +-e_i +-e_j, (+-e1 +-e2 +-e3 +-e4)/2
//   G_2 in R^3:      e_i - e_j (i != j), +-(2e_i - e_j - e_k)
// E_6..E_8 are deliberately omitted; the suite checks those against frozen
// highest-root vectors and cardinalities instead.
inline EuclidRoots euclid_roots(RootSystemType t) {
  EuclidRoots er;
  const int n = t.rank;
  auto push_pm_pairs = [&er](int dim, int scale) {
    // +-scale*e_i +- scale*e_j for i < j
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j)
        for (int si : {scale, -scale})
          for (int sj : {scale, -scale}) {
            IntVec v(dim, 0);
            v[i] = si;
            v[j] = sj;
            er.all.push_back(v);
          }
  };
  switch (t.family) {
    case RootFamily::A: {
      er.dim = n + 1;
      for (int i = 0; i < er.dim; ++i)
        for (int j = 0; j < er.dim; ++j)
          if (i != j) er.all.push_back(vec_sub(scaled_unit(er.dim, i, 2), scaled_unit(er.dim, j, 2)));
      for (int i = 0; i < n; ++i)
        er.simples.push_back(vec_sub(scaled_unit(er.dim, i, 2), scaled_unit(er.dim, i + 1, 2)));
      break;
    }
    case RootFamily::B: {
      er.dim = n;
      push_pm_pairs(n, 2);
      for (int i = 0; i < n; ++i)
        for (int s : {2, -2}) er.all.push_back(scaled_unit(n, i, s));
      for (int i = 0; i + 1 < n; ++i)
        er.simples.push_back(vec_sub(scaled_unit(n, i, 2), scaled_unit(n, i + 1, 2)));
      er.simples.push_back(scaled_unit(n, n - 1, 2));
      break;
    }
    case RootFamily::C: {
      er.dim = n;
      push_pm_pairs(n, 2);
      for (int i = 0; i < n; ++i)
        for (int s : {4, -4}) er.all.push_back(scaled_unit(n, i, s));
      for (int i = 0; i + 1 < n; ++i)
        er.simples.push_back(vec_sub(scaled_unit(n, i, 2), scaled_unit(n, i + 1, 2)));
      er.simples.push_back(scaled_unit(n, n - 1, 4));
      break;
    }
    case RootFamily::D: {
      er.dim = n;
      push_pm_pairs(n, 2);
      for (int i = 0; i + 1 < n; ++i)
        er.simples.push_back(vec_sub(scaled_unit(n, i, 2), scaled_unit(n, i + 1, 2)));
      er.simples.push_back(vec_add(scaled_unit(n, n - 2, 2), scaled_unit(n, n - 1, 2)));
      break;
    }
    case RootFamily::F: {
      er.dim = 4;
      push_pm_pairs(4, 2);
      for (int i = 0; i < 4; ++i)
        for (int s : {2, -2}) er.all.push_back(scaled_unit(4, i, s));
      for (int s0 : {1, -1})
        for (int s1 : {1, -1})
          for (int s2 : {1, -1})
            for (int s3 : {1, -1}) er.all.push_back(IntVec{s0, s1, s2, s3});
      er.simples = {
          vec_sub(scaled_unit(4, 1, 2), scaled_unit(4, 2, 2)),  // e2 - e3
          vec_sub(scaled_unit(4, 2, 2), scaled_unit(4, 3, 2)),  // e3 - e4
          scaled_unit(4, 3, 2),                                 // e4
          IntVec{1, -1, -1, -1},                                // (e1-e2-e3-e4)/2
      };
      break;
    }
    case RootFamily::G: {
      er.dim = 3;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (i != j) er.all.push_back(vec_sub(scaled_unit(3, i, 2), scaled_unit(3, j, 2)));
      for (int i = 0; i < 3; ++i) {
        IntVec v(3, -2);
        v[i] = 4;
        er.all.push_back(v);
        er.all.push_back(vec_neg(v));
      }
      er.simples = {IntVec{2, -2, 0}, IntVec{-4, 2, 2}};
      break;
    }
    case RootFamily::E:
      throw std::invalid_argument("euclid_roots: E-series not provided by this oracle");
  }
  er.set.insert(er.all.begin(), er.all.end());
  return er;
}

// Coefficient vector -> Euclidean coordinates (x2) through the simple roots.
inline IntVec to_euclid(const EuclidRoots& er, const RootCoeffs& c) {
  IntVec v(er.dim, 0);
  for (std::size_t i = 0; i < c.size(); ++i)
    for (int d = 0; d < er.dim; ++d) v[d] += c[i] * er.simples[i][d];
  return v;
}

inline long dot(const IntVec& a, const IntVec& b) {
  long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += long(a[i]) * b[i];
  return s;
}

// Strong orthogonality straight from the definition, in Euclidean coordinates.
inline bool euclid_strongly_orthogonal(const EuclidRoots& er, const IntVec& a, const IntVec& b) {
  return !er.set.count(vec_add(a, b)) && !er.set.count(vec_sub(a, b));
}

// Every nonempty strongly orthogonal system of `rs`, by plain backtracking
// over positive-root indices.  Exponential in general; fine for rank <= 4.
inline std::vector<StrongOrthSystem> all_strong_orth_systems(const RootSystem& rs) {
  const int m = int(rs.positive.size());
  std::vector<StrongOrthSystem> out;
  StrongOrthSystem cur;
  auto rec = [&](auto&& self, int start) -> void {
    for (int i = start; i < m; ++i) {
      bool ok = true;
      for (int j : cur)
        if (!strongly_orthogonal(rs, j, i)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      cur.push_back(i);
      out.push_back(cur);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

inline int total_height(const RootSystem& rs, const StrongOrthSystem& sys) {
  int h = 0;
  for (int i : sys) h += rs.height_of(i);
  return h;
}

}  // namespace homflow::testing
