#pragma once

#include "buckle/common.hpp"
#include "buckle/matio.hpp"

namespace buckle {

/// Dense working copy of a problem bundle.
struct Pencil {
  Matrix k;
  Matrix kg;
  Matrix zn;  // n x (dim N(K) - n3)
  Matrix zc;  // n x n3

  Index size() const { return k.rows(); }

  static Pencil from_bundle(const ProblemBundle& b) {
    const Index n = b.size();
    Pencil p{b.k.to_dense(), b.kg.to_dense(), b.zn.columns, b.zc.columns};
    if (p.zn.size() == 0) p.zn = Matrix(n, 0);
    if (p.zc.size() == 0) p.zc = Matrix(n, 0);
    return p;
  }

  ProblemBundle to_bundle() const {
    ProblemBundle b;
    b.k = SymMatrix::from_dense(k, "K");
    b.kg = SymMatrix::from_dense(kg, "KG");
    b.zn.columns = zn;
    b.zc.columns = zc;
    return b;
  }
};

}  // namespace buckle
