#pragma once

// Leading eigenpair of a strictly positive operator by power iteration.

#include "locid/linop.hpp"

namespace locid {

class CcapmModel;

struct EigenPair {
  double rho = 0.0;        // leading eigenvalue
  double delta = 0.0;      // 1 / rho
  GridFunction g;          // positive eigenfunction, ||g|| = 1
  GridFunction dual;       // positive eigenfunction of the adjoint, ||dual|| = 1
  double pairing = 0.0;    // <dual, g>
  double residual = 0.0;   // ||delta T g - g||
  double gap = 0.0;        // |rho_2| / rho
  bool gap_from_spectrum = false;  // full eigendecomposition vs iteration estimate
  std::size_t iterations = 0;
};

// T must map a space to itself with every action entry strictly positive.
EigenPair perron_frobenius(const LinearOperator& T, double tol = 1e-12, std::size_t max_iter = 100000);
// Transfer operator g -> E[R c'^{-gamma0} g(c') | c] of the consumption model.
EigenPair perron_frobenius(const CcapmModel& model, double tol = 1e-12, std::size_t max_iter = 100000);

}  // namespace locid
