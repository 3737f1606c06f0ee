#pragma once

#include "loopmaps/loop_algebra.hpp"

namespace loopmaps {

enum class IwasawaMethod {
  kCholesky,  ///< Cholesky of the block Toeplitz Gram matrix T_N(gamma^* gamma)
  kQR,        ///< Householder QR of the multiplication-by-gamma operator
};

struct IwasawaOptions {
  IwasawaMethod method = IwasawaMethod::kCholesky;
  /// Half-width M of the output loops; <= 0 means "use gamma.trunc()".
  int trunc = 0;
  /// Plus-window N (columns lambda^j e_i, 0 <= j <= N); <= 0 means 2M.
  int plus_window = 0;
  /// Round-trip, unitarity, basedness and purity are all checked against this.
  double tol = 1e-8;
  /// How many times the plus-window may be doubled before giving up.
  int max_doublings = 1;
};

struct IwasawaDiagnostics {
  double round_trip = 0.0;   ///< sup over S^1 samples of ||gamma - Phi b||_F
  double unitarity = 0.0;    ///< sup over S^1 samples of ||Phi^* Phi - I||_F
  double basedness = 0.0;    ///< ||Phi(1) - I||_F
  double purity = 0.0;       ///< largest negative-frequency coefficient of b
  int plus_window = 0;       ///< N actually used
};

struct IwasawaFactors {
  LaurentLoop phi;  ///< based, unitary on S^1
  LaurentLoop b;    ///< plus loop (frequencies >= 0)
  IwasawaDiagnostics diagnostics;
};

/// gamma = Phi b with Phi in Omega U(n) and b in Lambda_+ GL(n,C).
/// Throws FactorizationError when gamma is singular on S^1 and TruncationError
/// when the diagnostics stay above opts.tol after the allowed doublings.
IwasawaFactors iwasawa_factorize(const LaurentLoop& gamma, const IwasawaOptions& opts = {});

/// Block Toeplitz matrix with block (i, j) = F_{i-j}, F = gamma^* gamma on S^1,
/// for 0 <= i, j <= N. Exposed for tests.
ComplexMatrix gram_toeplitz(const LaurentLoop& gamma, int plus_window);

/// Matrix of multiplication by gamma from span{lambda^j e_i : 0 <= j <= N}
/// to frequencies kmin..kmax+N. Exposed for tests.
ComplexMatrix multiplication_matrix(const LaurentLoop& gamma, int plus_window);

}  // namespace loopmaps
