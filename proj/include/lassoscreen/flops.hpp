#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lassoscreen/core.hpp"

namespace lassoscreen {

/// Accounted primitives of the solver. The cost model below counts a
/// multiply-add as 2 FLOPs and assigns small fixed constants to scalar
/// bookkeeping; it is applied identically to every solver variant so that
/// budgeted comparisons stay fair.
enum class FlopEventKind {
  inner_product,        // dot product / squared norm of the given length
  residual,             // y - A x over k alive atoms
  gradient,             // A^T rho over k alive atoms
  prox,                 // soft threshold over k entries
  dual_scaling,         // A^T rho plus the feasibility rescaling
  sphere_screen_atom,   // one sphere test: <a, c> plus scalar work
  dome_screen_atom,     // one dome test: <a, c>, <a, g> plus scalar work
  dome_screen_setup,    // <g, c>, shared by every atom tested against a dome
  region_construction,  // assembling the region from (x, u)
  momentum_update,      // FISTA scalar recurrence
};

/// Event with its size parameters; unused dimensions are zero.
struct FlopEvent {
  FlopEventKind kind;
  Index m = 0;  // vector length / row count
  Index k = 0;  // alive atom count
};

/// Deterministic integer cost of one event under the documented model.
inline std::uint64_t flop_cost(const FlopEvent& e) {
  const auto m = static_cast<std::uint64_t>(e.m);
  const auto k = static_cast<std::uint64_t>(e.k);
  switch (e.kind) {
    case FlopEventKind::inner_product: return 2 * m;
    case FlopEventKind::residual: return 2 * m * k;
    case FlopEventKind::gradient: return 2 * m * k;
    case FlopEventKind::prox: return 3 * k;
    case FlopEventKind::dual_scaling: return 2 * m * k + 2 * m;
    case FlopEventKind::sphere_screen_atom: return 2 * m + 4;
    case FlopEventKind::dome_screen_atom: return 4 * m + 20;
    case FlopEventKind::dome_screen_setup: return 2 * m;
    case FlopEventKind::region_construction: return 4 * m;
    case FlopEventKind::momentum_update: return 8;
  }
  throw std::invalid_argument("flop_cost: unknown event kind");
}

/// Running total of charged events, optionally logging each event so tests
/// can re-sum the costs and check exact agreement.
struct FlopCounter {
  std::uint64_t total = 0;
  std::vector<FlopEvent>* log = nullptr;

  void charge(const FlopEvent& e) {
    total += flop_cost(e);
    if (log) log->push_back(e);
  }
};

}  // namespace lassoscreen
