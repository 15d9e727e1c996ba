#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "spinsim/config.hpp"

namespace spinsim {

struct ValidationItem {
  std::string check;
  std::string qubit;
  std::string gate;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  /// Reported but not part of the overall verdict (e.g. the HY E_z scan).
  bool asserted = true;
  std::string note;
};

struct ValidationReport {
  CalibrationReport calibration;
  std::vector<ValidationItem> items;

  bool ok() const;
};

/// Worst ideal (square-pulse, table_literal) fidelity over the theta grid.
double worst_ideal_fidelity(const SimulationContext& ctx, QubitKind qubit, GateKind gate,
                            const std::vector<double>& thetas);

/// Largest trace distance between logical and full-space evolution, and the
/// largest full-space leakage, over `points` random (gate, theta, tau) draws.
struct OracleSummary {
  double max_trace_distance = 0.0;
  double max_leakage = 0.0;
  std::size_t points = 0;
};
OracleSummary oracle_equivalence(const SimulationContext& ctx, QubitKind qubit, std::size_t points,
                                 std::uint64_t seed);

/// Sign calibration, leakage of every ST/HY step Hamiltonian, oracle
/// equivalence, ideal fidelity of all six gates and the HY E_z scan.
ValidationReport run_validation(const RunConfig& config, std::size_t oracle_points = 20);

/// check,qubit,gate,value,threshold,passed,asserted,note
void write_validation_csv(std::ostream& out, const ValidationReport& report);

}  // namespace spinsim
