#pragma once

#include "wavecone/operators.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>

namespace wavecone {

enum class CertMode { certified_upper_bound, lattice_exhausted, analytic };

std::string to_string(CertMode mode);
CertMode cert_mode_from_string(const std::string& s);

struct EllSearchLog {
  std::uint64_t seed = 0;
  int lattice_height = 0;
  bool lattice_exhausted = false;
  std::uint64_t structured_candidates = 0;
  std::uint64_t lattice_candidates = 0;
  int descent_restarts = 0;
  int descent_accepted = 0;
};

// Certified value of ell_P: the minimum symbol-matrix rank over every vector
// examined, with the witness re-verified by an exact rational rank check.
struct EllCertificate {
  int value = 0;
  RationalVector witness;
  Subspace invariance;
  CertMode mode = CertMode::certified_upper_bound;
  EllSearchLog log;

  EllCertificate() : invariance(1) {}

  nlohmann::json to_json() const;
  static EllCertificate from_json(const nlohmann::json& j);
};

struct EllConfig {
  int lattice_height = 2;
  int random_samples = 50;
  int descent_restarts = 8;
  std::uint64_t seed = 0;
};

/// Minimal-rank search: structured candidates, then exhaustive projective
/// lattice enumeration when (2H+1)^dimE <= 1e7, then seeded singular-value
/// descents whose minimizers must survive exact rationalized rank checks.
EllCertificate ell(const FirstOrderOperator& op, const EllConfig& config = {});

/// Exact minimum of rank M(e) over the full integer lattice of the given
/// height, zero excluded, no reductions. Throws if (2H+1)^dimE > 1e7.
int ell_bruteforce_oracle(const FirstOrderOperator& op, int height);

}  // namespace wavecone
