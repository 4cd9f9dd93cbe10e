#pragma once

// Multi-bus network: reduced susceptance blocks, device block, absorption of
// the extra bus and the closed-loop admittance seen by the retained buses.

#include <optional>
#include <vector>

#include "formidex/converter.hpp"
#include "formidex/tfcore.hpp"

namespace formidex {

struct Branch {
  int from = 0;
  int to = 0;
  double l_pu = 0.0;
};

struct DeviceEntry {
  int bus = 0;
  ConverterSpec spec;
};

struct NetworkCase {
  double omega0 = kDefaultOmega0;
  double tau = 0.1;
  std::vector<int> buses;
  std::vector<Branch> branches;
  /// One per retained bus.
  std::vector<DeviceEntry> devices;
  std::vector<int> retained;
  std::optional<DeviceEntry> extra;

  std::size_t n() const { return retained.size(); }
  const DeviceEntry& device_at(int bus) const;
  /// Retained buses followed by the extra bus when present.
  std::vector<int> output_buses() const;
  /// Structural checks (ids, duplicates, connectivity). Throws ConfigError.
  void validate() const;
};

/// Merges parallel branches (admittances add) and orders each pair.
std::vector<Branch> merge_parallel(const std::vector<Branch>& branches);

struct SusceptanceBlocks {
  /// Over retained buses then the extra bus.
  RMatrix b;
  RMatrix b1;
  Eigen::VectorXd b2;
  Eigen::RowVectorXd b3;
  double b4 = 0.0;
  bool has_extra = false;
};

/// Weighted Laplacian (weights 1/l_pu) reduced onto retained + extra buses
/// by a Schur complement.
SusceptanceBlocks build_susceptance(const NetworkCase& c);

struct Absorbed {
  CMatrix b_net;
  CMatrix y_net;
  /// Extra device sensitivity at l_g = 1/B4; identity when absent.
  Mat2 s_v = Mat2::Identity();
};

/// Relative (Frobenius) tolerance on the agreement of the two absorbed forms.
inline constexpr double kDualFormRtol = 1e-9;

/// Absorbs the extra bus. Evaluates both the direct Kron form and the
/// sensitivity-factored form, returns the factored one and throws
/// NumericalError("dual-form mismatch ...") if they disagree.
Absorbed absorb_device(const SusceptanceBlocks& blocks, const AdmittanceModel* y_extra, Complex s,
                       double tau, double omega0);

/// Immutable evaluator built from a validated case.
class Network {
 public:
  explicit Network(NetworkCase c);

  /// Network given directly by its reduced blocks (b1, and b2/b3/b4 when
  /// has_extra). Buses are numbered 1..n, the extra bus n+1.
  static Network from_blocks(SusceptanceBlocks blocks, std::vector<AdmittanceModel> devices,
                             std::optional<AdmittanceModel> extra, double tau,
                             double omega0 = kDefaultOmega0);

  const NetworkCase& network_case() const { return case_; }
  const SusceptanceBlocks& blocks() const { return blocks_; }
  std::size_t n() const { return case_.n(); }
  bool has_extra() const { return blocks_.has_extra; }
  const std::vector<AdmittanceModel>& devices() const { return devices_; }
  const AdmittanceModel* extra() const { return extra_ ? &*extra_ : nullptr; }

  /// Block-diagonal device admittance over retained buses.
  CMatrix device_block(Complex s) const;
  Absorbed absorb(Complex s) const;
  CMatrix closed_loop(Complex s) const;
  /// Unreduced (n+1)-bus system Y_de + B (x) Z^-1 over output_buses().
  CMatrix full_system(Complex s) const;
  Mat2 z_inverse(Complex s) const { return eval_z_inverse(s, case_.tau, case_.omega0); }

  /// Same network with branch weights and device admittances scaled by c.
  Network scaled(double c) const;

 private:
  Network(NetworkCase c, SusceptanceBlocks blocks, std::vector<AdmittanceModel> devices,
          std::optional<AdmittanceModel> extra);

  NetworkCase case_;
  SusceptanceBlocks blocks_;
  std::vector<AdmittanceModel> devices_;
  std::optional<AdmittanceModel> extra_;
};

}  // namespace formidex
